#pragma once

#include "linamp/gaussian_state.hpp"
#include "linamp/rng.hpp"
#include "linamp/symplectic.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace linamp {

/// What was measured and what came out; rng_seed identifies the stream that
/// produced the outcomes (0 when outcomes were supplied, not sampled).
struct MeasurementRecord {
    std::vector<int> modes;
    std::vector<double> angles;
    std::vector<double> outcomes;
    std::uint64_t rng_seed = 0;
};

struct QuadratureStats {
    double mean = 0.0;
    double variance = 0.0;
};

/// Marginal statistics of the rotated quadrature x cos(angle) + p sin(angle).
inline QuadratureStats homodyne_stats(const GaussianState& state, int mode, double angle) {
    state.check_mode(mode);
    Eigen::Vector2d c(std::cos(angle), std::sin(angle));
    return QuadratureStats{c.dot(state.mode_mean(mode)), c.dot(state.mode_cov(mode) * c)};
}

namespace detail {

/// Index list with the measured mode's quadrature pair removed.
inline std::vector<int> rest_indices(int n_modes, int mode) {
    std::vector<int> idx;
    idx.reserve(2 * (n_modes - 1));
    for (int m = 0; m < n_modes; ++m) {
        if (m == mode) continue;
        idx.push_back(x_index(m));
        idx.push_back(p_index(m));
    }
    return idx;
}

}  // namespace detail

/// Posterior Gaussian state after observing `outcome` on the rotated
/// quadrature of `mode`. The measured mode is removed; the others keep their
/// relative order. A (near-)deterministic quadrature yields no update.
inline GaussianState condition_on_quadrature(const GaussianState& state, int mode, double angle,
                                             double outcome) {
    state.check_mode(mode);
    if (state.n_modes() < 2)
        throw std::invalid_argument("condition_on_quadrature: nothing remains after measuring the only mode");
    Eigen::Vector2d c(std::cos(angle), std::sin(angle));
    auto idx = detail::rest_indices(state.n_modes(), mode);
    int nr = static_cast<int>(idx.size());

    Vec mu_rest(nr);
    Mat sigma_rest(nr, nr);
    Vec cross(nr);
    for (int a = 0; a < nr; ++a) {
        mu_rest(a) = state.mean()(idx[a]);
        cross(a) = c(0) * state.cov()(idx[a], x_index(mode)) + c(1) * state.cov()(idx[a], p_index(mode));
        for (int b = 0; b < nr; ++b) sigma_rest(a, b) = state.cov()(idx[a], idx[b]);
    }
    double var_q = c.dot(state.mode_cov(mode) * c);
    double mu_q = c.dot(state.mode_mean(mode));
    if (var_q > 1e-12) {
        mu_rest += cross * ((outcome - mu_q) / var_q);
        sigma_rest -= (cross * cross.transpose()) / var_q;
    }
    return GaussianState(std::move(mu_rest), std::move(sigma_rest));
}

struct HomodyneResult {
    double outcome = 0.0;
    GaussianState conditional;
    MeasurementRecord record;
};

/// Sample a homodyne outcome on one mode and collapse the rest accordingly.
inline HomodyneResult homodyne_sample(const GaussianState& state, int mode, double angle, Rng& rng) {
    auto stats = homodyne_stats(state, mode, angle);
    double sigma = stats.variance > 0.0 ? std::sqrt(stats.variance) : 0.0;
    double outcome = stats.mean + sigma * rng.normal();
    return HomodyneResult{outcome, condition_on_quadrature(state, mode, angle, outcome),
                          MeasurementRecord{{mode}, {angle}, {outcome}, rng.seed()}};
}

struct DualHomodyneStats {
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
};

/// Joint statistics of the dual-homodyne pair (x_m, p_m) on one mode: the
/// mode is split 50/50 with a vacuum, x is read on one output and p on the
/// other. Means shrink by sqrt(2); the covariance picks up half a vacuum
/// unit per quadrature.
inline DualHomodyneStats dual_homodyne_stats(const GaussianState& state, int mode) {
    state.check_mode(mode);
    return DualHomodyneStats{state.mode_mean(mode) / std::numbers::sqrt2,
                             (state.mode_cov(mode) + Eigen::Matrix2d::Identity()) / 2.0};
}

struct DualHomodyneResult {
    double x_m = 0.0;
    double p_m = 0.0;
    GaussianState conditional;
    MeasurementRecord record;
};

/// Sample both dual-homodyne outcomes on `mode` and return the conditional
/// state of the remaining modes (original order, measured mode removed).
inline DualHomodyneResult dual_homodyne(const GaussianState& state, int mode, Rng& rng) {
    state.check_mode(mode);
    if (state.n_modes() < 2)
        throw std::invalid_argument("dual_homodyne: nothing remains after measuring the only mode");
    int v2 = state.n_modes();  // appended auxiliary vacuum
    GaussianState joint = apply(tensor(state, vacuum(1)), beam_splitter(0.5), {mode, v2});
    // x on the reflected output (carries (b + v2)/sqrt2), p on the kept one.
    auto x_res = homodyne_sample(joint, v2, 0.0, rng);
    auto p_res = homodyne_sample(x_res.conditional, mode, std::numbers::pi / 2.0, rng);
    // Removing mode v2 (the last) leaves original indices intact, so p was
    // read at the original slot; the measured mode is gone from p_res.
    return DualHomodyneResult{
        x_res.outcome, p_res.outcome, p_res.conditional,
        MeasurementRecord{{mode, mode}, {0.0, std::numbers::pi / 2.0}, {x_res.outcome, p_res.outcome},
                          rng.seed()}};
}

}  // namespace linamp
