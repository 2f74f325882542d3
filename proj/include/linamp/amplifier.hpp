#pragma once

#include "linamp/gaussian_state.hpp"
#include "linamp/measurement.hpp"
#include "linamp/rng.hpp"
#include "linamp/symplectic.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace linamp {

/// Feedforward gain that makes the mean amplitude gain exactly 1/sqrt(T):
/// g = sqrt(2R/T) with R = 1 - T.
inline double electronic_gain(double tap_transmission) {
    if (tap_transmission <= 0.0 || tap_transmission > 1.0)
        throw std::invalid_argument("electronic_gain: tap transmission must lie in (0, 1]");
    return std::sqrt(2.0 * (1.0 - tap_transmission) / tap_transmission);
}

/// Knobs of the measurement-feedforward amplifier. Defaults give the ideal
/// device: power gain G = 1/T, output = sqrt(G) * input + (G-1) units of
/// conjugate vacuum noise, and nothing else.
struct AmplifierConfig {
    /// Tap beam-splitter transmission T; the power gain is G = 1/T.
    double tap_transmission = 0.5;
    /// Feedforward gain applied to both measured quadratures; unset means
    /// the calibrated value sqrt(2R/(eta*T)) that keeps the mean gain at
    /// sqrt(G) even with lossy in-line detection.
    std::optional<double> electronic_gain;
    /// Detection efficiency of the dual-homodyne arm, modeled as loss on the
    /// tapped beam before the 50/50 split.
    double eta_inline = 1.0;
    /// Transmission of the output coupler used to imprint the displacement;
    /// < 1 costs signal loss before the (still ideal) displacement.
    double coupler_transmission = 1.0;
    /// Classical excess noise of the feedforward chain, added as isotropic
    /// variance (shot units) on the amplified mode.
    double technical_noise = 0.0;
    /// Squeezing of the entangled ancilla pair (phase-conjugate mode only).
    double ancilla_squeezing = 0.0;
    /// Conjugate-branch feedforward gains; unset means the perfect-
    /// entanglement values +sqrt(2/T) and -sqrt(2/T).
    std::optional<double> lambda_x;
    std::optional<double> lambda_p;

    double gain() const { return 1.0 / tap_transmission; }

    double feedforward_gain() const {
        if (electronic_gain) return *electronic_gain;
        return std::sqrt(2.0 * (1.0 - tap_transmission) / (eta_inline * tap_transmission));
    }

    double conjugate_gain_x() const {
        return lambda_x ? *lambda_x : std::sqrt(2.0 / tap_transmission);
    }
    double conjugate_gain_p() const {
        return lambda_p ? *lambda_p : -std::sqrt(2.0 / tap_transmission);
    }

    void validate() const {
        if (!(tap_transmission > 0.0) || tap_transmission > 1.0)
            throw std::invalid_argument("AmplifierConfig: tap_transmission must lie in (0, 1]");
        if (gain() > 1e4)
            throw std::invalid_argument("AmplifierConfig: gain cap exceeded (G = 1/T must be <= 1e4)");
        if (eta_inline <= 0.0 || eta_inline > 1.0)
            throw std::invalid_argument("AmplifierConfig: eta_inline must lie in (0, 1]");
        if (coupler_transmission <= 0.0 || coupler_transmission > 1.0)
            throw std::invalid_argument("AmplifierConfig: coupler_transmission must lie in (0, 1]");
        if (technical_noise < 0.0)
            throw std::invalid_argument("AmplifierConfig: technical_noise must be >= 0");
        if (ancilla_squeezing < 0.0)
            throw std::invalid_argument("AmplifierConfig: ancilla_squeezing must be >= 0");
    }
};

struct EnsembleOptions {
    int signal_mode = 0;
    /// Keep the reconstructed 50/50 vacuum mode as an extra output mode so
    /// its correlations with the amplified beam can be inspected.
    bool track_v2 = false;
};

namespace detail {

/// Joint state of [input modes..., dark-port chain..., v2] wired up to just
/// before the two homodyne detectors, plus slot bookkeeping.
struct AmplifierCircuit {
    GaussianState joint;
    int signal = 0;
    int port_p = 0;     // carries (tap - v2)/sqrt2; p is read here
    int port_x = 0;     // carries (tap + v2)/sqrt2; x is read here
    int conjugate = -1; // ancilla partner slot, -1 when absent
};

/// dark: the state entering the tap's empty port; dark_mode selects which of
/// its modes is injected. With conjugate=true the dark state is the
/// ancilla pair and the injected half gets a pi phase flip (the ancilla
/// phase that makes the conjugate-branch noise contract rather than grow).
inline AmplifierCircuit build_circuit(const AmplifierConfig& config, const GaussianState& input,
                                      int signal_mode, const GaussianState& dark, int dark_mode,
                                      bool conjugate) {
    config.validate();
    input.check_mode(signal_mode);
    dark.check_mode(dark_mode);

    AmplifierCircuit c{tensor(tensor(input, dark), vacuum(1)), signal_mode, 0, 0, -1};
    int n_in = input.n_modes();
    int tap = n_in + dark_mode;
    int v2 = n_in + dark.n_modes();
    if (conjugate) {
        c.conjugate = n_in + 1 - dark_mode;
        c.joint = apply(c.joint, phase_shift(std::numbers::pi), {tap});
    }
    c.joint = apply(c.joint, beam_splitter(config.tap_transmission), {c.signal, tap});
    if (config.eta_inline < 1.0) c.joint = loss_channel(c.joint, tap, config.eta_inline);
    c.joint = apply(c.joint, beam_splitter(0.5), {tap, v2});
    c.port_p = tap;
    c.port_x = v2;
    if (config.coupler_transmission < 1.0)
        c.joint = loss_channel(c.joint, c.signal, config.coupler_transmission);
    return c;
}

/// Ensemble-picture feedforward: add gain * (detector quadrature) onto a
/// target mode of the still-joint state. This is bookkeeping on the joint
/// moments, not a unitary -- the detector slots themselves stay untouched,
/// exactly as a measured-and-fed-forward record would.
inline GaussianState feedforward(const GaussianState& state, int target, int port_x, int port_p,
                                 double gain_x, double gain_p) {
    int n = state.n_modes();
    Mat M = Mat::Identity(2 * n, 2 * n);
    M(x_index(target), x_index(port_x)) += gain_x;
    M(p_index(target), p_index(port_p)) += gain_p;
    return GaussianState(M * state.mean(), M * state.cov() * M.transpose());
}

inline GaussianState add_isotropic_noise(const GaussianState& state, int mode, double variance) {
    Mat cov = state.cov();
    cov(x_index(mode), x_index(mode)) += variance;
    cov(p_index(mode), p_index(mode)) += variance;
    return GaussianState(state.mean(), std::move(cov));
}

}  // namespace detail

/// Exact-moment run with an arbitrary (physical) state entering the tap's
/// dark port. Output modes are the input modes in order; with track_v2 the
/// 50/50 vacuum mode is appended last.
inline GaussianState run_ensemble(const AmplifierConfig& config, const GaussianState& input,
                                  const GaussianState& dark_port, int dark_mode,
                                  EnsembleOptions options = {}) {
    require_physical(input, "run_ensemble: input");
    require_physical(dark_port, "run_ensemble: dark port");
    auto c = detail::build_circuit(config, input, options.signal_mode, dark_port, dark_mode, false);
    double g = config.feedforward_gain();
    GaussianState state = detail::feedforward(c.joint, c.signal, c.port_x, c.port_p, g, g);
    if (config.technical_noise > 0.0)
        state = detail::add_isotropic_noise(state, c.signal, config.technical_noise);

    std::vector<int> keep;
    for (int m = 0; m < input.n_modes(); ++m) keep.push_back(m);
    if (options.track_v2) {
        // Undo the 50/50 split (same splitter, ports swapped) to map the
        // detector slots back to (tap, v2); v2 lands on the port_x slot.
        state = apply(state, beam_splitter(0.5), {c.port_x, c.port_p});
        keep.push_back(c.port_x);
    }
    return partial_trace(state, keep);
}

inline GaussianState run_ensemble(const AmplifierConfig& config, const GaussianState& input,
                                  EnsembleOptions options = {}) {
    return run_ensemble(config, input, vacuum(1), 0, options);
}

/// Exact-moment run of the phase-conjugating variant: one half of a
/// two-mode-squeezed ancilla enters the dark port, the other half receives
/// the conjugate feedforward (lambda_x, lambda_p). Output modes are the
/// input modes followed by the conjugate mode.
inline GaussianState run_phase_conjugate(const AmplifierConfig& config, const GaussianState& input,
                                         int signal_mode = 0) {
    // The ancilla pair is physical by construction and is not re-checked:
    // at large squeezing a numerical check would reject it spuriously.
    require_physical(input, "run_phase_conjugate: input");
    auto c = detail::build_circuit(config, input, signal_mode, two_mode_squeezed(config.ancilla_squeezing),
                                   0, true);
    double g = config.feedforward_gain();
    GaussianState state = detail::feedforward(c.joint, c.signal, c.port_x, c.port_p, g, g);
    state = detail::feedforward(state, c.conjugate, c.port_x, c.port_p, config.conjugate_gain_x(),
                                config.conjugate_gain_p());
    if (config.technical_noise > 0.0)
        state = detail::add_isotropic_noise(state, c.signal, config.technical_noise);

    std::vector<int> keep;
    for (int m = 0; m < input.n_modes(); ++m) keep.push_back(m);
    keep.push_back(c.conjugate);
    return partial_trace(state, keep);
}

/// One Monte Carlo run per trajectory: measurement records, resulting output
/// means, and summary moments. The summary covariance is the mixture
/// covariance (shared conditional covariance + scatter of the means), which
/// is what an ensemble-averaged detector sees.
struct TrajectoryEnsemble {
    std::vector<MeasurementRecord> records;
    std::vector<Vec> output_means;
    Mat conditional_cov;
    std::uint64_t master_seed = 0;
    Vec summary_mean;
    Mat summary_cov;

    int n_trajectories() const { return static_cast<int>(output_means.size()); }

    /// Recompute summary moments from the stored trajectories (exactly the
    /// values run_trajectories filled in, same summation order).
    void recompute_summary() {
        if (output_means.empty()) throw std::logic_error("TrajectoryEnsemble: no trajectories stored");
        int dim = static_cast<int>(output_means.front().size());
        Vec mean = Vec::Zero(dim);
        for (const Vec& v : output_means) mean += v;
        mean /= static_cast<double>(output_means.size());
        Mat scatter = Mat::Zero(dim, dim);
        if (output_means.size() > 1) {
            for (const Vec& v : output_means) scatter += (v - mean) * (v - mean).transpose();
            scatter /= static_cast<double>(output_means.size() - 1);
        }
        summary_mean = std::move(mean);
        summary_cov = conditional_cov + scatter;
    }

    GaussianState summary_state() const { return GaussianState(summary_mean, summary_cov); }
};

/// Stochastic backend: per trajectory, sample the two homodyne outcomes,
/// condition the kept modes, and displace the signal by the scaled outcomes.
/// Trajectory t uses an independent generator derived from (master_seed, t),
/// so results do not depend on evaluation order.
inline TrajectoryEnsemble run_trajectories(const AmplifierConfig& config, const GaussianState& input,
                                           int n_traj, std::uint64_t master_seed, int signal_mode = 0) {
    if (n_traj < 1) throw std::invalid_argument("run_trajectories: n_traj must be >= 1");
    require_physical(input, "run_trajectories: input");
    auto c = detail::build_circuit(config, input, signal_mode, vacuum(1), 0, false);
    double g = config.feedforward_gain();
    double noise_sd = std::sqrt(config.technical_noise);

    TrajectoryEnsemble ensemble;
    ensemble.master_seed = master_seed;
    ensemble.records.reserve(n_traj);
    ensemble.output_means.reserve(n_traj);
    for (int t = 0; t < n_traj; ++t) {
        Rng rng = Rng::for_stream(master_seed, static_cast<std::uint64_t>(t));
        auto x_res = homodyne_sample(c.joint, c.port_x, 0.0, rng);
        // port_x was the last mode, so port_p keeps its index.
        auto p_res = homodyne_sample(x_res.conditional, c.port_p, std::numbers::pi / 2.0, rng);
        GaussianState out = displace(p_res.conditional, c.signal, g * x_res.outcome, g * p_res.outcome);
        if (config.technical_noise > 0.0)
            out = displace(out, c.signal, noise_sd * rng.normal(), noise_sd * rng.normal());
        ensemble.records.push_back(MeasurementRecord{{c.port_x, c.port_p},
                                                     {0.0, std::numbers::pi / 2.0},
                                                     {x_res.outcome, p_res.outcome},
                                                     rng.seed()});
        ensemble.output_means.push_back(out.mean());
        if (t == 0) ensemble.conditional_cov = out.cov();
    }
    ensemble.recompute_summary();
    return ensemble;
}

/// Noiseless phase-sensitive reference amplifier: x -> x/sqrt(G),
/// p -> sqrt(G) p. Symplectic, so nothing is added and the amplified
/// quadrature's SNR is untouched.
inline GaussianState phase_sensitive_amp(double G, const GaussianState& state, int mode) {
    if (G <= 0.0) throw std::invalid_argument("phase_sensitive_amp: G must be > 0");
    Mat S(2, 2);
    S << 1.0 / std::sqrt(G), 0.0,
         0.0, std::sqrt(G);
    return apply(state, SymplecticOp(std::move(S)), {mode});
}

}  // namespace linamp
