#pragma once

#include "linamp/gaussian_state.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace linamp {

/// Threshold below which a mean is treated as zero and the corresponding
/// gain reported absent instead of dividing by noise.
inline constexpr double kMeanAbsentTol = 1e-12;

inline double to_db(double power_ratio) {
    if (!(power_ratio > 0.0))
        throw std::invalid_argument("to_db: power ratio must be > 0, got " + std::to_string(power_ratio));
    return 10.0 * std::log10(power_ratio);
}

/// Undo verification-detector loss on a measured variance:
/// var_true = (var_meas - (1 - eta_hd)) / eta_hd. Exact inverse of
/// loss_channel on variances.
inline double corrected_variance(double var_meas, double eta_hd) {
    if (eta_hd <= 0.0 || eta_hd > 1.0)
        throw std::invalid_argument("corrected_variance: eta_hd must lie in (0, 1]");
    double var_true = (var_meas - (1.0 - eta_hd)) / eta_hd;
    if (var_true <= 0.0)
        throw UnphysicalStateError("corrected_variance: loss correction gives variance " +
                                   std::to_string(var_true) + " <= 0");
    return var_true;
}

struct GainEstimate {
    std::optional<double> x;
    std::optional<double> p;
};

namespace detail {

inline void require_single_mode(const GaussianState& state, const char* who) {
    if (state.n_modes() != 1)
        throw std::invalid_argument(std::string(who) + ": expected a single-mode state, got " +
                                    std::to_string(state.n_modes()) + " modes");
}

}  // namespace detail

/// Per-quadrature power gain (mean_out/mean_in)^2; absent where the input
/// mean is (numerically) zero, rather than NaN.
inline GainEstimate estimate_gain(const GaussianState& input, const GaussianState& output) {
    detail::require_single_mode(input, "estimate_gain");
    detail::require_single_mode(output, "estimate_gain");
    GainEstimate est;
    for (int q = 0; q < 2; ++q) {
        double in = input.mean()(q), out = output.mean()(q);
        if (std::abs(in) > kMeanAbsentTol) {
            double ratio = out / in;
            (q == 0 ? est.x : est.p) = ratio * ratio;
        }
    }
    return est;
}

struct AddedNoise {
    double x = 0.0;
    double p = 0.0;
};

/// Noise referred to the output: A_q = Var_out,q - G * Var_in,q.
inline AddedNoise added_noise(const GaussianState& output, double G, const GaussianState& input) {
    detail::require_single_mode(input, "added_noise");
    detail::require_single_mode(output, "added_noise");
    return AddedNoise{output.cov()(0, 0) - G * input.cov()(0, 0),
                      output.cov()(1, 1) - G * input.cov()(1, 1)};
}

struct NoiseFigureReport {
    std::optional<double> gain_x, gain_p;
    std::optional<double> gain_x_db, gain_p_db;
    std::optional<double> added_noise_x, added_noise_p;
    std::optional<double> nf_x, nf_p;
    std::optional<double> nf_x_db, nf_p_db;
    // Variances after loss correction (equal to the raw ones when eta_hd=1).
    double var_in_x = 0.0, var_in_p = 0.0, var_out_x = 0.0, var_out_p = 0.0;
    bool loss_corrected = false;
    double eta_hd = 1.0;
};

/// Noise figure NF_q = SNR_out,q / SNR_in,q from input/output moments,
/// computed as G_q * Var_in,q / Var_out,q so that quadratures with zero mean
/// can still be scored once a gain is known. With eta_hd < 1 the states are
/// taken as measured through a lossy verification detector: variances are
/// loss-corrected first; mean attenuation cancels in the SNR ratio. With
/// assume_phase_insensitive, a quadrature whose gain is unobservable (zero
/// input mean) borrows the other quadrature's gain.
inline NoiseFigureReport noise_figure(const GaussianState& input, const GaussianState& output,
                                      double eta_hd = 1.0, bool assume_phase_insensitive = false) {
    detail::require_single_mode(input, "noise_figure");
    detail::require_single_mode(output, "noise_figure");
    if (eta_hd <= 0.0 || eta_hd > 1.0)
        throw std::invalid_argument("noise_figure: eta_hd must lie in (0, 1]");

    NoiseFigureReport rep;
    rep.eta_hd = eta_hd;
    rep.loss_corrected = eta_hd < 1.0;
    rep.var_in_x = corrected_variance(input.cov()(0, 0), eta_hd);
    rep.var_in_p = corrected_variance(input.cov()(1, 1), eta_hd);
    rep.var_out_x = corrected_variance(output.cov()(0, 0), eta_hd);
    rep.var_out_p = corrected_variance(output.cov()(1, 1), eta_hd);

    GainEstimate gains = estimate_gain(input, output);
    if (assume_phase_insensitive) {
        if (!gains.x && gains.p) gains.x = gains.p;
        if (!gains.p && gains.x) gains.p = gains.x;
    }
    rep.gain_x = gains.x;
    rep.gain_p = gains.p;
    if (rep.gain_x) {
        rep.gain_x_db = to_db(*rep.gain_x);
        rep.added_noise_x = rep.var_out_x - *rep.gain_x * rep.var_in_x;
        rep.nf_x = *rep.gain_x * rep.var_in_x / rep.var_out_x;
        rep.nf_x_db = to_db(*rep.nf_x);
    }
    if (rep.gain_p) {
        rep.gain_p_db = to_db(*rep.gain_p);
        rep.added_noise_p = rep.var_out_p - *rep.gain_p * rep.var_in_p;
        rep.nf_p = *rep.gain_p * rep.var_in_p / rep.var_out_p;
        rep.nf_p_db = to_db(*rep.nf_p);
    }
    return rep;
}

/// Quantum-limited phase-insensitive noise figure G/(2G - 1).
inline double nf_ideal(double G) {
    if (G < 1.0) throw std::invalid_argument("nf_ideal: G must be >= 1");
    return G / (2.0 * G - 1.0);
}

/// Noise figure with in-line detection efficiency eta and recalibrated
/// feedforward gain: eta G / (2G - 2 + eta).
inline double nf_detector(double G, double eta) {
    if (G < 1.0) throw std::invalid_argument("nf_detector: G must be >= 1");
    if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("nf_detector: eta must lie in (0, 1]");
    return eta * G / (2.0 * G - 2.0 + eta);
}

/// Noise figure with classical excess noise dN_cl on the output:
/// G/(2G - 1 + dN_cl).
inline double nf_technical(double G, double dN_cl) {
    if (G < 1.0) throw std::invalid_argument("nf_technical: G must be >= 1");
    if (dN_cl < 0.0) throw std::invalid_argument("nf_technical: dN_cl must be >= 0");
    return G / (2.0 * G - 1.0 + dN_cl);
}

}  // namespace linamp
