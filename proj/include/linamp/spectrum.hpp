#pragma once

#include "linamp/gaussian_state.hpp"
#include "linamp/measurement.hpp"
#include "linamp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace linamp {

/// Euler-Mascheroni constant; E[ln X] = ln(mu) - gamma for X ~ Exp(mean mu).
inline constexpr double kEulerGamma = 0.57721566490153286;

/// Averaging periodogram bins in the dB domain (like a video filter on a
/// log-detected trace) sits 10*gamma/ln10 ~ 2.51 dB below the true mean
/// power for exponentially distributed noise bins; adding this back makes a
/// vacuum floor read 0 dB in expectation.
inline const double kChiSqLogOffsetDb = 10.0 * kEulerGamma / std::log(10.0);

struct PowerSpectrum {
    std::vector<double> frequency_hz;
    std::vector<double> power_db;  // relative to the shot-noise floor
    double rbw_hz = 0.0;
    double vbw_hz = 0.0;
    double center_hz = 0.0;
};

/// Emulated spectrum-analyzer trace of one quadrature: the mean shows up as
/// a carrier at center_hz, the variance as a white floor normalized so that
/// vacuum reads 0 dB.
///
/// Model: time series q(t) = <q> cos(2 pi f_c t) + white noise of variance
/// Var(q) per sample; Hann-windowed periodogram whose bin spacing is set so
/// each bin's equivalent noise bandwidth equals rbw (spacing rbw/1.5); the
/// video bandwidth is emulated by averaging round(rbw/vbw) independent
/// segment traces in the dB domain (plus the chi-squared offset above). The
/// carrier is snapped to the nearest bin so its power stays in one bin.
inline PowerSpectrum synthesize_spectrum(const GaussianState& state, int mode, double angle,
                                         double center_freq, double span, double rbw, double vbw,
                                         Rng& rng) {
    if (!(span > 0.0)) throw std::invalid_argument("synthesize_spectrum: span must be > 0");
    if (!(rbw > 0.0)) throw std::invalid_argument("synthesize_spectrum: rbw must be > 0");
    if (rbw > span) throw std::invalid_argument("synthesize_spectrum: rbw must not exceed span");
    if (!(vbw > 0.0)) throw std::invalid_argument("synthesize_spectrum: vbw must be > 0");

    auto stats = homodyne_stats(state, mode, angle);
    double amp = stats.mean;
    double noise_sd = stats.variance > 0.0 ? std::sqrt(stats.variance) : 0.0;

    // Digital IF: sample at 4*span and put the carrier at IF = span, so the
    // displayed band [center - span/2, center + span/2] sits well inside
    // Nyquist.
    double fs = 4.0 * span;
    int n = static_cast<int>(std::lround(6.0 * span / rbw));  // fs / (rbw/1.5)
    double df = fs / n;
    double f_if = span;
    int k_carrier = static_cast<int>(std::lround(f_if / df));
    int k_min = std::max(1, static_cast<int>(std::ceil((f_if - span / 2.0) / df - 1e-9)));
    int k_max = std::min(n / 2 - 1, static_cast<int>(std::floor((f_if + span / 2.0) / df + 1e-9)));
    if (k_max < k_min) throw std::invalid_argument("synthesize_spectrum: no display bins in span");
    int n_bins = k_max - k_min + 1;
    int n_avg = std::clamp(static_cast<int>(std::lround(rbw / vbw)), 1, 4000);

    std::vector<double> window(n);
    double u = 0.0;
    for (int i = 0; i < n; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
        u += window[i] * window[i];
    }
    // Windowed DFT kernels for just the displayed bins.
    std::vector<std::complex<double>> kernel(static_cast<std::size_t>(n_bins) * n);
    for (int b = 0; b < n_bins; ++b)
        for (int i = 0; i < n; ++i) {
            double phase = -2.0 * std::numbers::pi * (k_min + b) * i / n;
            kernel[static_cast<std::size_t>(b) * n + i] =
                window[i] * std::complex<double>(std::cos(phase), std::sin(phase));
        }

    std::vector<double> db_sum(n_bins, 0.0);
    std::vector<double> series(n);
    for (int seg = 0; seg < n_avg; ++seg) {
        for (int i = 0; i < n; ++i) {
            double carrier = amp * std::cos(2.0 * std::numbers::pi * k_carrier * i / n);
            series[i] = carrier + noise_sd * rng.normal();
        }
        for (int b = 0; b < n_bins; ++b) {
            std::complex<double> acc = 0.0;
            const std::complex<double>* row = &kernel[static_cast<std::size_t>(b) * n];
            for (int i = 0; i < n; ++i) acc += row[i] * series[i];
            double power = std::norm(acc) / u;
            db_sum[b] += 10.0 * std::log10(std::max(power, 1e-300));
        }
    }

    PowerSpectrum result;
    result.rbw_hz = rbw;
    result.vbw_hz = vbw;
    result.center_hz = center_freq;
    result.frequency_hz.resize(n_bins);
    result.power_db.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        result.frequency_hz[b] = center_freq + ((k_min + b) * df - f_if);
        result.power_db[b] = db_sum[b] / n_avg + kChiSqLogOffsetDb;
    }
    return result;
}

struct PeakFloor {
    double peak_db = 0.0;
    double floor_db = 0.0;
    double peak_freq_hz = 0.0;
};

/// Peak = highest bin; floor = median of the bins outside a +-3*rbw guard
/// band around the peak (falling back to all non-peak bins for very short
/// traces).
inline PeakFloor peak_floor_report(const PowerSpectrum& spectrum) {
    if (spectrum.power_db.empty())
        throw std::invalid_argument("peak_floor_report: empty spectrum");
    std::size_t peak_idx = static_cast<std::size_t>(
        std::max_element(spectrum.power_db.begin(), spectrum.power_db.end()) -
        spectrum.power_db.begin());
    PeakFloor out;
    out.peak_db = spectrum.power_db[peak_idx];
    out.peak_freq_hz = spectrum.frequency_hz[peak_idx];

    std::vector<double> floor_bins;
    for (std::size_t i = 0; i < spectrum.power_db.size(); ++i)
        if (std::abs(spectrum.frequency_hz[i] - out.peak_freq_hz) > 3.0 * spectrum.rbw_hz)
            floor_bins.push_back(spectrum.power_db[i]);
    if (floor_bins.empty())
        for (std::size_t i = 0; i < spectrum.power_db.size(); ++i)
            if (i != peak_idx) floor_bins.push_back(spectrum.power_db[i]);
    if (floor_bins.empty()) {
        out.floor_db = out.peak_db;  // single-bin trace
        return out;
    }
    std::sort(floor_bins.begin(), floor_bins.end());
    std::size_t m = floor_bins.size();
    out.floor_db = m % 2 ? floor_bins[m / 2] : (floor_bins[m / 2 - 1] + floor_bins[m / 2]) / 2.0;
    return out;
}

/// Zero-span emulation: park the analyzer on the carrier bin and record
/// n_points consecutive vbw-averaged power readings, with the modulation
/// tone on or off. Reuses the synthesize_spectrum model at a single bin.
inline std::vector<double> zero_span_trace(const GaussianState& state, int mode, double angle,
                                           double rbw, double vbw, int n_points, bool modulated,
                                           Rng& rng) {
    if (n_points < 1) throw std::invalid_argument("zero_span_trace: n_points must be >= 1");
    if (!(rbw > 0.0) || !(vbw > 0.0))
        throw std::invalid_argument("zero_span_trace: rbw and vbw must be > 0");
    auto stats = homodyne_stats(state, mode, angle);
    double amp = modulated ? stats.mean : 0.0;
    double noise_sd = stats.variance > 0.0 ? std::sqrt(stats.variance) : 0.0;

    int n = 64;  // fixed short segment; bin 16 plays the carrier bin
    int k = n / 4;
    int n_avg = std::clamp(static_cast<int>(std::lround(rbw / vbw)), 1, 4000);
    std::vector<double> window(n);
    double u = 0.0;
    for (int i = 0; i < n; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
        u += window[i] * window[i];
    }
    std::vector<double> trace(n_points);
    for (int pt = 0; pt < n_points; ++pt) {
        double db_sum = 0.0;
        for (int seg = 0; seg < n_avg; ++seg) {
            std::complex<double> acc = 0.0;
            for (int i = 0; i < n; ++i) {
                double q = amp * std::cos(2.0 * std::numbers::pi * k * i / n) + noise_sd * rng.normal();
                double phase = -2.0 * std::numbers::pi * k * i / n;
                acc += window[i] * q * std::complex<double>(std::cos(phase), std::sin(phase));
            }
            db_sum += 10.0 * std::log10(std::max(std::norm(acc) / u, 1e-300));
        }
        trace[pt] = db_sum / n_avg + kChiSqLogOffsetDb;
    }
    return trace;
}

}  // namespace linamp
