#include "linamp/gaussian_state.hpp"
#include "linamp/metrics.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

using namespace linamp;

TEST_CASE("decibel conversion") {
    REQUIRE(std::abs(to_db(2.0) - oracle::kDb2) < 1e-12);
    REQUIRE(std::abs(to_db(3.0) - oracle::kDb3) < 1e-12);
    REQUIRE(to_db(1.0) == 0.0);
    REQUIRE_THROWS_AS(to_db(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(to_db(-2.0), std::invalid_argument);
}

TEST_CASE("variance loss correction inverts the detector loss exactly") {
    double eta = 0.93;
    for (double v : {0.5, 1.0, 2.0, 7.3}) {
        double measured = eta * v + (1.0 - eta);
        REQUIRE(std::abs(corrected_variance(measured, eta) - v) < 1e-13);
    }
    REQUIRE(corrected_variance(1.3, 1.0) == 1.3);
    REQUIRE_THROWS_AS(corrected_variance(1.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(corrected_variance(1.0, 1.2), std::invalid_argument);
    // A measured variance below the detector's own vacuum contribution cannot
    // come from a physical state.
    REQUIRE_THROWS_AS(corrected_variance(0.4, 0.5), UnphysicalStateError);
}

TEST_CASE("gain estimation from mean amplitudes") {
    GaussianState in = coherent(std::complex<double>(1.0, 0.5));
    GaussianState out(3.0 * in.mean(), 5.0 * Mat::Identity(2, 2));
    auto est = estimate_gain(in, out);
    REQUIRE(est.x.has_value());
    REQUIRE(std::abs(*est.x - 9.0) < 1e-12);
    REQUIRE(std::abs(*est.p - 9.0) < 1e-12);

    auto none = estimate_gain(vacuum(1), out);
    REQUIRE_FALSE(none.x.has_value());
    REQUIRE_FALSE(none.p.has_value());

    GaussianState only_x = coherent(std::complex<double>(1.0, 0.0));
    auto partial = estimate_gain(only_x, GaussianState(2.0 * only_x.mean(), Mat::Identity(2, 2)));
    REQUIRE(partial.x.has_value());
    REQUIRE_FALSE(partial.p.has_value());

    REQUIRE_THROWS_AS(estimate_gain(vacuum(2), out), std::invalid_argument);
}

TEST_CASE("added noise referred to the output") {
    GaussianState in = thermal(1, 1.5);
    GaussianState out(Vec::Zero(2), 4.0 * Mat::Identity(2, 2));
    auto noise = added_noise(out, 2.0, in);
    REQUIRE(std::abs(noise.x - 1.0) < 1e-13);
    REQUIRE(std::abs(noise.p - 1.0) < 1e-13);
}

TEST_CASE("noise figure of the quantum-limited amplifier map") {
    // G=1.5 on a coherent input: Var_out = 2, NF = 1.5/2.
    GaussianState in = coherent(std::complex<double>(1.0, 0.5));
    GaussianState out(std::sqrt(1.5) * in.mean(), 2.0 * Mat::Identity(2, 2));
    auto rep = noise_figure(in, out);
    REQUIRE(std::abs(*rep.gain_x - 1.5) < 1e-12);
    REQUIRE(std::abs(*rep.nf_x - 0.75) < 1e-12);
    REQUIRE(std::abs(*rep.nf_p - 0.75) < 1e-12);
    REQUIRE(std::abs(*rep.nf_x_db - to_db(0.75)) < 1e-12);
    REQUIRE(std::abs(*rep.added_noise_x - 0.5) < 1e-12);
    REQUIRE_FALSE(rep.loss_corrected);
}

TEST_CASE("verification-detector loss cancels out of the noise figure") {
    GaussianState in = coherent(std::complex<double>(0.8, -0.4));
    GaussianState out(std::sqrt(2.0) * in.mean(), 3.0 * Mat::Identity(2, 2));
    auto clean = noise_figure(in, out);

    double eta_hd = 0.85;
    GaussianState in_meas = loss_channel(in, 0, eta_hd);
    GaussianState out_meas = loss_channel(out, 0, eta_hd);
    auto corrected = noise_figure(in_meas, out_meas, eta_hd);
    REQUIRE(corrected.loss_corrected);
    REQUIRE(std::abs(*corrected.nf_x - *clean.nf_x) < 1e-12);
    REQUIRE(std::abs(*corrected.nf_p - *clean.nf_p) < 1e-12);
    REQUIRE(std::abs(corrected.var_out_x - 3.0) < 1e-12);
    // The gains also agree: mean attenuation divides out of out/in.
    REQUIRE(std::abs(*corrected.gain_x - *clean.gain_x) < 1e-12);
}

TEST_CASE("phase-insensitive assumption lends the observable gain to the dark quadrature") {
    GaussianState in = coherent(std::complex<double>(1.0, 0.0));  // p mean is zero
    GaussianState out(2.0 * in.mean(), 7.0 * Mat::Identity(2, 2));
    auto strict = noise_figure(in, out);
    REQUIRE(strict.nf_x.has_value());
    REQUIRE_FALSE(strict.nf_p.has_value());

    auto assumed = noise_figure(in, out, 1.0, true);
    REQUIRE(assumed.nf_p.has_value());
    REQUIRE(std::abs(*assumed.nf_p - *assumed.nf_x) < 1e-15);
}

TEST_CASE("noise figure argument validation") {
    GaussianState in = coherent(std::complex<double>(1.0, 0.0));
    REQUIRE_THROWS_AS(noise_figure(in, vacuum(2)), std::invalid_argument);
    REQUIRE_THROWS_AS(noise_figure(in, vacuum(1), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(noise_figure(in, vacuum(1), 1.5), std::invalid_argument);
}

TEST_CASE("ideal noise-figure curve values and limits") {
    REQUIRE(nf_ideal(1.0) == 1.0);
    REQUIRE(std::abs(nf_ideal(1.5) - 0.75) < 1e-15);
    REQUIRE(std::abs(nf_ideal(100.0) - oracle::kNfIdeal100) < 1e-15);
    // Monotone decay toward the 1/2 (-3 dB) floor.
    double prev = nf_ideal(1.0);
    for (double G = 1.5; G <= 100.0; G += 1.5) {
        double cur = nf_ideal(G);
        REQUIRE(cur < prev);
        REQUIRE(cur > 0.5);
        prev = cur;
    }
    REQUIRE_THROWS_AS(nf_ideal(0.5), std::invalid_argument);
}

TEST_CASE("detector-loss noise-figure curve") {
    REQUIRE(std::abs(nf_detector(1.5, 0.93) - oracle::kNfDet15) < 1e-15);
    REQUIRE(std::abs(nf_detector(100.0, 0.93) - oracle::kNfDet100) < 1e-15);
    REQUIRE(std::abs(nf_detector(100.0, 0.93) - 0.465) < 0.01 * 0.465);
    for (double G : {1.0, 2.0, 10.0}) REQUIRE(std::abs(nf_detector(G, 1.0) - nf_ideal(G)) < 1e-15);
    // eta = 1 at G = 1 gives a perfect (unit) noise figure.
    REQUIRE(nf_detector(1.0, 1.0) == 1.0);
    REQUIRE_THROWS_AS(nf_detector(2.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(nf_detector(0.9, 0.93), std::invalid_argument);
}

TEST_CASE("technical-noise noise-figure curve") {
    REQUIRE(std::abs(nf_technical(1.0, 2.0) - 1.0 / 3.0) < 1e-15);
    REQUIRE(std::abs(nf_technical(1.5, 2.0) - 0.375) < 1e-15);
    for (double G : {1.0, 2.0, 10.0}) REQUIRE(std::abs(nf_technical(G, 0.0) - nf_ideal(G)) < 1e-15);
    REQUIRE_THROWS_AS(nf_technical(2.0, -1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(nf_technical(0.0, 1.0), std::invalid_argument);
}
