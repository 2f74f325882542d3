// linamp: command-line front end for the feedforward amplifier simulator.
//
// Exit codes: 0 success, 2 invalid configuration or usage, 3 unphysical
// state detected, 1 any other failure.

#include "linamp/cli.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace {

// Flag values held separately so a config file can be loaded first and only
// explicitly passed flags override it.
struct FlagSet {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, format, backend, input_type;
    std::optional<std::string> electronic_gain, lambda_x, lambda_p;  // "auto" or a number
    std::optional<double> T, eta, ncl, r, eta_hd, coupler;
    std::optional<double> alpha_re, alpha_im, squeeze_r, thermal_var;
    std::optional<double> center, span, rbw, vbw, gain_min, gain_max;
    std::optional<int> ntraj, gain_points;
};

std::optional<double> parse_auto_or_number(const std::string& name, const std::string& value) {
    if (value == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw linamp::ConfigError("flag " + name + ": expected a number or 'auto', got '" + value + "'");
    }
}

void apply_flags(linamp::RunConfig& cfg, const FlagSet& f) {
    if (f.seed) cfg.master_seed = *f.seed;
    if (f.out) cfg.out_path = *f.out;
    if (f.format) cfg.format = *f.format;
    if (f.backend) cfg.backend = *f.backend;
    if (f.input_type) cfg.input_type = *f.input_type;
    if (f.electronic_gain) cfg.electronic_gain = parse_auto_or_number("--g", *f.electronic_gain);
    if (f.lambda_x) cfg.lambda_x = parse_auto_or_number("--lambda-x", *f.lambda_x);
    if (f.lambda_p) cfg.lambda_p = parse_auto_or_number("--lambda-p", *f.lambda_p);
    if (f.T) cfg.T = *f.T;
    if (f.eta) cfg.eta_inline = *f.eta;
    if (f.ncl) cfg.technical_noise = *f.ncl;
    if (f.r) cfg.ancilla_squeezing = *f.r;
    if (f.eta_hd) cfg.eta_hd = *f.eta_hd;
    if (f.coupler) cfg.coupler_transmission = *f.coupler;
    if (f.alpha_re) cfg.alpha_re = *f.alpha_re;
    if (f.alpha_im) cfg.alpha_im = *f.alpha_im;
    if (f.squeeze_r) cfg.squeeze_r = *f.squeeze_r;
    if (f.thermal_var) cfg.thermal_var = *f.thermal_var;
    if (f.center) cfg.center_freq = *f.center;
    if (f.span) cfg.span = *f.span;
    if (f.rbw) cfg.rbw = *f.rbw;
    if (f.vbw) cfg.vbw = *f.vbw;
    if (f.gain_min) cfg.gain_min = *f.gain_min;
    if (f.gain_max) cfg.gain_max = *f.gain_max;
    if (f.ntraj) cfg.n_traj = *f.ntraj;
    if (f.gain_points) cfg.gain_points = *f.gain_points;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for a measurement-feedforward optical amplifier"};
    app.require_subcommand(0, 1);

    FlagSet flags;
    app.add_option("--config", flags.config_path, "Config file (key = value lines)");
    app.add_option("--seed", flags.seed, "Master RNG seed");
    app.add_option("--out", flags.out, "Output path ('-' = stdout)");
    app.add_option("--format", flags.format, "Output format: auto|csv|json");
    app.add_option("--backend", flags.backend, "ensemble|trajectories");
    app.add_option("--ntraj", flags.ntraj, "Monte Carlo trajectory count");
    app.add_option("--T", flags.T, "Tap transmission (gain G = 1/T)");
    app.add_option("--g", flags.electronic_gain, "Feedforward gain ('auto' or a number)");
    app.add_option("--eta", flags.eta, "In-line dual-homodyne efficiency");
    app.add_option("--eta-hd", flags.eta_hd, "Verification homodyne efficiency");
    app.add_option("--coupler", flags.coupler, "Displacement coupler transmission");
    app.add_option("--ncl", flags.ncl, "Technical noise (shot units)");
    app.add_option("--r", flags.r, "Ancilla squeezing (phase conjugation)");
    app.add_option("--lambda-x", flags.lambda_x, "Conjugate-branch x gain ('auto' or a number)");
    app.add_option("--lambda-p", flags.lambda_p, "Conjugate-branch p gain ('auto' or a number)");
    app.add_option("--input-type", flags.input_type, "coherent|squeezed|thermal|vacuum");
    app.add_option("--alpha-re", flags.alpha_re, "Input amplitude, real part");
    app.add_option("--alpha-im", flags.alpha_im, "Input amplitude, imaginary part");
    app.add_option("--squeeze-r", flags.squeeze_r, "Input squeezing parameter");
    app.add_option("--thermal-var", flags.thermal_var, "Thermal input variance");
    app.add_option("--center", flags.center, "Spectrum center frequency (Hz)");
    app.add_option("--span", flags.span, "Spectrum span (Hz)");
    app.add_option("--rbw", flags.rbw, "Resolution bandwidth (Hz)");
    app.add_option("--vbw", flags.vbw, "Video bandwidth (Hz)");
    app.add_option("--gain-min", flags.gain_min, "Sweep: smallest gain");
    app.add_option("--gain-max", flags.gain_max, "Sweep: largest gain");
    app.add_option("--gain-points", flags.gain_points, "Sweep: number of grid points");

    auto* run_amp = app.add_subcommand("run-amp", "Amplify the input once and report gain/NF");
    auto* sweep = app.add_subcommand("sweep-nf", "Noise figure vs gain as CSV");
    auto* spectrum = app.add_subcommand("spectrum", "Input/output power spectra as CSV");
    auto* conj = app.add_subcommand("phase-conjugate", "Run the phase-conjugating variant");
    for (auto* sub : {run_amp, sweep, spectrum, conj}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        linamp::RunConfig cfg;
        if (!flags.config_path.empty()) cfg = linamp::parse_config_file(flags.config_path);
        if (run_amp->parsed()) cfg.command = "run-amp";
        if (sweep->parsed()) cfg.command = "sweep-nf";
        if (spectrum->parsed()) cfg.command = "spectrum";
        if (conj->parsed()) cfg.command = "phase-conjugate";
        apply_flags(cfg, flags);
        return linamp::dispatch_command(cfg);
    } catch (const linamp::UnphysicalStateError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const linamp::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
