#pragma once

#include "linamp/amplifier.hpp"
#include "linamp/gaussian_state.hpp"

#include <cctype>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace linamp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a CLI run needs, flat so it maps 1:1 onto the `key = value`
/// config file format. Optional gains serialize as the literal "auto".
struct RunConfig {
    std::string command;  // run-amp | sweep-nf | spectrum | phase-conjugate
    // amplifier
    double T = 2.0 / 3.0;
    std::optional<double> electronic_gain;
    double eta_inline = 1.0;
    double coupler_transmission = 1.0;
    double technical_noise = 0.0;
    double eta_hd = 1.0;
    double ancilla_squeezing = 0.0;
    std::optional<double> lambda_x;
    std::optional<double> lambda_p;
    // input state
    std::string input_type = "coherent";  // coherent | squeezed | thermal | vacuum
    double alpha_re = 1.0;
    double alpha_im = 0.0;
    double squeeze_r = 0.0;
    double thermal_var = 1.0;
    // execution
    std::string backend = "ensemble";  // ensemble | trajectories
    int n_traj = 100000;
    std::uint64_t master_seed = 1;
    std::string out_path = "-";   // "-" = stdout
    std::string format = "auto";  // auto | csv | json
    // spectrum
    double center_freq = 14.3e6;
    double span = 100e3;
    double rbw = 10e3;
    double vbw = 30.0;
    // sweep grid
    double gain_min = 1.0;
    double gain_max = 100.0;
    int gain_points = 41;

    bool operator==(const RunConfig&) const = default;
};

inline AmplifierConfig to_amplifier_config(const RunConfig& config) {
    AmplifierConfig amp;
    amp.tap_transmission = config.T;
    amp.electronic_gain = config.electronic_gain;
    amp.eta_inline = config.eta_inline;
    amp.coupler_transmission = config.coupler_transmission;
    amp.technical_noise = config.technical_noise;
    amp.ancilla_squeezing = config.ancilla_squeezing;
    amp.lambda_x = config.lambda_x;
    amp.lambda_p = config.lambda_p;
    return amp;
}

/// Build the single-mode input state. alpha displaces every type except
/// vacuum (which is strictly mean-zero).
inline GaussianState make_input(const RunConfig& config) {
    if (config.input_type == "coherent")
        return coherent(std::complex<double>(config.alpha_re, config.alpha_im));
    if (config.input_type == "vacuum") return vacuum(1);
    if (config.input_type == "thermal")
        return displace(thermal(1, config.thermal_var), 0, 2.0 * config.alpha_re, 2.0 * config.alpha_im);
    if (config.input_type == "squeezed") {
        Mat cov(2, 2);
        cov << std::exp(-2.0 * config.squeeze_r), 0.0,
               0.0, std::exp(2.0 * config.squeeze_r);
        Vec mean(2);
        mean << 2.0 * config.alpha_re, 2.0 * config.alpha_im;
        return GaussianState(std::move(mean), std::move(cov));
    }
    throw ConfigError("unknown input_type '" + config.input_type + "'");
}

inline void validate_config(const RunConfig& config) {
    if (config.command != "run-amp" && config.command != "sweep-nf" && config.command != "spectrum" &&
        config.command != "phase-conjugate")
        throw ConfigError("command must be one of run-amp, sweep-nf, spectrum, phase-conjugate (got '" +
                          config.command + "')");
    to_amplifier_config(config).validate();  // throws std::invalid_argument on bad knobs
    if (config.eta_hd <= 0.0 || config.eta_hd > 1.0)
        throw ConfigError("eta_hd must lie in (0, 1]");
    if (config.input_type != "coherent" && config.input_type != "squeezed" &&
        config.input_type != "thermal" && config.input_type != "vacuum")
        throw ConfigError("unknown input_type '" + config.input_type + "'");
    // Sub-shot-noise thermal_var is accepted here on purpose; the pipeline's
    // physicality gate rejects it with the dedicated unphysical-state exit.
    if (config.input_type == "thermal" && (!(config.thermal_var > 0.0) || config.thermal_var > 1e6))
        throw ConfigError("thermal_var must lie in (0, 1e6]");
    if (config.input_type == "squeezed" && std::abs(config.squeeze_r) > 10.0)
        throw ConfigError("squeeze_r magnitude capped at 10");
    if (config.ancilla_squeezing > 10.0) throw ConfigError("ancilla_squeezing capped at 10");
    if (config.backend != "ensemble" && config.backend != "trajectories")
        throw ConfigError("backend must be 'ensemble' or 'trajectories'");
    if (config.n_traj < 1 || config.n_traj > 10'000'000)
        throw ConfigError("n_traj must lie in [1, 1e7]");
    if (config.format != "auto" && config.format != "csv" && config.format != "json")
        throw ConfigError("format must be auto, csv, or json");
    if (!(config.center_freq > 0.0)) throw ConfigError("center_freq must be > 0");
    if (!(config.span > 0.0)) throw ConfigError("span must be > 0");
    if (!(config.rbw > 0.0) || config.rbw > config.span)
        throw ConfigError("rbw must lie in (0, span]");
    if (!(config.vbw > 0.0)) throw ConfigError("vbw must be > 0");
    if (config.gain_min < 1.0) throw ConfigError("gain_min must be >= 1");
    if (config.gain_max < config.gain_min) throw ConfigError("gain_max must be >= gain_min");
    if (config.gain_max > 1e4) throw ConfigError("gain_max capped at 1e4");
    if (config.gain_points < 1) throw ConfigError("gain_points must be >= 1");
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_exact(*v) : "auto";
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

inline std::optional<double> parse_opt_double(const std::string& key, const std::string& value) {
    if (value == "auto") return std::nullopt;
    return parse_double(key, value);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        // stoull would silently wrap "-4" to a huge value
        if (!value.empty() && value.front() == '-') throw std::invalid_argument("negative");
        std::size_t used = 0;
        std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
}

}  // namespace detail

/// Parse the flat `key = value` format ('#' comments, blank lines allowed).
/// Unknown and duplicate keys are hard errors.
inline RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"command", [](RunConfig& c, const std::string&, const std::string& v) { c.command = v; }},
        {"T", [](RunConfig& c, const std::string& k, const std::string& v) { c.T = detail::parse_double(k, v); }},
        {"electronic_gain", [](RunConfig& c, const std::string& k, const std::string& v) { c.electronic_gain = detail::parse_opt_double(k, v); }},
        {"eta_inline", [](RunConfig& c, const std::string& k, const std::string& v) { c.eta_inline = detail::parse_double(k, v); }},
        {"coupler_transmission", [](RunConfig& c, const std::string& k, const std::string& v) { c.coupler_transmission = detail::parse_double(k, v); }},
        {"technical_noise", [](RunConfig& c, const std::string& k, const std::string& v) { c.technical_noise = detail::parse_double(k, v); }},
        {"eta_hd", [](RunConfig& c, const std::string& k, const std::string& v) { c.eta_hd = detail::parse_double(k, v); }},
        {"ancilla_squeezing", [](RunConfig& c, const std::string& k, const std::string& v) { c.ancilla_squeezing = detail::parse_double(k, v); }},
        {"lambda_x", [](RunConfig& c, const std::string& k, const std::string& v) { c.lambda_x = detail::parse_opt_double(k, v); }},
        {"lambda_p", [](RunConfig& c, const std::string& k, const std::string& v) { c.lambda_p = detail::parse_opt_double(k, v); }},
        {"input_type", [](RunConfig& c, const std::string&, const std::string& v) { c.input_type = v; }},
        {"alpha_re", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha_re = detail::parse_double(k, v); }},
        {"alpha_im", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha_im = detail::parse_double(k, v); }},
        {"squeeze_r", [](RunConfig& c, const std::string& k, const std::string& v) { c.squeeze_r = detail::parse_double(k, v); }},
        {"thermal_var", [](RunConfig& c, const std::string& k, const std::string& v) { c.thermal_var = detail::parse_double(k, v); }},
        {"backend", [](RunConfig& c, const std::string&, const std::string& v) { c.backend = v; }},
        {"n_traj", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_traj = detail::parse_int(k, v); }},
        {"master_seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.master_seed = detail::parse_u64(k, v); }},
        {"out_path", [](RunConfig& c, const std::string&, const std::string& v) { c.out_path = v; }},
        {"format", [](RunConfig& c, const std::string&, const std::string& v) { c.format = v; }},
        {"center_freq", [](RunConfig& c, const std::string& k, const std::string& v) { c.center_freq = detail::parse_double(k, v); }},
        {"span", [](RunConfig& c, const std::string& k, const std::string& v) { c.span = detail::parse_double(k, v); }},
        {"rbw", [](RunConfig& c, const std::string& k, const std::string& v) { c.rbw = detail::parse_double(k, v); }},
        {"vbw", [](RunConfig& c, const std::string& k, const std::string& v) { c.vbw = detail::parse_double(k, v); }},
        {"gain_min", [](RunConfig& c, const std::string& k, const std::string& v) { c.gain_min = detail::parse_double(k, v); }},
        {"gain_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.gain_max = detail::parse_double(k, v); }},
        {"gain_points", [](RunConfig& c, const std::string& k, const std::string& v) { c.gain_points = detail::parse_int(k, v); }},
    };

    std::vector<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        for (const auto& k : seen)
            if (k == key) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        seen.push_back(key);
        it->second(config, key, value);
    }
    return config;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Serialize with full double precision; parse_config_text() of the result
/// reproduces the config exactly.
inline std::string write_config(const RunConfig& c) {
    std::ostringstream out;
    out << "command = " << c.command << "\n";
    out << "T = " << detail::fmt_exact(c.T) << "\n";
    out << "electronic_gain = " << detail::fmt_opt(c.electronic_gain) << "\n";
    out << "eta_inline = " << detail::fmt_exact(c.eta_inline) << "\n";
    out << "coupler_transmission = " << detail::fmt_exact(c.coupler_transmission) << "\n";
    out << "technical_noise = " << detail::fmt_exact(c.technical_noise) << "\n";
    out << "eta_hd = " << detail::fmt_exact(c.eta_hd) << "\n";
    out << "ancilla_squeezing = " << detail::fmt_exact(c.ancilla_squeezing) << "\n";
    out << "lambda_x = " << detail::fmt_opt(c.lambda_x) << "\n";
    out << "lambda_p = " << detail::fmt_opt(c.lambda_p) << "\n";
    out << "input_type = " << c.input_type << "\n";
    out << "alpha_re = " << detail::fmt_exact(c.alpha_re) << "\n";
    out << "alpha_im = " << detail::fmt_exact(c.alpha_im) << "\n";
    out << "squeeze_r = " << detail::fmt_exact(c.squeeze_r) << "\n";
    out << "thermal_var = " << detail::fmt_exact(c.thermal_var) << "\n";
    out << "backend = " << c.backend << "\n";
    out << "n_traj = " << c.n_traj << "\n";
    out << "master_seed = " << c.master_seed << "\n";
    out << "out_path = " << c.out_path << "\n";
    out << "format = " << c.format << "\n";
    out << "center_freq = " << detail::fmt_exact(c.center_freq) << "\n";
    out << "span = " << detail::fmt_exact(c.span) << "\n";
    out << "rbw = " << detail::fmt_exact(c.rbw) << "\n";
    out << "vbw = " << detail::fmt_exact(c.vbw) << "\n";
    out << "gain_min = " << detail::fmt_exact(c.gain_min) << "\n";
    out << "gain_max = " << detail::fmt_exact(c.gain_max) << "\n";
    out << "gain_points = " << c.gain_points << "\n";
    return out.str();
}

}  // namespace linamp
