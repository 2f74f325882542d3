#pragma once

#include "linamp/amplifier.hpp"
#include "linamp/config.hpp"
#include "linamp/gaussian_state.hpp"
#include "linamp/metrics.hpp"
#include "linamp/rng.hpp"
#include "linamp/spectrum.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace linamp {

using json = nlohmann::ordered_json;

namespace detail {

/// 12 significant digits, the CSV contract.
inline std::string fmt_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string fmt_g12(const std::optional<double>& v) { return v ? fmt_g12(*v) : ""; }

/// Each command has one native output format; "auto" selects it, anything
/// else must agree.
inline void require_format(const RunConfig& config, const char* native) {
    if (config.format != "auto" && config.format != native)
        throw ConfigError("command '" + config.command + "' writes " + native +
                          " output; set format = auto or " + native);
}

inline json state_json(const GaussianState& state) {
    json j;
    j["mean"] = std::vector<double>(state.mean().begin(), state.mean().end());
    json rows = json::array();
    for (int r = 0; r < state.cov().rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < state.cov().cols(); ++c) row.push_back(state.cov()(r, c));
        rows.push_back(std::move(row));
    }
    j["cov"] = std::move(rows);
    return j;
}

inline json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

inline json config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["T"] = c.T;
    j["electronic_gain"] = c.electronic_gain ? json(*c.electronic_gain) : json("auto");
    j["eta_inline"] = c.eta_inline;
    j["coupler_transmission"] = c.coupler_transmission;
    j["technical_noise"] = c.technical_noise;
    j["eta_hd"] = c.eta_hd;
    j["ancilla_squeezing"] = c.ancilla_squeezing;
    j["lambda_x"] = c.lambda_x ? json(*c.lambda_x) : json("auto");
    j["lambda_p"] = c.lambda_p ? json(*c.lambda_p) : json("auto");
    j["input_type"] = c.input_type;
    j["alpha_re"] = c.alpha_re;
    j["alpha_im"] = c.alpha_im;
    j["squeeze_r"] = c.squeeze_r;
    j["thermal_var"] = c.thermal_var;
    j["backend"] = c.backend;
    j["n_traj"] = c.n_traj;
    j["master_seed"] = c.master_seed;
    // out_path is delivery, not physics: leaving it out keeps the rendered
    // document byte-identical whether it goes to stdout or a file
    j["format"] = c.format;
    j["center_freq"] = c.center_freq;
    j["span"] = c.span;
    j["rbw"] = c.rbw;
    j["vbw"] = c.vbw;
    j["gain_min"] = c.gain_min;
    j["gain_max"] = c.gain_max;
    j["gain_points"] = c.gain_points;
    return j;
}

inline json report_json(const NoiseFigureReport& r) {
    json j;
    j["gain_x"] = opt_json(r.gain_x);
    j["gain_p"] = opt_json(r.gain_p);
    j["gain_x_db"] = opt_json(r.gain_x_db);
    j["gain_p_db"] = opt_json(r.gain_p_db);
    j["added_noise_x"] = opt_json(r.added_noise_x);
    j["added_noise_p"] = opt_json(r.added_noise_p);
    j["nf_x"] = opt_json(r.nf_x);
    j["nf_p"] = opt_json(r.nf_p);
    j["nf_x_db"] = opt_json(r.nf_x_db);
    j["nf_p_db"] = opt_json(r.nf_p_db);
    j["var_in_x"] = r.var_in_x;
    j["var_in_p"] = r.var_in_p;
    j["var_out_x"] = r.var_out_x;
    j["var_out_p"] = r.var_out_p;
    j["loss_corrected"] = r.loss_corrected;
    j["eta_hd"] = r.eta_hd;
    return j;
}

/// The states as seen by the (possibly lossy) verification homodyne; the
/// loss correction inside noise_figure undoes eta_hd exactly.
inline NoiseFigureReport verified_noise_figure(const RunConfig& config, const GaussianState& input,
                                               const GaussianState& output) {
    if (config.eta_hd < 1.0)
        return noise_figure(loss_channel(input, 0, config.eta_hd),
                            loss_channel(output, 0, config.eta_hd), config.eta_hd,
                            /*assume_phase_insensitive=*/true);
    return noise_figure(input, output, 1.0, /*assume_phase_insensitive=*/true);
}

}  // namespace detail

/// Amplify the configured input once and report gains/noise figures as JSON.
/// The trajectories backend also embeds the Monte Carlo summary.
inline std::string render_run_amp(const RunConfig& config) {
    validate_config(config);
    detail::require_format(config, "json");
    GaussianState input = make_input(config);
    AmplifierConfig amp = to_amplifier_config(config);

    std::optional<TrajectoryEnsemble> ensemble;
    if (config.backend == "trajectories")
        ensemble = run_trajectories(amp, input, config.n_traj, config.master_seed);
    GaussianState output = ensemble ? ensemble->summary_state() : run_ensemble(amp, input);

    json j;
    j["command"] = "run-amp";
    j["config"] = detail::config_json(config);
    j["report"] = detail::report_json(detail::verified_noise_figure(config, input, output));
    j["input"] = detail::state_json(input);
    j["output"] = detail::state_json(output);
    if (ensemble) {
        json e;
        e["n_traj"] = ensemble->n_trajectories();
        e["master_seed"] = ensemble->master_seed;
        e["sample_mean"] = std::vector<double>(ensemble->summary_mean.begin(), ensemble->summary_mean.end());
        e["sample_cov"] = detail::state_json(ensemble->summary_state())["cov"];
        j["ensemble"] = std::move(e);
    } else {
        j["ensemble"] = nullptr;
    }
    return j.dump(2) + "\n";
}

/// Noise figure vs gain: reference curves plus simulated values. The
/// detector/technical reference curves use the configured eta_inline and
/// technical_noise when set, else the canonical 0.93 / 2.0.
inline std::string render_sweep_nf(const RunConfig& config) {
    validate_config(config);
    detail::require_format(config, "csv");
    GaussianState input = make_input(config);
    double eta_curve = config.eta_inline < 1.0 ? config.eta_inline : 0.93;
    double ncl_curve = config.technical_noise > 0.0 ? config.technical_noise : 2.0;

    std::ostringstream out;
    out << "# linamp sweep-nf v1\n";
    out << "# eta_curve = " << detail::fmt_g12(eta_curve) << "\n";
    out << "# ncl_curve = " << detail::fmt_g12(ncl_curve) << "\n";
    out << "G,nf_ideal,nf_detector,nf_technical,nf_simulated_x,nf_simulated_p\n";
    for (int i = 0; i < config.gain_points; ++i) {
        double G = config.gain_points == 1
                       ? config.gain_min
                       : config.gain_min +
                             i * (config.gain_max - config.gain_min) / (config.gain_points - 1);
        AmplifierConfig amp = to_amplifier_config(config);
        amp.tap_transmission = 1.0 / G;
        GaussianState output = run_ensemble(amp, input);
        NoiseFigureReport rep = detail::verified_noise_figure(config, input, output);
        out << detail::fmt_g12(G) << ',' << detail::fmt_g12(nf_ideal(G)) << ','
            << detail::fmt_g12(nf_detector(G, eta_curve)) << ','
            << detail::fmt_g12(nf_technical(G, ncl_curve)) << ',' << detail::fmt_g12(rep.nf_x) << ','
            << detail::fmt_g12(rep.nf_p) << "\n";
    }
    return out.str();
}

/// Input and output spectra around the sideband carrier, plus a peak/floor
/// summary. Spectra always use the exact-moment output state.
inline std::string render_spectrum(const RunConfig& config) {
    validate_config(config);
    detail::require_format(config, "csv");
    GaussianState input = make_input(config);
    GaussianState output = run_ensemble(to_amplifier_config(config), input);
    Rng rng_in = Rng::for_stream(config.master_seed, 0);
    Rng rng_out = Rng::for_stream(config.master_seed, 1);
    PowerSpectrum spec_in = synthesize_spectrum(input, 0, 0.0, config.center_freq, config.span,
                                                config.rbw, config.vbw, rng_in);
    PowerSpectrum spec_out = synthesize_spectrum(output, 0, 0.0, config.center_freq, config.span,
                                                 config.rbw, config.vbw, rng_out);
    PeakFloor pf_in = peak_floor_report(spec_in);
    PeakFloor pf_out = peak_floor_report(spec_out);

    std::ostringstream out;
    out << "# linamp spectrum v1\n";
    auto section = [&out](const char* name, const PowerSpectrum& s) {
        out << "# section: " << name << "\n";
        out << "frequency_hz,power_db\n";
        for (std::size_t i = 0; i < s.frequency_hz.size(); ++i)
            out << detail::fmt_g12(s.frequency_hz[i]) << ',' << detail::fmt_g12(s.power_db[i]) << "\n";
    };
    section("input", spec_in);
    section("output", spec_out);
    out << "# section: summary\n";
    out << "key,value\n";
    out << "input_peak_db," << detail::fmt_g12(pf_in.peak_db) << "\n";
    out << "input_floor_db," << detail::fmt_g12(pf_in.floor_db) << "\n";
    out << "output_peak_db," << detail::fmt_g12(pf_out.peak_db) << "\n";
    out << "output_floor_db," << detail::fmt_g12(pf_out.floor_db) << "\n";
    out << "peak_gain_db," << detail::fmt_g12(pf_out.peak_db - pf_in.peak_db) << "\n";
    out << "floor_rise_db," << detail::fmt_g12(pf_out.floor_db - pf_in.floor_db) << "\n";
    out << "rbw_hz," << detail::fmt_g12(config.rbw) << "\n";
    out << "vbw_hz," << detail::fmt_g12(config.vbw) << "\n";
    return out.str();
}

/// Run the phase-conjugating variant and report both outputs against their
/// perfect-entanglement predictions.
inline std::string render_phase_conjugate(const RunConfig& config) {
    validate_config(config);
    detail::require_format(config, "json");
    GaussianState input = make_input(config);
    AmplifierConfig amp = to_amplifier_config(config);
    GaussianState both = run_phase_conjugate(amp, input);
    GaussianState signal = partial_trace(both, {0});
    GaussianState conj = partial_trace(both, {1});

    double G = amp.gain();
    double rt = (1.0 - config.T) / config.T;
    Vec ideal_mean = std::sqrt(G) * input.mean();
    Mat ideal_cov = G * input.cov() + (G - 1.0) * Mat::Identity(2, 2);
    Mat flip = Mat::Identity(2, 2);
    flip(1, 1) = -1.0;
    Vec conj_mean = std::sqrt(rt) * flip * input.mean();
    Mat conj_cov = rt * flip * input.cov() * flip + (1.0 / config.T) * Mat::Identity(2, 2);

    auto block = [](const GaussianState& s, const Vec& mean_pred, const Mat& cov_pred) {
        json b = detail::state_json(s);
        b["predicted_mean"] = std::vector<double>(mean_pred.begin(), mean_pred.end());
        json rows = json::array();
        for (int r = 0; r < cov_pred.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < cov_pred.cols(); ++c) row.push_back(cov_pred(r, c));
            rows.push_back(std::move(row));
        }
        b["predicted_cov"] = std::move(rows);
        b["mean_deviation"] = (s.mean() - mean_pred).cwiseAbs().maxCoeff();
        b["cov_deviation"] = (s.cov() - cov_pred).cwiseAbs().maxCoeff();
        return b;
    };

    json j;
    j["command"] = "phase-conjugate";
    j["config"] = detail::config_json(config);
    j["signal"] = block(signal, ideal_mean, ideal_cov);
    j["conjugate"] = block(conj, conj_mean, conj_cov);
    j["expected_deviation_scale"] = 2.0 * std::exp(-2.0 * config.ancilla_squeezing);
    return j.dump(2) + "\n";
}

inline void write_output(const std::string& text, const std::string& out_path) {
    if (out_path == "-" || out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + out_path + "'");
}

inline int cmd_run_amp(const RunConfig& config) {
    write_output(render_run_amp(config), config.out_path);
    return 0;
}

inline int cmd_sweep_nf(const RunConfig& config) {
    write_output(render_sweep_nf(config), config.out_path);
    return 0;
}

inline int cmd_spectrum(const RunConfig& config) {
    write_output(render_spectrum(config), config.out_path);
    return 0;
}

inline int cmd_phase_conjugate(const RunConfig& config) {
    write_output(render_phase_conjugate(config), config.out_path);
    return 0;
}

/// Route a fully populated config to its command.
inline int dispatch_command(const RunConfig& config) {
    if (config.command == "run-amp") return cmd_run_amp(config);
    if (config.command == "sweep-nf") return cmd_sweep_nf(config);
    if (config.command == "spectrum") return cmd_spectrum(config);
    if (config.command == "phase-conjugate") return cmd_phase_conjugate(config);
    throw ConfigError("no command selected; pass a subcommand or set 'command' in the config file");
}

}  // namespace linamp
