#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfi/channel_csv.hpp"
#include "rfi/cognitive.hpp"
#include "rfi/link.hpp"
#include "rfi/metrics.hpp"
#include "rfi/presets.hpp"

using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// "k1=v1,k2=v2" or repeated --params tokens; numeric values become JSON
// numbers, anything else stays a string.
json parse_kv(const std::vector<std::string>& tokens) {
    json out = json::object();
    for (const std::string& tok : tokens) {
        std::stringstream ss(tok);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const size_t eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument("expected KEY=VALUE, got: " + item);
            const std::string key = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            try {
                size_t used = 0;
                const double d = std::stod(val, &used);
                if (used == val.size()) {
                    out[key] = d;
                    continue;
                }
            } catch (const std::exception&) {
            }
            out[key] = val;
        }
    }
    return out;
}

// Flat key=value params -> the nested channel spec channel_from_json reads.
// A single notch may be given inline (f0_hz/depth_db/q) with base= naming
// either a preset or another model.
json channel_spec_from_params(const std::string& model, json params) {
    if (params.contains("f0_hz") || params.contains("depth_db") ||
        params.contains("q")) {
        json notch = {{"f0_hz", params.at("f0_hz")},
                      {"depth_db", params.at("depth_db")},
                      {"q", params.at("q")}};
        params.erase("f0_hz");
        params.erase("depth_db");
        params.erase("q");
        json base;
        if (params.contains("base")) {
            base = params.at("base");  // preset name
            params.erase("base");
        } else {
            base = channel_spec_from_params(model, params);
        }
        return json{{"model", "notched"},
                    {"params", {{"base", base}, {"notches", json::array({notch})}}}};
    }
    return json{{"model", model}, {"params", params}};
}

// preset name | path.csv | model:k=v,k=v
rfi::ChannelModel channel_from_spec_string(const std::string& spec) {
    const size_t colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string model = spec.substr(0, colon);
        const json params = parse_kv({spec.substr(colon + 1)});
        return rfi::channel_from_json(channel_spec_from_params(model, params));
    }
    if (spec.size() > 4 && spec.compare(spec.size() - 4, 4, ".csv") == 0)
        return rfi::ChannelModel::tabulated(rfi::load_channel_csv(spec));
    return rfi::channel_preset(spec);
}

std::string eye_csv(const rfi::EyeResult& eye) {
    std::ostringstream out;
    out << "t_frac,v,count\n";
    const double dv = (eye.v_max - eye.v_min) / eye.bins_v;
    char line[96];
    for (int bt = 0; bt < eye.bins_t; ++bt) {
        const double t = (bt + 0.5) / eye.bins_t;
        for (int bv = 0; bv < eye.bins_v; ++bv) {
            const uint32_t c =
                eye.counts[static_cast<size_t>(bt) * eye.bins_v + bv];
            if (c == 0) continue;
            std::snprintf(line, sizeof line, "%.6f,%.9g,%u\n", t,
                          eye.v_min + (bv + 0.5) * dv, c);
            out << line;
        }
    }
    return out.str();
}

std::string psd_csv(const rfi::PsdEstimate& psd) {
    std::ostringstream out;
    out << "freq_hz,psd_db\n";
    char line[80];
    for (size_t i = 0; i < psd.freq_hz.size(); ++i) {
        const double db = 10.0 * std::log10(std::max(psd.psd[i], 1e-40));
        std::snprintf(line, sizeof line, "%.9g,%.6f\n", psd.freq_hz[i], db);
        out << line;
    }
    return out.str();
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& eye_path, const std::string& spectrum_path) {
    const rfi::ScenarioConfig config = rfi::load_scenario(config_path);
    rfi::LinkArtifacts artifacts;
    const rfi::LinkReport report = rfi::run_link(config, &artifacts);
    write_text(out_path, report.to_json().dump(2) + "\n");

    if (!eye_path.empty()) {
        const rfi::Band* baseband = nullptr;
        for (const rfi::Band& b : artifacts.resolved_plan.bands)
            if (b.carrier_hz == 0.0) baseband = &b;
        if (!baseband)
            throw std::runtime_error("--eye requires a baseband band in the plan");
        const auto eye = rfi::eye_histogram(
            artifacts.rx_waveform, 1.0 / baseband->symbol_rate_hz, 64, 64,
            static_cast<int>(config.channel_taps * baseband->symbol_rate_hz /
                             artifacts.sample_rate_hz) +
                2 * config.rrc_span,
            static_cast<int>(rfi::axis_levels(baseband->modulation).size()));
        write_text(eye_path, eye_csv(eye));
    }
    if (!spectrum_path.empty()) {
        const auto psd = rfi::estimate_psd(artifacts.rx_waveform, 4096);
        write_text(spectrum_path, psd_csv(psd));
    }
    return 0;
}

int cmd_probe(const std::string& spec, double fmin, double fmax, size_t points,
              double tone_power, double sigma, uint64_t seed, double fs,
              const std::string& out_path) {
    const rfi::ChannelModel model = channel_from_spec_string(spec);
    if (fs <= 0.0) fs = 4.0 * fmax;
    rfi::ProbeConfig pc;
    pc.tone_power = tone_power;
    pc.sigma = sigma;
    const auto grid = rfi::log_probe_grid(fmin, fmax, points);
    const auto profile = rfi::probe_channel(model, grid, fs, pc, seed);
    write_text(out_path, rfi::profile_to_json(profile).dump(2) + "\n");
    return 0;
}

int cmd_allocate(const std::string& profile_path, double target_ber,
                 int max_bands, double margin_db,
                 std::vector<double> carrier_grid,
                 std::vector<double> symbol_rates, uint64_t seed,
                 const std::string& out_path) {
    std::ifstream in(profile_path);
    if (!in) throw std::runtime_error("cannot open profile: " + profile_path);
    const auto profile = rfi::profile_from_json(json::parse(in));
    if (profile.sample_rate_hz <= 0.0)
        throw std::runtime_error("profile lacks sample_rate_hz");

    const double fmax = profile.probe_freqs_hz.back();
    if (carrier_grid.empty()) {
        // default grid: baseband plus 8 carriers across the probed span
        carrier_grid.push_back(0.0);
        for (int i = 1; i <= 8; ++i) carrier_grid.push_back(fmax * i / 9.0);
    }
    if (symbol_rates.empty())
        symbol_rates = {fmax / 40.0, fmax / 20.0, fmax / 10.0};

    rfi::AllocationConstraints constraints;
    constraints.max_bands = max_bands;
    constraints.snr_margin_db = margin_db;
    constraints.carrier_grid_hz = std::move(carrier_grid);
    constraints.symbol_rates_hz = std::move(symbol_rates);
    constraints.usable_band_hz = fmax;

    const size_t trials = std::max<size_t>(
        200000, static_cast<size_t>(std::ceil(50.0 / target_ber)));
    const auto table =
        rfi::required_snr_table(target_ber, rfi::all_modulations(), trials, seed);
    const auto result = rfi::allocate_bands(
        profile, table, constraints,
        rfi::sim_tx_power_density_dbhz(profile.sample_rate_hz));
    write_text(out_path, rfi::allocation_to_json(result).dump(2) + "\n");
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              double from, double to, int steps, const std::string& out_path) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    const json base = json::parse(in);

    std::string ptr = "/" + param;
    for (char& c : ptr)
        if (c == '.') c = '/';
    const json::json_pointer where(ptr);

    std::ostringstream out;
    out << param << ",aggregate_bps,aggregate_ber,worst_band_ber,worst_band_snr_db\n";
    for (int i = 0; i < steps; ++i) {
        const double value =
            steps > 1 ? from + (to - from) * i / (steps - 1) : from;
        json j = base;
        j[where] = value;
        const auto report = rfi::run_link(rfi::scenario_from_json(j));
        double worst_ber = 0.0, worst_snr = 1e300;
        for (const auto& band : report.per_band) {
            worst_ber = std::max(worst_ber, band.ber.ber);
            worst_snr = std::min(worst_snr, band.snr_db);
        }
        char line[160];
        std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.4f\n", value,
                      report.aggregate_bps, report.aggregate_ber, worst_ber,
                      worst_snr);
        out << line;
    }
    write_text(out_path, out.str());
    return 0;
}

int cmd_synth_channel(const std::string& model_name,
                      const std::vector<std::string>& params, double fmax,
                      size_t points, const std::string& out_path) {
    json kv = parse_kv(params);
    // a bare preset name works too
    rfi::ChannelModel model;
    const auto& presets = rfi::channel_preset_names();
    if (std::find(presets.begin(), presets.end(), model_name) != presets.end() &&
        kv.empty())
        model = rfi::channel_preset(model_name);
    else
        model = rfi::channel_from_json(
            channel_spec_from_params(model_name, std::move(kv)));

    std::vector<double> freqs(points);
    for (size_t i = 0; i < points; ++i)
        freqs[i] = fmax * static_cast<double>(i) / static_cast<double>(points - 1);
    rfi::save_channel_csv(out_path, rfi::evaluate_response(model, freqs));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-band serial link simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, eye_path, spectrum_path;
    auto* sim = app.add_subcommand("simulate", "run a scenario end to end");
    sim->add_option("--config", config_path, "scenario JSON")->required();
    sim->add_option("--out", out_path, "report JSON output")->required();
    sim->add_option("--eye", eye_path, "eye histogram CSV (baseband band)");
    sim->add_option("--spectrum", spectrum_path, "RX PSD CSV");

    std::string channel_spec;
    double fmin = 1e8, fmax = 1e10, tone_power = 0.5, sigma = 0.0, fs = 0.0;
    size_t points = 64;
    uint64_t seed = 1;
    auto* probe = app.add_subcommand("probe", "CW-sweep a channel");
    probe->add_option("--channel", channel_spec,
                      "preset | file.csv | model:k=v,k=v")->required();
    probe->add_option("--fmin", fmin, "lowest tone, Hz");
    probe->add_option("--fmax", fmax, "highest tone, Hz");
    probe->add_option("--points", points, "number of tones");
    probe->add_option("--tone-power", tone_power, "TX tone power");
    probe->add_option("--sigma", sigma, "RX noise std dev");
    probe->add_option("--seed", seed, "noise seed");
    probe->add_option("--sample-rate", fs, "simulation rate (default 4*fmax)");
    probe->add_option("--out", out_path, "profile JSON output")->required();

    std::string profile_path;
    double target_ber = 1e-3, margin_db = 3.0;
    int max_bands = 3;
    std::vector<double> carrier_grid, symbol_rates;
    auto* alloc = app.add_subcommand("allocate", "plan bands from a probe profile");
    alloc->add_option("--profile", profile_path, "probe profile JSON")->required();
    alloc->add_option("--target-ber", target_ber, "per-band BER target");
    alloc->add_option("--max-bands", max_bands, "band count cap");
    alloc->add_option("--margin-db", margin_db, "SNR margin, dB");
    alloc->add_option("--carrier-grid", carrier_grid, "candidate carriers, Hz")
        ->delimiter(',');
    alloc->add_option("--symbol-rates", symbol_rates, "candidate rates, baud")
        ->delimiter(',');
    alloc->add_option("--seed", seed, "Monte-Carlo seed");
    alloc->add_option("--out", out_path, "plan JSON output")->required();

    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 2;
    auto* sweep = app.add_subcommand("sweep", "re-run a scenario over a parameter");
    sweep->add_option("--config", config_path, "scenario JSON")->required();
    sweep->add_option("--param", param,
                      "config field, dots for nesting (e.g. equalizer.mu)")
        ->required();
    sweep->add_option("--from", from, "first value")->required();
    sweep->add_option("--to", to, "last value")->required();
    sweep->add_option("--steps", steps, "number of points")->required();
    sweep->add_option("--out", out_path, "results CSV")->required();

    std::string model_name;
    std::vector<std::string> params;
    double synth_fmax = 2e10;
    size_t synth_points = 512;
    auto* synth = app.add_subcommand("synth-channel",
                                     "tabulate a channel model to CSV");
    synth->add_option("--model", model_name, "model or preset name")->required();
    synth->add_option("--params", params, "K=V pairs (repeat or comma-join)");
    synth->add_option("--fmax", synth_fmax, "table upper edge, Hz");
    synth->add_option("--points", synth_points, "table rows");
    synth->add_option("--out", out_path, "channel CSV output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(config_path, out_path, eye_path, spectrum_path);
        if (*probe)
            return cmd_probe(channel_spec, fmin, fmax, points, tone_power, sigma,
                             seed, fs, out_path);
        if (*alloc)
            return cmd_allocate(profile_path, target_ber, max_bands, margin_db,
                                std::move(carrier_grid), std::move(symbol_rates),
                                seed, out_path);
        if (*sweep) return cmd_sweep(config_path, param, from, to, steps, out_path);
        if (*synth)
            return cmd_synth_channel(model_name, params, synth_fmax, synth_points,
                                     out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
