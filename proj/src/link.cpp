#include "rfi/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "rfi/channel_csv.hpp"

namespace rfi {

using nlohmann::json;

namespace {

SampledWaveform modulate_symbols(const std::vector<cplx>& symbols,
                                 const Band& band, double fs, int span) {
    const int sps = samples_per_symbol(band, fs);
    const auto taps = rrc_taps(band.rolloff, span, sps);
    auto env = shape_symbols(symbols, taps, sps, fs);
    auto wave = mix_carrier(env, band.carrier_hz, 0.0);
    for (double& v : wave.samples) v *= band.power_scale;
    return wave;
}

// End-to-end cursor timing and carrier phase of one band through channel
// (+ optional CTLE). The delay is relative to the nominal TX+RX filter
// group delay; the phase is the rotation of the cursor sample (a bulk
// delay d alone rotates the downmixed envelope by -w_c*d).
struct BandTiming {
    int delay_samples = 0;
    double phase_rad = 0.0;
    double cursor_gain = 1.0;  // |H| at the cursor, used as an ideal AGC
};

BandTiming measure_band_timing(const ChannelModel& model, const Band& band,
                               double fs, size_t n_taps, int span,
                               const std::optional<CtleConfig>& ctle) {
    const int sps = samples_per_symbol(band, fs);
    auto wave = modulate_symbols({cplx(1.0, 0.0)}, band, fs, span);
    auto rx = apply_channel(wave, model, n_taps);
    if (ctle) rx = ctle_apply(rx, *ctle);
    const auto mf = matched_filter_output(rx, band, 0.0, span);
    size_t peak = 0;
    double best = -1.0;
    for (size_t i = 0; i < mf.size(); ++i) {
        const double m = std::abs(mf[i]);
        if (m > best) {
            best = m;
            peak = i;
        }
    }
    BandTiming t;
    t.delay_samples = static_cast<int>(peak) - span * sps;
    t.phase_rad = std::arg(mf[peak]);
    t.cursor_gain = std::max(best, 1e-9);
    return t;
}

double candidate_rate_gcd(const std::vector<double>& rates) {
    long long g = 0;
    for (double r : rates) g = std::gcd(g, static_cast<long long>(std::llround(r)));
    if (g <= 0) throw std::invalid_argument("bad symbol rate candidates");
    return static_cast<double>(g);
}

json eq_to_json(const EqualizerConfig& eq) {
    if (!eq.enabled) return json("off");
    json j;
    j["ffe_len"] = eq.ffe_len;
    j["dfe_len"] = eq.dfe_len;
    j["mu"] = eq.mu;
    if (eq.tx_fir) {
        j["tx_fir"] = {{"taps", eq.tx_fir->taps},
                       {"cursor_index", eq.tx_fir->cursor_index}};
    }
    if (eq.ctle) {
        j["ctle"] = {{"zero_hz", eq.ctle->zero_hz},
                     {"pole1_hz", eq.ctle->pole1_hz},
                     {"pole2_hz", eq.ctle->pole2_hz},
                     {"dc_gain", eq.ctle->dc_gain}};
    }
    return j;
}

}  // namespace

LinkReport run_link(const ScenarioConfig& config, LinkArtifacts* artifacts) {
    config.channel.validate();

    // resolve the band plan
    BandPlan plan;
    std::optional<ChannelProfile> profile;
    double fs = config.sample_rate_hz;
    if (config.plan) {
        plan = *config.plan;
        plan.validate();
        if (fs == 0.0) fs = auto_sample_rate(plan);
    } else if (config.auto_plan) {
        const AutoPlanConfig& ap = *config.auto_plan;
        ap.constraints.validate();
        if (fs == 0.0) {
            const double g = candidate_rate_gcd(ap.constraints.symbol_rates_hz);
            fs = std::ceil(8.0 * ap.constraints.usable_band_hz / g) * g;
        }
        ProbeConfig pc;
        pc.tone_power = ap.probe_tone_power;
        pc.sigma = config.sigma;
        pc.tone_duration_samples = ap.probe_tone_samples;
        pc.channel_taps = config.channel_taps;
        profile = probe_channel(
            config.channel,
            log_probe_grid(ap.probe_fmin_hz, ap.probe_fmax_hz, ap.probe_points),
            fs, pc, config.seed);
        const auto table = required_snr_table(ap.target_ber, all_modulations(),
                                              ap.table_trials, config.seed);
        const auto alloc = allocate_bands(*profile, table, ap.constraints,
                                          sim_tx_power_density_dbhz(fs));
        plan = alloc.plan;
    } else {
        throw std::invalid_argument("scenario: neither plan nor auto plan given");
    }

    LinkReport report;
    report.seed = config.seed;

    json echo;
    echo["seed"] = config.seed;
    echo["n_bits_per_stream"] = config.n_bits_per_stream;
    echo["sigma"] = config.sigma;
    echo["sample_rate_hz"] = fs;
    echo["channel"] = config.channel_spec.is_null() ? json("unspecified")
                                                    : config.channel_spec;
    echo["plan"] = band_plan_to_json(plan);
    echo["equalizer"] = eq_to_json(config.eq);
    echo["rrc_span"] = config.rrc_span;
    echo["channel_taps"] = config.channel_taps;
    if (!config.meta.is_null()) echo["meta"] = config.meta;
    report.config_echo = echo;

    if (plan.bands.empty()) {
        report.aggregate_bps = 0.0;
        report.aggregate_ber = 0.0;
        if (artifacts) {
            artifacts->resolved_plan = plan;
            artifacts->sample_rate_hz = fs;
            artifacts->probe_profile = profile;
        }
        return report;
    }

    // TX: PRBS stream per band, map, optional FIR, shape, mix, sum
    std::vector<std::vector<uint8_t>> streams(plan.bands.size());
    std::vector<std::vector<cplx>> tx_symbols(plan.bands.size());
    SampledWaveform composite{fs, {}};
    for (size_t i = 0; i < plan.bands.size(); ++i) {
        const Band& band = plan.bands[i];
        const int bps = bits_per_symbol(band.modulation);
        size_t n_bits = config.n_bits_per_stream - config.n_bits_per_stream % bps;
        if (n_bits == 0)
            throw std::invalid_argument("scenario: too few bits per stream");
        streams[i] = prbs_generate(31, config.seed + i + 1, n_bits);
        tx_symbols[i] = map_symbols(streams[i], band.modulation);

        auto shaped = tx_symbols[i];
        if (config.eq.tx_fir) shaped = tx_fir_apply(shaped, *config.eq.tx_fir);
        auto wave = modulate_symbols(shaped, band, fs, config.rrc_span);
        if (wave.samples.size() > composite.samples.size())
            composite.samples.resize(wave.samples.size(), 0.0);
        for (size_t n = 0; n < wave.samples.size(); ++n)
            composite.samples[n] += wave.samples[n];
    }

    auto rx = apply_channel(composite, config.channel, config.channel_taps);
    rx = add_awgn(rx, config.sigma, config.seed ^ 0x9e3779b97f4a7c15ull);
    if (config.eq.ctle) rx = ctle_apply(rx, *config.eq.ctle);

    size_t total_errors = 0, total_bits = 0;
    for (size_t i = 0; i < plan.bands.size(); ++i) {
        const Band& band = plan.bands[i];
        const int sps = samples_per_symbol(band, fs);
        const size_t n_sym = tx_symbols[i].size();

        const BandTiming timing =
            measure_band_timing(config.channel, band, fs, config.channel_taps,
                                config.rrc_span, config.eq.ctle);
        const int delay = timing.delay_samples;
        auto soft =
            demodulate_band(rx, band, timing.phase_rad, delay, config.rrc_span);
        if (soft.size() < n_sym)
            throw std::runtime_error("run_link: demodulated fewer symbols than sent");
        soft.resize(n_sym);
        for (cplx& s : soft) s /= timing.cursor_gain;

        size_t n_train = 0;
        bool converged = true;
        std::vector<cplx> payload_soft, payload_decisions;

        if (config.eq.enabled) {
            n_train = std::max<size_t>(n_sym / 5, 2000);
            if (n_train >= n_sym) n_train = n_sym / 2;

            const auto& levels = axis_levels(band.modulation);
            const bool complex_mod = is_complex_modulation(band.modulation);

            std::vector<double> soft_i(n_sym), soft_q(n_sym);
            std::vector<double> train_i(n_train), train_q(n_train);
            for (size_t k = 0; k < n_sym; ++k) {
                soft_i[k] = soft[k].real();
                soft_q[k] = soft[k].imag();
            }
            for (size_t k = 0; k < n_train; ++k) {
                train_i[k] = tx_symbols[i][k].real();
                train_q[k] = tx_symbols[i][k].imag();
            }

            auto res_i = dfe_run(soft_i,
                                 DfeState::make(config.eq.ffe_len,
                                                config.eq.dfe_len, config.eq.mu),
                                 levels, &train_i);
            DfeResult res_q;
            if (complex_mod)
                res_q = dfe_run(soft_q,
                                DfeState::make(config.eq.ffe_len,
                                               config.eq.dfe_len, config.eq.mu),
                                levels, &train_q);

            auto check = [&](const DfeState& s) {
                for (double t : s.ffe_taps)
                    if (std::abs(t) > 10.0) return false;
                for (double t : s.dfe_taps)
                    if (std::abs(t) > 10.0) return false;
                return true;
            };
            converged = check(res_i.state) && (!complex_mod || check(res_q.state));

            payload_soft.reserve(n_sym - n_train);
            payload_decisions.reserve(n_sym - n_train);
            for (size_t k = n_train; k < n_sym; ++k) {
                const double qi = complex_mod ? res_q.equalized[k] : 0.0;
                const double qd = complex_mod ? res_q.decisions[k] : 0.0;
                payload_soft.emplace_back(res_i.equalized[k], qi);
                payload_decisions.emplace_back(res_i.decisions[k], qd);
            }
        } else {
            payload_soft.assign(soft.begin(), soft.end());
            payload_decisions = payload_soft;
        }

        const int bps = bits_per_symbol(band.modulation);
        const auto rx_bits = demap_symbols(payload_decisions, band.modulation);
        const std::vector<uint8_t> tx_payload(
            streams[i].begin() + static_cast<long>(n_train) * bps,
            streams[i].end());
        const auto ber = measure_ber(tx_payload, rx_bits);
        total_errors += ber.errors;
        total_bits += ber.n;

        double mse = 0.0;
        for (size_t k = n_train; k < n_sym; ++k)
            mse += std::norm(payload_soft[k - n_train] - tx_symbols[i][k]);
        mse /= static_cast<double>(n_sym - n_train);

        BandReport br;
        br.carrier_hz = band.carrier_hz;
        br.modulation = modulation_name(band.modulation);
        br.symbol_rate_hz = band.symbol_rate_hz;
        br.snr_db = mse > 0.0 ? 10.0 * std::log10(1.0 / mse) : 400.0;
        br.evm_percent = measure_evm(payload_soft, band.modulation);
        br.ber = ber;
        br.n_bits = ber.n;
        br.equalizer_converged = converged;

        if (band.carrier_hz == 0.0) {
            // baseband eye at the matched-filter output
            try {
                const auto mf =
                    matched_filter_output(rx, band, 0.0, config.rrc_span);
                SampledWaveform mf_wave{fs, std::vector<double>(mf.size())};
                for (size_t k = 0; k < mf.size(); ++k)
                    mf_wave.samples[k] = mf[k].real();
                const int skip =
                    config.rrc_span + (delay + sps - 1) / sps + 2;
                const auto eye =
                    eye_histogram(mf_wave, 1.0 / band.symbol_rate_hz, 64, 128,
                                  skip, 1 << bps);
                br.eye_height = eye.eye_height;
                br.eye_width_ui = eye.eye_width_ui;
            } catch (const std::invalid_argument&) {
                // waveform too short for an eye; metrics stay unset
            }
        }
        report.per_band.push_back(std::move(br));
    }

    report.aggregate_bps = plan.aggregate_bps();
    report.aggregate_ber =
        total_bits > 0
            ? static_cast<double>(total_errors) / static_cast<double>(total_bits)
            : 0.0;

    if (artifacts) {
        artifacts->rx_waveform = std::move(rx);
        artifacts->resolved_plan = plan;
        artifacts->sample_rate_hz = fs;
        artifacts->probe_profile = profile;
    }
    return report;
}

json LinkReport::to_json() const {
    json j;
    json bands = json::array();
    for (const BandReport& b : per_band) {
        json jb;
        jb["carrier_hz"] = b.carrier_hz;
        jb["modulation"] = b.modulation;
        jb["symbol_rate"] = b.symbol_rate_hz;
        jb["snr_db"] = b.snr_db;
        jb["evm_percent"] = b.evm_percent;
        jb["ber"] = b.ber.ber;
        jb["ber_ci95"] = {b.ber.ci95_low, b.ber.ci95_high};
        jb["n_bits"] = b.n_bits;
        jb["equalizer_converged"] = b.equalizer_converged;
        if (b.eye_height) jb["eye_height"] = *b.eye_height;
        if (b.eye_width_ui) jb["eye_width"] = *b.eye_width_ui;
        bands.push_back(jb);
    }
    j["per_band"] = bands;
    j["aggregate_bps"] = aggregate_bps;
    j["aggregate_ber"] = aggregate_ber;
    j["seed"] = seed;
    j["config"] = config_echo;
    return j;
}

ChannelModel channel_from_json(const json& j) {
    if (j.is_string()) return channel_preset(j.get<std::string>());
    if (j.contains("preset")) return channel_preset(j.at("preset"));
    if (j.contains("csv"))
        return ChannelModel::tabulated(load_channel_csv(j.at("csv")));
    const std::string model = j.at("model");
    // parameters may sit beside "model" or under a "params" object
    const json& p = j.contains("params") ? j.at("params") : j;
    if (model == "identity") return ChannelModel::identity();
    if (model == "lumped_c") return ChannelModel::lumped_c(p.at("f3db_hz"));
    if (model == "lossy_line")
        return ChannelModel::lossy_line(p.at("k_skin"), p.at("k_diel"),
                                        p.at("length_m"), p.at("delay_s_per_m"));
    if (model == "notched") {
        std::vector<Notch> notches;
        for (const auto& n : p.at("notches"))
            notches.push_back({n.at("f0_hz"), n.at("depth_db"), n.at("q")});
        return ChannelModel::notched(channel_from_json(p.at("base")),
                                     std::move(notches));
    }
    throw std::invalid_argument("unknown channel model: " + model);
}

json band_plan_to_json(const BandPlan& plan) {
    json bands = json::array();
    for (const Band& b : plan.bands) {
        bands.push_back({{"carrier_hz", b.carrier_hz},
                         {"modulation", modulation_name(b.modulation)},
                         {"symbol_rate_hz", b.symbol_rate_hz},
                         {"rolloff", b.rolloff},
                         {"power_scale", b.power_scale}});
    }
    return json{{"bands", bands}};
}

BandPlan band_plan_from_json(const json& j) {
    BandPlan plan;
    for (const auto& jb : j.at("bands")) {
        Band b;
        b.carrier_hz = jb.at("carrier_hz");
        b.modulation = modulation_from_name(jb.at("modulation"));
        b.symbol_rate_hz = jb.at("symbol_rate_hz");
        b.rolloff = jb.value("rolloff", 0.25);
        b.power_scale = jb.value("power_scale", 1.0);
        plan.bands.push_back(b);
    }
    plan.validate();
    return plan;
}

json profile_to_json(const ChannelProfile& profile) {
    return json{{"probe_freqs_hz", profile.probe_freqs_hz},
                {"gain_db", profile.gain_db},
                {"noise_density_dbhz", profile.noise_density_dbhz},
                {"sample_rate_hz", profile.sample_rate_hz}};
}

ChannelProfile profile_from_json(const json& j) {
    ChannelProfile p;
    p.probe_freqs_hz = j.at("probe_freqs_hz").get<std::vector<double>>();
    p.gain_db = j.at("gain_db").get<std::vector<double>>();
    p.noise_density_dbhz = j.at("noise_density_dbhz");
    p.sample_rate_hz = j.value("sample_rate_hz", 0.0);
    p.validate();
    return p;
}

json allocation_to_json(const AllocationResult& result) {
    return json{{"plan", band_plan_to_json(result.plan)},
                {"per_band_predicted_snr_db", result.per_band_predicted_snr_db},
                {"aggregate_bps", result.aggregate_bps}};
}

ScenarioConfig scenario_from_json(const json& j) {
    ScenarioConfig c;
    c.seed = j.value("seed", 1ull);
    c.n_bits_per_stream = j.value("n_bits_per_stream", 20000ull);
    c.sigma = j.value("sigma", 0.0);
    c.sample_rate_hz = j.value("sample_rate_hz", 0.0);
    c.channel_spec = j.at("channel");
    c.channel = channel_from_json(c.channel_spec);
    c.rrc_span = j.value("rrc_span", kDefaultRrcSpan);
    c.channel_taps = j.value("channel_taps", kDefaultChannelTaps);
    if (j.contains("meta")) c.meta = j.at("meta");

    const auto& jp = j.at("plan");
    if (jp.is_string() && jp.get<std::string>() == "auto") {
        AutoPlanConfig ap;
        const auto& ja = j.at("allocation");
        ap.constraints.max_bands = ja.value("max_bands", 3);
        ap.constraints.carrier_grid_hz =
            ja.at("carrier_grid_hz").get<std::vector<double>>();
        ap.constraints.symbol_rates_hz =
            ja.at("symbol_rates_hz").get<std::vector<double>>();
        ap.constraints.snr_margin_db = ja.value("snr_margin_db", 3.0);
        ap.constraints.usable_band_hz = ja.at("usable_band_hz");
        ap.constraints.rolloff = ja.value("rolloff", 0.25);
        ap.target_ber = ja.value("target_ber", 1e-3);
        ap.probe_points = ja.value("probe_points", 64ull);
        ap.probe_fmin_hz = ja.value("probe_fmin_hz", 1e8);
        ap.probe_fmax_hz = ja.value("probe_fmax_hz", 1e10);
        ap.probe_tone_power = ja.value("probe_tone_power", 0.5);
        ap.probe_tone_samples = ja.value("probe_tone_samples", 32768ull);
        ap.table_trials = ja.value("table_trials", 200000ull);
        c.auto_plan = ap;
    } else {
        c.plan = band_plan_from_json(jp);
    }

    if (j.contains("equalizer")) {
        const auto& je = j.at("equalizer");
        if (je.is_string()) {
            if (je.get<std::string>() != "off")
                throw std::invalid_argument("equalizer: expected \"off\" or object");
        } else {
            c.eq.enabled = true;
            c.eq.ffe_len = je.value("ffe_len", 1);
            c.eq.dfe_len = je.value("dfe_len", 8);
            c.eq.mu = je.value("mu", 0.005);
            if (je.contains("tx_fir")) {
                TxFir fir;
                fir.taps = je.at("tx_fir").at("taps").get<std::vector<double>>();
                fir.cursor_index = je.at("tx_fir").at("cursor_index");
                fir.validate();
                c.eq.tx_fir = fir;
            }
            if (je.contains("ctle")) {
                CtleConfig ct;
                ct.zero_hz = je.at("ctle").at("zero_hz");
                ct.pole1_hz = je.at("ctle").at("pole1_hz");
                ct.pole2_hz = je.at("ctle").at("pole2_hz");
                ct.dc_gain = je.at("ctle").value("dc_gain", 1.0);
                ct.validate();
                c.eq.ctle = ct;
            }
        }
    }
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json j;
    in >> j;
    return scenario_from_json(j);
}

}  // namespace rfi
