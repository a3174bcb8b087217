#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfi/cognitive.hpp"
#include "rfi/equalizer.hpp"
#include "rfi/metrics.hpp"
#include "rfi/modem.hpp"
#include "rfi/presets.hpp"

namespace rfi {

struct EqualizerConfig {
    bool enabled = false;
    int ffe_len = 1;
    int dfe_len = 8;
    double mu = 0.005;
    std::optional<TxFir> tx_fir;
    std::optional<CtleConfig> ctle;
};

// Auto band planning: probe the channel, build the SNR table, allocate.
struct AutoPlanConfig {
    AllocationConstraints constraints;
    double target_ber = 1e-3;
    size_t probe_points = 64;
    double probe_fmin_hz = 1e8;
    double probe_fmax_hz = 1e10;
    double probe_tone_power = 0.5;
    size_t probe_tone_samples = 32768;
    size_t table_trials = 200000;
};

struct ScenarioConfig {
    uint64_t seed = 1;
    size_t n_bits_per_stream = 20000;
    double sigma = 0.0;
    double sample_rate_hz = 0.0;  // 0 = derive from the plan
    ChannelModel channel;
    nlohmann::json channel_spec;  // original spec, echoed into reports
    std::optional<BandPlan> plan;
    std::optional<AutoPlanConfig> auto_plan;
    EqualizerConfig eq;
    int rrc_span = kDefaultRrcSpan;
    size_t channel_taps = kDefaultChannelTaps;
    nlohmann::json meta;  // free-form, echoed only
};

struct BandReport {
    double carrier_hz = 0.0;
    std::string modulation;
    double symbol_rate_hz = 0.0;
    double snr_db = 0.0;
    double evm_percent = 0.0;
    BerResult ber;
    size_t n_bits = 0;
    bool equalizer_converged = true;
    std::optional<double> eye_height;    // baseband bands only
    std::optional<double> eye_width_ui;
};

struct LinkReport {
    std::vector<BandReport> per_band;
    double aggregate_bps = 0.0;
    double aggregate_ber = 0.0;
    uint64_t seed = 0;
    nlohmann::json config_echo;

    nlohmann::json to_json() const;
};

struct LinkArtifacts {
    SampledWaveform rx_waveform;  // post channel + noise (+ CTLE)
    BandPlan resolved_plan;
    double sample_rate_hz = 0.0;
    std::optional<ChannelProfile> probe_profile;  // auto plans only
};

// PRBS streams -> map/modulate per band -> TX FIR -> compose -> channel
// -> AWGN -> CTLE -> per-band demod -> FFE/DFE -> demap -> metrics.
// Deterministic given seed; training symbols excluded from BER.
LinkReport run_link(const ScenarioConfig& config,
                    LinkArtifacts* artifacts = nullptr);

// Scenario file (JSON) parsing; see README for the schema.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

ChannelModel channel_from_json(const nlohmann::json& j);
nlohmann::json band_plan_to_json(const BandPlan& plan);
BandPlan band_plan_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const ChannelProfile& profile);
ChannelProfile profile_from_json(const nlohmann::json& j);
nlohmann::json allocation_to_json(const AllocationResult& result);

}  // namespace rfi
