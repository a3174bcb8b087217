#pragma once

#include <cstdint>
#include <vector>

#include "rfi/channel.hpp"
#include "rfi/modem.hpp"

namespace rfi {

// Probed gain-vs-frequency profile plus the receiver noise floor.
struct ChannelProfile {
    std::vector<double> probe_freqs_hz;  // ascending
    std::vector<double> gain_db;
    double noise_density_dbhz = -400.0;
    double sample_rate_hz = 0.0;

    void validate() const;
};

// Required symbol SNR (Es/N0, dB) per modulation at the target BER.
struct ModulationTable {
    std::vector<std::pair<Modulation, double>> entries;
    double target_ber = 0.0;

    double required_snr_db(Modulation m) const;
    bool has(Modulation m) const;
};

struct AllocationConstraints {
    int max_bands = 3;
    std::vector<double> carrier_grid_hz;   // ascending, may include 0
    std::vector<double> symbol_rates_hz;
    double snr_margin_db = 3.0;
    double usable_band_hz = 0.0;
    double rolloff = 0.25;

    void validate() const;
};

struct AllocationResult {
    BandPlan plan;
    std::vector<double> per_band_predicted_snr_db;
    double aggregate_bps = 0.0;
};

struct ProbeConfig {
    double tone_power = 0.5;          // mean-square TX power of each tone
    double sigma = 0.0;               // AWGN std dev per sample
    size_t tone_duration_samples = 32768;
    size_t channel_taps = kDefaultChannelTaps;
};

// CW sweep: one tone per probe frequency through the channel plus noise,
// RX power detected over the steady-state window.
ChannelProfile probe_channel(const ChannelModel& model,
                             const std::vector<double>& probe_freqs_hz,
                             double sample_rate_hz, const ProbeConfig& config,
                             uint64_t seed);

// Default probe grid: n tones log-spaced over [fmin, fmax].
std::vector<double> log_probe_grid(double fmin_hz, double fmax_hz, size_t n);

// Monte-Carlo AWGN thresholds: binary-search the symbol SNR reaching the
// target BER for each modulation under matched-filter symbol detection.
ModulationTable required_snr_table(double target_ber,
                                   const std::vector<Modulation>& modulations,
                                   size_t n_trials, uint64_t seed);

// Symbol-level AWGN BER at a given Es/N0 (the table's Monte-Carlo kernel,
// also usable as an independent oracle).
double awgn_symbol_ber(Modulation m, double snr_db, size_t n_symbols,
                       uint64_t seed);

// Link budget: tx density + worst in-band probed gain - noise density.
// The in-band minimum (not the mean) penalizes notch-crossing bands.
double predict_band_snr(const ChannelProfile& profile, const Band& band,
                        double tx_power_density_dbhz);

// Greedy allocation over the (carrier, rate, modulation) candidate grid.
AllocationResult allocate_bands(const ChannelProfile& profile,
                                const ModulationTable& table,
                                const AllocationConstraints& constraints,
                                double tx_power_density_dbhz);

// Symbol-energy density matching the simulator's unit-energy pulses at
// power_scale 1; feeding this into predict_band_snr reproduces the
// simulated post-matched-filter SNR.
double sim_tx_power_density_dbhz(double sample_rate_hz);

}  // namespace rfi
