#include "rfi/cognitive.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rfi {

void ChannelProfile::validate() const {
    if (probe_freqs_hz.empty() || probe_freqs_hz.size() != gain_db.size())
        throw std::invalid_argument("ChannelProfile: empty or mismatched lists");
    for (size_t i = 1; i < probe_freqs_hz.size(); ++i)
        if (!(probe_freqs_hz[i] > probe_freqs_hz[i - 1]))
            throw std::invalid_argument("ChannelProfile: frequencies not ascending");
    for (double g : gain_db)
        if (!std::isfinite(g))
            throw std::invalid_argument("ChannelProfile: non-finite gain");
}

double ModulationTable::required_snr_db(Modulation m) const {
    for (const auto& [mod, snr] : entries)
        if (mod == m) return snr;
    throw std::invalid_argument("ModulationTable: modulation not present");
}

bool ModulationTable::has(Modulation m) const {
    for (const auto& [mod, snr] : entries)
        if (mod == m) return true;
    return false;
}

void AllocationConstraints::validate() const {
    if (max_bands < 1)
        throw std::invalid_argument("AllocationConstraints: max_bands < 1");
    if (carrier_grid_hz.empty() || symbol_rates_hz.empty())
        throw std::invalid_argument("AllocationConstraints: empty candidate set");
    if (snr_margin_db < 0.0)
        throw std::invalid_argument("AllocationConstraints: negative margin");
    if (usable_band_hz <= 0.0)
        throw std::invalid_argument("AllocationConstraints: usable_band_hz <= 0");
}

std::vector<double> log_probe_grid(double fmin_hz, double fmax_hz, size_t n) {
    if (fmin_hz <= 0.0 || fmax_hz <= fmin_hz || n < 2)
        throw std::invalid_argument("log_probe_grid: bad parameters");
    std::vector<double> grid(n);
    const double lmin = std::log(fmin_hz), lmax = std::log(fmax_hz);
    for (size_t i = 0; i < n; ++i)
        grid[i] = std::exp(lmin + (lmax - lmin) * static_cast<double>(i) /
                                      static_cast<double>(n - 1));
    return grid;
}

ChannelProfile probe_channel(const ChannelModel& model,
                             const std::vector<double>& probe_freqs_hz,
                             double sample_rate_hz, const ProbeConfig& config,
                             uint64_t seed) {
    model.validate();
    for (double f : probe_freqs_hz)
        if (f <= 0.0 || f >= sample_rate_hz / 2.0)
            throw std::invalid_argument(
                "probe_channel: probe frequency outside (0, fs/2)");
    if (config.tone_power <= 0.0)
        throw std::invalid_argument("probe_channel: tone_power must be > 0");

    const double amp = std::sqrt(2.0 * config.tone_power);
    const size_t skip = config.channel_taps;
    const size_t window = config.tone_duration_samples;
    const size_t len = skip + window;

    ChannelProfile profile;
    profile.sample_rate_hz = sample_rate_hz;
    profile.probe_freqs_hz = probe_freqs_hz;
    profile.gain_db.reserve(probe_freqs_hz.size());

    uint64_t tone_seed = seed;
    for (double f : probe_freqs_hz) {
        SampledWaveform tone{sample_rate_hz, std::vector<double>(len)};
        const double w = 2.0 * M_PI * f / sample_rate_hz;
        for (size_t n = 0; n < len; ++n)
            tone.samples[n] = amp * std::cos(w * static_cast<double>(n));

        auto rx = apply_channel(tone, model, config.channel_taps);
        rx = add_awgn(rx, config.sigma, ++tone_seed);

        double acc = 0.0;
        for (size_t n = skip; n < len; ++n) acc += rx.samples[n] * rx.samples[n];
        const double p_rx = acc / static_cast<double>(window);
        const double ratio = std::max(p_rx / config.tone_power, 1e-40);
        profile.gain_db.push_back(10.0 * std::log10(ratio));
    }

    if (config.sigma > 0.0) {
        // zero-input interval isolates the receiver noise floor
        SampledWaveform silence{sample_rate_hz, std::vector<double>(window, 0.0)};
        auto noisy = add_awgn(silence, config.sigma, ++tone_seed);
        const double var = noisy.mean_power();
        profile.noise_density_dbhz =
            10.0 * std::log10(std::max(var / (sample_rate_hz / 2.0), 1e-40));
    }
    return profile;
}

namespace {

struct AxisSlicer {
    double lv0 = 0.0;
    double step = 0.0;
    int n_levels = 0;

    explicit AxisSlicer(const std::vector<double>& levels) {
        lv0 = levels.front();
        n_levels = static_cast<int>(levels.size());
        step = n_levels > 1 ? levels[1] - levels[0] : 1.0;
    }
    int index(double v) const {
        int i = static_cast<int>(std::lround((v - lv0) / step));
        return std::clamp(i, 0, n_levels - 1);
    }
};

uint32_t binary_to_gray(uint32_t i) { return i ^ (i >> 1); }

}  // namespace

double awgn_symbol_ber(Modulation m, double snr_db, size_t n_symbols,
                       uint64_t seed) {
    const auto& levels = axis_levels(m);
    const AxisSlicer slicer(levels);
    const bool complex_mod = is_complex_modulation(m);
    const int k = bits_per_symbol(m);

    const double n0 = std::pow(10.0, -snr_db / 10.0);  // Es = 1
    const double sigma_dim = std::sqrt(n0 / 2.0);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, slicer.n_levels - 1);
    std::normal_distribution<double> noise(0.0, 1.0);

    size_t bit_errors = 0;
    const int axes = complex_mod ? 2 : 1;
    for (size_t s = 0; s < n_symbols; ++s) {
        for (int ax = 0; ax < axes; ++ax) {
            const int tx = pick(rng);
            const double v = levels[tx] + sigma_dim * noise(rng);
            const int rx = slicer.index(v);
            uint32_t diff = binary_to_gray(static_cast<uint32_t>(tx)) ^
                            binary_to_gray(static_cast<uint32_t>(rx));
            bit_errors += static_cast<size_t>(__builtin_popcount(diff));
        }
    }
    return static_cast<double>(bit_errors) /
           static_cast<double>(n_symbols * static_cast<size_t>(k));
}

ModulationTable required_snr_table(double target_ber,
                                   const std::vector<Modulation>& modulations,
                                   size_t n_trials, uint64_t seed) {
    if (target_ber < 1e-6 || target_ber > 0.5)
        throw std::invalid_argument("required_snr_table: target BER outside range");
    if (n_trials * target_ber < 20.0)
        throw std::invalid_argument(
            "required_snr_table: trial budget too small for target BER");

    ModulationTable table;
    table.target_ber = target_ber;
    for (Modulation m : modulations) {
        double lo = -10.0, hi = 45.0;
        const uint64_t mseed = seed + 7919ull * static_cast<uint64_t>(m);
        if (awgn_symbol_ber(m, hi, n_trials, mseed) > target_ber)
            throw std::runtime_error(
                "required_snr_table: target BER unreachable in search range");
        if (awgn_symbol_ber(m, lo, n_trials, mseed) <= target_ber) {
            table.entries.emplace_back(m, lo);
            continue;
        }
        for (int it = 0; it < 20; ++it) {
            const double mid = 0.5 * (lo + hi);
            // common random numbers keep the BER curve monotone in SNR
            if (awgn_symbol_ber(m, mid, n_trials, mseed) > target_ber)
                lo = mid;
            else
                hi = mid;
        }
        table.entries.emplace_back(m, hi);
    }
    return table;
}

namespace {

double interp_gain_db(const ChannelProfile& profile, double f) {
    const auto& fs = profile.probe_freqs_hz;
    const auto it = std::upper_bound(fs.begin(), fs.end(), f);
    size_t hi = static_cast<size_t>(it - fs.begin());
    if (hi == 0) hi = 1;
    if (hi >= fs.size()) hi = fs.size() - 1;
    const size_t lo = hi - 1;
    const double t = (f - fs[lo]) / (fs[hi] - fs[lo]);
    return profile.gain_db[lo] + t * (profile.gain_db[hi] - profile.gain_db[lo]);
}

}  // namespace

double predict_band_snr(const ChannelProfile& profile, const Band& band,
                        double tx_power_density_dbhz) {
    profile.validate();
    const double lo = band.occupied_low_hz();
    const double hi = band.occupied_high_hz();
    if (lo < profile.probe_freqs_hz.front() - 1e-6 ||
        hi > profile.probe_freqs_hz.back() + 1e-6)
        throw std::out_of_range("predict_band_snr: band outside probed range");

    double gmin = std::min(interp_gain_db(profile, lo),
                           interp_gain_db(profile, hi));
    for (double f : profile.probe_freqs_hz)
        if (f > lo && f < hi) gmin = std::min(gmin, interp_gain_db(profile, f));

    return tx_power_density_dbhz + gmin - profile.noise_density_dbhz;
}

double sim_tx_power_density_dbhz(double sample_rate_hz) {
    return -10.0 * std::log10(sample_rate_hz);
}

AllocationResult allocate_bands(const ChannelProfile& profile,
                                const ModulationTable& table,
                                const AllocationConstraints& constraints,
                                double tx_power_density_dbhz) {
    profile.validate();
    constraints.validate();

    struct Candidate {
        Band band;
        double predicted_snr_db = 0.0;
        double required_snr_db = 0.0;
    };

    std::vector<Candidate> feasible;
    for (double carrier : constraints.carrier_grid_hz) {
        for (double rate : constraints.symbol_rates_hz) {
            for (const auto& [mod, required] : table.entries) {
                const bool baseband = carrier == 0.0;
                if (baseband && is_complex_modulation(mod)) continue;
                if (!baseband && !is_complex_modulation(mod) &&
                    mod != Modulation::OOK)
                    continue;

                Band band;
                band.carrier_hz = carrier;
                band.modulation = mod;
                band.symbol_rate_hz = rate;
                band.rolloff = constraints.rolloff;
                if (band.occupied_low_hz() < 0.0) continue;
                if (band.occupied_high_hz() > constraints.usable_band_hz) continue;

                double snr;
                try {
                    snr = predict_band_snr(profile, band, tx_power_density_dbhz);
                } catch (const std::out_of_range&) {
                    continue;
                }
                if (snr < required + constraints.snr_margin_db) continue;
                feasible.push_back({band, snr, required});
            }
        }
    }

    // greedy: max bit rate, then lower required SNR, then lower carrier
    std::sort(feasible.begin(), feasible.end(),
              [](const Candidate& a, const Candidate& b) {
                  const double ra = a.band.bit_rate_bps();
                  const double rb = b.band.bit_rate_bps();
                  if (ra != rb) return ra > rb;
                  if (a.required_snr_db != b.required_snr_db)
                      return a.required_snr_db < b.required_snr_db;
                  if (a.band.carrier_hz != b.band.carrier_hz)
                      return a.band.carrier_hz < b.band.carrier_hz;
                  return a.band.symbol_rate_hz < b.band.symbol_rate_hz;
              });

    AllocationResult result;
    for (const Candidate& c : feasible) {
        if (static_cast<int>(result.plan.bands.size()) >= constraints.max_bands)
            break;
        bool overlaps = false;
        for (const Band& chosen : result.plan.bands) {
            if (c.band.occupied_low_hz() < chosen.occupied_high_hz() - 1.0 &&
                chosen.occupied_low_hz() < c.band.occupied_high_hz() - 1.0) {
                overlaps = true;
                break;
            }
        }
        if (overlaps) continue;
        result.plan.bands.push_back(c.band);
        result.per_band_predicted_snr_db.push_back(c.predicted_snr_db);
    }
    result.aggregate_bps = result.plan.aggregate_bps();
    return result;
}

}  // namespace rfi
