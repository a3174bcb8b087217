#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rfi/signal.hpp"

namespace rfi {

struct FrequencyResponse {
    std::vector<double> freqs_hz;  // strictly ascending, starting at 0
    std::vector<cplx> gains;

    void validate() const;
    // Interpolates in (log-magnitude, unwrapped phase). No extrapolation.
    cplx interpolate(double freq_hz) const;
};

struct Notch {
    double f0_hz = 0.0;
    double depth_db = 0.0;
    double q = 0.0;
};

// Variant channel model covering the bandwidth-limited, lossy and notched
// cases a copper serial-link channel presents.
struct ChannelModel {
    enum class Kind { Identity, LumpedC, LossyLine, Notched, Tabulated };

    Kind kind = Kind::Identity;

    // LumpedC
    double f3db_hz = 0.0;
    // LossyLine
    double k_skin = 0.0;        // Np/sqrt(Hz) per meter
    double k_diel = 0.0;        // Np/Hz per meter
    double length_m = 0.0;
    double delay_s_per_m = 0.0;
    // Notched
    std::shared_ptr<const ChannelModel> base;
    std::vector<Notch> notches;
    // Tabulated
    FrequencyResponse table;

    static ChannelModel identity();
    static ChannelModel lumped_c(double f3db_hz);
    static ChannelModel lossy_line(double k_skin, double k_diel, double length_m,
                                   double delay_s_per_m);
    static ChannelModel notched(ChannelModel base_model, std::vector<Notch> n);
    static ChannelModel tabulated(FrequencyResponse response);

    cplx gain_at(double freq_hz) const;
    double bulk_delay_s() const;
    void validate() const;
};

FrequencyResponse evaluate_response(const ChannelModel& model,
                                    const std::vector<double>& freqs_hz);

inline constexpr size_t kDefaultChannelTaps = 4096;

// Real causal FIR taps whose transform matches the model on [0, fs/2].
// Throws if n_taps cannot contain 99.9% of the impulse energy.
std::vector<double> synthesize_impulse(const ChannelModel& model,
                                       double sample_rate_hz, size_t n_taps);
std::vector<double> synthesize_impulse(const FrequencyResponse& response,
                                       double sample_rate_hz, size_t n_taps);

SampledWaveform apply_channel(const SampledWaveform& wave,
                              const ChannelModel& model,
                              size_t n_taps = kDefaultChannelTaps);

// i.i.d. Gaussian noise, deterministic given seed.
SampledWaveform add_awgn(const SampledWaveform& wave, double sigma,
                         uint64_t seed);

struct SingleBitResult {
    SampledWaveform pulse;
    int tail_ui = 0;    // last UI after the cursor still above threshold
    int peak_index = 0;
};

// Sends one isolated RRC-shaped bit and measures the post-cursor ISI tail.
SingleBitResult single_bit_response(const ChannelModel& model,
                                    double bit_rate_hz,
                                    double threshold_fraction,
                                    int samples_per_symbol = 16,
                                    double rolloff = 0.25,
                                    size_t n_taps = kDefaultChannelTaps);

}  // namespace rfi
