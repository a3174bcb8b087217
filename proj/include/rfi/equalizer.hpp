#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfi/channel.hpp"
#include "rfi/modem.hpp"

namespace rfi {

// Transmit pre-emphasis filter; sum(|taps|) must stay <= 1 (peak power).
struct TxFir {
    std::vector<double> taps;
    int cursor_index = 0;

    void validate() const;
};

// Aligned so cursor_index multiplies the current symbol.
std::vector<double> tx_fir_apply(const std::vector<double>& symbols,
                                 const TxFir& fir);
std::vector<cplx> tx_fir_apply(const std::vector<cplx>& symbols,
                               const TxFir& fir);

// Analog peaking prototype dc_gain*(1+s/wz)/((1+s/wp1)(1+s/wp2)),
// discretized by bilinear transform.
struct CtleConfig {
    double zero_hz = 0.0;
    double pole1_hz = 0.0;
    double pole2_hz = 0.0;
    double dc_gain = 1.0;

    void validate() const;
    cplx prototype_gain(double freq_hz) const;
};

SampledWaveform ctle_apply(const SampledWaveform& wave, const CtleConfig& config);

// Symbol-rate FFE + DFE with LMS adaptation.
// ffe_taps[0] is the cursor; ffe_taps[i] weights the input i symbols later
// (pre-cursor side). dfe_taps[j] feeds back the decision j+1 symbols back.
struct DfeState {
    std::vector<double> ffe_taps;
    std::vector<double> dfe_taps;
    double mu = 0.0;
    bool trained = false;

    static DfeState make(int ffe_len, int dfe_len, double mu);
};

struct DfeResult {
    std::vector<double> decisions;   // sliced (or training) symbol values
    std::vector<double> equalized;   // soft values before slicing
    DfeState state;
    std::vector<double> error_trace;
};

// One pass over the soft symbols. mu > 0 adapts taps per symbol; mu == 0
// is pure filtering. While training symbols remain (the sequence may be
// shorter than the input), decisions come from the reference; afterwards
// the slicer takes over.
DfeResult dfe_run(const std::vector<double>& soft_symbols, DfeState state,
                  const std::vector<double>& levels,
                  const std::vector<double>* training_symbols = nullptr);

struct LmsTrainConfig {
    int ffe_len = 1;
    int dfe_len = 8;
    double mu = 0.005;
    int n_train = 8000;
    size_t channel_taps = kDefaultChannelTaps;
};

// PRBS training run through TX -> channel -> RX -> dfe_run.
// Throws on divergence (any |tap| > 10).
DfeState lms_train(const ChannelModel& model, const Band& band,
                   const LmsTrainConfig& config, uint64_t seed);

// Cursor offset (in samples) of the band's end-to-end pulse response peak
// relative to the nominal TX+RX filter group delay.
int band_channel_delay_samples(const ChannelModel& model, const Band& band,
                               double sample_rate_hz,
                               size_t n_taps = kDefaultChannelTaps,
                               int span_symbols = kDefaultRrcSpan);

}  // namespace rfi
