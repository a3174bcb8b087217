#pragma once

#include <cstdint>
#include <vector>

#include "rfi/modem.hpp"
#include "rfi/signal.hpp"

namespace rfi {

struct BerResult {
    double ber = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    size_t n = 0;
    size_t errors = 0;
};

// Mismatch fraction with a Wilson 95% interval.
BerResult measure_ber(const std::vector<uint8_t>& tx_bits,
                      const std::vector<uint8_t>& rx_bits);

// Decision-directed EVM in percent:
// 100 * rms(symbol - nearest ideal point) / rms(constellation).
double measure_evm(const std::vector<cplx>& rx_symbols, Modulation m);

struct EyeResult {
    int bins_t = 0;
    int bins_v = 0;
    double v_min = 0.0;
    double v_max = 0.0;
    std::vector<uint32_t> counts;  // bins_t * bins_v, time-major
    double eye_height = 0.0;
    double eye_width_ui = 0.0;
};

// Folds the waveform modulo one UI after skipping the leading transient.
// For an N-level signal the reported height is the minimum of the N-1 eyes,
// measured over the center 10% of the UI.
EyeResult eye_histogram(const SampledWaveform& wave, double ui_s, int bins_t,
                        int bins_v, int skip_ui, int n_levels = 2);

}  // namespace rfi
