#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rfi/fft.hpp"

namespace rfi {

// Uniformly sampled real waveform: the physical line voltage.
struct SampledWaveform {
    double sample_rate_hz = 0.0;
    std::vector<double> samples;

    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
    double mean_power() const;
};

// Complex baseband representation of one band before carrier mixing.
struct ComplexEnvelope {
    double sample_rate_hz = 0.0;
    std::vector<cplx> samples;
};

struct BitStream {
    std::vector<uint8_t> bits;
    double bit_rate_hz = 0.0;
};

// Maximal-length LFSR sequence for the standard polynomial of the given
// order (7: x^7+x^6+1, 15: x^15+x^14+1, 31: x^31+x^28+1).
// seed must be nonzero (LFSR lock-up state).
std::vector<uint8_t> prbs_generate(int order, uint64_t seed, size_t n);

// Unit-energy root-raised-cosine pulse, span_symbols*samples_per_symbol+1
// taps. Singular points evaluated by their analytic limits.
std::vector<double> rrc_taps(double rolloff, int span_symbols,
                             int samples_per_symbol);

// Zero-stuffed upsampling by samples_per_symbol followed by convolution
// with taps. Output length (n_symbols-1)*sps + len(taps).
ComplexEnvelope shape_symbols(const std::vector<cplx>& symbols,
                              const std::vector<double>& taps,
                              int samples_per_symbol, double sample_rate_hz);

// carrier_hz > 0: out[n] = sqrt(2)*Re{env[n]*exp(j(2*pi*fc*n/fs + phase))}.
// carrier_hz == 0: out[n] = Re{env[n]} (no sqrt(2) factor).
SampledWaveform mix_carrier(const ComplexEnvelope& envelope, double carrier_hz,
                            double phase_rad);

struct PsdEstimate {
    std::vector<double> freq_hz;  // uniform grid on [0, fs/2]
    std::vector<double> psd;      // one-sided power density, V^2/Hz
};

// Averaged modified periodogram (Hann window, 50% overlap).
// Integrated power matches time-domain mean power within ~2%.
PsdEstimate estimate_psd(const SampledWaveform& wave, size_t segment_len);

}  // namespace rfi
