#include "rfi/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace rfi {

double SampledWaveform::mean_power() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double v : samples) acc += v * v;
    return acc / static_cast<double>(samples.size());
}

std::vector<uint8_t> prbs_generate(int order, uint64_t seed, size_t n) {
    if (seed == 0) throw std::invalid_argument("prbs_generate: zero seed");
    if (n < 1) throw std::invalid_argument("prbs_generate: n must be >= 1");

    // Fibonacci LFSR, feedback taps per standard polynomial.
    int tap_a, tap_b;
    switch (order) {
        case 7:  tap_a = 7;  tap_b = 6;  break;
        case 15: tap_a = 15; tap_b = 14; break;
        case 31: tap_a = 31; tap_b = 28; break;
        default:
            throw std::invalid_argument("prbs_generate: order must be 7, 15 or 31");
    }

    const uint64_t mask = (order == 31) ? 0x7FFFFFFFull
                                        : ((1ull << order) - 1ull);
    uint64_t state = seed & mask;
    if (state == 0) state = 1;  // seed had no bits inside the register

    std::vector<uint8_t> bits(n);
    for (size_t i = 0; i < n; ++i) {
        const uint8_t out = static_cast<uint8_t>(state & 1ull);
        const uint64_t fb = ((state >> (tap_a - 1)) ^ (state >> (tap_b - 1))) & 1ull;
        state = ((state << 1) | fb) & mask;
        bits[i] = out;
    }
    return bits;
}

std::vector<double> rrc_taps(double rolloff, int span_symbols,
                             int samples_per_symbol) {
    if (rolloff < 0.0 || rolloff > 1.0)
        throw std::invalid_argument("rrc_taps: rolloff outside [0,1]");
    if (span_symbols <= 0 || span_symbols % 2 != 0)
        throw std::invalid_argument("rrc_taps: span_symbols must be positive and even");
    if (samples_per_symbol < 2)
        throw std::invalid_argument("rrc_taps: samples_per_symbol must be >= 2");

    const int n = span_symbols * samples_per_symbol + 1;
    const int mid = n / 2;
    std::vector<double> h(n);
    const double b = rolloff;

    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - mid) / samples_per_symbol;
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 + b * (4.0 / M_PI - 1.0);
        } else if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) {
            const double arg = M_PI / (4.0 * b);
            v = (b / std::sqrt(2.0)) *
                ((1.0 + 2.0 / M_PI) * std::sin(arg) +
                 (1.0 - 2.0 / M_PI) * std::cos(arg));
        } else {
            const double num = std::sin(M_PI * t * (1.0 - b)) +
                               4.0 * b * t * std::cos(M_PI * t * (1.0 + b));
            const double den = M_PI * t * (1.0 - 16.0 * b * b * t * t);
            v = num / den;
        }
        h[i] = v;
    }

    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= scale;
    return h;
}

ComplexEnvelope shape_symbols(const std::vector<cplx>& symbols,
                              const std::vector<double>& taps,
                              int samples_per_symbol, double sample_rate_hz) {
    if (symbols.empty() || taps.empty())
        throw std::invalid_argument("shape_symbols: empty symbols or taps");
    if (samples_per_symbol < 1)
        throw std::invalid_argument("shape_symbols: samples_per_symbol must be >= 1");

    const size_t out_len =
        (symbols.size() - 1) * static_cast<size_t>(samples_per_symbol) + taps.size();
    ComplexEnvelope env;
    env.sample_rate_hz = sample_rate_hz;
    env.samples.assign(out_len, cplx(0.0, 0.0));
    for (size_t k = 0; k < symbols.size(); ++k) {
        const size_t base = k * static_cast<size_t>(samples_per_symbol);
        const cplx s = symbols[k];
        for (size_t j = 0; j < taps.size(); ++j)
            env.samples[base + j] += s * taps[j];
    }
    return env;
}

SampledWaveform mix_carrier(const ComplexEnvelope& envelope, double carrier_hz,
                            double phase_rad) {
    if (carrier_hz < 0.0)
        throw std::invalid_argument("mix_carrier: negative carrier");
    if (carrier_hz >= envelope.sample_rate_hz / 2.0)
        throw std::invalid_argument("mix_carrier: carrier at or above Nyquist");

    SampledWaveform out;
    out.sample_rate_hz = envelope.sample_rate_hz;
    out.samples.resize(envelope.samples.size());

    if (carrier_hz == 0.0) {
        for (size_t i = 0; i < envelope.samples.size(); ++i)
            out.samples[i] = envelope.samples[i].real();
        return out;
    }

    const double w = 2.0 * M_PI * carrier_hz / envelope.sample_rate_hz;
    const double root2 = std::sqrt(2.0);
    for (size_t i = 0; i < envelope.samples.size(); ++i) {
        const double ang = w * static_cast<double>(i) + phase_rad;
        const cplx rot(std::cos(ang), std::sin(ang));
        out.samples[i] = root2 * (envelope.samples[i] * rot).real();
    }
    return out;
}

PsdEstimate estimate_psd(const SampledWaveform& wave, size_t segment_len) {
    if (segment_len < 8)
        throw std::invalid_argument("estimate_psd: segment too short");
    if (wave.samples.size() < segment_len)
        throw std::invalid_argument("estimate_psd: waveform shorter than segment");

    const size_t nfft = next_pow2(segment_len);
    const size_t hop = segment_len / 2;
    const double fs = wave.sample_rate_hz;

    std::vector<double> window(segment_len);
    double u = 0.0;  // window power, sum w^2
    for (size_t i = 0; i < segment_len; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (segment_len - 1));
        u += window[i] * window[i];
    }

    const size_t nbins = nfft / 2 + 1;
    std::vector<double> acc(nbins, 0.0);
    size_t nseg = 0;
    std::vector<cplx> buf(nfft);
    for (size_t start = 0; start + segment_len <= wave.samples.size();
         start += hop) {
        std::fill(buf.begin(), buf.end(), cplx(0, 0));
        for (size_t i = 0; i < segment_len; ++i)
            buf[i] = cplx(wave.samples[start + i] * window[i], 0.0);
        fft_inplace(buf, false);
        for (size_t k = 0; k < nbins; ++k)
            acc[k] += std::norm(buf[k]);
        ++nseg;
    }

    PsdEstimate est;
    est.freq_hz.resize(nbins);
    est.psd.resize(nbins);
    const double norm = 1.0 / (fs * u * static_cast<double>(nseg));
    for (size_t k = 0; k < nbins; ++k) {
        est.freq_hz[k] = fs * static_cast<double>(k) / static_cast<double>(nfft);
        double p = acc[k] * norm;
        if (k != 0 && k != nbins - 1) p *= 2.0;  // one-sided
        est.psd[k] = p;
    }
    return est;
}

}  // namespace rfi
