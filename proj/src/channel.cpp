#include "rfi/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rfi {

void FrequencyResponse::validate() const {
    if (freqs_hz.empty() || freqs_hz.size() != gains.size())
        throw std::invalid_argument("FrequencyResponse: empty or mismatched lists");
    if (freqs_hz.front() != 0.0)
        throw std::invalid_argument("FrequencyResponse: grid must start at 0");
    for (size_t i = 1; i < freqs_hz.size(); ++i)
        if (!(freqs_hz[i] > freqs_hz[i - 1]))
            throw std::invalid_argument("FrequencyResponse: frequencies not ascending");
    for (const cplx& g : gains)
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            throw std::invalid_argument("FrequencyResponse: non-finite gain");
    if (std::abs(gains.front().imag()) > 1e-12 * std::abs(gains.front()))
        throw std::invalid_argument("FrequencyResponse: DC gain must be real");
}

cplx FrequencyResponse::interpolate(double f) const {
    if (f < freqs_hz.front() - 1e-9 || f > freqs_hz.back() + 1e-9)
        throw std::out_of_range(
            "FrequencyResponse: frequency outside tabulated range");
    f = std::clamp(f, freqs_hz.front(), freqs_hz.back());

    const auto it = std::upper_bound(freqs_hz.begin(), freqs_hz.end(), f);
    size_t hi = static_cast<size_t>(it - freqs_hz.begin());
    if (hi == 0) hi = 1;
    if (hi >= freqs_hz.size()) hi = freqs_hz.size() - 1;
    const size_t lo = hi - 1;

    // unwrapped phase between the two bracketing points
    const double m0 = std::log(std::max(std::abs(gains[lo]), 1e-300));
    const double m1 = std::log(std::max(std::abs(gains[hi]), 1e-300));
    const double p0 = std::arg(gains[lo]);
    double p1 = std::arg(gains[hi]);
    while (p1 - p0 > M_PI) p1 -= 2.0 * M_PI;
    while (p1 - p0 < -M_PI) p1 += 2.0 * M_PI;

    const double t = (f - freqs_hz[lo]) / (freqs_hz[hi] - freqs_hz[lo]);
    const double m = m0 + t * (m1 - m0);
    const double p = p0 + t * (p1 - p0);
    return std::polar(std::exp(m), p);
}

ChannelModel ChannelModel::identity() {
    ChannelModel m;
    m.kind = Kind::Identity;
    return m;
}

ChannelModel ChannelModel::lumped_c(double f3db_hz) {
    if (f3db_hz <= 0.0) throw std::invalid_argument("LumpedC: f3db must be > 0");
    ChannelModel m;
    m.kind = Kind::LumpedC;
    m.f3db_hz = f3db_hz;
    return m;
}

ChannelModel ChannelModel::lossy_line(double k_skin, double k_diel,
                                      double length_m, double delay_s_per_m) {
    if (k_skin < 0.0 || k_diel < 0.0 || length_m <= 0.0 || delay_s_per_m < 0.0)
        throw std::invalid_argument("LossyLine: parameter out of range");
    ChannelModel m;
    m.kind = Kind::LossyLine;
    m.k_skin = k_skin;
    m.k_diel = k_diel;
    m.length_m = length_m;
    m.delay_s_per_m = delay_s_per_m;
    return m;
}

ChannelModel ChannelModel::notched(ChannelModel base_model,
                                   std::vector<Notch> n) {
    if (base_model.kind == Kind::Notched)
        throw std::invalid_argument("Notched: base may not itself be Notched");
    for (const Notch& nt : n)
        if (nt.f0_hz <= 0.0 || nt.depth_db <= 0.0 || nt.q <= 0.0)
            throw std::invalid_argument("Notch: parameter out of range");
    ChannelModel m;
    m.kind = Kind::Notched;
    m.base = std::make_shared<const ChannelModel>(std::move(base_model));
    m.notches = std::move(n);
    return m;
}

ChannelModel ChannelModel::tabulated(FrequencyResponse response) {
    response.validate();
    ChannelModel m;
    m.kind = Kind::Tabulated;
    m.table = std::move(response);
    return m;
}

void ChannelModel::validate() const {
    switch (kind) {
        case Kind::Identity: return;
        case Kind::LumpedC:
            if (f3db_hz <= 0.0) throw std::invalid_argument("LumpedC: bad f3db");
            return;
        case Kind::LossyLine:
            if (k_skin < 0.0 || k_diel < 0.0 || length_m <= 0.0 ||
                delay_s_per_m < 0.0)
                throw std::invalid_argument("LossyLine: parameter out of range");
            return;
        case Kind::Notched:
            if (!base) throw std::invalid_argument("Notched: missing base");
            base->validate();
            return;
        case Kind::Tabulated:
            table.validate();
            return;
    }
}

namespace {

cplx notch_gain(const Notch& n, double f) {
    const cplx s(0.0, 2.0 * M_PI * f);
    const double w0 = 2.0 * M_PI * n.f0_hz;
    const double g = std::pow(10.0, n.depth_db / 20.0);
    const cplx num = s * s + s * (w0 / (n.q * g)) + w0 * w0;
    const cplx den = s * s + s * (w0 / n.q) + w0 * w0;
    return num / den;
}

}  // namespace

cplx ChannelModel::gain_at(double f) const {
    switch (kind) {
        case Kind::Identity:
            return cplx(1.0, 0.0);
        case Kind::LumpedC:
            return 1.0 / cplx(1.0, f / f3db_hz);
        case Kind::LossyLine: {
            const double atten =
                std::exp(-(k_skin * std::sqrt(std::max(f, 0.0)) + k_diel * f) *
                         length_m);
            const double phase = -2.0 * M_PI * f * delay_s_per_m * length_m;
            return std::polar(atten, phase);
        }
        case Kind::Notched: {
            cplx h = base->gain_at(f);
            for (const Notch& n : notches) h *= notch_gain(n, f);
            return h;
        }
        case Kind::Tabulated:
            return table.interpolate(f);
    }
    throw std::logic_error("unknown channel kind");
}

double ChannelModel::bulk_delay_s() const {
    switch (kind) {
        case Kind::LossyLine: return delay_s_per_m * length_m;
        case Kind::Notched:   return base->bulk_delay_s();
        default:              return 0.0;
    }
}

FrequencyResponse evaluate_response(const ChannelModel& model,
                                    const std::vector<double>& freqs_hz) {
    model.validate();
    for (size_t i = 0; i < freqs_hz.size(); ++i) {
        if (freqs_hz[i] < 0.0)
            throw std::invalid_argument("evaluate_response: negative frequency");
        if (i > 0 && freqs_hz[i] <= freqs_hz[i - 1])
            throw std::invalid_argument("evaluate_response: frequencies not ascending");
    }
    FrequencyResponse r;
    r.freqs_hz = freqs_hz;
    r.gains.resize(freqs_hz.size());
    for (size_t i = 0; i < freqs_hz.size(); ++i)
        r.gains[i] = model.gain_at(freqs_hz[i]);
    return r;
}

namespace {

template <typename GainFn>
std::vector<double> impulse_from_gain(GainFn&& gain, double fs, size_t n_taps) {
    const size_t nfft = next_pow2(std::max<size_t>(4 * n_taps, 1024));
    std::vector<cplx> spec(nfft, cplx(0, 0));
    // Roll the spectrum off above 0.9*fs/2. Without this a response that is
    // still large at Nyquist rings anti-causally (Gibbs) and spills energy
    // out of the tap window. Simulations keep signals >= 8x oversampled, so
    // the guard band carries no signal content.
    const double f_guard = 0.9 * fs / 2.0;
    for (size_t k = 0; k <= nfft / 2; ++k) {
        const double f = fs * static_cast<double>(k) / static_cast<double>(nfft);
        cplx h = gain(f);
        if (f > f_guard) {
            const double x = (f - f_guard) / (fs / 2.0 - f_guard);
            h *= 0.5 * (1.0 + std::cos(M_PI * x));
        }
        if (k == 0) h = cplx(h.real(), 0.0);
        if (k == nfft / 2) h = cplx(h.real(), 0.0);
        spec[k] = h;
        if (k != 0 && k != nfft / 2) spec[nfft - k] = std::conj(h);
    }
    fft_inplace(spec, true);

    // Band-limiting a causal response creates a small precursor at negative
    // time (it wraps to the end of the IFFT buffer). Rotate by a guard so
    // the precursor sits at the start of the window; downstream code finds
    // the cursor by peak search, so the constant extra delay is benign.
    const size_t guard = n_taps / 8;
    std::vector<double> impulse(nfft);
    double total = 0.0;
    for (size_t i = 0; i < nfft; ++i) {
        impulse[i] = spec[(i + nfft - guard) % nfft].real();
        total += impulse[i] * impulse[i];
    }
    double inside = 0.0;
    for (size_t i = 0; i < std::min(n_taps, nfft); ++i)
        inside += impulse[i] * impulse[i];
    if (total > 0.0 && inside < 0.999 * total)
        throw std::runtime_error(
            "synthesize_impulse: n_taps too small, >0.1% impulse energy outside window");

    impulse.resize(std::min(n_taps, nfft));
    // raised-cosine taper on the last 10% of the window
    const size_t taper = impulse.size() / 10;
    for (size_t i = 0; i < taper; ++i) {
        const double x =
            static_cast<double>(i + 1) / static_cast<double>(taper + 1);
        impulse[impulse.size() - 1 - i] *=
            0.5 * (1.0 - std::cos(M_PI * x));
    }
    return impulse;
}

}  // namespace

std::vector<double> synthesize_impulse(const ChannelModel& model,
                                       double sample_rate_hz, size_t n_taps) {
    model.validate();
    return impulse_from_gain([&](double f) { return model.gain_at(f); },
                             sample_rate_hz, n_taps);
}

std::vector<double> synthesize_impulse(const FrequencyResponse& response,
                                       double sample_rate_hz, size_t n_taps) {
    response.validate();
    if (response.freqs_hz.back() < sample_rate_hz / 2.0 - 1e-6)
        throw std::invalid_argument(
            "synthesize_impulse: response grid does not cover [0, fs/2]");
    return impulse_from_gain([&](double f) { return response.interpolate(f); },
                             sample_rate_hz, n_taps);
}

SampledWaveform apply_channel(const SampledWaveform& wave,
                              const ChannelModel& model, size_t n_taps) {
    const auto taps = synthesize_impulse(model, wave.sample_rate_hz, n_taps);
    SampledWaveform out;
    out.sample_rate_hz = wave.sample_rate_hz;
    out.samples = convolve(wave.samples, taps);
    return out;
}

SampledWaveform add_awgn(const SampledWaveform& wave, double sigma,
                         uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_awgn: negative sigma");
    SampledWaveform out = wave;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (double& v : out.samples) v += dist(rng);
    return out;
}

SingleBitResult single_bit_response(const ChannelModel& model,
                                    double bit_rate_hz,
                                    double threshold_fraction,
                                    int samples_per_symbol, double rolloff,
                                    size_t n_taps) {
    if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0)
        throw std::invalid_argument(
            "single_bit_response: threshold_fraction outside (0,1)");
    const double fs = bit_rate_hz * samples_per_symbol;
    const auto taps = rrc_taps(rolloff, 16, samples_per_symbol);

    SampledWaveform pulse{fs, taps};
    auto rx = apply_channel(pulse, model, n_taps);

    size_t peak = 0;
    double peak_val = 0.0;
    for (size_t i = 0; i < rx.samples.size(); ++i) {
        if (std::abs(rx.samples[i]) > peak_val) {
            peak_val = std::abs(rx.samples[i]);
            peak = i;
        }
    }

    const double thr = threshold_fraction * peak_val;
    int tail = 0;
    const int sps = samples_per_symbol;
    for (int k = 1;; ++k) {
        const long lo = static_cast<long>(peak) + static_cast<long>(k) * sps -
                        sps / 2;
        const long hi = lo + sps;
        if (lo >= static_cast<long>(rx.samples.size())) break;
        double m = 0.0;
        for (long i = std::max(lo, 1L);
             i < std::min<long>(hi, static_cast<long>(rx.samples.size())); ++i)
            m = std::max(m, std::abs(rx.samples[i]));
        if (m > thr) tail = k;
    }

    SingleBitResult res;
    res.pulse = std::move(rx);
    res.tail_ui = tail;
    res.peak_index = static_cast<int>(peak);
    return res;
}

}  // namespace rfi
