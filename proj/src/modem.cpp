#include "rfi/modem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace rfi {

namespace {

uint32_t gray_to_binary(uint32_t v) {
    uint32_t b = v;
    while (v >>= 1) b ^= v;
    return b;
}

// Gray-coded PAM levels {+-1, +-3, ...}*scale, index = bit pattern.
std::vector<cplx> make_pam(int bits, double scale) {
    const uint32_t m = 1u << bits;
    std::vector<cplx> pts(m);
    for (uint32_t v = 0; v < m; ++v) {
        const uint32_t i = gray_to_binary(v);
        pts[v] = cplx((2.0 * i - (m - 1.0)) * scale, 0.0);
    }
    return pts;
}

std::vector<cplx> make_qam(int bits) {
    const int half = bits / 2;
    const uint32_t ms = 1u << half;
    const double scale = std::sqrt(3.0 / (2.0 * (ms * ms - 1.0)));
    const uint32_t m = 1u << bits;
    std::vector<cplx> pts(m);
    for (uint32_t v = 0; v < m; ++v) {
        const uint32_t vi = v >> half;
        const uint32_t vq = v & (ms - 1);
        const double i = (2.0 * gray_to_binary(vi) - (ms - 1.0)) * scale;
        const double q = (2.0 * gray_to_binary(vq) - (ms - 1.0)) * scale;
        pts[v] = cplx(i, q);
    }
    return pts;
}

std::vector<cplx> build_constellation(Modulation m) {
    switch (m) {
        case Modulation::NRZ:   return make_pam(1, 1.0);
        case Modulation::PAM4:  return make_pam(2, std::sqrt(3.0 / 15.0));
        case Modulation::PAM8:  return make_pam(3, std::sqrt(3.0 / 63.0));
        case Modulation::PAM16: return make_pam(4, std::sqrt(3.0 / 255.0));
        case Modulation::OOK:   return {cplx(0.0, 0.0), cplx(std::sqrt(2.0), 0.0)};
        case Modulation::QPSK:  return make_qam(2);
        case Modulation::QAM16: return make_qam(4);
        case Modulation::QAM64: return make_qam(6);
        case Modulation::QAM256: return make_qam(8);
    }
    throw std::logic_error("unknown modulation");
}

std::vector<double> build_axis_levels(Modulation m) {
    if (m == Modulation::OOK) return {0.0, std::sqrt(2.0)};
    if (is_complex_modulation(m)) {
        const int half = bits_per_symbol(m) / 2;
        const uint32_t ms = 1u << half;
        const double scale = std::sqrt(3.0 / (2.0 * (ms * ms - 1.0)));
        std::vector<double> lv(ms);
        for (uint32_t i = 0; i < ms; ++i) lv[i] = (2.0 * i - (ms - 1.0)) * scale;
        return lv;
    }
    const auto& pts = constellation(m);
    const uint32_t mm = static_cast<uint32_t>(pts.size());
    const double scale = std::sqrt(3.0 / (mm * mm - 1.0));
    std::vector<double> lv(mm);
    for (uint32_t i = 0; i < mm; ++i) lv[i] = (2.0 * i - (mm - 1.0)) * scale;
    return lv;
}

}  // namespace

int bits_per_symbol(Modulation m) {
    switch (m) {
        case Modulation::NRZ:    return 1;
        case Modulation::PAM4:   return 2;
        case Modulation::PAM8:   return 3;
        case Modulation::PAM16:  return 4;
        case Modulation::OOK:    return 1;
        case Modulation::QPSK:   return 2;
        case Modulation::QAM16:  return 4;
        case Modulation::QAM64:  return 6;
        case Modulation::QAM256: return 8;
    }
    throw std::logic_error("unknown modulation");
}

bool is_complex_modulation(Modulation m) {
    return m == Modulation::QPSK || m == Modulation::QAM16 ||
           m == Modulation::QAM64 || m == Modulation::QAM256;
}

const char* modulation_name(Modulation m) {
    switch (m) {
        case Modulation::NRZ:    return "nrz";
        case Modulation::PAM4:   return "pam4";
        case Modulation::PAM8:   return "pam8";
        case Modulation::PAM16:  return "pam16";
        case Modulation::OOK:    return "ook";
        case Modulation::QPSK:   return "qpsk";
        case Modulation::QAM16:  return "qam16";
        case Modulation::QAM64:  return "qam64";
        case Modulation::QAM256: return "qam256";
    }
    throw std::logic_error("unknown modulation");
}

Modulation modulation_from_name(const std::string& name) {
    std::string lower = name;
    for (char& c : lower) c = static_cast<char>(std::tolower(c));
    for (Modulation m : all_modulations())
        if (lower == modulation_name(m)) return m;
    throw std::invalid_argument("unknown modulation name: " + name);
}

const std::vector<Modulation>& all_modulations() {
    static const std::vector<Modulation> all = {
        Modulation::NRZ,   Modulation::PAM4,  Modulation::PAM8,
        Modulation::PAM16, Modulation::OOK,   Modulation::QPSK,
        Modulation::QAM16, Modulation::QAM64, Modulation::QAM256};
    return all;
}

const std::vector<cplx>& constellation(Modulation m) {
    static const std::map<Modulation, std::vector<cplx>> cache = [] {
        std::map<Modulation, std::vector<cplx>> c;
        for (Modulation mm : all_modulations()) c[mm] = build_constellation(mm);
        return c;
    }();
    return cache.at(m);
}

const std::vector<double>& axis_levels(Modulation m) {
    static const std::map<Modulation, std::vector<double>> cache = [] {
        std::map<Modulation, std::vector<double>> c;
        for (Modulation mm : all_modulations()) c[mm] = build_axis_levels(mm);
        return c;
    }();
    return cache.at(m);
}

double min_distance(Modulation m) {
    const auto& pts = constellation(m);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, std::abs(pts[i] - pts[j]));
    return best;
}

std::vector<cplx> map_symbols(const std::vector<uint8_t>& bits, Modulation m) {
    const int k = bits_per_symbol(m);
    if (bits.size() % k != 0)
        throw std::invalid_argument(
            "map_symbols: bit count not divisible by bits_per_symbol");
    const auto& pts = constellation(m);
    std::vector<cplx> out(bits.size() / k);
    for (size_t s = 0; s < out.size(); ++s) {
        uint32_t v = 0;
        for (int j = 0; j < k; ++j) v = (v << 1) | (bits[s * k + j] & 1u);
        out[s] = pts[v];
    }
    return out;
}

std::vector<uint8_t> demap_symbols(const std::vector<cplx>& symbols, Modulation m) {
    const int k = bits_per_symbol(m);
    const auto& pts = constellation(m);
    std::vector<uint8_t> bits(symbols.size() * k);
    for (size_t s = 0; s < symbols.size(); ++s) {
        double best = std::numeric_limits<double>::infinity();
        uint32_t best_v = 0;
        for (uint32_t v = 0; v < pts.size(); ++v) {
            const double d = std::norm(symbols[s] - pts[v]);
            if (d < best) {
                best = d;
                best_v = v;
            }
        }
        for (int j = 0; j < k; ++j)
            bits[s * k + j] = static_cast<uint8_t>((best_v >> (k - 1 - j)) & 1u);
    }
    return bits;
}

cplx slice_symbol(cplx symbol, Modulation m) {
    const auto& pts = constellation(m);
    double best = std::numeric_limits<double>::infinity();
    cplx out = pts[0];
    for (const cplx& p : pts) {
        const double d = std::norm(symbol - p);
        if (d < best) {
            best = d;
            out = p;
        }
    }
    return out;
}

double slice_level(double value, const std::vector<double>& levels) {
    double best = std::numeric_limits<double>::infinity();
    double out = levels.front();
    for (double lv : levels) {
        const double d = std::abs(value - lv);
        if (d < best) {
            best = d;
            out = lv;
        }
    }
    return out;
}

void Band::validate() const {
    if (symbol_rate_hz <= 0.0)
        throw std::invalid_argument("Band: symbol rate must be positive");
    if (rolloff < 0.0 || rolloff > 1.0)
        throw std::invalid_argument("Band: rolloff outside [0,1]");
    if (power_scale <= 0.0)
        throw std::invalid_argument("Band: power_scale must be positive");
    if (carrier_hz < 0.0)
        throw std::invalid_argument("Band: negative carrier");
    if (carrier_hz == 0.0 && is_complex_modulation(modulation))
        throw std::invalid_argument(
            "Band: complex constellation requires carrier_hz > 0");
    if (occupied_low_hz() < -1e-6)
        throw std::invalid_argument("Band: occupied interval extends below 0 Hz");
}

double BandPlan::aggregate_bps() const {
    double acc = 0.0;
    for (const Band& b : bands) acc += b.bit_rate_bps();
    return acc;
}

void BandPlan::validate() const {
    for (const Band& b : bands) b.validate();
    for (size_t i = 0; i < bands.size(); ++i)
        for (size_t j = i + 1; j < bands.size(); ++j) {
            const double tol = 1.0;  // Hz
            if (bands[i].occupied_low_hz() < bands[j].occupied_high_hz() - tol &&
                bands[j].occupied_low_hz() < bands[i].occupied_high_hz() - tol)
                throw std::invalid_argument("BandPlan: overlapping bands");
        }
}

int samples_per_symbol(const Band& band, double sample_rate_hz) {
    const double r = sample_rate_hz / band.symbol_rate_hz;
    const int sps = static_cast<int>(std::lround(r));
    if (sps < 2 || std::abs(r - sps) > 1e-6)
        throw std::invalid_argument(
            "sample rate is not an integer multiple (>= 2) of the symbol rate");
    return sps;
}

double auto_sample_rate(const BandPlan& plan) {
    if (plan.bands.empty())
        throw std::invalid_argument("auto_sample_rate: empty plan");
    double fmax = 0.0;
    long long g = 0;
    for (const Band& b : plan.bands) {
        fmax = std::max(fmax, b.occupied_high_hz());
        g = std::gcd(g, static_cast<long long>(std::llround(b.symbol_rate_hz)));
    }
    if (g <= 0) throw std::invalid_argument("auto_sample_rate: bad symbol rates");
    const double fs_min = 8.0 * fmax;
    const long long mult =
        static_cast<long long>(std::ceil(fs_min / static_cast<double>(g) - 1e-9));
    return static_cast<double>(mult * g);
}

SampledWaveform modulate_band(const std::vector<uint8_t>& bits, const Band& band,
                              double sample_rate_hz, int span_symbols) {
    band.validate();
    if (band.occupied_high_hz() >= sample_rate_hz / 2.0)
        throw std::invalid_argument("modulate_band: band exceeds Nyquist");
    if (bits.empty())
        return SampledWaveform{sample_rate_hz, {}};

    const int sps = samples_per_symbol(band, sample_rate_hz);
    const auto symbols = map_symbols(bits, band.modulation);
    const auto taps = rrc_taps(band.rolloff, span_symbols, sps);
    auto env = shape_symbols(symbols, taps, sps, sample_rate_hz);
    auto wave = mix_carrier(env, band.carrier_hz, 0.0);
    for (double& v : wave.samples) v *= band.power_scale;
    return wave;
}

SampledWaveform compose_tx(const std::vector<std::vector<uint8_t>>& streams,
                           const BandPlan& plan, double sample_rate_hz,
                           int span_symbols) {
    if (streams.size() != plan.bands.size())
        throw std::invalid_argument("compose_tx: stream/band count mismatch");
    plan.validate();

    SampledWaveform out{sample_rate_hz, {}};
    for (size_t i = 0; i < streams.size(); ++i) {
        auto w = modulate_band(streams[i], plan.bands[i], sample_rate_hz,
                               span_symbols);
        if (w.samples.size() > out.samples.size())
            out.samples.resize(w.samples.size(), 0.0);
        for (size_t n = 0; n < w.samples.size(); ++n)
            out.samples[n] += w.samples[n];
    }
    return out;
}

std::vector<cplx> matched_filter_output(const SampledWaveform& wave,
                                        const Band& band, double phase_rad,
                                        int span_symbols) {
    if (band.occupied_high_hz() >= wave.sample_rate_hz / 2.0)
        throw std::invalid_argument("demodulate_band: band exceeds Nyquist");
    const int sps = samples_per_symbol(band, wave.sample_rate_hz);
    const auto taps = rrc_taps(band.rolloff, span_symbols, sps);

    std::vector<cplx> z(wave.samples.size());
    if (band.carrier_hz == 0.0) {
        for (size_t n = 0; n < z.size(); ++n) z[n] = cplx(wave.samples[n], 0.0);
    } else {
        const double w = 2.0 * M_PI * band.carrier_hz / wave.sample_rate_hz;
        const double root2 = std::sqrt(2.0);
        for (size_t n = 0; n < z.size(); ++n) {
            const double ang = -(w * static_cast<double>(n) + phase_rad);
            z[n] = wave.samples[n] * root2 * cplx(std::cos(ang), std::sin(ang));
        }
    }
    return convolve(z, taps);
}

std::vector<cplx> demodulate_band(const SampledWaveform& wave, const Band& band,
                                  double phase_rad, int timing_offset_samples,
                                  int span_symbols) {
    const int sps = samples_per_symbol(band, wave.sample_rate_hz);
    const auto mf = matched_filter_output(wave, band, phase_rad, span_symbols);
    // both filters contribute span/2 symbols of group delay
    const long start =
        static_cast<long>(span_symbols) * sps + timing_offset_samples;
    std::vector<cplx> symbols;
    for (long idx = start; idx >= 0 && idx < static_cast<long>(mf.size());
         idx += sps)
        symbols.push_back(mf[idx] / band.power_scale);
    return symbols;
}

}  // namespace rfi
