#include "rfi/equalizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rfi {

void TxFir::validate() const {
    if (taps.empty()) throw std::invalid_argument("TxFir: empty taps");
    if (cursor_index < 0 || cursor_index >= static_cast<int>(taps.size()))
        throw std::invalid_argument("TxFir: cursor_index out of range");
    double sum = 0.0;
    for (double t : taps) sum += std::abs(t);
    if (sum > 1.0 + 1e-9)
        throw std::invalid_argument("TxFir: sum(|taps|) exceeds 1");
}

namespace {

template <typename T>
std::vector<T> tx_fir_apply_impl(const std::vector<T>& symbols,
                                 const TxFir& fir) {
    fir.validate();
    std::vector<T> out(symbols.size(), T{});
    const int lt = static_cast<int>(fir.taps.size());
    for (int n = 0; n < static_cast<int>(symbols.size()); ++n) {
        T acc{};
        for (int k = 0; k < lt; ++k) {
            const int idx = n - (k - fir.cursor_index);
            if (idx >= 0 && idx < static_cast<int>(symbols.size()))
                acc += fir.taps[k] * symbols[idx];
        }
        out[n] = acc;
    }
    return out;
}

}  // namespace

std::vector<double> tx_fir_apply(const std::vector<double>& symbols,
                                 const TxFir& fir) {
    return tx_fir_apply_impl(symbols, fir);
}

std::vector<cplx> tx_fir_apply(const std::vector<cplx>& symbols,
                               const TxFir& fir) {
    return tx_fir_apply_impl(symbols, fir);
}

void CtleConfig::validate() const {
    if (zero_hz <= 0.0 || pole1_hz <= 0.0 || pole2_hz <= 0.0 || dc_gain <= 0.0)
        throw std::invalid_argument("CtleConfig: parameters must be positive");
    if (pole1_hz < zero_hz || pole2_hz < zero_hz)
        throw std::invalid_argument("CtleConfig: poles must be >= zero frequency");
}

cplx CtleConfig::prototype_gain(double freq_hz) const {
    const cplx s(0.0, 2.0 * M_PI * freq_hz);
    const double wz = 2.0 * M_PI * zero_hz;
    const double wp1 = 2.0 * M_PI * pole1_hz;
    const double wp2 = 2.0 * M_PI * pole2_hz;
    return dc_gain * (1.0 + s / wz) / ((1.0 + s / wp1) * (1.0 + s / wp2));
}

SampledWaveform ctle_apply(const SampledWaveform& wave,
                           const CtleConfig& config) {
    config.validate();
    const double fs = wave.sample_rate_hz;
    if (config.pole1_hz >= fs / 2.0 || config.pole2_hz >= fs / 2.0)
        throw std::invalid_argument("ctle_apply: pole at or above Nyquist");

    // bilinear transform, s = K(1 - z^-1)/(1 + z^-1), K = 2 fs
    const double k = 2.0 * fs;
    const double wz = 2.0 * M_PI * config.zero_hz;
    const double wp1 = 2.0 * M_PI * config.pole1_hz;
    const double wp2 = 2.0 * M_PI * config.pole2_hz;

    // numerator g*(1 + s/wz)*(1 + z^-1): first order in s, padded with (1+z^-1)
    const double nz0 = 1.0 + k / wz, nz1 = 1.0 - k / wz;
    const double dp0 = 1.0 + k / wp1, dp1 = 1.0 - k / wp1;
    const double dq0 = 1.0 + k / wp2, dq1 = 1.0 - k / wp2;

    double b0 = config.dc_gain * nz0;
    double b1 = config.dc_gain * (nz0 + nz1);
    double b2 = config.dc_gain * nz1;
    double a0 = dp0 * dq0;
    double a1 = dp0 * dq1 + dp1 * dq0;
    double a2 = dp1 * dq1;

    b0 /= a0; b1 /= a0; b2 /= a0; a1 /= a0; a2 /= a0;

    SampledWaveform out;
    out.sample_rate_hz = fs;
    out.samples.resize(wave.samples.size());
    double s1 = 0.0, s2 = 0.0;  // direct form II transposed
    for (size_t n = 0; n < wave.samples.size(); ++n) {
        const double x = wave.samples[n];
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        out.samples[n] = y;
    }
    return out;
}

DfeState DfeState::make(int ffe_len, int dfe_len, double mu) {
    if (ffe_len < 1 || dfe_len < 0 || mu < 0.0)
        throw std::invalid_argument("DfeState: bad lengths or mu");
    DfeState s;
    s.ffe_taps.assign(ffe_len, 0.0);
    s.ffe_taps[0] = 1.0;  // unit cursor
    s.dfe_taps.assign(dfe_len, 0.0);
    s.mu = mu;
    return s;
}

DfeResult dfe_run(const std::vector<double>& soft_symbols, DfeState state,
                  const std::vector<double>& levels,
                  const std::vector<double>* training_symbols) {
    if (levels.empty()) throw std::invalid_argument("dfe_run: empty level set");
    if (state.ffe_taps.empty())
        throw std::invalid_argument("dfe_run: empty FFE");

    const size_t n = soft_symbols.size();
    const size_t lf = state.ffe_taps.size();
    const size_t lb = state.dfe_taps.size();

    DfeResult res;
    res.decisions.resize(n);
    res.equalized.resize(n);
    res.error_trace.resize(n);

    for (size_t i = 0; i < n; ++i) {
        double y = 0.0;
        for (size_t k = 0; k < lf; ++k)
            if (i + k < n) y += state.ffe_taps[k] * soft_symbols[i + k];
        for (size_t j = 0; j < lb; ++j)
            if (i >= j + 1) y -= state.dfe_taps[j] * res.decisions[i - 1 - j];

        const bool in_training = training_symbols && i < training_symbols->size();
        const double ref =
            in_training ? (*training_symbols)[i] : slice_level(y, levels);
        const double e = ref - y;

        if (state.mu > 0.0) {
            for (size_t k = 0; k < lf; ++k)
                if (i + k < n)
                    state.ffe_taps[k] += state.mu * e * soft_symbols[i + k];
            for (size_t j = 0; j < lb; ++j)
                if (i >= j + 1)
                    state.dfe_taps[j] -= state.mu * e * res.decisions[i - 1 - j];
            for (double t : state.ffe_taps)
                if (!(std::abs(t) <= 10.0))
                    throw std::runtime_error("dfe_run: diverged (|ffe tap| > 10)");
            for (double t : state.dfe_taps)
                if (!(std::abs(t) <= 10.0))
                    throw std::runtime_error("dfe_run: diverged (|dfe tap| > 10)");
        }

        res.equalized[i] = y;
        res.decisions[i] = ref;
        res.error_trace[i] = e;
    }
    res.state = std::move(state);
    return res;
}

int band_channel_delay_samples(const ChannelModel& model, const Band& band,
                               double sample_rate_hz, size_t n_taps,
                               int span_symbols) {
    const int sps = samples_per_symbol(band, sample_rate_hz);
    const auto taps = rrc_taps(band.rolloff, span_symbols, sps);
    auto env = shape_symbols({cplx(1.0, 0.0)}, taps, sps, sample_rate_hz);
    auto wave = mix_carrier(env, band.carrier_hz, 0.0);
    auto rx = apply_channel(wave, model, n_taps);
    const auto mf = matched_filter_output(rx, band, 0.0, span_symbols);

    size_t peak = 0;
    double best = -1.0;
    for (size_t i = 0; i < mf.size(); ++i) {
        const double m = std::abs(mf[i]);
        if (m > best) {
            best = m;
            peak = i;
        }
    }
    return static_cast<int>(peak) - span_symbols * sps;
}

DfeState lms_train(const ChannelModel& model, const Band& band,
                   const LmsTrainConfig& config, uint64_t seed) {
    if (config.ffe_len < 1 || config.dfe_len < 0 || config.mu <= 0.0 ||
        config.n_train < 1)
        throw std::invalid_argument("lms_train: bad configuration");

    const BandPlan plan{{band}};
    const double fs = auto_sample_rate(plan);
    const int bps = bits_per_symbol(band.modulation);
    const auto bits =
        prbs_generate(31, seed == 0 ? 1 : seed,
                      static_cast<size_t>(config.n_train) * bps);
    const auto tx_symbols = map_symbols(bits, band.modulation);

    auto wave = modulate_band(bits, band, fs);
    auto rx = apply_channel(wave, model, config.channel_taps);
    const int delay = band_channel_delay_samples(model, band, fs,
                                                 config.channel_taps);
    auto soft = demodulate_band(rx, band, 0.0, delay);
    soft.resize(std::min(soft.size(), tx_symbols.size()));

    std::vector<double> soft_i(soft.size()), train_i(soft.size());
    for (size_t k = 0; k < soft.size(); ++k) {
        soft_i[k] = soft[k].real();
        train_i[k] = tx_symbols[k].real();
    }

    DfeState state = DfeState::make(config.ffe_len, config.dfe_len, config.mu);
    auto res = dfe_run(soft_i, std::move(state), axis_levels(band.modulation),
                       &train_i);

    for (double t : res.state.ffe_taps)
        if (std::abs(t) > 10.0)
            throw std::runtime_error("lms_train: diverged (|ffe tap| > 10)");
    for (double t : res.state.dfe_taps)
        if (std::abs(t) > 10.0)
            throw std::runtime_error("lms_train: diverged (|dfe tap| > 10)");

    res.state.trained = true;
    return res.state;
}

}  // namespace rfi
