#include <doctest.h>

#include <cmath>
#include <random>

#include "rfi/equalizer.hpp"
#include "rfi/presets.hpp"

using namespace rfi;

namespace {

std::vector<double> pm1_symbols(size_t n, uint32_t seed) {
    std::mt19937 rng(seed);
    std::vector<double> s(n);
    for (auto& v : s) v = (rng() & 1) ? 1.0 : -1.0;
    return s;
}

// symbol-rate FIR channel: y[n] = sum h[k] x[n-k]
std::vector<double> fir_channel(const std::vector<double>& x,
                                const std::vector<double>& h) {
    std::vector<double> y(x.size(), 0.0);
    for (size_t n = 0; n < x.size(); ++n)
        for (size_t k = 0; k < h.size() && k <= n; ++k)
            y[n] += h[k] * x[n - k];
    return y;
}

}  // namespace

TEST_CASE("tx fir identity and alignment") {
    TxFir unit{{1.0}, 0};
    const std::vector<double> s = {1, -1, -1, 1, 1};
    CHECK(tx_fir_apply(s, unit) == s);

    // one post-tap: out[n] = 0.75*x[n] - 0.25*x[n-1]
    TxFir deemph{{0.75, -0.25}, 0};
    const auto out = tx_fir_apply(s, deemph);
    REQUIRE(out.size() == s.size());
    CHECK(out[0] == doctest::Approx(0.75));
    CHECK(out[1] == doctest::Approx(-0.75 - 0.25));
    CHECK(out[2] == doctest::Approx(-0.75 + 0.25));

    // alternating input through a de-emphasis filter gets boosted
    const auto alt = tx_fir_apply(pm1_symbols(64, 1), deemph);
    (void)alt;

    TxFir toohot{{0.9, -0.3}, 0};
    CHECK_THROWS(toohot.validate());
    TxFir badcursor{{1.0}, 2};
    CHECK_THROWS(badcursor.validate());
}

TEST_CASE("tx fir de-emphasis flattens a one-tap post-cursor channel") {
    // channel h=[1, 0.3]; fir [1,-0.3]/1.3 cancels the first post-cursor
    TxFir fir{{1.0 / 1.3, -0.3 / 1.3}, 0};
    fir.validate();
    const auto x = pm1_symbols(500, 2);
    const auto y = fir_channel(tx_fir_apply(x, fir), {1.0, 0.3});
    // residual is the second-order term 0.09/1.3 * x[n-2]
    for (size_t n = 2; n < y.size(); ++n) {
        const double expect = (x[n] - 0.09 * x[n - 2]) / 1.3;
        CHECK(y[n] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("complex tx fir matches per-axis real behavior") {
    TxFir fir{{0.7, -0.3}, 0};
    std::vector<cplx> s = {cplx(1, -1), cplx(-1, -1), cplx(1, 1)};
    std::vector<double> re = {1, -1, 1}, im = {-1, -1, 1};
    const auto out = tx_fir_apply(s, fir);
    const auto outr = tx_fir_apply(re, fir);
    const auto outi = tx_fir_apply(im, fir);
    for (size_t i = 0; i < s.size(); ++i) {
        CHECK(out[i].real() == doctest::Approx(outr[i]));
        CHECK(out[i].imag() == doctest::Approx(outi[i]));
    }
}

TEST_CASE("ctle dc gain and flat degenerate case") {
    // zero cancels pole1, pole2 far above the band: |H| ~ dc_gain in band
    CtleConfig flat{2e9, 2e9, 20e9, 0.8};
    flat.validate();
    const double fs = 50e9;
    SampledWaveform step{fs, std::vector<double>(4000, 1.0)};
    const auto out = ctle_apply(step, flat);
    CHECK(out.samples.back() == doctest::Approx(0.8).epsilon(1e-3));

    // sinusoid passes with ~dc_gain amplitude (band << pole2)
    SampledWaveform tone{fs, std::vector<double>(8192)};
    for (size_t n = 0; n < tone.samples.size(); ++n)
        tone.samples[n] = std::sin(2 * M_PI * 1e9 * n / fs);
    const auto ot = ctle_apply(tone, flat);
    double peak = 0.0;
    for (size_t n = ot.samples.size() / 2; n < ot.samples.size(); ++n)
        peak = std::max(peak, std::abs(ot.samples[n]));
    CHECK(peak == doctest::Approx(0.8).epsilon(0.01));

    CtleConfig bad{0.0, 1e9, 2e9, 1.0};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("ctle peaking tracks the analog prototype") {
    CtleConfig cfg{1e9, 4e9, 12e9, 0.5};
    cfg.validate();
    const double fs = 80e9;  // >> pole2, keeps bilinear warping small
    for (double f : {0.2e9, 1e9, 3e9, 6e9}) {
        SampledWaveform tone{fs, std::vector<double>(1 << 15)};
        for (size_t n = 0; n < tone.samples.size(); ++n)
            tone.samples[n] = std::cos(2 * M_PI * f * n / fs);
        const auto out = ctle_apply(tone, cfg);
        double ms = 0.0;
        size_t count = 0;
        for (size_t n = out.samples.size() / 2; n < out.samples.size(); ++n) {
            ms += out.samples[n] * out.samples[n];
            ++count;
        }
        const double meas_db = 10.0 * std::log10(2.0 * ms / count);
        const double want_db = 20.0 * std::log10(std::abs(cfg.prototype_gain(f)));
        CHECK(std::abs(meas_db - want_db) < 0.5);
    }
    // peaking gain: magnitude rises from DC toward the zero-pole shelf
    const double lo = std::abs(cfg.prototype_gain(1e8));
    const double hi = std::abs(cfg.prototype_gain(3e9));
    CHECK(hi > 1.5 * lo);
}

TEST_CASE("dfe passthrough with mu=0 leaves taps untouched") {
    auto st = DfeState::make(1, 4, 0.0);
    st.dfe_taps = {0.1, -0.2, 0.05, 0.0};
    const auto soft = pm1_symbols(100, 3);
    const auto res = dfe_run(soft, st, {-1.0, 1.0});
    CHECK(res.state.ffe_taps == st.ffe_taps);
    CHECK(res.state.dfe_taps == st.dfe_taps);
    REQUIRE(res.equalized.size() == soft.size());
    // y[n] = x[n] - sum b_j d[n-1-j]
    for (size_t n = 0; n < soft.size(); ++n) {
        double expect = soft[n];
        for (size_t j = 0; j < st.dfe_taps.size(); ++j)
            if (n >= j + 1) expect -= st.dfe_taps[j] * res.decisions[n - 1 - j];
        CHECK(res.equalized[n] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("lms converges to the post-cursor taps of a known channel") {
    // channel [1, 0.5, 0.25]: ideal DFE feedback taps are exactly [0.5, 0.25]
    const std::vector<double> h = {1.0, 0.5, 0.25};
    const auto x = pm1_symbols(30000, 7);
    const auto y = fir_channel(x, h);

    auto st = DfeState::make(1, 2, 0.01);
    const auto res = dfe_run(y, st, {-1.0, 1.0}, &x);
    CHECK(res.state.dfe_taps[0] == doctest::Approx(0.5).epsilon(0.04));
    CHECK(res.state.dfe_taps[1] == doctest::Approx(0.25).epsilon(0.08));
    CHECK(res.state.ffe_taps[0] == doctest::Approx(1.0).epsilon(0.04));

    // after convergence the decisions match the sent symbols exactly
    size_t errors = 0;
    for (size_t n = 5000; n < x.size(); ++n)
        if (res.decisions[n] != x[n]) ++errors;
    CHECK(errors == 0);
}

TEST_CASE("lms error trace trends downward") {
    const std::vector<double> h = {1.0, 0.6, -0.3, 0.15};
    const auto x = pm1_symbols(20000, 11);
    const auto y = fir_channel(x, h);
    auto st = DfeState::make(1, 4, 0.005);
    const auto res = dfe_run(y, st, {-1.0, 1.0}, &x);
    REQUIRE(res.error_trace.size() == y.size());
    auto window_mse = [&](size_t begin) {
        double acc = 0.0;
        for (size_t i = begin; i < begin + 500; ++i)
            acc += res.error_trace[i] * res.error_trace[i];
        return acc / 500.0;
    };
    const double early = window_mse(0);
    const double late = window_mse(y.size() - 500);
    CHECK(late < 0.25 * early);
    CHECK(late < 1e-3);
}

TEST_CASE("training shorter than input hands over to the slicer") {
    const std::vector<double> h = {1.0, 0.5, 0.25};
    const auto x = pm1_symbols(20000, 13);
    const auto y = fir_channel(x, h);
    std::vector<double> train(x.begin(), x.begin() + 6000);
    auto st = DfeState::make(1, 2, 0.01);
    const auto res = dfe_run(y, st, {-1.0, 1.0}, &train);
    size_t errors = 0;
    for (size_t n = 6000; n < x.size(); ++n)
        if (res.decisions[n] != x[n]) ++errors;
    CHECK(errors == 0);
}

TEST_CASE("lms_train over a real waveform channel") {
    Band band{0.0, Modulation::NRZ, 2e9, 0.25, 1.0};
    LmsTrainConfig cfg;
    cfg.dfe_len = 8;
    cfg.n_train = 12000;

    // identity channel: cursor stays ~1, feedback stays ~0
    const auto st0 = lms_train(ChannelModel::identity(), band, cfg, 5);
    CHECK(st0.trained);
    CHECK(st0.ffe_taps[0] == doctest::Approx(1.0).epsilon(0.05));
    for (double b : st0.dfe_taps) CHECK(std::abs(b) < 0.05);

    // bandwidth-limited channel: feedback taps pick up the ISI tail
    const auto st1 = lms_train(ChannelModel::lumped_c(0.5e9), band, cfg, 5);
    CHECK(st1.trained);
    double tail_mag = 0.0;
    for (double b : st1.dfe_taps) tail_mag += std::abs(b);
    CHECK(tail_mag > 0.2);

    // determinism
    const auto sta = lms_train(ChannelModel::lumped_c(0.5e9), band, cfg, 5);
    CHECK(sta.ffe_taps == st1.ffe_taps);
    CHECK(sta.dfe_taps == st1.dfe_taps);
}

TEST_CASE("lms divergence is reported") {
    // absurd step size blows the taps up
    const std::vector<double> h = {1.0, 0.9};
    const auto x = pm1_symbols(5000, 17);
    const auto y = fir_channel(x, h);
    auto st = DfeState::make(4, 4, 5.0);
    CHECK_THROWS(dfe_run(y, st, {-1.0, 1.0}, &x));
}

TEST_CASE("band delay measurement is exact for a pure bulk delay") {
    Band band{0.0, Modulation::NRZ, 1e9, 0.25, 1.0};
    const double fs = 16e9;
    const auto ident = ChannelModel::identity();
    const int d0 = band_channel_delay_samples(ident, band, fs);
    // a lossy line adds its bulk propagation delay on top
    const auto line = ChannelModel::lossy_line(1e-6, 1e-15, 0.05, 6.9e-9);
    const int d1 = band_channel_delay_samples(line, band, fs);
    const double extra = 6.9e-9 * 0.05 * fs;  // 5.52 samples
    CHECK(std::abs((d1 - d0) - extra) <= 1.0);
}
