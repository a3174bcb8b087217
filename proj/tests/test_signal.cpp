#include <doctest.h>

#include <cmath>
#include <random>

#include "rfi/signal.hpp"

using namespace rfi;

TEST_CASE("prbs period and balance") {
    const auto bits = prbs_generate(7, 1, 254);
    for (size_t i = 0; i < 127; ++i) CHECK(bits[i] == bits[i + 127]);

    const auto one_period = prbs_generate(7, 1, 127);
    int ones = 0;
    for (uint8_t b : one_period) ones += b;
    CHECK(ones == 64);
}

TEST_CASE("prbs rejects zero seed and bad order") {
    CHECK_THROWS(prbs_generate(7, 0, 10));
    CHECK_THROWS(prbs_generate(9, 1, 10));
    CHECK_THROWS(prbs_generate(7, 1, 0));
}

TEST_CASE("prbs determinism") {
    CHECK(prbs_generate(31, 12345, 1000) == prbs_generate(31, 12345, 1000));
    CHECK(prbs_generate(31, 12345, 1000) != prbs_generate(31, 54321, 1000));
}

TEST_CASE("prbs-15 autocorrelation at nonzero shifts") {
    const size_t period = (1u << 15) - 1;
    const auto bits = prbs_generate(15, 1, period);
    // brute-force circular correlation under +-1 mapping
    for (size_t shift : {1u, 2u, 7u, 100u, 5000u, 20000u}) {
        long acc = 0;
        for (size_t i = 0; i < period; ++i) {
            const int a = bits[i] ? 1 : -1;
            const int b = bits[(i + shift) % period] ? 1 : -1;
            acc += a * b;
        }
        CHECK(acc == -1);  // normalized: -1/(2^15-1)
    }
}

TEST_CASE("rrc taps symmetry and unit energy") {
    for (double rolloff : {0.0, 0.25, 0.5, 1.0}) {
        const auto taps = rrc_taps(rolloff, 16, 8);
        CHECK(taps.size() == 16 * 8 + 1);
        double energy = 0.0;
        for (size_t i = 0; i < taps.size(); ++i) {
            CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]).epsilon(1e-12));
            energy += taps[i] * taps[i];
        }
        CHECK(energy == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("rrc nyquist isi-free property") {
    const int sps = 8;
    const auto taps = rrc_taps(0.25, 16, sps);
    const auto rc = convolve_direct(taps, taps);  // raised cosine
    const size_t center = (rc.size() - 1) / 2;
    CHECK(rc[center] == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 1; k <= 12; ++k) {
        CHECK(std::abs(rc[center + k * sps]) < 1e-3);
        CHECK(std::abs(rc[center - k * sps]) < 1e-3);
    }
}

TEST_CASE("shape_symbols impulse and superposition") {
    const auto taps = rrc_taps(0.25, 8, 4);
    const auto one = shape_symbols({cplx(1, 0)}, taps, 4, 4e9);
    REQUIRE(one.samples.size() == taps.size());
    for (size_t i = 0; i < taps.size(); ++i)
        CHECK(one.samples[i].real() == doctest::Approx(taps[i]));

    const auto zeros = shape_symbols({cplx(0, 0), cplx(0, 0)}, taps, 4, 4e9);
    for (const auto& s : zeros.samples) CHECK(std::abs(s) == 0.0);

    // two unit symbols equal the sum of two shifted copies
    const auto two = shape_symbols({cplx(1, 0), cplx(1, 0)}, taps, 4, 4e9);
    for (size_t i = 0; i < two.samples.size(); ++i) {
        double expected = (i < taps.size() ? taps[i] : 0.0) +
                          (i >= 4 && i - 4 < taps.size() ? taps[i - 4] : 0.0);
        CHECK(two.samples[i].real() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("shape_symbols linearity") {
    const auto taps = rrc_taps(0.3, 8, 4);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> s1(32), s2(32), mix(32);
    const cplx a(0.7, -0.2), b(-1.3, 0.4);
    for (size_t i = 0; i < 32; ++i) {
        s1[i] = cplx(u(rng), u(rng));
        s2[i] = cplx(u(rng), u(rng));
        mix[i] = a * s1[i] + b * s2[i];
    }
    const auto e1 = shape_symbols(s1, taps, 4, 1.0);
    const auto e2 = shape_symbols(s2, taps, 4, 1.0);
    const auto em = shape_symbols(mix, taps, 4, 1.0);
    for (size_t i = 0; i < em.samples.size(); ++i) {
        const cplx expect = a * e1.samples[i] + b * e2.samples[i];
        CHECK(std::abs(em.samples[i] - expect) <=
              1e-12 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("mix_carrier definition and baseband passthrough") {
    const double fs = 32e9, fc = 3e9;
    ComplexEnvelope env{fs, std::vector<cplx>(64, cplx(1, 0))};
    const auto wave = mix_carrier(env, fc, 0.0);
    for (size_t n = 0; n < wave.samples.size(); ++n) {
        const double expect = std::sqrt(2.0) * std::cos(2 * M_PI * fc * n / fs);
        CHECK(wave.samples[n] == doctest::Approx(expect).epsilon(1e-12));
    }

    ComplexEnvelope bb{fs, {cplx(0.3, 0.9), cplx(-1.2, 0.1)}};
    const auto base = mix_carrier(bb, 0.0, 0.0);
    CHECK(base.samples[0] == doctest::Approx(0.3));
    CHECK(base.samples[1] == doctest::Approx(-1.2));

    CHECK_THROWS(mix_carrier(env, fs / 2, 0.0));
}

TEST_CASE("mix_carrier passband power equivalence") {
    // unit-power shaped envelope on a carrier well above its bandwidth
    const double fs = 64e9, fc = 8e9;
    const int sps = 64;  // 1 GBaud
    const auto taps = rrc_taps(0.25, 16, sps);
    std::mt19937 rng(3);
    std::vector<cplx> syms(512);
    for (auto& s : syms) {
        const double i = (rng() & 1) ? 1.0 : -1.0;
        const double q = (rng() & 1) ? 1.0 : -1.0;
        s = cplx(i, q) / std::sqrt(2.0);
    }
    const auto env = shape_symbols(syms, taps, sps, fs);
    double env_power = 0.0;
    for (const auto& s : env.samples) env_power += std::norm(s);
    env_power /= static_cast<double>(env.samples.size());

    const auto wave = mix_carrier(env, fc, 0.4);
    CHECK(wave.mean_power() == doctest::Approx(env_power).epsilon(0.01));
}

TEST_CASE("coherent downmix recovers the envelope") {
    // carrier >= 3x envelope bandwidth; downmix + matched low-pass
    const double fs = 64e9, fc = 6e9;
    const int sps = 32;  // 2 GBaud, bw ~ 1.25 GHz
    const auto taps = rrc_taps(0.25, 16, sps);
    std::mt19937 rng(11);
    std::vector<cplx> syms(256);
    for (auto& s : syms)
        s = cplx((rng() & 1) ? 1.0 : -1.0, (rng() & 1) ? 1.0 : -1.0) /
            std::sqrt(2.0);
    const auto env = shape_symbols(syms, taps, sps, fs);
    const auto wave = mix_carrier(env, fc, 0.0);

    std::vector<cplx> down(wave.samples.size());
    for (size_t n = 0; n < down.size(); ++n) {
        const double ang = -2 * M_PI * fc * n / fs;
        down[n] = wave.samples[n] * std::sqrt(2.0) *
                  cplx(std::cos(ang), std::sin(ang));
    }
    const auto rec = convolve_direct(down, taps);
    const auto ref = convolve_direct(env.samples, taps);
    double err = 0.0, pwr = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        err += std::norm(rec[i] - ref[i]);
        pwr += std::norm(ref[i]);
    }
    CHECK(std::sqrt(err / pwr) < 0.01);
}

TEST_CASE("psd locates a pure tone") {
    const double fs = 16e9, f0 = 3.1e9;
    SampledWaveform wave{fs, std::vector<double>(1 << 14)};
    for (size_t n = 0; n < wave.samples.size(); ++n)
        wave.samples[n] = std::cos(2 * M_PI * f0 * n / fs);
    const auto psd = estimate_psd(wave, 1024);
    size_t argmax = 0;
    for (size_t k = 1; k < psd.psd.size(); ++k)
        if (psd.psd[k] > psd.psd[argmax]) argmax = k;
    const double df = psd.freq_hz[1] - psd.freq_hz[0];
    CHECK(std::abs(psd.freq_hz[argmax] - f0) <= df);
}

TEST_CASE("psd parseval on white noise") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 0.1);
    SampledWaveform wave{1e9, std::vector<double>(1 << 17)};
    for (auto& v : wave.samples) v = gauss(rng);
    const auto psd = estimate_psd(wave, 2048);
    double integral = 0.0;
    const double df = psd.freq_hz[1] - psd.freq_hz[0];
    for (double p : psd.psd) integral += p * df;
    CHECK(integral == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("psd parseval on a deterministic signal") {
    const double fs = 8e9;
    SampledWaveform wave{fs, std::vector<double>(1 << 15)};
    for (size_t n = 0; n < wave.samples.size(); ++n)
        wave.samples[n] = 0.7 * std::sin(2 * M_PI * 1.1e9 * n / fs) +
                          0.4 * std::cos(2 * M_PI * 2.7e9 * n / fs);
    const auto psd = estimate_psd(wave, 2048);
    double integral = 0.0;
    const double df = psd.freq_hz[1] - psd.freq_hz[0];
    for (double p : psd.psd) integral += p * df;
    CHECK(integral == doctest::Approx(wave.mean_power()).epsilon(0.02));
}
