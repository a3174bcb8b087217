#include <doctest.h>

#include <cmath>

#include "rfi/cognitive.hpp"
#include "rfi/presets.hpp"

using namespace rfi;

namespace {

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("log probe grid endpoints and spacing") {
    const auto grid = log_probe_grid(1e8, 1e10, 5);
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == doctest::Approx(1e8));
    CHECK(grid.back() == doctest::Approx(1e10));
    // constant ratio between neighbors
    const double r = grid[1] / grid[0];
    for (size_t i = 1; i + 1 < grid.size(); ++i)
        CHECK(grid[i + 1] / grid[i] == doctest::Approx(r).epsilon(1e-9));
    CHECK_THROWS(log_probe_grid(0.0, 1e9, 4));
    CHECK_THROWS(log_probe_grid(2e9, 1e9, 4));
}

TEST_CASE("noiseless probe of the identity channel reads 0 dB") {
    ProbeConfig cfg;
    const auto grid = log_probe_grid(1e8, 1e10, 16);
    const auto prof = probe_channel(ChannelModel::identity(), grid, 64e9, cfg, 1);
    prof.validate();
    REQUIRE(prof.gain_db.size() == grid.size());
    for (double g : prof.gain_db) CHECK(std::abs(g) < 0.1);
    CHECK(prof.noise_density_dbhz == doctest::Approx(-400.0));
}

TEST_CASE("probe tracks the analytic response within 0.1 dB") {
    ProbeConfig cfg;
    const auto grid = log_probe_grid(1e8, 1e10, 24);
    for (const char* name : {"onboard_trace", "mdb", "onchip_trace"}) {
        const auto ch = channel_preset(name);
        const auto prof = probe_channel(ch, grid, 64e9, cfg, 2);
        for (size_t i = 0; i < grid.size(); ++i) {
            const double want = 20.0 * std::log10(std::abs(ch.gain_at(grid[i])));
            CHECK(std::abs(prof.gain_db[i] - want) < 0.1);
        }
    }
}

TEST_CASE("probe sees a deep notch") {
    ProbeConfig cfg;
    const auto ch = channel_preset("notch40");
    std::vector<double> grid = {1e9, 1.8e9, 2e9, 2.2e9, 4e9};
    const auto prof = probe_channel(ch, grid, 64e9, cfg, 3);
    double worst = 0.0;
    for (double g : prof.gain_db) worst = std::min(worst, g);
    CHECK(worst < -35.0);
}

TEST_CASE("noisy probe reports the injected noise floor") {
    ProbeConfig cfg;
    cfg.sigma = 0.02;
    const double fs = 64e9;
    const auto grid = log_probe_grid(2e8, 8e9, 8);
    const auto prof = probe_channel(ChannelModel::identity(), grid, fs, cfg, 4);
    const double want = 10.0 * std::log10(cfg.sigma * cfg.sigma / (fs / 2.0));
    // the floor is a sample estimate over the probe window
    CHECK(std::abs(prof.noise_density_dbhz - want) < 0.1);
    // tone power >> noise: gains barely perturbed
    for (double g : prof.gain_db) CHECK(std::abs(g) < 0.1);
}

TEST_CASE("probe determinism") {
    ProbeConfig cfg;
    cfg.sigma = 0.05;
    const auto grid = log_probe_grid(2e8, 8e9, 6);
    const auto a = probe_channel(channel_preset("mdb"), grid, 64e9, cfg, 9);
    const auto b = probe_channel(channel_preset("mdb"), grid, 64e9, cfg, 9);
    CHECK(a.gain_db == b.gain_db);
}

TEST_CASE("awgn symbol ber matches the NRZ closed form") {
    // BER = Q(sqrt(2 Es/N0)) for binary antipodal signaling
    for (double snr_db : {4.0, 6.79, 9.0}) {
        const double want = q_func(std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0)));
        const double got = awgn_symbol_ber(Modulation::NRZ, snr_db, 2000000, 11);
        CHECK(got == doctest::Approx(want).epsilon(0.15));
    }
}

TEST_CASE("awgn ber decreases with modulation density at fixed SNR") {
    const double snr_db = 14.0;
    const double b2 = awgn_symbol_ber(Modulation::NRZ, snr_db, 200000, 5);
    const double b4 = awgn_symbol_ber(Modulation::PAM4, snr_db, 200000, 5);
    const double b16 = awgn_symbol_ber(Modulation::QAM16, snr_db, 200000, 5);
    const double b64 = awgn_symbol_ber(Modulation::QAM64, snr_db, 200000, 5);
    CHECK(b2 < b4);
    CHECK(b4 < b64);
    CHECK(b16 < b64);
}

TEST_CASE("required snr table hits known anchors and orders sanely") {
    const auto mods = all_modulations();
    const auto table = required_snr_table(1e-3, mods, 200000, 77);
    CHECK(table.target_ber == doctest::Approx(1e-3));
    for (Modulation m : mods) CHECK(table.has(m));

    // closed-form anchor: NRZ at 1e-3 needs Es/N0 = 6.79 dB
    CHECK(table.required_snr_db(Modulation::NRZ) ==
          doctest::Approx(6.79).epsilon(0.05));
    // QPSK needs 3 dB more symbol energy than NRZ for the same per-bit BER
    CHECK(table.required_snr_db(Modulation::QPSK) ==
          doctest::Approx(9.79).epsilon(0.05));

    // denser constellations need more SNR
    const double s_nrz = table.required_snr_db(Modulation::NRZ);
    const double s_pam4 = table.required_snr_db(Modulation::PAM4);
    const double s_pam8 = table.required_snr_db(Modulation::PAM8);
    const double s_qam16 = table.required_snr_db(Modulation::QAM16);
    const double s_qam64 = table.required_snr_db(Modulation::QAM64);
    CHECK(s_nrz < s_pam4);
    CHECK(s_pam4 < s_pam8);
    CHECK(s_qam16 < s_qam64);

    CHECK_THROWS(required_snr_table(1e-9, mods, 1000, 1));
}

TEST_CASE("required snr table determinism") {
    const std::vector<Modulation> mods = {Modulation::NRZ, Modulation::QAM16};
    const auto a = required_snr_table(1e-3, mods, 50000, 3);
    const auto b = required_snr_table(1e-3, mods, 50000, 3);
    CHECK(a.entries == b.entries);
}

TEST_CASE("predict_band_snr link-budget arithmetic") {
    ChannelProfile prof;
    prof.probe_freqs_hz = {0.0, 1e9, 2e9, 3e9, 4e9};
    prof.gain_db = {-10.0, -10.0, -50.0, -10.0, -10.0};
    prof.noise_density_dbhz = -80.0;
    prof.sample_rate_hz = 32e9;
    prof.validate();

    // flat -10 dB region: snr = txd + gain - noise = -10 -10 + 80 = 60... with
    // txd = -10 dB/Hz chosen directly
    Band flat{3.5e9, Modulation::QPSK, 0.4e9, 0.25, 1.0};
    CHECK(predict_band_snr(prof, flat, -10.0) == doctest::Approx(60.0).epsilon(1e-6));

    // band spanning the -50 dB sample is limited by the in-band minimum
    Band across{2e9, Modulation::QPSK, 0.8e9, 0.25, 1.0};
    CHECK(predict_band_snr(prof, across, -10.0) == doctest::Approx(20.0).epsilon(1e-6));

    // narrowing a band can only raise (never lower) its predicted SNR
    for (double rate : {1.6e9, 0.8e9, 0.4e9, 0.2e9}) {
        Band wide{2e9, Modulation::QPSK, 2.0 * rate, 0.25, 1.0};
        Band narrow{2e9, Modulation::QPSK, rate, 0.25, 1.0};
        CHECK(predict_band_snr(prof, narrow, -10.0) >=
              predict_band_snr(prof, wide, -10.0) - 1e-9);
    }
}

TEST_CASE("predicted snr matches simulated matched-filter snr") {
    // the convention: unit-energy pulse, per-sample sigma, fs known.
    // Es/N0 = 1/(2 sigma^2); prediction must reproduce it from densities.
    const double fs = 32e9, sigma = 0.05;
    ChannelProfile prof;
    prof.probe_freqs_hz = {0.0, 16e9};
    prof.gain_db = {0.0, 0.0};
    prof.noise_density_dbhz = 10.0 * std::log10(sigma * sigma / (fs / 2.0));
    prof.sample_rate_hz = fs;
    Band band{0.0, Modulation::NRZ, 1e9, 0.25, 1.0};
    const double want = 10.0 * std::log10(1.0 / (2.0 * sigma * sigma));
    const double got = predict_band_snr(prof, band, sim_tx_power_density_dbhz(fs));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

namespace {

ChannelProfile flat_profile(double gain_db, double noise_db, double fmax) {
    ChannelProfile p;
    p.probe_freqs_hz = {0.0, fmax / 2, fmax};
    p.gain_db = {gain_db, gain_db, gain_db};
    p.noise_density_dbhz = noise_db;
    p.sample_rate_hz = 4 * fmax;
    return p;
}

}  // namespace

TEST_CASE("allocator saturates a clean high-snr channel") {
    const auto table = required_snr_table(1e-3, all_modulations(), 100000, 21);
    AllocationConstraints cons;
    cons.max_bands = 3;
    cons.carrier_grid_hz = {0.0, 3e9, 6e9};
    cons.symbol_rates_hz = {1e9, 2e9};
    cons.snr_margin_db = 3.0;
    cons.usable_band_hz = 8e9;
    const auto res = allocate_bands(flat_profile(0.0, -130.0, 8e9), table, cons,
                                    -10.0);
    // ~117 dB SNR: every slot gets the densest modulation at the top rate
    REQUIRE(res.plan.bands.size() == 3);
    for (const Band& b : res.plan.bands) {
        if (b.carrier_hz == 0.0)
            CHECK(b.modulation == Modulation::PAM16);
        else
            CHECK(b.modulation == Modulation::QAM256);
    }
    CHECK(res.aggregate_bps >= 3 * 2e9 * 4);
    res.plan.validate();
}

TEST_CASE("allocator returns nothing on a dead channel") {
    const auto table = required_snr_table(1e-3, all_modulations(), 100000, 21);
    AllocationConstraints cons;
    cons.max_bands = 3;
    cons.carrier_grid_hz = {0.0, 3e9, 6e9};
    cons.symbol_rates_hz = {1e9};
    cons.usable_band_hz = 8e9;
    const auto res = allocate_bands(flat_profile(-200.0, -80.0, 8e9), table,
                                    cons, -10.0);
    CHECK(res.plan.bands.empty());
    CHECK(res.aggregate_bps == 0.0);
}

TEST_CASE("allocator avoids a notch and its plan is self-consistent") {
    ChannelProfile prof;
    // flat -6 dB except a -45 dB notch around 3 GHz
    for (int i = 0; i <= 32; ++i) {
        const double f = 8e9 * i / 32.0;
        prof.probe_freqs_hz.push_back(f);
        const double notch = (std::abs(f - 3e9) < 0.4e9) ? -45.0 : -6.0;
        prof.gain_db.push_back(notch);
    }
    // floor chosen so the notch region falls below any required SNR while
    // the -6 dB regions keep ~44 dB
    prof.noise_density_dbhz = -60.0;
    prof.sample_rate_hz = 32e9;

    const auto table = required_snr_table(1e-3, all_modulations(), 100000, 33);
    AllocationConstraints cons;
    cons.max_bands = 3;
    cons.carrier_grid_hz = {0.0, 1.5e9, 3e9, 4.5e9, 6e9};
    cons.symbol_rates_hz = {0.5e9, 1e9, 2e9};
    cons.snr_margin_db = 3.0;
    cons.usable_band_hz = 8e9;
    const auto res = allocate_bands(prof, table, cons, -10.0);

    REQUIRE(!res.plan.bands.empty());
    res.plan.validate();
    REQUIRE(res.per_band_predicted_snr_db.size() == res.plan.bands.size());
    double agg = 0.0;
    for (size_t i = 0; i < res.plan.bands.size(); ++i) {
        const Band& b = res.plan.bands[i];
        // no allocated band may cross the notch
        CHECK((b.occupied_high_hz() < 2.6e9 || b.occupied_low_hz() > 3.4e9));
        // margin honored against the table
        const double need = table.required_snr_db(b.modulation);
        CHECK(res.per_band_predicted_snr_db[i] >= need + cons.snr_margin_db - 1e-9);
        CHECK(res.per_band_predicted_snr_db[i] ==
              doctest::Approx(predict_band_snr(prof, b, -10.0)));
        agg += b.bit_rate_bps();
    }
    CHECK(res.aggregate_bps == doctest::Approx(agg));
}

TEST_CASE("greedy allocation is near the small-instance optimum") {
    ChannelProfile prof = flat_profile(-20.0, -90.0, 8e9);
    const auto table = required_snr_table(1e-3, all_modulations(), 100000, 55);
    AllocationConstraints cons;
    cons.max_bands = 2;
    cons.carrier_grid_hz = {0.0, 3e9, 6e9};
    cons.symbol_rates_hz = {1e9, 2e9};
    cons.snr_margin_db = 3.0;
    cons.usable_band_hz = 8e9;
    const double txd = -10.0;
    const auto res = allocate_bands(prof, table, cons, txd);

    // brute force: all pairs of disjoint feasible candidate bands
    std::vector<Band> cands;
    for (double c : cons.carrier_grid_hz)
        for (double r : cons.symbol_rates_hz)
            for (Modulation m : all_modulations()) {
                Band b{c, m, r, cons.rolloff, 1.0};
                if (is_complex_modulation(m) != (c > 0.0) && m != Modulation::OOK)
                    continue;
                try {
                    b.validate();
                } catch (...) {
                    continue;
                }
                if (b.occupied_high_hz() > cons.usable_band_hz) continue;
                double snr;
                try {
                    snr = predict_band_snr(prof, b, txd);
                } catch (...) {
                    continue;
                }
                if (snr < table.required_snr_db(m) + cons.snr_margin_db) continue;
                cands.push_back(b);
            }
    double best = 0.0;
    for (const Band& b : cands) best = std::max(best, b.bit_rate_bps());
    for (size_t i = 0; i < cands.size(); ++i)
        for (size_t j = i + 1; j < cands.size(); ++j) {
            BandPlan p{{cands[i], cands[j]}};
            try {
                p.validate();
            } catch (...) {
                continue;
            }
            best = std::max(best, p.aggregate_bps());
        }
    CHECK(res.aggregate_bps >= 0.8 * best);
}

TEST_CASE("allocation determinism") {
    const auto prof = flat_profile(-10.0, -100.0, 8e9);
    const auto table = required_snr_table(1e-3, all_modulations(), 100000, 88);
    AllocationConstraints cons;
    cons.max_bands = 3;
    cons.carrier_grid_hz = {0.0, 2e9, 4e9, 6e9};
    cons.symbol_rates_hz = {0.5e9, 1e9, 2e9};
    cons.usable_band_hz = 8e9;
    const auto a = allocate_bands(prof, table, cons, -10.0);
    const auto b = allocate_bands(prof, table, cons, -10.0);
    REQUIRE(a.plan.bands.size() == b.plan.bands.size());
    for (size_t i = 0; i < a.plan.bands.size(); ++i) {
        CHECK(a.plan.bands[i].carrier_hz == b.plan.bands[i].carrier_hz);
        CHECK(a.plan.bands[i].modulation == b.plan.bands[i].modulation);
        CHECK(a.plan.bands[i].symbol_rate_hz == b.plan.bands[i].symbol_rate_hz);
    }
}
