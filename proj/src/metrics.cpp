#include "rfi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfi {

BerResult measure_ber(const std::vector<uint8_t>& tx_bits,
                      const std::vector<uint8_t>& rx_bits) {
    if (tx_bits.size() != rx_bits.size())
        throw std::invalid_argument("measure_ber: length mismatch");
    if (tx_bits.empty())
        throw std::invalid_argument("measure_ber: empty streams");

    size_t errors = 0;
    for (size_t i = 0; i < tx_bits.size(); ++i)
        if ((tx_bits[i] & 1) != (rx_bits[i] & 1)) ++errors;

    const double n = static_cast<double>(tx_bits.size());
    const double p = static_cast<double>(errors) / n;
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

    BerResult r;
    r.ber = p;
    r.ci95_low = std::max(0.0, center - half);
    r.ci95_high = std::min(1.0, center + half);
    r.n = tx_bits.size();
    r.errors = errors;
    return r;
}

double measure_evm(const std::vector<cplx>& rx_symbols, Modulation m) {
    if (rx_symbols.empty())
        throw std::invalid_argument("measure_evm: empty symbol list");
    double err = 0.0;
    for (const cplx& s : rx_symbols) err += std::norm(s - slice_symbol(s, m));
    err /= static_cast<double>(rx_symbols.size());

    const auto& pts = constellation(m);
    double ref = 0.0;
    for (const cplx& p : pts) ref += std::norm(p);
    ref /= static_cast<double>(pts.size());

    return 100.0 * std::sqrt(err / ref);
}

namespace {

// Smallest vertical gap between consecutive amplitude groups. Levels are
// nominally equiprobable, so each rail boundary is near a k/N quantile;
// random data is never exactly balanced, so search a window around the
// quantile for the widest adjacent gap instead of trusting a single index.
double min_level_gap(std::vector<double>& vals, int n_levels) {
    if (static_cast<int>(vals.size()) < 2 * n_levels) return 0.0;
    std::sort(vals.begin(), vals.end());
    const size_t w = std::max<size_t>(vals.size() / (4 * n_levels), 1);
    double gap = 1e300;
    for (int k = 1; k < n_levels; ++k) {
        const size_t split = vals.size() * static_cast<size_t>(k) /
                             static_cast<size_t>(n_levels);
        const size_t lo = split > w ? split - w : 1;
        const size_t hi = std::min(split + w, vals.size() - 1);
        double best = 0.0;
        for (size_t i = lo; i <= hi; ++i)
            best = std::max(best, vals[i] - vals[i - 1]);
        gap = std::min(gap, best);
    }
    return std::max(gap, 0.0);
}

}  // namespace

EyeResult eye_histogram(const SampledWaveform& wave, double ui_s, int bins_t,
                        int bins_v, int skip_ui, int n_levels) {
    if (ui_s <= 0.0 || bins_t < 4 || bins_v < 4 || n_levels < 2)
        throw std::invalid_argument("eye_histogram: bad parameters");
    const double fs = wave.sample_rate_hz;
    const double total_ui = wave.duration_s() / ui_s;
    if (total_ui < skip_ui + 100)
        throw std::invalid_argument(
            "eye_histogram: waveform shorter than skip_ui + 100 UI");

    const size_t start =
        static_cast<size_t>(std::ceil(skip_ui * ui_s * fs));
    double vmin = 1e300, vmax = -1e300;
    for (size_t i = start; i < wave.samples.size(); ++i) {
        vmin = std::min(vmin, wave.samples[i]);
        vmax = std::max(vmax, wave.samples[i]);
    }
    if (vmax <= vmin) vmax = vmin + 1.0;

    EyeResult eye;
    eye.bins_t = bins_t;
    eye.bins_v = bins_v;
    eye.v_min = vmin;
    eye.v_max = vmax;
    eye.counts.assign(static_cast<size_t>(bins_t) * bins_v, 0);

    std::vector<std::vector<double>> column_samples(bins_t);
    for (size_t i = start; i < wave.samples.size(); ++i) {
        const double t = std::fmod(static_cast<double>(i) / fs, ui_s) / ui_s;
        int bt = static_cast<int>(t * bins_t);
        bt = std::clamp(bt, 0, bins_t - 1);
        int bv = static_cast<int>((wave.samples[i] - vmin) / (vmax - vmin) *
                                  bins_v);
        bv = std::clamp(bv, 0, bins_v - 1);
        eye.counts[static_cast<size_t>(bt) * bins_v + bv]++;
        column_samples[bt].push_back(wave.samples[i]);
    }

    // eye height: worst level gap over the center 10% of the UI
    const int c0 = static_cast<int>(std::floor(bins_t * 0.45));
    const int c1 = static_cast<int>(std::ceil(bins_t * 0.55));
    std::vector<double> center;
    for (int bt = c0; bt < c1; ++bt)
        center.insert(center.end(), column_samples[bt].begin(),
                      column_samples[bt].end());
    eye.eye_height = min_level_gap(center, n_levels);

    // eye width: fraction of UI columns at least half as open as the center
    int open_cols = 0;
    for (int bt = 0; bt < bins_t; ++bt) {
        if (min_level_gap(column_samples[bt], n_levels) >= 0.5 * eye.eye_height)
            ++open_cols;
    }
    eye.eye_width_ui =
        eye.eye_height > 0.0
            ? static_cast<double>(open_cols) / static_cast<double>(bins_t)
            : 0.0;
    return eye;
}

}  // namespace rfi
