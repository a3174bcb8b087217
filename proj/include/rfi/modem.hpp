#pragma once

#include <string>
#include <vector>

#include "rfi/signal.hpp"

namespace rfi {

enum class Modulation { NRZ, PAM4, PAM8, PAM16, OOK, QPSK, QAM16, QAM64, QAM256 };

int bits_per_symbol(Modulation m);
bool is_complex_modulation(Modulation m);  // requires a carrier
const char* modulation_name(Modulation m);
Modulation modulation_from_name(const std::string& name);
const std::vector<Modulation>& all_modulations();

// Unit-average-energy Gray-coded constellation, indexed by the symbol's
// bit pattern (MSB first). For square QAM the first half of the bits maps
// to I, the second half to Q.
const std::vector<cplx>& constellation(Modulation m);

// Per-axis amplitude levels, index = Gray-decoded level index.
// For PAM these are the constellation itself; for QAM one axis.
const std::vector<double>& axis_levels(Modulation m);

// Minimum Euclidean distance between constellation points.
double min_distance(Modulation m);

std::vector<cplx> map_symbols(const std::vector<uint8_t>& bits, Modulation m);

// Nearest-point slicing; ties break toward the lower bit-pattern index.
std::vector<uint8_t> demap_symbols(const std::vector<cplx>& symbols, Modulation m);
cplx slice_symbol(cplx symbol, Modulation m);
double slice_level(double value, const std::vector<double>& levels);

struct Band {
    double carrier_hz = 0.0;  // 0 = baseband
    Modulation modulation = Modulation::NRZ;
    double symbol_rate_hz = 0.0;
    double rolloff = 0.25;
    double power_scale = 1.0;

    double half_bandwidth_hz() const {
        return symbol_rate_hz * (1.0 + rolloff) / 2.0;
    }
    double occupied_low_hz() const {
        return carrier_hz == 0.0 ? 0.0 : carrier_hz - half_bandwidth_hz();
    }
    double occupied_high_hz() const { return carrier_hz + half_bandwidth_hz(); }
    double bit_rate_bps() const {
        return bits_per_symbol(modulation) * symbol_rate_hz;
    }
    void validate() const;
};

struct BandPlan {
    std::vector<Band> bands;

    double aggregate_bps() const;
    // Checks per-band invariants and pairwise disjoint occupied intervals.
    void validate() const;
};

inline constexpr int kDefaultRrcSpan = 16;

// map -> shape (RRC) -> mix -> power_scale.
SampledWaveform modulate_band(const std::vector<uint8_t>& bits, const Band& band,
                              double sample_rate_hz,
                              int span_symbols = kDefaultRrcSpan);

// Sample-wise sum of per-band waveforms, shorter ones zero-padded.
SampledWaveform compose_tx(const std::vector<std::vector<uint8_t>>& streams,
                           const BandPlan& plan, double sample_rate_hz,
                           int span_symbols = kDefaultRrcSpan);

// Coherent down-mix followed by the matched RRC filter; full-length
// filter output before symbol sampling.
std::vector<cplx> matched_filter_output(const SampledWaveform& wave,
                                        const Band& band, double phase_rad,
                                        int span_symbols = kDefaultRrcSpan);

// Coherent down-mix, matched RRC filter, symbol-instant sampling.
// Nominal timing (TX + RX filter group delay) is known from the forwarded
// clock; timing_offset_samples adds channel bulk delay or a deliberate
// static error. Returns soft symbols divided by power_scale.
std::vector<cplx> demodulate_band(const SampledWaveform& wave, const Band& band,
                                  double phase_rad, int timing_offset_samples,
                                  int span_symbols = kDefaultRrcSpan);

// Integer samples-per-symbol for a band at a given simulation rate;
// throws if fs is not an integer multiple of the symbol rate.
int samples_per_symbol(const Band& band, double sample_rate_hz);

// One simulation rate keeping every band alias-free: 8x the highest
// occupied band edge, rounded up to a common multiple of the symbol rates.
double auto_sample_rate(const BandPlan& plan);

}  // namespace rfi
