#include "rfi/presets.hpp"

#include <stdexcept>

namespace rfi {

namespace {

// FR-4 trace loss scaled so a 5 cm run loses ~8 dB skin + ~4 dB dielectric
// at 10 GHz; propagation ~6.9 ns/m.
ChannelModel fr4_trace(double length_m) {
    return ChannelModel::lossy_line(1.84e-4, 9.2e-13, length_m, 6.9e-9);
}

}  // namespace

ChannelModel channel_preset(const std::string& name) {
    if (name == "identity") return ChannelModel::identity();
    if (name == "onchip_trace") return ChannelModel::lumped_c(15e9);
    if (name == "onboard_trace") return fr4_trace(0.05);
    if (name == "mdb")
        return ChannelModel::notched(fr4_trace(0.05),
                                     {{2.5e9, 25.0, 8.0}, {5.0e9, 30.0, 10.0}});
    if (name == "lowcost_cable")
        return ChannelModel::notched(fr4_trace(0.10),
                                     {{3.0e9, 40.0, 12.0}, {6.5e9, 30.0, 10.0}});
    // severe one-pole band limit plus a resonant suck-out: the smeared
    // exponential settles through ~25 UI at 10 Gb/s (5% threshold)
    if (name == "longtail")
        return ChannelModel::notched(ChannelModel::lumped_c(2e8),
                                     {{3.0e9, 40.0, 20.0}});
    // q = 1 keeps the suck-out wide enough that an unequalized full-rate
    // baseband stream crossing it is unrecoverable (>10% error rate)
    if (name == "notch40")
        return ChannelModel::notched(fr4_trace(0.05), {{2.0e9, 40.0, 1.0}});
    throw std::invalid_argument("unknown channel preset: " + name);
}

const std::vector<std::string>& channel_preset_names() {
    static const std::vector<std::string> names = {
        "identity",      "onchip_trace", "onboard_trace", "mdb",
        "lowcost_cable", "longtail",     "notch40"};
    return names;
}

BandPlan tri_band_plan() {
    BandPlan plan;
    plan.bands.push_back({0.0, Modulation::PAM8, 1e9, 0.25, 1.0});
    plan.bands.push_back({3e9, Modulation::QAM64, 1e9, 0.25, 1.0});
    plan.bands.push_back({6e9, Modulation::QAM64, 1e9, 0.25, 1.0});
    return plan;
}

}  // namespace rfi
