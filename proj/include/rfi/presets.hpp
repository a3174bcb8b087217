#pragma once

#include <string>
#include <vector>

#include "rfi/channel.hpp"
#include "rfi/modem.hpp"

namespace rfi {

// Named channel fixtures covering the catalog's channel conditions:
//   identity        ideal wire
//   onchip_trace    short on-chip line, mild one-pole bandwidth limit
//   onboard_trace   FR-4 PCB trace, skin + dielectric loss
//   mdb             multi-drop bus: lossy line with stub-resonance notches
//   lowcost_cable   cheap cable/connector path, deep narrow notches
//   longtail        cable fixture with a >20 UI ISI tail at 10 Gb/s
//   notch40         lossy line with a single 40 dB in-band notch
ChannelModel channel_preset(const std::string& name);
const std::vector<std::string>& channel_preset_names();

// Three-band composition: PAM-8 baseband + 64-QAM at 3 GHz + 64-QAM at
// 6 GHz, 1 GBaud each (15 Gb/s aggregate).
BandPlan tri_band_plan();

}  // namespace rfi
