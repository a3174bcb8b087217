#pragma once

#include <string>

#include "rfi/channel.hpp"

namespace rfi {

// Channel CSV: UTF-8, '#' comment lines, header "freq_hz,mag_db,phase_deg",
// rows of three decimal numbers, frequencies strictly ascending from 0.
FrequencyResponse load_channel_csv(const std::string& path);
void save_channel_csv(const std::string& path, const FrequencyResponse& response);

}  // namespace rfi
