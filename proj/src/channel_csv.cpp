#include "rfi/channel_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rfi {

namespace {

[[noreturn]] void fail(const std::string& path, size_t line,
                       const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

FrequencyResponse load_channel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel CSV: " + path);

    FrequencyResponse resp;
    std::string line;
    size_t lineno = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        const auto pos = trimmed.find_first_not_of(" \t");
        if (pos == std::string::npos) continue;
        if (trimmed[pos] == '#') continue;

        if (!header_seen) {
            std::string h = trimmed.substr(pos);
            h.erase(h.find_last_not_of(" \t") + 1);
            if (h != "freq_hz,mag_db,phase_deg")
                fail(path, lineno,
                     "missing or malformed header (expected freq_hz,mag_db,phase_deg)");
            header_seen = true;
            continue;
        }

        double f, mag_db, phase_deg;
        char extra;
        std::istringstream row(trimmed);
        char c1, c2;
        if (!(row >> f >> c1 >> mag_db >> c2 >> phase_deg) || c1 != ',' ||
            c2 != ',' || (row >> extra))
            fail(path, lineno, "malformed row");

        if (!resp.freqs_hz.empty() && f <= resp.freqs_hz.back())
            fail(path, lineno, "frequency not strictly ascending");
        if (resp.freqs_hz.empty() && f != 0.0)
            fail(path, lineno, "first frequency must be 0");

        resp.freqs_hz.push_back(f);
        resp.gains.push_back(std::polar(std::pow(10.0, mag_db / 20.0),
                                        phase_deg * M_PI / 180.0));
    }
    if (!header_seen)
        throw std::runtime_error(path + ": missing header");
    if (resp.freqs_hz.size() < 2)
        throw std::runtime_error(path + ": needs at least two rows");
    // DC phase must be a multiple of 180 deg for a real response
    resp.gains.front() = cplx(resp.gains.front().real(), 0.0);
    resp.validate();
    return resp;
}

void save_channel_csv(const std::string& path,
                      const FrequencyResponse& response) {
    response.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write channel CSV: " + path);
    out << "freq_hz,mag_db,phase_deg\n";
    char buf[128];
    for (size_t i = 0; i < response.freqs_hz.size(); ++i) {
        const double mag = std::max(std::abs(response.gains[i]), 1e-300);
        const double mag_db = 20.0 * std::log10(mag);
        const double phase_deg = std::arg(response.gains[i]) * 180.0 / M_PI;
        std::snprintf(buf, sizeof(buf), "%.9e,%.9e,%.9e\n", response.freqs_hz[i],
                      mag_db, phase_deg);
        out << buf;
    }
}

}  // namespace rfi
