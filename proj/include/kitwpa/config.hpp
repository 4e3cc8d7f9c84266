#pragma once

// Strict INI-style run configuration.
//
//   # comment
//   [film]
//   sheet_inductance_ph = 35
//   [noise.position1]
//   stage_temperatures_k = 4.45, 0.95
//
// Unknown sections and keys, duplicates and malformed lines are rejected with
// the offending key path. Lists are comma separated.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kitwpa/kinetics.hpp"
#include "kitwpa/line.hpp"
#include "kitwpa/gain.hpp"
#include "kitwpa/noise.hpp"
#include "kitwpa/tdr.hpp"

namespace kitwpa {

struct FrequencyGrid {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
    double step_hz = 0.0;

    std::vector<double> values() const { return make_frequency_grid(lo_hz, hi_hz, step_hz); }
};

// Dispersion grid used when a config does not give one.
inline constexpr FrequencyGrid kDefaultDispersionGrid{0.1e9, 16e9, 2e6};

// "lo:hi:step" in Hz. Throws Config.
FrequencyGrid parse_grid(const std::string& text, const std::string& key_path = "--grid");

class Config {
public:
    using Section = std::map<std::string, std::string>;

    static Config parse(const std::string& text, const std::string& source_name = "<config>");
    static Config load(const std::filesystem::path& path);

    bool has_section(const std::string& section) const;
    void require_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string text(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key, double fallback) const;
    int integer(const std::string& section, const std::string& key) const;
    int integer_or(const std::string& section, const std::string& key, int fallback) const;
    bool boolean_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> list(const std::string& section, const std::string& key) const;
    std::vector<double> list_or(const std::string& section, const std::string& key,
                                std::vector<double> fallback) const;
    FrequencyGrid grid(const std::string& section, const std::string& key) const;
    FrequencyGrid grid_or(const std::string& section, const std::string& key,
                          const FrequencyGrid& fallback) const;

    // Overrides (command-line flags). The key must be in the schema.
    void set(const std::string& section, const std::string& key, const std::string& value);

    const std::map<std::string, Section>& sections() const { return sections_; }

private:
    std::map<std::string, Section> sections_;
};

FilmProperties film_from_config(const Config& config);
ThicknessTable thickness_table_from_config(const Config& config);
SupercellSpec supercell_from_config(const Config& config);
LineOptions line_options_from_config(const Config& config);
// Pump amplitude from current_ma, or from power_dbm into z0_ohm (default 50).
PumpConfig pump_from_config(const Config& config);
CMEOptions cme_options_from_config(const Config& config);
NoiseChain noise_chain_from_config(const Config& config, int position);
ImpedanceProfile tdr_profile_from_config(const Config& config);
ExtractionOptions extraction_options_from_config(const Config& config);

inline constexpr int kSwitchPositions = 3;

}  // namespace kitwpa
