#include "kitwpa/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "kitwpa/errors.hpp"

namespace kitwpa {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::set<std::string> chain_keys{"source_temperature_k", "stage_temperatures_k",
                                                  "stage_attenuations_db", "stage_extra_loss_db"};
    static const std::map<std::string, std::set<std::string>> s{
        {"film", {"sheet_inductance_ph", "istar_ma", "ic_ma", "thickness_nm", "linewidth_um"}},
        {"film.thickness_table", {"thickness_nm", "sheet_inductance_ph"}},
        {"geometry",
         {"line_width_um", "finger_spacing_um", "dielectric_thickness_nm", "permittivity",
          "fingers_per_cell", "fringing_factor", "stub_model", "unloaded_finger_length_um",
          "loaded_finger_length_um", "n_unloaded", "n_loaded", "n_supercells"}},
        {"pump", {"frequency_hz", "current_ma", "power_dbm", "z0_ohm", "dc_bias_ma",
                  "signal_current_ma"}},
        {"sweep", {"dispersion_grid", "gain_grid", "steps_per_supercell", "undepleted"}},
        {"design", {"target_z0_ohm"}},
        {"noise", {"grid", "pump_frequency_hz", "chain_gain_db", "added_noise_quanta",
                   "output_noise_rel"}},
        {"noise.position1", chain_keys},
        {"noise.position2", chain_keys},
        {"noise.position3", chain_keys},
        {"tdr", {"reference_ohm", "dt_s", "t_max_s", "threshold", "sustain_samples",
                 "profile_z0_ohm", "profile_delay_s"}},
        {"output", {"directory", "touchstone"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string path_of(const std::string& section, const std::string& key) {
    return section + "." + key;
}

double to_number(const std::string& text, const std::string& key_path) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        fail(ErrorKind::Config, key_path + ": expected a number, got '" + text + "'");
    return v;
}

void check_known(const std::string& section, const std::string& key) {
    const auto it = schema().find(section);
    if (it == schema().end()) fail(ErrorKind::Config, "unknown section [" + section + "]");
    if (!it->second.count(key)) fail(ErrorKind::Config, "unknown key " + path_of(section, key));
}

}  // namespace

FrequencyGrid parse_grid(const std::string& text, const std::string& key_path) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(text);
    while (std::getline(is, part, ':')) parts.push_back(part);
    if (parts.size() != 3)
        fail(ErrorKind::Config, key_path + ": expected f_lo:f_hi:step, got '" + text + "'");
    FrequencyGrid g{to_number(parts[0], key_path), to_number(parts[1], key_path),
                    to_number(parts[2], key_path)};
    if (!(g.lo_hz > 0.0) || !(g.hi_hz >= g.lo_hz) || !(g.step_hz > 0.0))
        fail(ErrorKind::Config, key_path + ": need 0 < f_lo <= f_hi and step > 0");
    return g;
}

Config Config::parse(const std::string& text, const std::string& source_name) {
    Config config;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int line_no = 0;
    auto where = [&] { return source_name + ":" + std::to_string(line_no) + ": "; };
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorKind::Config, where() + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section))
                fail(ErrorKind::Config, where() + "unknown section [" + section + "]");
            if (config.sections_.count(section))
                fail(ErrorKind::Config, where() + "duplicate section [" + section + "]");
            config.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Config, where() + "expected 'key = value'");
        if (section.empty()) fail(ErrorKind::Config, where() + "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            check_known(section, key);
        } catch (const Error& e) {
            fail(ErrorKind::Config, where() + e.what());
        }
        if (value.empty()) fail(ErrorKind::Config, where() + path_of(section, key) + " has no value");
        if (!config.sections_[section].emplace(key, value).second)
            fail(ErrorKind::Config, where() + "duplicate key " + path_of(section, key));
    }
    return config;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Io, "cannot open config " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return parse(os.str(), path.string());
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

void Config::require_section(const std::string& section) const {
    if (!has_section(section)) fail(ErrorKind::Config, "missing required section [" + section + "]");
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string Config::text(const std::string& section, const std::string& key) const {
    require_section(section);
    const auto& s = sections_.at(section);
    const auto it = s.find(key);
    if (it == s.end()) fail(ErrorKind::Config, "missing required key " + path_of(section, key));
    return it->second;
}

double Config::number(const std::string& section, const std::string& key) const {
    return to_number(text(section, key), path_of(section, key));
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

int Config::integer(const std::string& section, const std::string& key) const {
    const double v = number(section, key);
    if (!(std::abs(v) <= std::numeric_limits<int>::max()) || v != std::trunc(v))
        fail(ErrorKind::Config, path_of(section, key) + ": expected an integer");
    return static_cast<int>(v);
}

int Config::integer_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

bool Config::boolean_or(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = text(section, key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(ErrorKind::Config, path_of(section, key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> Config::list(const std::string& section, const std::string& key) const {
    const std::string raw = text(section, key);
    std::vector<double> out;
    std::string item;
    std::istringstream is(raw);
    while (std::getline(is, item, ',')) out.push_back(to_number(item, path_of(section, key)));
    return out;
}

std::vector<double> Config::list_or(const std::string& section, const std::string& key,
                                    std::vector<double> fallback) const {
    return has(section, key) ? list(section, key) : fallback;
}

FrequencyGrid Config::grid(const std::string& section, const std::string& key) const {
    return parse_grid(text(section, key), path_of(section, key));
}

FrequencyGrid Config::grid_or(const std::string& section, const std::string& key,
                              const FrequencyGrid& fallback) const {
    return has(section, key) ? grid(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    check_known(section, key);
    sections_[section][key] = value;
}

FilmProperties film_from_config(const Config& c) {
    FilmProperties film{c.number("film", "sheet_inductance_ph"), c.number("film", "istar_ma"),
                        c.number("film", "ic_ma"), c.number("film", "thickness_nm"),
                        c.number("film", "linewidth_um")};
    film.validate();
    return film;
}

ThicknessTable thickness_table_from_config(const Config& c) {
    if (!c.has_section("film.thickness_table")) return ThicknessTable::nbtin();
    const auto t = c.list("film.thickness_table", "thickness_nm");
    const auto l = c.list("film.thickness_table", "sheet_inductance_ph");
    if (t.size() != l.size())
        fail(ErrorKind::Config, "film.thickness_table: thickness and inductance lists differ in length");
    std::vector<ThicknessTable::Anchor> anchors;
    for (std::size_t k = 0; k < t.size(); ++k) anchors.push_back({t[k], l[k]});
    return ThicknessTable(std::move(anchors));
}

SupercellSpec supercell_from_config(const Config& c) {
    c.require_section("geometry");
    CellGeometry base;
    base.line_width_um = c.number_or("geometry", "line_width_um", base.line_width_um);
    base.finger_spacing_um = c.number_or("geometry", "finger_spacing_um", base.finger_spacing_um);
    base.dielectric_thickness_nm =
        c.number_or("geometry", "dielectric_thickness_nm", base.dielectric_thickness_nm);
    base.permittivity = c.number_or("geometry", "permittivity", base.permittivity);
    base.fingers_per_cell = c.integer_or("geometry", "fingers_per_cell", base.fingers_per_cell);

    SupercellSpec spec;
    spec.unloaded = base;
    spec.loaded = base;
    spec.unloaded.finger_length_um = c.number("geometry", "unloaded_finger_length_um");
    spec.loaded.finger_length_um = c.number("geometry", "loaded_finger_length_um");
    spec.n_unloaded = c.integer_or("geometry", "n_unloaded", spec.n_unloaded);
    spec.n_loaded = c.integer_or("geometry", "n_loaded", spec.n_loaded);
    spec.n_supercells = c.integer_or("geometry", "n_supercells", spec.n_supercells);
    spec.validate();
    return spec;
}

LineOptions line_options_from_config(const Config& c) {
    LineOptions o;
    o.fringing_factor = c.number_or("geometry", "fringing_factor", 1.0);
    if (c.has("geometry", "stub_model")) {
        const std::string m = c.text("geometry", "stub_model");
        if (m == "distributed") o.stub_model = StubModel::Distributed;
        else if (m == "lumped") o.stub_model = StubModel::Lumped;
        else fail(ErrorKind::Config, "geometry.stub_model: expected distributed or lumped, got '" + m + "'");
    }
    if (!(o.fringing_factor > 0.0))
        fail(ErrorKind::Config, "geometry.fringing_factor must be positive");
    return o;
}

PumpConfig pump_from_config(const Config& c) {
    c.require_section("pump");
    PumpConfig p;
    p.frequency_hz = c.number("pump", "frequency_hz");
    p.idc_ma = c.number_or("pump", "dc_bias_ma", 0.0);
    const bool by_current = c.has("pump", "current_ma");
    const bool by_power = c.has("pump", "power_dbm");
    if (by_current == by_power)
        fail(ErrorKind::Config, "pump: give exactly one of pump.current_ma and pump.power_dbm");
    p.current_ma = by_current ? c.number("pump", "current_ma")
                              : pump_current_from_dbm(c.number("pump", "power_dbm"),
                                                      c.number_or("pump", "z0_ohm", 50.0));
    if (!(p.frequency_hz > 0.0) || p.current_ma < 0.0)
        fail(ErrorKind::Config, "pump: need frequency_hz > 0 and a non-negative amplitude");
    return p;
}

CMEOptions cme_options_from_config(const Config& c) {
    CMEOptions o;
    o.steps_per_supercell = c.integer_or("sweep", "steps_per_supercell", o.steps_per_supercell);
    o.undepleted = c.boolean_or("sweep", "undepleted", o.undepleted);
    o.signal_current_ma = c.number_or("pump", "signal_current_ma", o.signal_current_ma);
    if (o.steps_per_supercell < 1)
        fail(ErrorKind::Config, "sweep.steps_per_supercell must be at least 1");
    if (!(o.signal_current_ma > 0.0))
        fail(ErrorKind::Config, "pump.signal_current_ma must be positive");
    return o;
}

NoiseChain noise_chain_from_config(const Config& c, int position) {
    const std::string s = "noise.position" + std::to_string(position);
    c.require_section(s);
    NoiseChain chain;
    chain.source_temperature_k = c.number_or(s, "source_temperature_k", chain.source_temperature_k);
    const auto temps = c.list(s, "stage_temperatures_k");
    const auto atts = c.list(s, "stage_attenuations_db");
    const auto extra = c.list_or(s, "stage_extra_loss_db", std::vector<double>(temps.size(), 0.0));
    if (atts.size() != temps.size() || extra.size() != temps.size())
        fail(ErrorKind::Config, s + ": stage lists must have equal lengths");
    for (std::size_t k = 0; k < temps.size(); ++k)
        chain.stages.push_back({temps[k], atts[k], extra[k], s + ".stage" + std::to_string(k + 1)});
    chain.validate();
    return chain;
}

ImpedanceProfile tdr_profile_from_config(const Config& c) {
    ImpedanceProfile p;
    p.reference_ohm = c.number_or("tdr", "reference_ohm", p.reference_ohm);
    const auto z = c.list("tdr", "profile_z0_ohm");
    const auto d = c.list("tdr", "profile_delay_s");
    if (z.size() != d.size())
        fail(ErrorKind::Config, "tdr: profile_z0_ohm and profile_delay_s differ in length");
    for (std::size_t k = 0; k < z.size(); ++k) p.segments.push_back({z[k], d[k]});
    p.validate();
    return p;
}

ExtractionOptions extraction_options_from_config(const Config& c) {
    ExtractionOptions o;
    o.threshold = c.number_or("tdr", "threshold", o.threshold);
    o.sustain_samples = c.integer_or("tdr", "sustain_samples", o.sustain_samples);
    return o;
}

}  // namespace kitwpa
