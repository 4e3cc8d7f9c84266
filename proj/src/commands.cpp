#include "kitwpa/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kitwpa/config.hpp"
#include "kitwpa/io.hpp"

namespace kitwpa {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParameter:
        case ErrorKind::Config:
            return kExitConfig;
        case ErrorKind::OutOfRange:
        case ErrorKind::Domain:
        case ErrorKind::StepSize:
        case ErrorKind::Data:
            return kExitDomain;
        case ErrorKind::Io:
            return kExitIo;
    }
    return kExitInternal;
}

namespace {

std::string fmt(double v) { return io::format_number(v); }

std::string timestamp() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (*end != '\0') fail(ErrorKind::Config, "SOURCE_DATE_EPOCH is not an integer");
        t = static_cast<std::time_t>(v);
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Run {
public:
    Run(const CommandOptions& options, CommandResult& result)
        : options_(options), result_(result) {}

    void execute() {
        if (std::find(kCommands.begin(), kCommands.end(), options_.command) == kCommands.end())
            fail(ErrorKind::Config, "unknown command '" + options_.command + "'");
        config_ = Config::load(options_.config_path);
        inputs_.push_back(options_.config_path);
        apply_overrides();
        check_sections();
        out_ = options_.out_dir ? *options_.out_dir
                                : fs::path(config_.has("output", "directory")
                                               ? config_.text("output", "directory")
                                               : ".");
        std::error_code ec;
        fs::create_directories(out_, ec);
        if (ec) fail(ErrorKind::Io, "cannot create output directory " + out_.string() + ": " + ec.message());

        const auto& c = options_.command;
        if (c == "design") design();
        else if (c == "dispersion") dispersion();
        else if (c == "gain") gain();
        else if (c == "noise") noise();
        else tdr();
        write_manifest();
    }

private:
    void apply_overrides() {
        if (!options_.grid) return;
        parse_grid(*options_.grid);
        const auto& c = options_.command;
        if (c == "dispersion") config_.set("sweep", "dispersion_grid", *options_.grid);
        else if (c == "gain") config_.set("sweep", "gain_grid", *options_.grid);
        else if (c == "noise") config_.set("noise", "grid", *options_.grid);
        else warn("--grid has no effect on '" + c + "'");
    }

    // Everything the subcommand will read is checked before any computation.
    void check_sections() {
        const auto& c = options_.command;
        if (c == "design" || c == "dispersion" || c == "gain") {
            film_from_config(config_);
            thickness_table_from_config(config_);
            supercell_from_config(config_);
            line_options_from_config(config_);
        }
        if (c == "dispersion") config_.grid_or("sweep", "dispersion_grid", kDefaultDispersionGrid);
        if (c == "gain") {
            pump_from_config(config_);
            cme_options_from_config(config_);
            config_.grid_or("sweep", "dispersion_grid", kDefaultDispersionGrid);
            config_.grid("sweep", "gain_grid");
        }
        if (c == "design") config_.list_or("design", "target_z0_ohm", {});
        if (c == "noise") {
            config_.require_section("noise");
            for (int p = 1; p <= kSwitchPositions; ++p) noise_chain_from_config(config_, p);
            noise_pump_hz();
            if (!options_.scan_csv) {
                config_.grid("noise", "grid");
                config_.number("noise", "chain_gain_db");
                config_.number("noise", "added_noise_quanta");
                if (config_.number_or("noise", "output_noise_rel", 0.0) < 0.0)
                    fail(ErrorKind::Config, "noise.output_noise_rel must be non-negative");
            }
        }
        if (c == "tdr") {
            config_.require_section("tdr");
            if (options_.trace_csv && options_.profile_csv)
                fail(ErrorKind::Config, "tdr takes either --trace or --profile, not both");
            extraction_options_from_config(config_);
            if (!options_.trace_csv) {
                config_.number("tdr", "dt_s");
                config_.number("tdr", "t_max_s");
                if (!options_.profile_csv) tdr_profile_from_config(config_);
            }
        }
        if (c != "noise" && options_.scan_csv) fail(ErrorKind::Config, "--scan applies to 'noise' only");
        if (c != "tdr" && (options_.trace_csv || options_.profile_csv))
            fail(ErrorKind::Config, "--trace and --profile apply to 'tdr' only");
        if (c != "noise" && options_.seed) warn("--seed has no effect on '" + c + "'");
    }

    BiasPoint dc_bias() const { return {config_.number_or("pump", "dc_bias_ma", 0.0), 0.0}; }

    double noise_pump_hz() const {
        if (config_.has("noise", "pump_frequency_hz")) return config_.number("noise", "pump_frequency_hz");
        return config_.number("pump", "frequency_hz");
    }

    void design() {
        const FilmProperties film = film_from_config(config_);
        const SupercellSpec spec = supercell_from_config(config_);
        const LineOptions opt = line_options_from_config(config_);
        const BiasPoint bias = dc_bias();
        if (auto w = bias_warning(film, bias)) warn(*w);

        CellGeometry bare = spec.unloaded;
        bare.finger_length_um = 0.0;
        io::CsvTable cells{{"finger_length_um", "inductance_uh_per_m", "capacitance_nf_per_m", "z0_ohm"}, {}};
        const std::pair<const char*, const CellGeometry*> kinds[] = {
            {"bare", &bare}, {"unloaded", &spec.unloaded}, {"loaded", &spec.loaded}};
        for (const auto& [name, cell] : kinds) {
            const LineSection s = cell_section(*cell, film, bias, opt.fringing_factor);
            const double z0 = characteristic_impedance(s);
            cells.rows.push_back({cell->finger_length_um, s.inductance_uh_per_m, s.capacitance_nf_per_m, z0});
            report(std::string(name) + " cell: finger " + fmt(cell->finger_length_um) + " um, Z0 " +
                   fmt(z0) + " Ohm");
        }
        write("impedance.csv", cells);

        auto targets = config_.list_or("design", "target_z0_ohm", {50.0, 80.0});
        io::CsvTable solved{{"target_z0_ohm", "finger_length_um", "achieved_z0_ohm"}, {}};
        for (double z : targets) {
            CellGeometry cell = spec.unloaded;
            cell.finger_length_um = solve_finger_length(cell, film, bias, z, opt.fringing_factor);
            const double achieved =
                characteristic_impedance(cell_section(cell, film, bias, opt.fringing_factor));
            solved.rows.push_back({z, cell.finger_length_um, achieved});
            report("target " + fmt(z) + " Ohm: finger length " + fmt(cell.finger_length_um) + " um");
        }
        write("finger_length.csv", solved);
        report("total line length " + fmt(spec.total_length_m()) + " m");
    }

    void dispersion() {
        const SupercellSpec spec = supercell_from_config(config_);
        const auto grid = config_.grid_or("sweep", "dispersion_grid", kDefaultDispersionGrid).values();
        const Dispersion d = Dispersion::compute(spec, film_from_config(config_), dc_bias(), grid,
                                                 line_options_from_config(config_));
        write("dispersion.csv", io::dispersion_table(d.points()));
        write("stopbands.csv", io::stopband_table(d.stopbands()));
        for (const auto& b : d.stopbands())
            report("stop band " + fmt(b.f_low_hz) + " - " + fmt(b.f_high_hz) + " Hz");
        report("total line length " + fmt(spec.total_length_m()) + " m");
    }

    void gain() {
        const SupercellSpec spec = supercell_from_config(config_);
        const FilmProperties film = film_from_config(config_);
        const PumpConfig pump = pump_from_config(config_);
        const auto dgrid = config_.grid_or("sweep", "dispersion_grid", kDefaultDispersionGrid).values();
        const auto ggrid = config_.grid("sweep", "gain_grid").values();
        const Dispersion d = Dispersion::compute(spec, film, {pump.idc_ma, 0.0}, dgrid,
                                                 line_options_from_config(config_));
        const GainProfile profile = gain_profile(d, film, pump, ggrid, spec.total_length_m(),
                                                 cme_options_from_config(config_));
        for (const auto& w : profile.warnings) warn(w);
        write("gain.csv", io::gain_table(profile));
        if (config_.boolean_or("output", "touchstone", false)) {
            io::write_touchstone(out_ / "gain.s2p", profile);
            artifacts_.push_back("gain.s2p");
        }
        report("pump " + fmt(pump.frequency_hz) + " Hz, " + fmt(pump.current_ma) + " mA (" +
               fmt(pump_power_dbm(pump.current_ma, config_.number_or("pump", "z0_ohm", 50.0))) +
               " dBm), dc bias " + fmt(pump.idc_ma) + " mA");
        double peak = -HUGE_VAL, at = 0.0;
        for (std::size_t k = 0; k < profile.gain_db.size(); ++k) {
            if (profile.gain_db[k] > peak) {
                peak = profile.gain_db[k];
                at = profile.frequency_hz[k];
            }
        }
        if (std::isfinite(peak)) report("peak gain " + fmt(peak) + " dB at " + fmt(at) + " Hz");
    }

    void noise() {
        const double fp = noise_pump_hz();
        std::vector<NoiseChain> chains;
        for (int p = 1; p <= kSwitchPositions; ++p) chains.push_back(noise_chain_from_config(config_, p));

        io::CsvTable scan;
        if (options_.scan_csv) {
            scan = io::read_csv(*options_.scan_csv, io::kNoiseScanHeader);
            inputs_.push_back(*options_.scan_csv);
        } else {
            scan = synthesize_scan(chains, fp);
            write("noise_scan.csv", scan);
        }

        io::CsvTable fit_table{io::kNoiseFitHeader, {}};
        int negative = 0;
        for (const auto& row : scan.rows) {
            const double f = row[0];
            const double fi = idler_frequency(f, fp);
            std::vector<SwitchPositionData> pts;
            for (int p = 0; p < kSwitchPositions; ++p)
                pts.push_back({chain_input_noise(chains[p], f), chain_input_noise(chains[p], fi),
                               row[static_cast<std::size_t>(p) + 1]});
            const SystemNoiseFit fit = yfactor_fit(pts);
            if (fit.negative_noise) ++negative;
            const double kelvin = fit.added_noise_quanta > 0.5
                                      ? temperature_from_quanta(fit.added_noise_quanta, f)
                                      : std::nan("");
            fit_table.rows.push_back({f, 10.0 * std::log10(fit.chain_gain), fit.added_noise_quanta, kelvin});
        }
        if (negative > 0) warn(std::to_string(negative) + " frequencies fitted a negative system-added noise");
        write("noise_fit.csv", fit_table);
        double worst = -HUGE_VAL;
        for (const auto& r : fit_table.rows) worst = std::max(worst, r[2]);
        report("fitted " + std::to_string(fit_table.rows.size()) + " frequencies; max N_sigma " +
               fmt(worst) + " quanta");
    }

    io::CsvTable synthesize_scan(const std::vector<NoiseChain>& chains, double fp) {
        const auto grid = config_.grid("noise", "grid").values();
        const double gc = db_to_linear(config_.number("noise", "chain_gain_db"));
        const double ns = config_.number("noise", "added_noise_quanta");
        const double sigma = config_.number_or("noise", "output_noise_rel", 0.0);
        std::mt19937_64 rng(options_.seed.value_or(0));
        std::normal_distribution<double> gauss(0.0, 1.0);
        io::CsvTable scan{io::kNoiseScanHeader, {}};
        for (double f : grid) {
            std::vector<double> row{f};
            for (const auto& chain : chains) {
                const double p = yfactor_output(gc, ns, chain_input_noise(chain, f),
                                                chain_input_noise(chain, idler_frequency(f, fp)));
                row.push_back(p * (1.0 + sigma * gauss(rng)));
            }
            scan.rows.push_back(std::move(row));
        }
        report("closure mode: synthetic scan with G_c " + fmt(gc) + ", N_sigma " + fmt(ns) +
               " quanta, seed " + std::to_string(options_.seed.value_or(0)));
        return scan;
    }

    void tdr() {
        const double zref = config_.number_or("tdr", "reference_ohm", 50.0);
        if (options_.trace_csv) {
            const TDRTrace trace = io::trace_from_table(io::read_csv(*options_.trace_csv, io::kTraceHeader));
            inputs_.push_back(*options_.trace_csv);
            const ImpedanceProfile p = extract_impedance(trace, zref, extraction_options_from_config(config_));
            write("profile.csv", io::profile_table(p));
            for (const auto& s : p.segments)
                report("segment " + fmt(s.z0_ohm) + " Ohm, " + fmt(s.delay_s) + " s");
            return;
        }
        ImpedanceProfile profile;
        if (options_.profile_csv) {
            profile = io::profile_from_table(io::read_csv(*options_.profile_csv, io::kProfileHeader), zref);
            inputs_.push_back(*options_.profile_csv);
        } else {
            profile = tdr_profile_from_config(config_);
        }
        const TDRTrace trace = synthesize_trace(profile, config_.number("tdr", "dt_s"),
                                                config_.number("tdr", "t_max_s"));
        write("trace.csv", io::trace_table(trace));
        report("synthesized " + std::to_string(trace.rho.size()) + " samples");
    }

    void write(const std::string& name, const io::CsvTable& table) {
        io::write_csv(out_ / name, table);
        artifacts_.push_back(name);
    }

    void report(const std::string& line) { result_.report.push_back(line); }
    void warn(const std::string& line) { result_.warnings.push_back(line); }

    void write_manifest() {
        ordered_json m;
        m["tool"] = "kitwpa";
        m["version"] = KITWPA_VERSION_STRING;
        m["command"] = options_.command;
        m["timestamp"] = timestamp();
        m["seed"] = options_.seed ? ordered_json(*options_.seed) : ordered_json(nullptr);
        ordered_json cfg = ordered_json::object();
        for (const auto& [section, keys] : config_.sections())
            for (const auto& [key, value] : keys) cfg[section][key] = value;
        m["config"] = cfg;
        m["inputs"] = ordered_json::array();
        for (const auto& p : inputs_)
            m["inputs"].push_back({{"path", p.string()}, {"sha256", io::sha256_file(p)}});
        m["artifacts"] = ordered_json::array();
        for (const auto& name : artifacts_) {
            const fs::path p = out_ / name;
            m["artifacts"].push_back({{"file", name},
                                      {"bytes", fs::file_size(p)},
                                      {"sha256", io::sha256_file(p)}});
            result_.artifacts.push_back(p);
        }
        m["warnings"] = result_.warnings;

        const fs::path path = out_ / kManifestName;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << m.dump(2) << '\n';
        if (!os) fail(ErrorKind::Io, "failed writing " + path.string());
        result_.artifacts.push_back(path);
    }

    const CommandOptions& options_;
    CommandResult& result_;
    Config config_;
    fs::path out_;
    std::vector<fs::path> inputs_;
    std::vector<std::string> artifacts_;
};

}  // namespace

CommandResult run_command(const CommandOptions& options) {
    CommandResult result;
    try {
        Run(options, result).execute();
    } catch (const Error& e) {
        result.exit_code = exit_code_for(e.kind());
        result.error = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const fs::filesystem_error& e) {
        result.exit_code = kExitIo;
        result.error = std::string("io: ") + e.what();
    } catch (const std::exception& e) {
        result.exit_code = kExitInternal;
        result.error = std::string("internal: ") + e.what();
    }
    if (result.exit_code != kExitOk) result.artifacts.clear();
    return result;
}

}  // namespace kitwpa
