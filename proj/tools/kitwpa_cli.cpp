// kitwpa: command-line front end over the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "kitwpa/kitwpa.h"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::string grid;
    long long seed = 0;
    std::string scan;
    std::string trace;
    std::string profile;
};

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinetic-inductance traveling-wave amplifier design and characterization"};
    app.set_version_flag("--version", std::string(kitwpa_version()));
    app.require_subcommand(1);

    Args args;
    const char* names[][2] = {
        {"design", "impedance report and finger-length solver"},
        {"dispersion", "Floquet dispersion and stop bands"},
        {"gain", "three-wave-mixing gain profile"},
        {"noise", "y-factor fit of a noise scan (closure mode without --scan)"},
        {"tdr", "TDR trace synthesis or impedance extraction"},
    };
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n[0], n[1]);
        sub->add_option("--config", args.config, "run configuration file")->required();
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--grid", args.grid, "frequency grid f_lo:f_hi:step in Hz");
        sub->add_option("--seed", args.seed, "random seed for closure mode");
        if (std::string(n[0]) == "noise") {
            sub->add_option("--scan", args.scan, "measured scan CSV");
        }
        if (std::string(n[0]) == "tdr") {
            sub->add_option("--trace", args.trace, "TDR trace CSV to invert");
            sub->add_option("--profile", args.profile, "impedance profile CSV to synthesize");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const bool has_seed = app.get_subcommands().front()->get_option("--seed")->count() > 0;
    if (has_seed && args.seed < 0) {
        std::fprintf(stderr, "error: --seed must be non-negative\n");
        return 2;
    }

    kitwpa_run_options opts{};
    opts.command = command.c_str();
    opts.config_path = args.config.c_str();
    opts.out_dir = or_null(args.out);
    opts.grid = or_null(args.grid);
    opts.has_seed = has_seed ? 1 : 0;
    opts.seed = static_cast<uint64_t>(args.seed);
    opts.scan_csv = or_null(args.scan);
    opts.trace_csv = or_null(args.trace);
    opts.profile_csv = or_null(args.profile);

    int exit_code = 1;
    const kitwpa_status st = kitwpa_run(&opts, &exit_code);
    if (st != KITWPA_OK) {
        std::fprintf(stderr, "error: %s\n", kitwpa_last_error());
        return 1;
    }
    std::fputs(kitwpa_last_report(), stdout);
    const std::string warnings = kitwpa_last_warnings();
    if (!warnings.empty()) {
        std::size_t pos = 0, next;
        while ((next = warnings.find('\n', pos)) != std::string::npos) {
            std::fprintf(stderr, "warning: %s\n", warnings.substr(pos, next - pos).c_str());
            pos = next + 1;
        }
    }
    if (exit_code != 0) std::fprintf(stderr, "error: %s\n", kitwpa_last_error());
    return exit_code;
}
