#pragma once

// Subcommands behind the command-line tool. Each run reads one config, writes
// its CSV artifacts plus manifest.json into the output directory and returns a
// process exit code.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kitwpa/errors.hpp"

namespace kitwpa {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitDomain = 3,
    kExitIo = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

struct CommandOptions {
    std::string command;  // design | dispersion | gain | noise | tdr
    std::filesystem::path config_path;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::string> grid;  // "f_lo:f_hi:step", overrides the config grid
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> scan_csv;     // noise: fit a measured scan
    std::optional<std::filesystem::path> trace_csv;    // tdr: extract a profile
    std::optional<std::filesystem::path> profile_csv;  // tdr: synthesize a trace
};

struct CommandResult {
    int exit_code = kExitOk;
    std::vector<std::string> report;  // human-readable lines, in order
    std::vector<std::string> warnings;
    std::string error;
    std::vector<std::filesystem::path> artifacts;
};

// Never throws; failures come back as an exit code and message.
CommandResult run_command(const CommandOptions& options);

inline const std::vector<std::string> kCommands{"design", "dispersion", "gain", "noise", "tdr"};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace kitwpa
