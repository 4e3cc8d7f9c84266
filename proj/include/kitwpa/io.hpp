#pragma once

// File formats: fixed-precision CSV tables, Touchstone v1 two-port export and
// SHA-256 digests for run manifests.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kitwpa/gain.hpp"
#include "kitwpa/line.hpp"
#include "kitwpa/noise.hpp"
#include "kitwpa/tdr.hpp"

namespace kitwpa::io {

// "%.9g"; NaN is written as "nan" and infinities as "inf" / "-inf".
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Reads a numeric CSV and checks the header matches `expected_header` exactly.
CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header);

// frequency_hz,bloch_phase_rad,propagating
CsvTable dispersion_table(std::span<const DispersionPoint> points);
// f_low_hz,f_high_hz
CsvTable stopband_table(std::span<const Stopband> bands);
// frequency_hz,gain_db
CsvTable gain_table(const GainProfile& profile);
// time_s,rho
CsvTable trace_table(const TDRTrace& trace);
TDRTrace trace_from_table(const CsvTable& table);
// segment_index,z0_ohm,delay_s
CsvTable profile_table(const ImpedanceProfile& profile);
ImpedanceProfile profile_from_table(const CsvTable& table, double reference_ohm);

// Pump-on S21 from the gain profile; pump-off is taken as lossless unity, the
// ports as matched and the reverse path as unity. Gaps are skipped.
void write_touchstone(const std::filesystem::path& path, const GainProfile& profile);

std::string sha256_file(const std::filesystem::path& path);

inline const std::vector<std::string> kNoiseScanHeader{"frequency_hz", "p_out_pos1", "p_out_pos2",
                                                       "p_out_pos3"};
inline const std::vector<std::string> kNoiseFitHeader{"frequency_hz", "gc_db", "nsigma_quanta",
                                                      "nsigma_kelvin"};
inline const std::vector<std::string> kTraceHeader{"time_s", "rho"};
inline const std::vector<std::string> kProfileHeader{"segment_index", "z0_ohm", "delay_s"};

}  // namespace kitwpa::io
