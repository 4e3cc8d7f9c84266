#include "kitwpa/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kitwpa/constants.hpp"
#include "kitwpa/errors.hpp"

namespace kitwpa::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    return os;
}

constexpr double kMatchedDb = -200.0;

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    auto os = open_for_write(path);
    os << join(table.header) << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
    if (!os) fail(ErrorKind::Io, "failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Io, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) fail(ErrorKind::Io, path.string() + " is empty");
    table.header = split(trim(line), ',');
    if (table.header != expected_header) {
        fail(ErrorKind::Io, path.string() + ": expected header '" + join(expected_header) +
                                "', found '" + join(table.header) + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != expected_header.size()) {
            std::ostringstream os;
            os << path.string() << ":" << line_no << ": expected " << expected_header.size()
               << " fields, found " << fields.size();
            fail(ErrorKind::Io, os.str());
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size()) {
                std::ostringstream os;
                os << path.string() << ":" << line_no << ": not a number: '" << f << "'";
                fail(ErrorKind::Io, os.str());
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable dispersion_table(std::span<const DispersionPoint> points) {
    CsvTable t{{"frequency_hz", "bloch_phase_rad", "propagating"}, {}};
    for (const auto& p : points)
        t.rows.push_back({p.frequency_hz, p.bloch_phase_rad, p.propagating ? 1.0 : 0.0});
    return t;
}

CsvTable stopband_table(std::span<const Stopband> bands) {
    CsvTable t{{"f_low_hz", "f_high_hz"}, {}};
    for (const auto& b : bands) t.rows.push_back({b.f_low_hz, b.f_high_hz});
    return t;
}

CsvTable gain_table(const GainProfile& profile) {
    CsvTable t{{"frequency_hz", "gain_db"}, {}};
    for (std::size_t k = 0; k < profile.frequency_hz.size(); ++k)
        t.rows.push_back({profile.frequency_hz[k], profile.gain_db[k]});
    return t;
}

CsvTable trace_table(const TDRTrace& trace) {
    CsvTable t{kTraceHeader, {}};
    for (std::size_t k = 0; k < trace.rho.size(); ++k) t.rows.push_back({trace.time_s[k], trace.rho[k]});
    return t;
}

TDRTrace trace_from_table(const CsvTable& table) {
    TDRTrace trace;
    for (const auto& r : table.rows) {
        trace.time_s.push_back(r[0]);
        trace.rho.push_back(r[1]);
    }
    return trace;
}

CsvTable profile_table(const ImpedanceProfile& profile) {
    CsvTable t{kProfileHeader, {}};
    for (std::size_t k = 0; k < profile.segments.size(); ++k)
        t.rows.push_back(
            {static_cast<double>(k), profile.segments[k].z0_ohm, profile.segments[k].delay_s});
    return t;
}

ImpedanceProfile profile_from_table(const CsvTable& table, double reference_ohm) {
    ImpedanceProfile profile;
    profile.reference_ohm = reference_ohm;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& r = table.rows[k];
        if (r[0] != static_cast<double>(k))
            fail(ErrorKind::Io, "profile segment_index column must count 0, 1, 2, ...");
        profile.segments.push_back({r[1], r[2]});
    }
    return profile;
}

void write_touchstone(const std::filesystem::path& path, const GainProfile& profile) {
    auto os = open_for_write(path);
    os << "! simulated pump-on transmission; pump-off reference is lossless unity\n";
    os << "! matched ports are written as " << format_number(kMatchedDb) << " dB\n";
    os << "# HZ S DB R 50\n";
    const std::string matched = format_number(kMatchedDb) + " 0";
    for (std::size_t k = 0; k < profile.frequency_hz.size(); ++k) {
        if (std::isnan(profile.gain_db[k])) continue;
        const double phase_deg = std::arg(profile.transmission[k]) * 180.0 / constants::pi;
        os << format_number(profile.frequency_hz[k]) << ' ' << matched << ' '
           << format_number(profile.gain_db[k]) << ' ' << format_number(phase_deg) << " 0 0 "
           << matched << '\n';
    }
    if (!os) fail(ErrorKind::Io, "failed writing " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::Io, "cannot open " + path.string() + " for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        fail(ErrorKind::Io, "sha256 initialisation failed");
    }
    char buf[1 << 15];
    while (is) {
        is.read(buf, sizeof buf);
        if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

}  // namespace kitwpa::io
