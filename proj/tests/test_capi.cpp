#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "kitwpa/kitwpa.h"

namespace fs = std::filesystem;

namespace {

constexpr double kH = 6.62607015e-34;
constexpr double kKb = 1.380649e-23;

kitwpa_film film() { return {35.0, 2.1, 0.38, 10.0, 1.0}; }

kitwpa_line_spec device() {
    kitwpa_line_spec s;
    kitwpa_line_spec_default(&s);
    s.unloaded.permittivity = s.loaded.permittivity = 8.235;
    s.unloaded.finger_length_um = 18.0;
    s.loaded.finger_length_um = 6.5;
    return s;
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (long k = 0; lo + k * step <= hi * (1 + 1e-12); ++k) g.push_back(lo + k * step);
    return g;
}

bool mentions(const char* text, const char* part) { return std::strstr(text, part) != nullptr; }

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::strlen(kitwpa_version()) > 0);
    CHECK(std::string(kitwpa_status_name(KITWPA_OK)) != std::string(kitwpa_status_name(KITWPA_ERR_DOMAIN)));
    for (int s = KITWPA_OK; s <= KITWPA_ERR_INTERNAL; ++s)
        CHECK(std::strlen(kitwpa_status_name(static_cast<kitwpa_status>(s))) > 0);
}

TEST_CASE("kinetics") {
    const auto f = film();
    double l = 0.0;
    REQUIRE(kitwpa_total_inductance(&f, 0.13, 0.0, &l) == KITWPA_OK);
    CHECK(l == doctest::Approx(35.0 * (1.0 + 0.13 * 0.13 / (2.1 * 2.1))).epsilon(1e-14));
    double lrf = 0.0;
    REQUIRE(kitwpa_total_inductance(&f, 0.13, 0.2, &lrf) == KITWPA_OK);
    CHECK(lrf == doctest::Approx(l * (1.0 + 0.04 / 4.41)).epsilon(1e-14));

    double eps = 0.0, xi = 0.0;
    REQUIRE(kitwpa_mixing_coefficients(0.13, 2.1, &eps, &xi) == KITWPA_OK);
    CHECK(eps == doctest::Approx(0.26 / (4.41 + 0.0169)).epsilon(1e-14));
    CHECK(xi == doctest::Approx(1.0 / (4.41 + 0.0169)).epsilon(1e-14));

    kitwpa_film scaled{};
    REQUIRE(kitwpa_scale_film(&f, 5.0, 0.5, &scaled) == KITWPA_OK);
    CHECK(scaled.istar_ma == doctest::Approx(2.1 / 4.0));
    CHECK(scaled.ic_ma == doctest::Approx(0.38 / 4.0));
    CHECK(scaled.sheet_inductance_ph > f.sheet_inductance_ph);

    auto bad = f;
    bad.istar_ma = -1.0;
    CHECK(kitwpa_total_inductance(&bad, 0.0, 0.0, &l) == KITWPA_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(kitwpa_last_error()) > 0);
    CHECK(kitwpa_total_inductance(nullptr, 0.0, 0.0, &l) == KITWPA_ERR_INVALID_ARGUMENT);
    CHECK(kitwpa_total_inductance(&f, 0.0, 0.0, nullptr) == KITWPA_ERR_INVALID_ARGUMENT);
    CHECK(mentions(kitwpa_last_error(), "NULL"));
    CHECK(kitwpa_mixing_coefficients(0.1, 0.0, &eps, &xi) != KITWPA_OK);
}

TEST_CASE("cells and line length") {
    const auto f = film();
    const auto s = device();
    CHECK(s.n_unloaded == 30);
    CHECK(s.n_loaded == 6);
    CHECK(s.n_supercells == 1200);
    double len = 0.0;
    REQUIRE(kitwpa_line_length(&s, &len) == KITWPA_OK);
    CHECK(len == doctest::Approx(0.0864).epsilon(1e-12));

    double z_short = 0.0, z_long = 0.0;
    REQUIRE(kitwpa_cell_impedance(&s.loaded, &f, 0.0, 1.0, &z_short) == KITWPA_OK);
    REQUIRE(kitwpa_cell_impedance(&s.unloaded, &f, 0.0, 1.0, &z_long) == KITWPA_OK);
    CHECK(z_short > z_long);
    CHECK(z_short == doctest::Approx(80.0).epsilon(0.02));

    double um = 0.0;
    REQUIRE(kitwpa_solve_finger_length(&s.unloaded, &f, 0.0, 80.0, 1.0, &um) == KITWPA_OK);
    auto cell = s.unloaded;
    cell.finger_length_um = um;
    double z = 0.0;
    REQUIRE(kitwpa_cell_impedance(&cell, &f, 0.0, 1.0, &z) == KITWPA_OK);
    CHECK(z == doctest::Approx(80.0).epsilon(1e-6));
    CHECK(kitwpa_solve_finger_length(&s.unloaded, &f, 0.0, 1e4, 1.0, &um) == KITWPA_ERR_OUT_OF_RANGE);
    CHECK(mentions(kitwpa_last_error(), "unreachable"));

    auto broken = s;
    broken.n_supercells = 0;
    CHECK(kitwpa_line_length(&broken, &len) != KITWPA_OK);
}

TEST_CASE("dispersion handle") {
    const auto f = film();
    const auto s = device();
    const auto g = grid(0.1e9, 16e9, 10e6);
    kitwpa_dispersion* d = nullptr;
    REQUIRE(kitwpa_dispersion_compute(&s, &f, 0.0, g.data(), g.size(), &d) == KITWPA_OK);
    REQUIRE(d != nullptr);
    CHECK(kitwpa_dispersion_size(d) == g.size());

    double fr = 0, ph = 0, ht = 0;
    int prop = -1;
    REQUIRE(kitwpa_dispersion_point(d, 0, &fr, &ph, &ht, &prop) == KITWPA_OK);
    CHECK(fr == g[0]);
    CHECK(prop == 1);
    CHECK(std::abs(ht) <= 1.0);
    CHECK(kitwpa_dispersion_point(d, g.size(), &fr, &ph, &ht, &prop) == KITWPA_ERR_OUT_OF_RANGE);

    REQUIRE(kitwpa_dispersion_stopband_count(d) >= 1);
    bool near_bragg = false;
    for (size_t i = 0; i < kitwpa_dispersion_stopband_count(d); ++i) {
        double lo = 0, hi = 0;
        REQUIRE(kitwpa_dispersion_stopband(d, i, &lo, &hi) == KITWPA_OK);
        CHECK(lo < hi);
        const double mid = 0.5 * (lo + hi);
        if (mid > 0.75 * 10.75e9 && mid < 1.25 * 10.75e9) near_bragg = true;
    }
    CHECK(near_bragg);

    // low-frequency wavenumber grows linearly
    double b1 = 0, b2 = 0;
    REQUIRE(kitwpa_dispersion_beta(d, 1e9, &b1) == KITWPA_OK);
    REQUIRE(kitwpa_dispersion_beta(d, 2e9, &b2) == KITWPA_OK);
    CHECK(b1 > 0.0);
    CHECK(b2 / b1 == doctest::Approx(2.0).epsilon(0.01));
    CHECK(kitwpa_dispersion_beta(d, 40e9, &b1) != KITWPA_OK);
    kitwpa_dispersion_destroy(d);
    kitwpa_dispersion_destroy(nullptr);

    const double unsorted[] = {2e9, 1e9};
    CHECK(kitwpa_dispersion_compute(&s, &f, 0.0, unsorted, 2, &d) != KITWPA_OK);
    CHECK(d == nullptr);
    CHECK(kitwpa_dispersion_compute(&s, &f, 0.0, nullptr, 0, &d) != KITWPA_OK);
}

TEST_CASE("gain profile handle") {
    const auto f = film();
    const auto s = device();
    const auto dg = grid(0.1e9, 16e9, 2e6);
    kitwpa_dispersion* d = nullptr;
    REQUIRE(kitwpa_dispersion_compute(&s, &f, 0.13, dg.data(), dg.size(), &d) == KITWPA_OK);
    double len = 0;
    kitwpa_line_length(&s, &len);

    const auto gg = grid(5e9, 7.5e9, 50e6);
    kitwpa_gain_profile* off = nullptr;
    const kitwpa_pump none{12.666e9, 0.0, 0.13};
    REQUIRE(kitwpa_gain_profile_compute(d, &f, &none, gg.data(), gg.size(), len, 1, &off) == KITWPA_OK);
    REQUIRE(kitwpa_gain_profile_size(off) == gg.size());
    for (size_t i = 0; i < gg.size(); ++i) {
        double fr = 0, db = 1;
        REQUIRE(kitwpa_gain_profile_point(off, i, &fr, &db) == KITWPA_OK);
        if (!std::isnan(db)) CHECK(db == 0.0);
    }
    kitwpa_gain_profile_destroy(off);

    kitwpa_gain_profile* on = nullptr;
    const kitwpa_pump pump{12.666e9, 0.31, 0.13};
    REQUIRE(kitwpa_gain_profile_compute(d, &f, &pump, gg.data(), gg.size(), len, 1, &on) == KITWPA_OK);
    double peak = -1e9;
    for (size_t i = 0; i < gg.size(); ++i) {
        double fr = 0, db = 0;
        kitwpa_gain_profile_point(on, i, &fr, &db);
        if (db > peak) peak = db;
    }
    CHECK(peak > 3.0);
    kitwpa_gain_profile_destroy(on);

    kitwpa_gain_profile* blocked = nullptr;
    const kitwpa_pump inside{10.46e9, 0.31, 0.13};
    CHECK(kitwpa_gain_profile_compute(d, &f, &inside, gg.data(), gg.size(), len, 1, &blocked) ==
          KITWPA_ERR_DOMAIN);
    CHECK(mentions(kitwpa_last_error(), "stop band"));
    CHECK(blocked == nullptr);
    kitwpa_dispersion_destroy(d);

    double r = 0;
    REQUIRE(kitwpa_ripple_estimate(20.0, 0.1, 0.1, &r) == KITWPA_OK);
    const double x = 0.01 * 10.0;  // |G1 G2| sqrt(G)
    CHECK(r == doctest::Approx(20.0 * std::log10((1 + x) / (1 - x))).epsilon(1e-12));
    double p = 0;
    REQUIRE(kitwpa_pump_power_dbm(1.0, 50.0, &p) == KITWPA_OK);
    CHECK(p == doctest::Approx(10.0 * std::log10(0.5 * 1e-6 * 50.0 / 1e-3)).epsilon(1e-12));
}

TEST_CASE("noise") {
    const double f = 6e9, t = 0.05;
    double n = 0;
    REQUIRE(kitwpa_occupancy(f, t, &n) == KITWPA_OK);
    CHECK(n == doctest::Approx(1.0 / std::expm1(kH * f / (kKb * t)) + 0.5).epsilon(1e-14));
    double back = 0;
    REQUIRE(kitwpa_temperature_from_quanta(n, f, &back) == KITWPA_OK);
    CHECK(back == doctest::Approx(t).epsilon(1e-9));
    double band = 0;
    REQUIRE(kitwpa_band_averaged_occupancy(5.9e9, 6.1e9, t, &band) == KITWPA_OK);
    CHECK(band == doctest::Approx(n).epsilon(1e-3));
    CHECK(kitwpa_occupancy(-1.0, t, &n) == KITWPA_ERR_INVALID_ARGUMENT);

    kitwpa_noise_chain* chain = nullptr;
    REQUIRE(kitwpa_noise_chain_create(293.0, &chain) == KITWPA_OK);
    double in = 0;
    CHECK(kitwpa_noise_chain_input(chain, f, &in) == KITWPA_ERR_INVALID_ARGUMENT);  // no stages yet
    double hot = 0;
    kitwpa_occupancy(f, 293.0, &hot);

    REQUIRE(kitwpa_noise_chain_add_stage(chain, 4.0, 20.0, 0.0) == KITWPA_OK);
    double n4 = 0;
    kitwpa_occupancy(f, 4.0, &n4);
    REQUIRE(kitwpa_noise_chain_input(chain, f, &in) == KITWPA_OK);
    CHECK(in == doctest::Approx(0.01 * hot + 0.99 * n4).epsilon(1e-12));
    // ordering is checked when the chain is used
    REQUIRE(kitwpa_noise_chain_add_stage(chain, 10.0, 20.0, 0.0) == KITWPA_OK);
    CHECK(kitwpa_noise_chain_input(chain, f, &in) == KITWPA_ERR_INVALID_ARGUMENT);
    CHECK(mentions(kitwpa_last_error(), "warm to cold"));
    kitwpa_noise_chain_destroy(chain);
    CHECK(kitwpa_noise_chain_create(0.0, &chain) == KITWPA_ERR_INVALID_ARGUMENT);

    const double gc = 1e10, ns = 2.5;
    const double sig[] = {1.0, 2.0, 5.0}, idl[] = {0.9, 1.8, 4.7};
    double out[3];
    for (int i = 0; i < 3; ++i) out[i] = gc * (sig[i] + idl[i] + ns);
    double g_fit = 0, n_fit = 0;
    REQUIRE(kitwpa_yfactor_fit(sig, idl, out, 3, &g_fit, &n_fit) == KITWPA_OK);
    CHECK(g_fit == doctest::Approx(gc).epsilon(1e-12));
    CHECK(n_fit == doctest::Approx(ns).epsilon(1e-9));
    const double same[] = {1.0, 1.0, 1.0};
    CHECK(kitwpa_yfactor_fit(same, same, out, 3, &g_fit, &n_fit) == KITWPA_ERR_DATA);
}

TEST_CASE("tdr round trip") {
    double g = 0;
    REQUIRE(kitwpa_step_reflection(35.0, 50.0, &g) == KITWPA_OK);
    CHECK(g == doctest::Approx(-15.0 / 85.0).epsilon(1e-15));

    kitwpa_tdr_profile* p = nullptr;
    REQUIRE(kitwpa_tdr_profile_create(50.0, &p) == KITWPA_OK);
    REQUIRE(kitwpa_tdr_profile_add_segment(p, 50.0, 0.5e-9) == KITWPA_OK);
    REQUIRE(kitwpa_tdr_profile_add_segment(p, 35.0, 1e-9) == KITWPA_OK);
    REQUIRE(kitwpa_tdr_profile_add_segment(p, 50.0, 1e-9) == KITWPA_OK);
    CHECK(kitwpa_tdr_profile_add_segment(p, -1.0, 1e-9) == KITWPA_ERR_INVALID_ARGUMENT);
    CHECK(kitwpa_tdr_profile_size(p) == 3);

    kitwpa_tdr_trace* t = nullptr;
    REQUIRE(kitwpa_tdr_synthesize(p, 5e-12, 4e-9, &t) == KITWPA_OK);
    CHECK(kitwpa_tdr_trace_size(t) == 801);
    double ts = 0, rho = 0;
    REQUIRE(kitwpa_tdr_trace_sample(t, 200, &ts, &rho) == KITWPA_OK);
    CHECK(ts == doctest::Approx(1e-9));
    CHECK(rho == doctest::Approx(g).epsilon(1e-14));

    kitwpa_tdr_profile* back = nullptr;
    REQUIRE(kitwpa_tdr_extract(t, 50.0, 0.005, 3, &back) == KITWPA_OK);
    REQUIRE(kitwpa_tdr_profile_size(back) == 3);
    const double expect[] = {50.0, 35.0, 50.0};
    for (size_t i = 0; i < 3; ++i) {
        double z = 0, dly = 0;
        REQUIRE(kitwpa_tdr_profile_segment(back, i, &z, &dly) == KITWPA_OK);
        CHECK(z == doctest::Approx(expect[i]).epsilon(0.005));
    }
    CHECK(kitwpa_tdr_profile_segment(back, 3, &ts, &rho) == KITWPA_ERR_OUT_OF_RANGE);
    kitwpa_tdr_profile_destroy(back);
    kitwpa_tdr_trace_destroy(t);
    kitwpa_tdr_profile_destroy(p);

    const double time[] = {0.0, 5e-12, 1e-11, 1.5e-11};
    const double active[] = {0.0, 0.2, 1.0, 0.5};
    REQUIRE(kitwpa_tdr_trace_create(time, active, 4, &t) == KITWPA_OK);
    CHECK(kitwpa_tdr_extract(t, 50.0, 0.005, 3, &back) == KITWPA_ERR_DOMAIN);
    CHECK(mentions(kitwpa_last_error(), "non-passive"));
    kitwpa_tdr_trace_destroy(t);
}

TEST_CASE("command runner") {
    const fs::path out = fs::temp_directory_path() / ("kitwpa_capi_" + std::to_string(std::random_device{}()));
    const std::string cfg = KITWPA_SOURCE_DIR "/configs/paper_device.cfg";
    const std::string dir = out.string();

    kitwpa_run_options o{};
    o.command = "design";
    o.config_path = cfg.c_str();
    o.out_dir = dir.c_str();
    int code = -1;
    REQUIRE(kitwpa_run(&o, &code) == KITWPA_OK);
    CHECK(code == 0);
    CHECK(mentions(kitwpa_last_report(), "finger length"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "finger_length.csv"));

    o.has_seed = 1;
    o.seed = 5;
    REQUIRE(kitwpa_run(&o, &code) == KITWPA_OK);
    CHECK(code == 0);
    CHECK(mentions(kitwpa_last_warnings(), "--seed"));

    o.command = "warp";
    REQUIRE(kitwpa_run(&o, &code) == KITWPA_OK);
    CHECK(code == 2);
    CHECK(mentions(kitwpa_last_error(), "warp"));

    o.command = "design";
    const std::string missing = (out / "missing.cfg").string();
    o.config_path = missing.c_str();
    REQUIRE(kitwpa_run(&o, &code) == KITWPA_OK);
    CHECK(code == 4);

    CHECK(kitwpa_run(nullptr, &code) == KITWPA_ERR_INVALID_ARGUMENT);
    o.command = nullptr;
    CHECK(kitwpa_run(&o, &code) == KITWPA_ERR_INVALID_ARGUMENT);
    fs::remove_all(out);
}
