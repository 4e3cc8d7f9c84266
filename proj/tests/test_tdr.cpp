#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kitwpa/errors.hpp"
#include "kitwpa/tdr.hpp"

using namespace kitwpa;

namespace {

constexpr double kDt = 5e-12;

ImpedanceProfile sandwich() {
    ImpedanceProfile p;
    p.reference_ohm = 50.0;
    p.segments = {{50.0, 0.5e-9}, {35.0, 1e-9}, {50.0, 1e-9}};
    return p;
}

std::size_t sample_at(double t) { return static_cast<std::size_t>(std::llround(t / kDt)); }

}  // namespace

TEST_CASE("step reflection") {
    CHECK(step_reflection(50.0, 50.0) == 0.0);
    CHECK(step_reflection(35.0, 50.0) == doctest::Approx(-0.17647).epsilon(1e-5 / 0.17647));
    CHECK(step_reflection(35.0, 50.0) == doctest::Approx(-15.0 / 85.0).epsilon(1e-15));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> z(1.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        const double a = z(rng), b = z(rng);
        CHECK(step_reflection(a, b) == -step_reflection(b, a));
        CHECK(naive_impedance(step_reflection(a, b), b) == doctest::Approx(a).epsilon(1e-13));
    }
    CHECK_THROWS_AS(step_reflection(0.0, 50.0), Error);
    CHECK_THROWS_AS(step_reflection(50.0, -1.0), Error);
    CHECK_THROWS_AS(naive_impedance(1.0, 50.0), Error);
}

TEST_CASE("uniform line reflects nothing") {
    ImpedanceProfile p;
    p.segments = {{50.0, 1e-9}};
    const auto t = synthesize_trace(p, kDt, 2e-9);
    CHECK(t.rho.size() == 401);
    for (double r : t.rho) CHECK(r == 0.0);
    const auto back = extract_impedance(t, 50.0);
    REQUIRE(back.segments.size() == 1);
    CHECK(back.segments[0].z0_ohm == 50.0);
}

TEST_CASE("single step arrives at twice the delay") {
    ImpedanceProfile p;
    p.segments = {{50.0, 0.4e-9}, {35.0, 1e-9}};
    const auto t = synthesize_trace(p, kDt, 2e-9);
    const std::size_t k = sample_at(0.8e-9);
    for (std::size_t m = 0; m < k; ++m) CHECK(t.rho[m] == 0.0);
    for (std::size_t m = k; m < t.rho.size(); ++m)
        CHECK(t.rho[m] == doctest::Approx(step_reflection(35.0, 50.0)).epsilon(1e-14));

    // one interface: the naive reading and layer peeling agree
    const auto back = extract_impedance(t, 50.0);
    REQUIRE(back.segments.size() == 2);
    CHECK(std::abs(naive_impedance(t.rho.back(), 50.0) - back.segments[1].z0_ohm) < 0.2);
}

TEST_CASE("two interfaces: first-order step and re-reflection tail") {
    const auto p = sandwich();
    const auto t = synthesize_trace(p, kDt, 4e-9);
    const double g = step_reflection(35.0, 50.0);
    const std::size_t k1 = sample_at(1e-9), k2 = sample_at(3e-9);
    CHECK(t.rho[k1 - 1] == 0.0);
    CHECK(t.rho[k1] == doctest::Approx(g).epsilon(1e-14));
    CHECK(t.rho[k2 - 1] == doctest::Approx(g).epsilon(1e-14));
    // second interface: +|g| (1 - g^2) on top of g
    CHECK(t.rho[k2] - t.rho[k2 - 1] == doctest::Approx(-g * (1.0 - g * g)).epsilon(1e-13));
    // each further round trip through the 35 Ohm section multiplies by g^2
    const std::size_t round = sample_at(2e-9);
    if (k2 + round < t.rho.size()) {
        const double first = t.rho[k2] - t.rho[k2 - 1];
        const double second = t.rho[k2 + round] - t.rho[k2 + round - 1];
        CHECK(second / first == doctest::Approx(g * g).epsilon(1e-12));
    }
    // naive reading of the returning level versus the truth
    const double naive_last = naive_impedance(t.rho[k2], 50.0);
    CHECK(std::abs(naive_last - 50.0) < 1.0);
}

TEST_CASE("sandwich round trip") {
    const auto p = sandwich();
    const auto t = synthesize_trace(p, kDt, 4e-9);
    const auto back = extract_impedance(t, 50.0);
    REQUIRE(back.segments.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(back.segments[i].z0_ohm == doctest::Approx(p.segments[i].z0_ohm).epsilon(0.005));
    CHECK(std::abs(back.segments[0].delay_s - 0.5e-9) <= kDt / 2);
    CHECK(std::abs(back.segments[1].delay_s - 1e-9) <= kDt / 2);
    CHECK(back.reference_ohm == 50.0);

    // zero trace: the reference impedance throughout
    TDRTrace flat = t;
    std::fill(flat.rho.begin(), flat.rho.end(), 0.0);
    const auto f = extract_impedance(flat, 50.0);
    REQUIRE(f.segments.size() == 1);
    CHECK(f.segments[0].z0_ohm == 50.0);
}

TEST_CASE("random profiles round trip") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> mag(0.02, 0.3), delay(4 * kDt, 60 * kDt);
    std::bernoulli_distribution sign(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        ImpedanceProfile p;
        p.reference_ohm = 50.0;
        double z = 50.0;
        const int n = count(rng);
        double total = 0.0;
        for (int s = 0; s < n; ++s) {
            const double g = sign(rng) ? mag(rng) : -mag(rng);
            z *= (1.0 + g) / (1.0 - g);
            p.segments.push_back({z, delay(rng)});
            total += p.segments.back().delay_s;
        }
        const auto t = synthesize_trace(p, kDt, 2.0 * total + 40 * kDt);
        for (double r : t.rho) CHECK(std::abs(r) < 1.0);

        const auto back = extract_impedance(t, 50.0);
        REQUIRE(back.segments.size() == p.segments.size());
        double depth = 0.0, depth_back = 0.0;
        for (std::size_t i = 0; i < p.segments.size(); ++i) {
            CHECK(back.segments[i].z0_ohm == doctest::Approx(p.segments[i].z0_ohm).epsilon(0.005));
            if (i + 1 < p.segments.size()) {
                depth += p.segments[i].delay_s;
                depth_back += back.segments[i].delay_s;
                // round-trip time of each boundary within one sample
                CHECK(std::abs(2.0 * depth - 2.0 * depth_back) <= kDt * (1 + 1e-9));
            }
        }
    }
}

TEST_CASE("passivity and reflected energy") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> z(10.0, 200.0);
    for (int trial = 0; trial < 50; ++trial) {
        ImpedanceProfile p;
        for (int s = 0; s < 5; ++s) p.segments.push_back({z(rng), 10 * kDt});
        const auto t = synthesize_trace(p, kDt, 3e-9);
        double energy = 0.0, prev = 0.0;
        for (double r : t.rho) {
            CHECK(std::abs(r) < 1.0);
            energy += (r - prev) * (r - prev);
            prev = r;
        }
        CHECK(energy <= 1.0);
    }
}

TEST_CASE("dual profile negates the trace") {
    const auto p = sandwich();
    ImpedanceProfile dual = p;
    for (auto& s : dual.segments) s.z0_ohm = p.reference_ohm * p.reference_ohm / s.z0_ohm;
    const auto a = synthesize_trace(p, kDt, 4e-9);
    const auto b = synthesize_trace(dual, kDt, 4e-9);
    for (std::size_t k : {sample_at(1e-9), sample_at(3e-9)}) CHECK(b.rho[k] == doctest::Approx(-a.rho[k]).epsilon(1e-14));
    for (std::size_t k = 0; k < a.rho.size(); ++k) CHECK(std::abs(a.rho[k] + b.rho[k]) < 1e-14);
}

TEST_CASE("bad inputs") {
    ImpedanceProfile p;
    p.segments = {{50.0, 1e-9}, {35.0, 3 * kDt}};
    try {
        synthesize_trace(p, kDt, 2e-9);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfRange);
        CHECK(std::string(e.what()).find("under-resolved") != std::string::npos);
    }
    p.segments = {{-5.0, 1e-9}};
    CHECK_THROWS_AS(synthesize_trace(p, kDt, 2e-9), Error);
    p.segments = {{50.0, 0.0}};
    CHECK_THROWS_AS(synthesize_trace(p, kDt, 2e-9), Error);
    p.segments.clear();
    CHECK_THROWS_AS(synthesize_trace(p, kDt, 2e-9), Error);

    TDRTrace t;
    t.time_s = {0.0, kDt, 2 * kDt, 3 * kDt};
    t.rho = {0.0, 0.2, 1.0, 0.5};
    try {
        extract_impedance(t, 50.0);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
        CHECK(std::string(e.what()).find("non-passive") != std::string::npos);
    }
    t.rho = {0.0, 0.1, 0.1, 0.1};
    t.time_s = {0.0, kDt, 3 * kDt, 4 * kDt};
    try {
        extract_impedance(t, 50.0);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
    }
    t.time_s = {0.0, kDt, 2 * kDt};
    CHECK_THROWS_AS(extract_impedance(t, 50.0), Error);
    t.time_s = {0.0, kDt, 2 * kDt, 3 * kDt};
    CHECK_THROWS_AS(extract_impedance(t, 50.0, {0.0, 3}), Error);
}
