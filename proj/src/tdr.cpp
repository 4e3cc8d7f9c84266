#include "kitwpa/tdr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kitwpa/errors.hpp"

namespace kitwpa {

void ImpedanceProfile::validate() const {
    require(reference_ohm > 0.0, ErrorKind::InvalidParameter, "reference impedance must be positive");
    require(!segments.empty(), ErrorKind::InvalidParameter, "impedance profile has no segments");
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (!(segments[k].z0_ohm > 0.0) || !(segments[k].delay_s > 0.0)) {
            std::ostringstream os;
            os << "segment " << k << " needs positive impedance and delay (got "
               << segments[k].z0_ohm << " Ohm, " << segments[k].delay_s << " s)";
            fail(ErrorKind::InvalidParameter, os.str());
        }
    }
}

double step_reflection(double z_ohm, double z_ref_ohm) {
    require(z_ohm > 0.0 && z_ref_ohm > 0.0, ErrorKind::InvalidParameter,
            "impedances must be positive");
    return (z_ohm - z_ref_ohm) / (z_ohm + z_ref_ohm);
}

double naive_impedance(double rho, double z_ref_ohm) {
    require(std::abs(rho) < 1.0, ErrorKind::Domain, "|rho| must be below 1");
    return z_ref_ohm * (1.0 + rho) / (1.0 - rho);
}

TDRTrace synthesize_trace(const ImpedanceProfile& profile, double dt_s, double t_max_s) {
    profile.validate();
    require(dt_s > 0.0 && t_max_s >= 0.0, ErrorKind::InvalidParameter,
            "need dt > 0 and t_max >= 0");
    const auto samples = static_cast<std::size_t>(std::floor(t_max_s / dt_s + 1e-9)) + 1;

    // One layer per dt/2 of one-way delay, so a layer round trip is one sample.
    // Boundaries are rounded on the cumulative delay so errors do not pile up.
    std::vector<double> layers;
    double depth_s = 0.0;
    for (std::size_t k = 0; k < profile.segments.size(); ++k) {
        const auto& seg = profile.segments[k];
        if (seg.delay_s < 4.0 * dt_s * (1.0 - 1e-9)) {
            std::ostringstream os;
            os << "segment " << k << " delay " << seg.delay_s << " s is under-resolved by dt="
               << dt_s << " s; need at least 4 samples per segment";
            fail(ErrorKind::OutOfRange, os.str());
        }
        depth_s += seg.delay_s;
        const auto boundary = static_cast<std::size_t>(std::llround(depth_s / (0.5 * dt_s)));
        layers.insert(layers.end(), boundary - layers.size(), seg.z0_ohm);
        if (layers.size() > samples + 1) break;  // deeper layers cannot echo inside the window
    }
    // The last segment continues matched; extending it keeps the lattice uniform.
    if (layers.size() < samples + 1) layers.resize(samples + 1, profile.segments.back().z0_ohm);
    layers.resize(samples + 1);

    const std::size_t n_layers = layers.size();
    std::vector<double> gamma(n_layers);
    gamma[0] = step_reflection(layers[0], profile.reference_ohm);
    for (std::size_t j = 1; j < n_layers; ++j) gamma[j] = step_reflection(layers[j], layers[j - 1]);

    std::vector<double> right(n_layers, 0.0), left(n_layers, 0.0);
    std::vector<double> next_right(n_layers), next_left(n_layers);
    TDRTrace trace;
    trace.time_s.resize(samples);
    trace.rho.resize(samples);
    for (std::size_t m = 0; m < samples; ++m) trace.time_s[m] = static_cast<double>(m) * dt_s;

    const std::size_t half_steps = 2 * (samples - 1) + 1;
    for (std::size_t t = 0; t < half_steps; ++t) {
        const double incident = 1.0;
        const double up = left[0];
        const double reflected = gamma[0] * incident + (1.0 - gamma[0]) * up;
        next_right[0] = (1.0 + gamma[0]) * incident - gamma[0] * up;
        for (std::size_t j = 1; j < n_layers; ++j) {
            const double a = right[j - 1];
            const double b = left[j];
            next_left[j - 1] = gamma[j] * a + (1.0 - gamma[j]) * b;
            next_right[j] = (1.0 + gamma[j]) * a - gamma[j] * b;
        }
        next_left[n_layers - 1] = 0.0;
        if (t % 2 == 0) trace.rho[t / 2] = reflected;
        std::swap(right, next_right);
        std::swap(left, next_left);
    }
    return trace;
}

namespace {

void validate_trace(const TDRTrace& trace) {
    require(!trace.rho.empty() && trace.rho.size() == trace.time_s.size(), ErrorKind::Data,
            "TDR trace needs matching, non-empty time and rho columns");
    if (trace.rho.size() > 1) {
        const double dt = trace.dt();
        require(dt > 0.0, ErrorKind::Data, "TDR time axis must be increasing");
        for (std::size_t m = 1; m < trace.time_s.size(); ++m) {
            if (std::abs(trace.time_s[m] - trace.time_s[m - 1] - dt) > 1e-6 * dt)
                fail(ErrorKind::Data, "TDR time axis must be uniformly sampled");
        }
    }
    for (std::size_t m = 0; m < trace.rho.size(); ++m) {
        if (!(std::abs(trace.rho[m]) < 1.0)) {
            std::ostringstream os;
            os << "non-passive TDR data: |rho| = " << std::abs(trace.rho[m]) << " at t = "
               << trace.time_s[m] << " s";
            fail(ErrorKind::Domain, os.str());
        }
    }
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    if (v.size() % 2 == 1) return v[mid];
    const double upper = v[mid];
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

std::vector<double> layer_peel(const TDRTrace& trace, double z_ref_ohm) {
    validate_trace(trace);
    require(z_ref_ohm > 0.0, ErrorKind::InvalidParameter, "reference impedance must be positive");
    const std::size_t m = trace.rho.size();

    // Impulse response of the step record; the incident wave is a unit impulse.
    std::vector<double> up(m), down(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) up[k] = trace.rho[k] - (k > 0 ? trace.rho[k - 1] : 0.0);
    down[0] = 1.0;

    std::vector<double> impedance(m);
    double z = z_ref_ohm;
    for (std::size_t layer = 0; layer < m; ++layer) {
        const std::size_t len = m - layer;
        const double g = up[0] / down[0];
        if (!(std::abs(g) < 1.0)) {
            std::ostringstream os;
            os << "layer peeling produced |Gamma| >= 1 at layer " << layer
               << "; the record is not a passive lossless response";
            fail(ErrorKind::Domain, os.str());
        }
        z *= (1.0 + g) / (1.0 - g);
        impedance[layer] = z;
        // Waves just below the interface, then one sample of relative delay.
        for (std::size_t k = 0; k < len; ++k) {
            const double u = up[k];
            const double d = down[k];
            up[k] = (u - g * d) / (1.0 - g);
            down[k] = (d - g * u) / (1.0 - g);
        }
        for (std::size_t k = 0; k + 1 < len; ++k) up[k] = up[k + 1];
    }
    return impedance;
}

ImpedanceProfile extract_impedance(const TDRTrace& trace, double z_ref_ohm,
                                   const ExtractionOptions& options) {
    require(options.threshold > 0.0 && options.sustain_samples >= 1, ErrorKind::InvalidParameter,
            "extraction threshold must be positive and sustain at least one sample");
    const std::vector<double> z = layer_peel(trace, z_ref_ohm);
    const double dt = trace.rho.size() > 1 ? trace.dt() : 0.0;
    const std::size_t n = z.size();
    const auto sustain = static_cast<std::size_t>(options.sustain_samples);

    std::vector<double> rho_eq(n);
    for (std::size_t k = 0; k < n; ++k) rho_eq[k] = step_reflection(z[k], z_ref_ohm);

    std::vector<std::size_t> starts{0};
    double level = rho_eq[0];
    for (std::size_t k = 1; k + sustain <= n; ++k) {
        bool held = true;
        for (std::size_t j = k; j < k + sustain; ++j) {
            if (std::abs(rho_eq[j] - level) <= options.threshold) {
                held = false;
                break;
            }
        }
        if (held) {
            starts.push_back(k);
            level = rho_eq[k + sustain - 1];
            k += sustain - 1;
        }
    }

    ImpedanceProfile profile;
    profile.reference_ohm = z_ref_ohm;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const std::size_t begin = starts[s];
        const std::size_t end = (s + 1 < starts.size()) ? starts[s + 1] : n;
        std::vector<double> plateau(z.begin() + static_cast<std::ptrdiff_t>(begin),
                                    z.begin() + static_cast<std::ptrdiff_t>(end));
        profile.segments.push_back({median(std::move(plateau)),
                                    static_cast<double>(end - begin) * 0.5 * dt});
    }
    return profile;
}

}  // namespace kitwpa
