#include "kitwpa/noise.hpp"

#include <cmath>
#include <sstream>

#include "kitwpa/constants.hpp"
#include "kitwpa/errors.hpp"

namespace kitwpa {

namespace {

constexpr double kHOverK = constants::planck / constants::boltzmann;  // K / Hz

}  // namespace

double occupancy(double frequency_hz, double temperature_k) {
    require(frequency_hz > 0.0, ErrorKind::InvalidParameter, "frequency must be positive");
    require(temperature_k >= 0.0, ErrorKind::InvalidParameter, "temperature must be >= 0");
    if (temperature_k == 0.0) return 0.5;
    const double x = kHOverK * frequency_hz / temperature_k;
    return 1.0 / std::expm1(x) + 0.5;
}

double band_averaged_occupancy(double lo_hz, double hi_hz, double temperature_k, int intervals) {
    require(lo_hz > 0.0 && hi_hz > lo_hz, ErrorKind::InvalidParameter,
            "band must satisfy 0 < lo < hi");
    require(intervals >= 2 && intervals % 2 == 0, ErrorKind::InvalidParameter,
            "Simpson rule needs an even interval count");
    const double h = (hi_hz - lo_hz) / intervals;
    double sum = occupancy(lo_hz, temperature_k) + occupancy(hi_hz, temperature_k);
    for (int k = 1; k < intervals; ++k)
        sum += (k % 2 ? 4.0 : 2.0) * occupancy(lo_hz + k * h, temperature_k);
    return sum * h / 3.0 / (hi_hz - lo_hz);
}

double temperature_from_quanta(double quanta, double frequency_hz) {
    require(frequency_hz > 0.0, ErrorKind::InvalidParameter, "frequency must be positive");
    if (!(quanta > 0.5)) {
        std::ostringstream os;
        os << "noise of " << quanta << " quanta is at or below the vacuum level of 0.5";
        fail(ErrorKind::Domain, os.str());
    }
    return kHOverK * frequency_hz / std::log1p(1.0 / (quanta - 0.5));
}

void NoiseChain::validate() const {
    require(source_temperature_k > 0.0, ErrorKind::InvalidParameter,
            "source temperature must be positive");
    require(!stages.empty(), ErrorKind::InvalidParameter, "noise chain has no stages");
    double warmer = source_temperature_k;
    for (const auto& s : stages) {
        require(s.temperature_k > 0.0, ErrorKind::InvalidParameter,
                "stage temperature must be positive (" + s.label + ")");
        require(s.temperature_k <= warmer, ErrorKind::InvalidParameter,
                "noise chain stages must run warm to cold (" + s.label + ")");
        warmer = s.temperature_k;
        require(s.attenuation_db >= 0.0 && s.extra_loss_db >= 0.0, ErrorKind::InvalidParameter,
                "stage attenuation and extra loss must be >= 0 dB (" + s.label + ")");
    }
}

double chain_input_noise(const NoiseChain& chain, double frequency_hz) {
    chain.validate();
    double n = occupancy(frequency_hz, chain.source_temperature_k);
    for (const auto& stage : chain.stages) {
        const double transmission = 1.0 / db_to_linear(stage.attenuation_db + stage.extra_loss_db);
        n = n * transmission + (1.0 - transmission) * occupancy(frequency_hz, stage.temperature_k);
    }
    return n;
}

double yfactor_output(double chain_gain, double added_noise_quanta, double signal_quanta,
                      double idler_quanta) {
    return chain_gain * (signal_quanta + idler_quanta + added_noise_quanta);
}

SystemNoiseFit yfactor_fit(std::span<const SwitchPositionData> points) {
    require(points.size() >= 2, ErrorKind::Data, "y-factor fit needs at least two positions");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        require(p.signal_quanta >= 0.5 && p.idler_quanta >= 0.5, ErrorKind::Data,
                "switch-position input noise below the 0.5-quanta vacuum floor");
        mx += p.signal_quanta + p.idler_quanta;
        my += p.output_power;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double dx = p.signal_quanta + p.idler_quanta - mx;
        sxx += dx * dx;
        sxy += dx * (p.output_power - my);
    }
    const double scale = std::max(1.0, std::abs(mx));
    if (!(sxx > 1e-24 * scale * scale * n)) {
        fail(ErrorKind::Data,
             "singular y-factor fit: the switch positions need at least two distinct input-noise "
             "levels");
    }

    SystemNoiseFit fit;
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    require(slope > 0.0, ErrorKind::Data, "fitted chain gain is not positive");
    fit.chain_gain = slope;
    fit.added_noise_quanta = intercept / slope;

    double ss = 0.0;
    for (const auto& p : points) {
        const double r = p.output_power - (intercept + slope * (p.signal_quanta + p.idler_quanta));
        ss += r * r;
    }
    fit.residual_rms = (my != 0.0) ? std::sqrt(ss / n) / std::abs(my) : 0.0;
    if (fit.added_noise_quanta < 0.0) {
        fit.negative_noise = true;
        std::ostringstream os;
        os << "fitted system-added noise is negative (" << fit.added_noise_quanta << " quanta)";
        fit.warnings.push_back(os.str());
    }
    return fit;
}

double cascade_added_noise(std::span<const AmplifierStage> stages, double isolation_db) {
    require(!stages.empty(), ErrorKind::InvalidParameter, "amplifier cascade is empty");
    require(std::isfinite(isolation_db), ErrorKind::InvalidParameter, "isolation must be finite");
    double total = 0.0;
    double gain_before = 1.0;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const auto& s = stages[k];
        require(std::isfinite(s.gain_db), ErrorKind::InvalidParameter, "stage gain must be finite");
        require(s.added_noise_quanta >= 0.0, ErrorKind::InvalidParameter,
                "stage added noise must be >= 0");
        if (k == 1) gain_before *= db_to_linear(isolation_db);
        total += s.added_noise_quanta / gain_before;
        gain_before *= db_to_linear(s.gain_db);
    }
    return total;
}

double idler_frequency(double signal_hz, double pump_hz) {
    if (!(signal_hz > 0.0 && signal_hz < pump_hz)) {
        std::ostringstream os;
        os << "signal " << signal_hz << " Hz must satisfy 0 < f_s < f_p = " << pump_hz << " Hz";
        fail(ErrorKind::InvalidParameter, os.str());
    }
    return pump_hz - signal_hz;
}

}  // namespace kitwpa
