#pragma once

// Radiometric calibration: photon occupancy, thermal attenuator chains, the
// three-point y-factor fit and amplifier-cascade noise referral.
//
// Noise is in quanta, including the vacuum half: n = 1/(exp(hf/kT) - 1) + 1/2.

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace kitwpa {

double occupancy(double frequency_hz, double temperature_k);

// Mean occupancy over [lo, hi] (composite Simpson, `intervals` even).
double band_averaged_occupancy(double lo_hz, double hi_hz, double temperature_k,
                               int intervals = 512);

// Inverse of occupancy. Throws Domain when n <= 1/2.
double temperature_from_quanta(double quanta, double frequency_hz);

struct ThermalStage {
    double temperature_k = 0.0;
    double attenuation_db = 0.0;
    double extra_loss_db = 0.0;  // cables, connectors, switch at the same stage
    std::string label;
};

struct NoiseChain {
    double source_temperature_k = 293.0;  // room-temperature termination
    std::vector<ThermalStage> stages;     // warm -> cold

    void validate() const;
};

// Beam-splitter propagation N_out = N_in / A + (1 - 1/A) n(f, T) per stage.
double chain_input_noise(const NoiseChain& chain, double frequency_hz);

struct SwitchPositionData {
    double signal_quanta = 0.0;  // N_in at the signal frequency
    double idler_quanta = 0.0;   // N_in at the idler frequency
    double output_power = 0.0;   // linear, arbitrary consistent units
};

struct SystemNoiseFit {
    double chain_gain = 0.0;          // G_c, linear
    double added_noise_quanta = 0.0;  // N_sigma
    double residual_rms = 0.0;        // RMS fit residual relative to the mean output
    bool negative_noise = false;
    std::vector<std::string> warnings;
};

// Least-squares line through (N_in_s + N_in_i, P_out):
// P_out = G_c (N_in_s + N_in_i + N_sigma).
SystemNoiseFit yfactor_fit(std::span<const SwitchPositionData> points);

// Forward model of the fit, for synthetic scans.
double yfactor_output(double chain_gain, double added_noise_quanta, double signal_quanta,
                      double idler_quanta);

struct AmplifierStage {
    double gain_db = 0.0;
    double added_noise_quanta = 0.0;
    std::string label;
};

// Friis composition in quanta referred to the first-stage input:
// N_1 + N_2 / (G_1 A_iso) + N_3 / (G_1 A_iso G_2) + ...
double cascade_added_noise(std::span<const AmplifierStage> stages, double isolation_db);

double idler_frequency(double signal_hz, double pump_hz);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace kitwpa
