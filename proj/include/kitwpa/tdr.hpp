#pragma once

// Time-domain reflectometry of piecewise-uniform lossless lines: lattice
// (bounce-diagram) synthesis of the step response and layer-peeling inversion.

#include <vector>

namespace kitwpa {

struct ImpedanceSegment {
    double z0_ohm = 50.0;
    double delay_s = 0.0;  // one-way delay through the segment
};

struct ImpedanceProfile {
    std::vector<ImpedanceSegment> segments;
    double reference_ohm = 50.0;  // instrument impedance

    void validate() const;
};

struct TDRTrace {
    std::vector<double> time_s;  // uniform, starting at 0
    std::vector<double> rho;     // reflected / incident voltage

    double dt() const { return time_s.size() > 1 ? time_s[1] - time_s[0] : 0.0; }
};

// (Z - Zref) / (Z + Zref)
double step_reflection(double z_ohm, double z_ref_ohm);

// Inverse of step_reflection: Zref (1 + rho) / (1 - rho).
double naive_impedance(double rho, double z_ref_ohm);

// Launches an ideal unit step from a matched Zref source and records every
// reflection returning to the source plane, multiple bounces included. The last
// segment is terminated in its own impedance. Each segment is discretised into
// layers of dt/2 one-way delay; it must span at least 4 samples (delay >= 4 dt).
TDRTrace synthesize_trace(const ImpedanceProfile& profile, double dt_s, double t_max_s);

// Impedance of every dt/2 layer below the source plane, recovered by exact
// discrete layer peeling of the step response.
std::vector<double> layer_peel(const TDRTrace& trace, double z_ref_ohm);

struct ExtractionOptions {
    double threshold = 0.005;  // |delta rho| that opens a new segment
    int sustain_samples = 3;   // ... when held this many consecutive samples
};

// Layer peeling followed by plateau segmentation. Segment impedance is the median
// over the plateau; the final segment runs to the end of the record.
// Throws Domain when any |rho| >= 1.
ImpedanceProfile extract_impedance(const TDRTrace& trace, double z_ref_ohm,
                                   const ExtractionOptions& options = {});

}  // namespace kitwpa
