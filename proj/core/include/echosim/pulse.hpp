#pragma once
// Pulse envelopes and schedules.  Areas follow the usual convention:
// area = integral of the Rabi frequency over the envelope.

#include <optional>
#include <vector>

#include "echosim/types.hpp"

namespace echosim {

enum class PulseShape { gaussian, rectangular, sampled };

// Which transition the pulse drives.  "effective" marks two-photon drive
// in the adiabatically eliminated model.
enum class DriveLeg { a, b, effective };

struct PulseEnvelope {
    PulseShape shape = PulseShape::gaussian;
    double center = 0.0;
    double width = 0.0;      // gaussian: 1/e half-width; rectangular: full duration
    double peak_rabi = 0.0;
    DriveLeg leg = DriveLeg::a;
    double phase = 0.0;      // in (-pi, pi]

    // sampled shape only: unit-peak envelope samples on a uniform grid
    std::vector<double> samples;
    double sample_t0 = 0.0;
    double sample_dt = 0.0;
};

// Real envelope value (no phase), zero outside support.  Gaussian support is
// truncated at +-4 widths (e^-16 ~ 1.1e-7, below every test tolerance);
// rectangular support is the half-open interval [center-w/2, center+w/2).
// Sampled shapes interpolate linearly and are zero outside the sample range.
double envelope_value(const PulseEnvelope& p, double t);

// envelope_value times peak-phase factor e^{i*phase}.
cxd sample_envelope(const PulseEnvelope& p, double t);

// Half-width of the region where the envelope is nonzero (4 widths for the
// truncated gaussian, half the duration for rectangular).  Overlap checks
// and echo-detection masks both use it.
double support_halfwidth(const PulseEnvelope& p);

// Analytic area for gaussian/rect; trapezoid for sampled (flagged numeric
// by the .numeric member of the result).
struct PulseArea {
    double value = 0.0;
    bool numeric = false;  // true when computed by quadrature, not a formula
};
PulseArea pulse_area(const PulseEnvelope& p);

// Inverse of the area formulas: the peak Rabi frequency that makes a pulse
// of the given shape and width hit target_area.
double solve_for_peak(PulseShape shape, double width, double target_area);

// Convenience constructors used throughout the runners.
PulseEnvelope gaussian_pulse(double center, double width, double area,
                             DriveLeg leg = DriveLeg::a, double phase = 0.0);
PulseEnvelope rectangular_pulse(double center, double duration, double area,
                                DriveLeg leg = DriveLeg::a, double phase = 0.0);

// Three-pulse (or packeted) schedule: one write pulse, a query packet, a
// reference packet, and optionally a cw drive on leg b.  Packet sub-pulses
// are centered symmetrically on the nominal packet time.
struct PulseSchedule {
    PulseEnvelope write;
    std::vector<PulseEnvelope> query;
    std::vector<PulseEnvelope> reference;
    std::optional<double> cw_leg_b;

    double t1() const { return write.center; }
    double t2() const;  // nominal query time: mean of the packet centers
    double t3() const;  // nominal reference time
    double t4() const { return t3() + t2() - t1(); }

    // All leg-a pulses flattened in time order (the integrators sum their
    // envelopes; overlap within a packet is allowed, overlap with the write
    // pulse is not).
    std::vector<PulseEnvelope> leg_a_pulses() const;
};

// Validates T1 < T2 < T3, no packet/write overlap, and that T4 fits in the
// grid.  Returns all violations.
std::vector<std::string> validate_schedule(const PulseSchedule& s, double t_end);

// Builds a packet of n sub-pulses spaced by `spacing`, centered on `nominal`
// (offsets (m - (n-1)/2)*spacing), with per-sub-pulse area scale factors.
std::vector<PulseEnvelope> make_packet(double nominal, double spacing,
                                       const std::vector<double>& area_scales,
                                       double base_area, double width,
                                       PulseShape shape = PulseShape::gaussian);

}  // namespace echosim
