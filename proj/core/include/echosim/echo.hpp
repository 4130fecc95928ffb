#pragma once
// Echo detection and the single-spot (no optics) experiment runner: evolve
// the chosen model over every inhomogeneous band, average the coherence into
// an ensemble dipole, and classify the rephasing peaks against the times the
// pulse schedule predicts.

#include <string>
#include <vector>

#include "echosim/effective.hpp"
#include "echosim/ensemble.hpp"
#include "echosim/pulse.hpp"
#include "echosim/three_level.hpp"
#include "echosim/time_grid.hpp"
#include "echosim/two_level.hpp"
#include "echosim/types.hpp"

namespace echosim {

enum class EchoKind {
    stimulated,    // T3 + T2 - T1
    two_pulse_ab,  // 2*T2 - T1
    two_pulse_bc,  // 2*T3 - T2
    two_pulse_ac,  // 2*T3 - T1
    unidentified,
};

const char* echo_kind_name(EchoKind k);

struct EchoPeak {
    EchoKind kind = EchoKind::unidentified;
    double time = 0.0;       // vertex-refined
    double amplitude = 0.0;  // vertex-refined |P|
    double expected_time = 0.0;  // 0 for unidentified peaks
};

struct EchoReport {
    std::vector<EchoPeak> peaks;  // in time order
    double threshold = 0.0;       // absolute detection threshold used

    // First peak of the given kind, or nullptr.
    const EchoPeak* find(EchoKind k) const;
};

// Scans |dipole(t)| for local maxima outside the pulse supports (plus a
// small guard pad), keeps those above threshold_frac times the masked
// maximum, refines each by a quadratic vertex fit, and labels peaks whose
// refined time lands within 2*dt of a predicted echo time.
EchoReport detect_echoes(const TimeGrid& grid,
                         const std::vector<double>& magnitude,
                         const PulseSchedule& schedule,
                         double threshold_frac = 0.05);

// Vertex-refined maximum of |signal| within [t_expected - window,
// t_expected + window]; returns {time, amplitude}.
struct PeakFit {
    double time = 0.0;
    double amplitude = 0.0;
};
PeakFit peak_near(const TimeGrid& grid, const std::vector<double>& magnitude,
                  double t_expected, double window);

enum class ModelKind { two_level, three_level, effective };

const char* model_kind_name(ModelKind k);

struct EchoExperiment {
    ModelKind model = ModelKind::two_level;
    PulseSchedule schedule;
    DetuningGrid bands;
    BandApplyTo apply_to = BandApplyTo::delta1;
    // Static offsets and rates.  delta1/delta2 are the band-center detunings;
    // omega_b is the cw leg-b amplitude (cw mode) or the b:a envelope ratio
    // (follow_a).  The two-level model reads only delta1 of these.
    ThreeLevelParams base;
    LegBMode leg_b = LegBMode::cw;
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;  // 0 selects the sampling-based automatic step
    double threshold_frac = 0.05;
};

struct EchoResult {
    TimeGrid grid;
    std::vector<cxd> dipole;        // weighted band average of the coherence
    std::vector<double> magnitude;  // |dipole|
    EchoReport report;
    double dt_used = 0.0;
};

// Time step such that the fastest frequency in the run (generalized Rabi at
// the band edge, decay, or cw drive) advances at most 0.05 rad per step.
double auto_time_step(const EchoExperiment& ex);

// Per-band parameter mapping for the two detuning geometries.
ThreeLevelParams band_params(const ThreeLevelParams& base, double band,
                             BandApplyTo apply_to);

// Runs the experiment: per-band integration of the selected model, ensemble
// average, echo detection.  The observable is the radiating coherence:
// c1*conj(c2) for the two-level model, the optical-leg r13 for the Lambda
// model, and the doublet r12 for the reduced model (whose parent optical
// coherence was eliminated; infer_rho13 reconstructs it when needed).
EchoResult run_echo_experiment(const EchoExperiment& ex);

}  // namespace echosim
