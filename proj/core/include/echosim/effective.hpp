#pragma once
// Far-detuned reduction of the Lambda system to an effective two-level model
// on the ground doublet.  Both optical legs share one envelope, so the
// two-photon drive and the scattering loss scale with the squared
// instantaneous Rabi frequency.

#include <vector>

#include "echosim/pulse.hpp"
#include "echosim/three_level.hpp"
#include "echosim/time_grid.hpp"
#include "echosim/types.hpp"

namespace echosim {

struct EffectiveParams {
    double two_photon = 0.0;    // delta1 - delta2, the in-doublet detuning
    double delta_avg = 0.0;     // (delta1 + delta2)/2
    double gamma = 0.0;         // upper-state decay of the parent model
    cxd eta{};                  // 1/(2*delta_avg + i*gamma)
    double decay_factor = 0.0;  // gamma / (4*delta_avg^2 + gamma^2)

    // Instantaneous effective drive and loss for squared Rabi om2 = omega^2.
    cxd omega_eff(double om2) const { return om2 * eta; }
    double gamma_eff(double om2) const { return om2 * decay_factor; }
};

// Maps the full parameters onto the reduced ones.  Requires a usable
// elimination denominator: delta_avg and gamma must not both vanish.
EffectiveParams effective_params(const ThreeLevelParams& p);

struct EffectiveTrajectory {
    TimeGrid grid;
    std::vector<DensityMatrix2> states;
};

// Fixed-step 4th-order integration of the reduced master equation for
// (r11, r12, r21, r22).  `pulses` is the shared leg envelope; the drive
// enters as envelope^2 * eta and the loss as envelope^2 * decay_factor.
EffectiveTrajectory integrate_effective(const DensityMatrix2& initial,
                                        const std::vector<PulseEnvelope>& pulses,
                                        const EffectiveParams& p,
                                        const TimeGrid& grid);

std::vector<cxd> coherence12(const EffectiveTrajectory& traj);

// Peak single-leg Rabi frequency whose squared envelope integrates to the
// requested two-photon pulse area at elimination factor eta, i.e. solves
// peak^2 * |eta| * S = area_eff with S the squared-envelope area (duration
// for rectangular, width*sqrt(pi/2) for gaussian).
double effective_peak_for_area(PulseShape shape, double width,
                               double area_eff, cxd eta);

// Reconstructs the optical coherence r13 that the reduced model eliminated:
// r13 = r12 * omega_b / (2*delta_avg - i*gamma).  Accurate once the upper
// state is empty and pulse transients have decayed (several 1/gamma after
// the last pulse edge).
cxd infer_rho13(cxd rho12, double omega_b, double delta_avg, double gamma);

}  // namespace echosim
