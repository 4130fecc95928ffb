#pragma once
// Decay-free two-level dynamics via the closed-form one-step propagator.
// Gaussian pulses are evolved by midpoint-sampled piecewise-constant steps
// of the same exact propagator, so a constant drive is integrated exactly
// and a shaped one converges with the envelope sampling.

#include <vector>

#include "echosim/pulse.hpp"
#include "echosim/time_grid.hpp"
#include "echosim/types.hpp"

namespace echosim {

struct TwoLevelParams {
    double omega0 = 0.0;  // Rabi frequency
    double delta = 0.0;   // detuning (ensemble use: effective -k*v)
};

struct Propagator2 {
    cxd u11, u12, u21, u22;

    StateVec2 apply(const StateVec2& s) const {
        return {u11 * s[0] + u12 * s[1], u21 * s[0] + u22 * s[1]};
    }
    Propagator2 compose(const Propagator2& first) const {
        // this * first
        return {u11 * first.u11 + u12 * first.u21, u11 * first.u12 + u12 * first.u22,
                u21 * first.u11 + u22 * first.u21, u21 * first.u12 + u22 * first.u22};
    }
    double unitarity_defect() const;
};

// U = e^{i delta tau/2} [[cos th - i(delta/W)sin th, -i(Omega/W)sin th],
//                        [-i(Omega/W)sin th,  cos th + i(delta/W)sin th]]
// with W = sqrt(Omega^2 + delta^2), th = W tau / 2.  The W = 0 case is the
// analytic limit (identity up to the detuning phase), not a regularization.
Propagator2 propagator(const TwoLevelParams& p, double tau);

// Same propagator for a complex Rabi frequency (phase on the drive): the
// lower coupling picks up the conjugate, keeping U unitary.
Propagator2 propagator_complex(cxd omega, double delta, double tau);

struct Trajectory2 {
    TimeGrid grid;
    std::vector<StateVec2> states;  // n_steps + 1 entries
};

// Evolves through the summed leg-a envelopes of `pulses` at fixed detuning.
// The envelope is sampled at step midpoints; steps with zero drive advance
// by the exact free rotation.  Throws SimulationError when undersampled.
Trajectory2 evolve_sequence(const StateVec2& initial,
                            const std::vector<PulseEnvelope>& pulses,
                            double delta, const TimeGrid& grid);

// rho12(t) = c1(t) * conj(c2(t))
std::vector<cxd> coherence12(const Trajectory2& traj);

}  // namespace echosim
