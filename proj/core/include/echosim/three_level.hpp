#pragma once
// Full Lambda-system dynamics: the rotated-frame Hamiltonian, the 9x9
// density-matrix generator, an independently constructed Lindblad generator
// used as a transcription guard, and the fixed-step master-equation
// integrator.  Rabi frequencies are real here; optical phases live in the
// Q-frame machinery (phase_frame.hpp).

#include <vector>

#include "echosim/pulse.hpp"
#include "echosim/time_grid.hpp"
#include "echosim/types.hpp"

namespace echosim {

struct ThreeLevelParams {
    double omega_a = 0.0;  // leg 1-3 Rabi frequency
    double omega_b = 0.0;  // leg 2-3 Rabi frequency
    double delta1 = 0.0;
    double delta2 = 0.0;
    double gamma = 0.0;  // decay rate of |3>, split equally to |1> and |2>

    double big_delta() const { return delta1 - delta2; }      // two-photon
    double common_delta() const { return 0.5 * (delta1 + delta2); }
};

// (1/2) [[Delta, 0, Omega_a], [0, -Delta, Omega_b], [Omega_a, Omega_b, -2*delta - i*Gamma]]
// Row-major 3x3.  The -i*Gamma entry makes this the non-Hermitian transient
// form; production dynamics use the 9x9 generator below.
std::array<cxd, 9> hamiltonian3(const ThreeLevelParams& p);

struct Liouvillian3 {
    // row-major 9x9 acting on (r11, r12, r13, r21, r22, r23, r31, r32, r33)
    std::array<cxd, 81> m{};
    cxd& operator()(int i, int j) { return m[9 * i + j]; }
    const cxd& operator()(int i, int j) const { return m[9 * i + j]; }

    void apply(const std::array<cxd, 9>& y, std::array<cxd, 9>& out) const;
    double max_abs_diff(const Liouvillian3& o) const;
};

// Direct transcription of the master-equation matrix (global factor 1/2).
// Two printed signs were corrected against the Lindblad construction below:
// the r21 diagonal is +i2*Delta and the r32 row couples to r12 with
// -i*Omega_a (see repo notes); with those fixes the two generators agree to
// machine precision.
Liouvillian3 liouvillian3(const ThreeLevelParams& p);

// The same generator assembled independently from
//   d rho/dt = -i[H, rho] + sum_k (C_k rho C_k^H - 1/2 {C_k^H C_k, rho})
// with the Hermitian part of the Hamiltonian and collapse operators
// sqrt(Gamma/2) |1><3| and sqrt(Gamma/2) |2><3|, vectorized row-major.
Liouvillian3 lindblad_crosscheck(const ThreeLevelParams& p);

// Exact propagator exp(L*tau) for a constant generator (free gaps, cw leg b).
std::array<cxd, 81> liouvillian_exp(const Liouvillian3& L, double tau);

struct Trajectory3 {
    TimeGrid grid;
    std::vector<DensityMatrix3> states;
};

// Whether the leg-b drive is a constant field over the whole run or shares
// the pulsed leg-a envelope (the degenerate single-beam configuration used
// for validity comparisons against the eliminated model).
enum class LegBMode { cw, follow_a };

// Classical 4th-order fixed-step integration of d vec(rho)/dt = L(t) vec(rho)
// with L rebuilt whenever Omega_a changes.  omega_b in `p` is the cw
// amplitude (ignored when mode is follow_a).  Trace, Hermiticity, and
// diagonal bounds are checked along the way; violations beyond 1e-6 throw
// SimulationError with the offending time.
Trajectory3 integrate_master3(const DensityMatrix3& initial,
                              const std::vector<PulseEnvelope>& leg_a_pulses,
                              const ThreeLevelParams& p, const TimeGrid& grid,
                              LegBMode mode = LegBMode::cw);

std::vector<cxd> coherence13(const Trajectory3& traj);
std::vector<cxd> coherence12(const Trajectory3& traj);

}  // namespace echosim
