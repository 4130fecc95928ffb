#pragma once
// Rotating-frame phase bookkeeping.  Each drive phase phi defines a diagonal
// unitary Q(phi) that maps lab-frame amplitudes into a frame where the Rabi
// frequency is real.  Evolving under a phased pulse is then: rotate into the
// pulse's frame, evolve with the real-drive propagator, and rotate back, so
// a pulse train only needs the relative rotations between consecutive frames
// plus one final rotation back to the lab frame at readout.

#include "echosim/types.hpp"

namespace echosim {

// Per-pixel field phases of the two optical legs.  Leg b is an unpatterned
// plane wave in the imaging setup, so phi_b is constant across pixels and
// frames; it is kept explicit anyway for the gauge tests.
struct PhasePair {
    double phi_a = 0.0;
    double phi_b = 0.0;
};

struct Frame2 {
    std::array<cxd, 2> d{cxd(1.0), cxd(1.0)};  // diagonal entries
    Frame2 inverse() const;
};

struct Frame3 {
    std::array<cxd, 3> d{cxd(1.0), cxd(1.0), cxd(1.0)};
    Frame3 inverse() const;
};

// Q(phi) = diag(e^{-i phi}, 1): the frame in which a drive of phase phi on
// the 1-2 leg looks real.
Frame2 q2(double phi);

// Q(phi_a, phi_b) = diag(e^{-i phi_a}, e^{-i phi_b}, 1) for the two optical
// legs of the Lambda system.
Frame3 q3(double phi_a, double phi_b);
Frame3 q3(const PhasePair& p);

// Rotation taking amplitudes expressed in frame `from` to frame `to`,
// i.e. Q_to * Q_from^{-1}.
Frame2 frame_rotation(const Frame2& to, const Frame2& from);
Frame3 frame_rotation(const Frame3& to, const Frame3& from);

StateVec2 apply_to_state(const Frame2& f, const StateVec2& s);
StateVec3 apply_to_state(const Frame3& f, const StateVec3& s);

// rho -> Q rho Q^H
DensityMatrix2 apply_to_density(const Frame2& f, const DensityMatrix2& r);
DensityMatrix3 apply_to_density(const Frame3& f, const DensityMatrix3& r);

}  // namespace echosim
