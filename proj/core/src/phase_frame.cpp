#include "echosim/phase_frame.hpp"

#include <complex>

namespace echosim {

Frame2 Frame2::inverse() const {
    return {{std::conj(d[0]), std::conj(d[1])}};
}

Frame3 Frame3::inverse() const {
    return {{std::conj(d[0]), std::conj(d[1]), std::conj(d[2])}};
}

Frame2 q2(double phi) {
    return {{std::polar(1.0, -phi), cxd(1.0)}};
}

Frame3 q3(double phi_a, double phi_b) {
    return {{std::polar(1.0, -phi_a), std::polar(1.0, -phi_b), cxd(1.0)}};
}

Frame3 q3(const PhasePair& p) { return q3(p.phi_a, p.phi_b); }

Frame2 frame_rotation(const Frame2& to, const Frame2& from) {
    return {{to.d[0] * std::conj(from.d[0]), to.d[1] * std::conj(from.d[1])}};
}

Frame3 frame_rotation(const Frame3& to, const Frame3& from) {
    return {{to.d[0] * std::conj(from.d[0]), to.d[1] * std::conj(from.d[1]),
             to.d[2] * std::conj(from.d[2])}};
}

StateVec2 apply_to_state(const Frame2& f, const StateVec2& s) {
    return {f.d[0] * s[0], f.d[1] * s[1]};
}

StateVec3 apply_to_state(const Frame3& f, const StateVec3& s) {
    return {f.d[0] * s[0], f.d[1] * s[1], f.d[2] * s[2]};
}

DensityMatrix2 apply_to_density(const Frame2& f, const DensityMatrix2& r) {
    DensityMatrix2 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = f.d[i] * r(i, j) * std::conj(f.d[j]);
    return out;
}

DensityMatrix3 apply_to_density(const Frame3& f, const DensityMatrix3& r) {
    DensityMatrix3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out(i, j) = f.d[i] * r(i, j) * std::conj(f.d[j]);
    return out;
}

}  // namespace echosim
