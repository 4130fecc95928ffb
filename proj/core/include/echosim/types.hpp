#pragma once
// Shared numeric types: complex scalars, small state vectors, and the
// flattened density-matrix containers used by the master-equation models.

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace echosim {

using cxd = std::complex<double>;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Thrown for bad user input (configs, file formats, parameter ranges).
// Carries every issue found, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    explicit ValidationError(const std::string& issue)
        : ValidationError(std::vector<std::string>{issue}) {}
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& e : v) {
            if (!s.empty()) s += "; ";
            s += e;
        }
        return s;
    }
    std::vector<std::string> issues_;
};

// Thrown when a run fails numerically (undersampled grid, diverged
// integration).  Distinct from ValidationError so the CLI can map the two
// to different exit codes.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Pure-state amplitudes (c1, c2) and (c1, c2, c3).
using StateVec2 = std::array<cxd, 2>;
using StateVec3 = std::array<cxd, 3>;

inline double norm2(const StateVec2& s) {
    return std::norm(s[0]) + std::norm(s[1]);
}
inline double norm2(const StateVec3& s) {
    return std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]);
}

// Density matrices stored row-major, so the flat view of the 3x3 case is
// (r11, r12, r13, r21, r22, r23, r31, r32, r33) and the 2x2 case is
// (r11, r12, r21, r22).  The master-equation generators use these orderings.
struct DensityMatrix2 {
    std::array<cxd, 4> v{};
    cxd& operator()(int i, int j) { return v[2 * i + j]; }
    const cxd& operator()(int i, int j) const { return v[2 * i + j]; }
    static DensityMatrix2 ground() {
        DensityMatrix2 r;
        r.v[0] = 1.0;
        return r;
    }
};

struct DensityMatrix3 {
    std::array<cxd, 9> v{};
    cxd& operator()(int i, int j) { return v[3 * i + j]; }
    const cxd& operator()(int i, int j) const { return v[3 * i + j]; }
    static DensityMatrix3 ground() {
        DensityMatrix3 r;
        r.v[0] = 1.0;
        return r;
    }
};

inline cxd trace(const DensityMatrix2& r) { return r.v[0] + r.v[3]; }
inline cxd trace(const DensityMatrix3& r) { return r.v[0] + r.v[4] + r.v[8]; }

// Largest |r_ij - conj(r_ji)| over the off-diagonal pairs.
inline double hermiticity_defect(const DensityMatrix2& r) {
    return std::abs(r.v[1] - std::conj(r.v[2]));
}
inline double hermiticity_defect(const DensityMatrix3& r) {
    double d = std::abs(r(0, 1) - std::conj(r(1, 0)));
    d = std::max(d, std::abs(r(0, 2) - std::conj(r(2, 0))));
    d = std::max(d, std::abs(r(1, 2) - std::conj(r(2, 1))));
    return d;
}

}  // namespace echosim
