#include "echosim/three_level.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>

namespace echosim {

namespace {

using Mat3 = Eigen::Matrix3cd;
using Mat9 = Eigen::Matrix<cxd, 9, 9, Eigen::RowMajor>;

constexpr cxd kI{0.0, 1.0};

std::string format_time(double t) {
    std::ostringstream os;
    os.precision(6);
    os << t;
    return os.str();
}

}  // namespace

std::array<cxd, 9> hamiltonian3(const ThreeLevelParams& p) {
    const double D = p.big_delta();
    const double d = p.common_delta();
    std::array<cxd, 9> h{};
    h[0] = 0.5 * D;
    h[2] = 0.5 * p.omega_a;
    h[4] = -0.5 * D;
    h[5] = 0.5 * p.omega_b;
    h[6] = 0.5 * p.omega_a;
    h[7] = 0.5 * p.omega_b;
    h[8] = 0.5 * (-2.0 * d - kI * p.gamma);
    return h;
}

void Liouvillian3::apply(const std::array<cxd, 9>& y,
                         std::array<cxd, 9>& out) const {
    for (int i = 0; i < 9; ++i) {
        cxd acc = 0.0;
        const cxd* row = m.data() + 9 * i;
        for (int j = 0; j < 9; ++j) acc += row[j] * y[j];
        out[i] = acc;
    }
}

double Liouvillian3::max_abs_diff(const Liouvillian3& o) const {
    double d = 0.0;
    for (int k = 0; k < 81; ++k) d = std::max(d, std::abs(m[k] - o.m[k]));
    return d;
}

Liouvillian3 liouvillian3(const ThreeLevelParams& p) {
    const cxd iOa = kI * p.omega_a;
    const cxd iOb = kI * p.omega_b;
    const cxd i2D = 2.0 * kI * p.big_delta();
    const cxd i2d1 = 2.0 * kI * p.delta1;
    const cxd i2d2 = 2.0 * kI * p.delta2;
    const double G = p.gamma;

    Liouvillian3 L;
    // basis order (r11, r12, r13, r21, r22, r23, r31, r32, r33)
    L(0, 2) = iOa;
    L(0, 6) = -iOa;
    L(0, 8) = G;

    L(1, 1) = -i2D;
    L(1, 2) = iOb;
    L(1, 7) = -iOa;

    L(2, 0) = iOa;
    L(2, 1) = iOb;
    L(2, 2) = -i2d1 - G;
    L(2, 8) = -iOa;

    L(3, 3) = i2D;
    L(3, 5) = iOa;
    L(3, 6) = -iOb;

    L(4, 5) = iOb;
    L(4, 7) = -iOb;
    L(4, 8) = G;

    L(5, 3) = iOa;
    L(5, 4) = iOb;
    L(5, 5) = -i2d2 - G;
    L(5, 8) = -iOb;

    L(6, 0) = -iOa;
    L(6, 3) = -iOb;
    L(6, 6) = i2d1 - G;
    L(6, 8) = iOa;

    L(7, 1) = -iOa;
    L(7, 4) = -iOb;
    L(7, 7) = i2d2 - G;
    L(7, 8) = iOb;

    L(8, 2) = -iOa;
    L(8, 5) = -iOb;
    L(8, 6) = iOa;
    L(8, 7) = iOb;
    L(8, 8) = -2.0 * G;

    for (auto& e : L.m) e *= 0.5;
    return L;
}

Liouvillian3 lindblad_crosscheck(const ThreeLevelParams& p) {
    const double D = p.big_delta();
    const double d = p.common_delta();

    Mat3 H = Mat3::Zero();
    H(0, 0) = 0.5 * D;
    H(0, 2) = 0.5 * p.omega_a;
    H(1, 1) = -0.5 * D;
    H(1, 2) = 0.5 * p.omega_b;
    H(2, 0) = 0.5 * p.omega_a;
    H(2, 1) = 0.5 * p.omega_b;
    H(2, 2) = -d;

    const double amp = std::sqrt(0.5 * p.gamma);
    Mat3 c1 = Mat3::Zero();
    c1(0, 2) = amp;  // |1><3|
    Mat3 c2 = Mat3::Zero();
    c2(1, 2) = amp;  // |2><3|

    const Mat3 id = Mat3::Identity();
    auto kron = [](const Mat3& a, const Mat3& b) {
        Mat9 out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        out(3 * i + k, 3 * j + l) = a(i, j) * b(k, l);
        return out;
    };

    // row-major vec(rho): vec(A rho B) = (A kron B^T) vec(rho)
    Mat9 L = -kI * (kron(H, id) - kron(id, H.transpose()));
    for (const Mat3& c : {c1, c2}) {
        const Mat3 cd_c = c.adjoint() * c;
        L += kron(c, c.conjugate());
        L -= 0.5 * (kron(cd_c, id) + kron(id, cd_c.transpose()));
    }

    Liouvillian3 out;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) out(i, j) = L(i, j);
    return out;
}

std::array<cxd, 81> liouvillian_exp(const Liouvillian3& L, double tau) {
    Mat9 m;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) m(i, j) = tau * L(i, j);
    const Mat9 e = m.exp();
    std::array<cxd, 81> out;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) out[9 * i + j] = e(i, j);
    return out;
}

Trajectory3 integrate_master3(const DensityMatrix3& initial,
                              const std::vector<PulseEnvelope>& leg_a_pulses,
                              const ThreeLevelParams& p, const TimeGrid& grid,
                              LegBMode mode) {
    double peak = 0.0;
    for (const auto& pl : leg_a_pulses) peak += std::abs(pl.peak_rabi);
    const double ratio = (mode == LegBMode::follow_a) ? p.omega_b : 0.0;
    const double omega_max = std::hypot(peak, ratio * peak);
    const double delta_max = std::max(std::abs(p.delta1), std::abs(p.delta2));
    check_sampling(grid.dt, std::max({std::hypot(omega_max, delta_max),
                                      p.gamma, std::abs(p.omega_b)}));

    // The generator is linear in the drives, so split it once into the static
    // part (detunings, decay, cw leg b) and a unit-drive part scaled by the
    // instantaneous envelope.  In follow_a mode leg b rides the same envelope
    // with omega_b acting as the b:a amplitude ratio.
    ThreeLevelParams ps = p;
    ps.omega_a = 0.0;
    if (mode == LegBMode::follow_a) ps.omega_b = 0.0;
    const Liouvillian3 Lb = liouvillian3(ps);

    ThreeLevelParams pu;
    pu.omega_a = 1.0;
    pu.omega_b = (mode == LegBMode::follow_a) ? p.omega_b : 0.0;
    const Liouvillian3 La = liouvillian3(pu);

    auto drive_at = [&](double t) {
        double om = 0.0;
        for (const auto& pl : leg_a_pulses) om += envelope_value(pl, t);
        return om;
    };

    Liouvillian3 Lc;
    double cached = std::numeric_limits<double>::quiet_NaN();
    auto rhs = [&](double t, const std::array<cxd, 9>& y,
                   std::array<cxd, 9>& out) {
        const double om = drive_at(t);
        if (om != cached) {
            for (int k = 0; k < 81; ++k) Lc.m[k] = Lb.m[k] + om * La.m[k];
            cached = om;
        }
        Lc.apply(y, out);
    };

    Trajectory3 traj;
    traj.grid = grid;
    traj.states.resize(grid.n_steps + 1);
    traj.states[0] = initial;

    const double dt = grid.dt;
    std::array<cxd, 9> y = initial.v, k1, k2, k3, k4, tmp;
    for (std::int64_t n = 0; n < grid.n_steps; ++n) {
        const double t0 = grid.t(n);
        rhs(t0, y, k1);
        for (int i = 0; i < 9; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        rhs(t0 + 0.5 * dt, tmp, k2);
        for (int i = 0; i < 9; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        rhs(t0 + 0.5 * dt, tmp, k3);
        for (int i = 0; i < 9; ++i) tmp[i] = y[i] + dt * k3[i];
        rhs(t0 + dt, tmp, k4);
        for (int i = 0; i < 9; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

        DensityMatrix3& s = traj.states[n + 1];
        s.v = y;
        const double tr_err = std::abs(trace(s) - 1.0);
        const double herm = hermiticity_defect(s);
        const double pop_min = std::min({s.v[0].real(), s.v[4].real(),
                                         s.v[8].real()});
        if (tr_err > 1e-6 || herm > 1e-6 || pop_min < -1e-6) {
            throw SimulationError("integration diverged at t = " +
                                  format_time(grid.t(n + 1)) +
                                  " (trace error " + format_time(tr_err) +
                                  ", hermiticity " + format_time(herm) + ")");
        }
    }
    return traj;
}

std::vector<cxd> coherence13(const Trajectory3& traj) {
    std::vector<cxd> out(traj.states.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = traj.states[k].v[2];
    return out;
}

std::vector<cxd> coherence12(const Trajectory3& traj) {
    std::vector<cxd> out(traj.states.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = traj.states[k].v[1];
    return out;
}

}  // namespace echosim
