#include "echosim/phase_frame.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "echosim/three_level.hpp"
#include "echosim/two_level.hpp"
#include "echosim/types.hpp"

using namespace echosim;

namespace {

// Lab-frame evolution of a three-phase pulse train: complex-drive propagators
// for the pulses, plain detuning rotation for the gaps.
StateVec2 direct_train(double om, double delta, const double (&phi)[3],
                       const double (&tau)[3], double gap) {
    StateVec2 s{1.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        s = propagator_complex(om * std::polar(1.0, phi[k]), delta, tau[k]).apply(s);
        if (k < 2) s = propagator({0.0, delta}, gap).apply(s);
    }
    return s;
}

// Same train computed the way the imaging engine does: real-drive propagators
// inside each pulse's own frame, relative frame rotations in between, one
// inverse rotation at the end.
StateVec2 framed_train(double om, double delta, const double (&phi)[3],
                       const double (&tau)[3], double gap, bool correct) {
    StateVec2 s = apply_to_state(q2(phi[0]), {1.0, 0.0});
    for (int k = 0; k < 3; ++k) {
        s = propagator({om, delta}, tau[k]).apply(s);
        if (k < 2) {
            s = propagator({0.0, delta}, gap).apply(s);
            if (correct) s = apply_to_state(frame_rotation(q2(phi[k + 1]), q2(phi[k])), s);
        }
    }
    return apply_to_state(q2(phi[2]).inverse(), s);
}

}  // namespace

TEST_CASE("frame matrices and rotations compose as advertised") {
    const Frame2 f = q2(0.7);
    CHECK(std::abs(f.d[0] - std::polar(1.0, -0.7)) < 1e-15);
    CHECK(std::abs(f.d[1] - 1.0) < 1e-15);
    const Frame2 r = frame_rotation(q2(1.9), q2(0.7));
    CHECK(std::abs(r.d[0] - std::polar(1.0, -1.2)) < 1e-15);

    const Frame3 g = q3(0.7, -0.4);
    CHECK(std::abs(g.d[0] - std::polar(1.0, -0.7)) < 1e-15);
    CHECK(std::abs(g.d[1] - std::polar(1.0, 0.4)) < 1e-15);
    CHECK(std::abs(g.d[2] - 1.0) < 1e-15);

    // inverse really is the inverse
    const Frame3 gi = g.inverse();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g.d[i] * gi.d[i] - 1.0) < 1e-15);
}

TEST_CASE("density conjugation matches the state map") {
    const Frame3 f = q3(0.9, -1.3);
    const StateVec3 psi{cxd(0.6, 0.1), cxd(0.2, -0.5), cxd(0.3, 0.4)};
    const StateVec3 fpsi = apply_to_state(f, psi);
    DensityMatrix3 rho;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rho.v[3 * i + j] = psi[i] * std::conj(psi[j]);
    const DensityMatrix3 frho = apply_to_density(f, rho);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(frho.v[3 * i + j] - fpsi[i] * std::conj(fpsi[j])) < 1e-15);
}

TEST_CASE("framed pulse train reproduces the lab-frame train") {
    const double phi[3] = {0.8, -1.3, 2.0};
    const double tau[3] = {0.4, 0.25, 0.6};
    const StateVec2 lab = direct_train(1.9, 0.7, phi, tau, 1.1);
    const StateVec2 framed = framed_train(1.9, 0.7, phi, tau, 1.1, true);
    CHECK(std::abs(lab[0] - framed[0]) < 1e-12);
    CHECK(std::abs(lab[1] - framed[1]) < 1e-12);
    CHECK(std::abs(std::norm(lab[0]) - std::norm(framed[0])) < 1e-10);
    CHECK(std::abs(std::norm(lab[1]) - std::norm(framed[1])) < 1e-10);
}

TEST_CASE("dropping the frame rotation at a quarter-wave shift is visible") {
    const double phi[3] = {0.0, std::numbers::pi / 2, 0.0};
    const double tau[3] = {0.4, 0.25, 0.6};
    const StateVec2 lab = direct_train(1.9, 0.7, phi, tau, 1.1);
    const StateVec2 wrong = framed_train(1.9, 0.7, phi, tau, 1.1, false);
    const double dev = std::abs(std::norm(lab[1]) - std::norm(wrong[1]));
    CHECK(dev > 1e-3);
}

TEST_CASE("phased generator is the conjugated real generator") {
    // Lindblad generator for complex drives, assembled from scratch with
    // row-major vectorization: -i(H x I - I x H^T) plus the dissipator.
    const double oa = 1.3, ob = 0.7, phia = 0.9, phib = -0.6;
    const ThreeLevelParams real_p{oa, ob, 1.1, -0.4, 0.8};

    std::array<cxd, 9> H{};
    const double D = real_p.big_delta(), dc = real_p.common_delta();
    const cxd za = 0.5 * oa * std::polar(1.0, phia);
    const cxd zb = 0.5 * ob * std::polar(1.0, phib);
    H[0] = 0.5 * D;
    H[4] = -0.5 * D;
    H[8] = -dc;
    H[2] = za;
    H[6] = std::conj(za);
    H[5] = zb;
    H[7] = std::conj(zb);

    std::array<cxd, 81> L{};
    auto idx = [](int i, int j) { return 3 * i + j; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                // -i H rho: row (i,j) <- (i,j) from H[i,k] rho[k,j]
                L[9 * idx(i, j) + idx(k, j)] += cxd(0, -1) * H[idx(i, k)];
                // +i rho H: rho[i,k] H[k,j]
                L[9 * idx(i, j) + idx(i, k)] += cxd(0, 1) * H[idx(k, j)];
            }
    // collapse sqrt(G/2)|1><3| and sqrt(G/2)|2><3|: C rho C^H feeds rho33
    // into rho11 and rho22; the anticommutator drains row and column 3.
    const double g = real_p.gamma;
    L[9 * idx(0, 0) + idx(2, 2)] += 0.5 * g;
    L[9 * idx(1, 1) + idx(2, 2)] += 0.5 * g;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double drain = 0.0;  // (1/2){C^H C, .} with sum C^H C = g |3><3|
            if (i == 2) drain += 0.5 * g;
            if (j == 2) drain += 0.5 * g;
            L[9 * idx(i, j) + idx(i, j)] -= drain;
        }

    // conjugate the real-drive production generator by Q(phia, phib)
    const Liouvillian3 Lr = liouvillian3(real_p);
    const Frame3 q = q3(phia, phib);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    // vec(Q^H sigma Q) transforms with the inverse phases
                    const cxd scale = std::conj(q.d[i]) * q.d[j] * q.d[k] *
                                      std::conj(q.d[l]);
                    const cxd got = scale * Lr(idx(i, j), idx(k, l));
                    worst = std::max(worst,
                                     std::abs(got - L[9 * idx(i, j) + idx(k, l)]));
                }
    CHECK(worst < 1e-13);
}
