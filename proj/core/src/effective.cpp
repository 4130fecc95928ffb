#include "echosim/effective.hpp"

#include <cmath>
#include <limits>

namespace echosim {

namespace {
constexpr cxd kI{0.0, 1.0};
}

EffectiveParams effective_params(const ThreeLevelParams& p) {
    EffectiveParams e;
    e.two_photon = p.big_delta();
    e.delta_avg = p.common_delta();
    e.gamma = p.gamma;
    const double denom = 4.0 * e.delta_avg * e.delta_avg + e.gamma * e.gamma;
    if (denom == 0.0) {
        throw ValidationError(
            "effective model undefined: average detuning and gamma are both "
            "zero");
    }
    e.eta = 1.0 / (2.0 * e.delta_avg + kI * e.gamma);
    e.decay_factor = e.gamma / denom;
    return e;
}

EffectiveTrajectory integrate_effective(const DensityMatrix2& initial,
                                        const std::vector<PulseEnvelope>& pulses,
                                        const EffectiveParams& p,
                                        const TimeGrid& grid) {
    double peak = 0.0;
    for (const auto& pl : pulses) peak += std::abs(pl.peak_rabi);
    const double om2_peak = peak * peak;
    check_sampling(grid.dt,
                   std::max(std::hypot(om2_peak * std::abs(p.eta),
                                       std::abs(p.two_photon)),
                            om2_peak * p.decay_factor));

    auto om2_at = [&](double t) {
        double om = 0.0;
        for (const auto& pl : pulses) om += envelope_value(pl, t);
        return om * om;
    };

    const cxd i2D = 2.0 * kI * p.two_photon;
    auto rhs = [&](double t, const std::array<cxd, 4>& y,
                   std::array<cxd, 4>& out) {
        const double om2 = om2_at(t);
        const cxd oe = om2 * p.eta;
        const double ge = om2 * p.decay_factor;
        const cxd oec = std::conj(oe);
        // (r11, r12, r21, r22); populations exchange through the scattering
        // channel, the coherence precesses at the two-photon splitting.
        out[0] = 0.5 * (-2.0 * ge * y[0] + kI * oec * y[1] - kI * oe * y[2] +
                        2.0 * ge * y[3]);
        out[1] = 0.5 * (kI * oe * y[0] + (-2.0 * ge - i2D) * y[1] -
                        kI * oe * y[3]);
        out[2] = 0.5 * (-kI * oec * y[0] + (-2.0 * ge + i2D) * y[2] +
                        kI * oec * y[3]);
        out[3] = -out[0];
    };

    EffectiveTrajectory traj;
    traj.grid = grid;
    traj.states.resize(grid.n_steps + 1);
    traj.states[0] = initial;

    const double dt = grid.dt;
    std::array<cxd, 4> y = initial.v, k1, k2, k3, k4, tmp;
    for (std::int64_t n = 0; n < grid.n_steps; ++n) {
        const double t0 = grid.t(n);
        rhs(t0, y, k1);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        rhs(t0 + 0.5 * dt, tmp, k2);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        rhs(t0 + 0.5 * dt, tmp, k3);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + dt * k3[i];
        rhs(t0 + dt, tmp, k4);
        for (int i = 0; i < 4; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

        DensityMatrix2& s = traj.states[n + 1];
        s.v = y;
        const double tr_err = std::abs(trace(s) - 1.0);
        if (tr_err > 1e-6 || hermiticity_defect(s) > 1e-6) {
            throw SimulationError("integration diverged at t = " +
                                  std::to_string(grid.t(n + 1)));
        }
    }
    return traj;
}

std::vector<cxd> coherence12(const EffectiveTrajectory& traj) {
    std::vector<cxd> out(traj.states.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = traj.states[k].v[1];
    return out;
}

double effective_peak_for_area(PulseShape shape, double width,
                               double area_eff, cxd eta) {
    if (width <= 0.0) throw ValidationError("effective pulse width must be positive");
    if (area_eff <= 0.0) throw ValidationError("effective pulse area must be positive");
    const double s = shape == PulseShape::rectangular
                         ? width
                         : width * std::sqrt(0.5 * kPi);
    return std::sqrt(area_eff / (std::abs(eta) * s));
}

cxd infer_rho13(cxd rho12, double omega_b, double delta_avg, double gamma) {
    return rho12 * omega_b / cxd(2.0 * delta_avg, -gamma);
}

}  // namespace echosim
