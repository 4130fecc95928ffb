#include "echosim/two_level.hpp"

#include <cmath>

namespace echosim {

double Propagator2::unitarity_defect() const {
    // || U^H U - I ||_max
    const cxd a = std::conj(u11) * u11 + std::conj(u21) * u21 - 1.0;
    const cxd b = std::conj(u11) * u12 + std::conj(u21) * u22;
    const cxd c = std::conj(u12) * u11 + std::conj(u22) * u21;
    const cxd d = std::conj(u12) * u12 + std::conj(u22) * u22 - 1.0;
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
}

Propagator2 propagator_complex(cxd omega, double delta, double tau) {
    if (tau < 0.0) throw ValidationError("propagator: negative duration");
    const double mag = std::abs(omega);
    const double W = std::sqrt(mag * mag + delta * delta);
    const cxd pref = std::polar(1.0, 0.5 * delta * tau);
    if (W == 0.0) return {pref, 0.0, 0.0, pref};
    const double th = 0.5 * W * tau;
    const double ct = std::cos(th), st = std::sin(th);
    const cxd i{0.0, 1.0};
    const double ds = delta / W;
    return {pref * (ct - i * ds * st), pref * (-i * (omega / W) * st),
            pref * (-i * (std::conj(omega) / W) * st), pref * (ct + i * ds * st)};
}

Propagator2 propagator(const TwoLevelParams& p, double tau) {
    return propagator_complex(cxd{p.omega0, 0.0}, p.delta, tau);
}

Trajectory2 evolve_sequence(const StateVec2& initial,
                            const std::vector<PulseEnvelope>& pulses,
                            double delta, const TimeGrid& grid) {
    double peak = 0.0;
    for (const auto& p : pulses) peak = std::max(peak, std::abs(p.peak_rabi));
    check_sampling(grid.dt, std::sqrt(peak * peak + delta * delta));

    Trajectory2 traj;
    traj.grid = grid;
    traj.states.resize(static_cast<std::size_t>(grid.n_steps) + 1);
    traj.states[0] = initial;

    const double dt = grid.dt;
    const cxd free_rot = std::polar(1.0, delta * dt);
    StateVec2 s = initial;
    for (std::int64_t k = 0; k < grid.n_steps; ++k) {
        const double tm = grid.t(k) + 0.5 * dt;
        double om = 0.0;
        for (const auto& p : pulses) om += envelope_value(p, tm);
        if (om == 0.0) {
            s[1] *= free_rot;  // exact free evolution, c1 untouched
        } else {
            s = propagator_complex(cxd{om, 0.0}, delta, dt).apply(s);
        }
        traj.states[static_cast<std::size_t>(k) + 1] = s;
    }
    return traj;
}

std::vector<cxd> coherence12(const Trajectory2& traj) {
    std::vector<cxd> out(traj.states.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = traj.states[k][0] * std::conj(traj.states[k][1]);
    return out;
}

}  // namespace echosim
