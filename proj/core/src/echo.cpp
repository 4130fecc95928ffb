#include "echosim/echo.hpp"

#include <algorithm>
#include <cmath>

#include "echosim/parallel.hpp"

namespace echosim {

namespace {

// Quadratic vertex through (y0, y1, y2) around sample i; falls back to the
// raw sample when the parabola degenerates.
PeakFit vertex_fit(const TimeGrid& grid, const std::vector<double>& y,
                   std::size_t i) {
    PeakFit f{grid.t(static_cast<std::int64_t>(i)), y[i]};
    if (i == 0 || i + 1 >= y.size()) return f;
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom == 0.0) return f;
    const double off = 0.5 * (y0 - y2) / denom;
    f.time += off * grid.dt;
    f.amplitude = y1 - 0.25 * (y0 - y2) * off;
    return f;
}

}  // namespace

const char* echo_kind_name(EchoKind k) {
    switch (k) {
        case EchoKind::stimulated: return "stimulated";
        case EchoKind::two_pulse_ab: return "two_pulse_ab";
        case EchoKind::two_pulse_bc: return "two_pulse_bc";
        case EchoKind::two_pulse_ac: return "two_pulse_ac";
        default: return "unidentified";
    }
}

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::two_level: return "two_level";
        case ModelKind::three_level: return "three_level";
        default: return "effective";
    }
}

const EchoPeak* EchoReport::find(EchoKind k) const {
    for (const auto& p : peaks)
        if (p.kind == k) return &p;
    return nullptr;
}

EchoReport detect_echoes(const TimeGrid& grid,
                         const std::vector<double>& magnitude,
                         const PulseSchedule& schedule,
                         double threshold_frac) {
    if (magnitude.size() != static_cast<std::size_t>(grid.n_steps) + 1)
        throw ValidationError("detect_echoes: signal length does not match grid");

    // Zero out the driven intervals (plus a small pad for the switching
    // transient) so only free-evolution features can register as peaks.
    constexpr double kMaskPad = 0.05;
    std::vector<double> y = magnitude;
    for (const auto& p : schedule.leg_a_pulses()) {
        const double half = support_halfwidth(p) + kMaskPad;
        const auto lo = static_cast<std::int64_t>(
            std::ceil((p.center - half - grid.t_start) / grid.dt));
        const auto hi = static_cast<std::int64_t>(
            std::floor((p.center + half - grid.t_start) / grid.dt));
        for (std::int64_t k = std::max<std::int64_t>(lo, 0);
             k <= std::min(hi, grid.n_steps); ++k)
            y[static_cast<std::size_t>(k)] = 0.0;
    }

    EchoReport report;
    const double peak_max = *std::max_element(y.begin(), y.end());
    report.threshold = threshold_frac * peak_max;
    if (peak_max == 0.0) return report;

    const struct {
        EchoKind kind;
        double time;
    } expected[] = {
        {EchoKind::two_pulse_ab, 2.0 * schedule.t2() - schedule.t1()},
        {EchoKind::two_pulse_bc, 2.0 * schedule.t3() - schedule.t2()},
        {EchoKind::two_pulse_ac, 2.0 * schedule.t3() - schedule.t1()},
        {EchoKind::stimulated, schedule.t4()},
    };

    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
        if (y[i] < report.threshold) continue;
        EchoPeak pk;
        const PeakFit fit = vertex_fit(grid, y, i);
        pk.time = fit.time;
        pk.amplitude = fit.amplitude;
        double best = 2.0 * grid.dt;  // matching tolerance
        for (const auto& e : expected) {
            const double err = std::abs(fit.time - e.time);
            if (err <= best) {
                best = err;
                pk.kind = e.kind;
                pk.expected_time = e.time;
            }
        }
        report.peaks.push_back(pk);
    }
    return report;
}

PeakFit peak_near(const TimeGrid& grid, const std::vector<double>& magnitude,
                  double t_expected, double window) {
    const auto n = static_cast<std::int64_t>(magnitude.size());
    auto clamp = [&](double t) {
        return std::min<std::int64_t>(
            n - 1, std::max<std::int64_t>(
                       0, static_cast<std::int64_t>(
                              std::llround((t - grid.t_start) / grid.dt))));
    };
    const std::int64_t lo = clamp(t_expected - window);
    const std::int64_t hi = clamp(t_expected + window);
    if (hi < lo) throw ValidationError("peak_near: window outside the grid");

    std::int64_t best = lo;
    for (std::int64_t k = lo; k <= hi; ++k)
        if (magnitude[static_cast<std::size_t>(k)] >
            magnitude[static_cast<std::size_t>(best)])
            best = k;
    return vertex_fit(grid, magnitude, static_cast<std::size_t>(best));
}

ThreeLevelParams band_params(const ThreeLevelParams& base, double band,
                             BandApplyTo apply_to) {
    ThreeLevelParams p = base;
    p.delta1 += band;
    if (apply_to == BandApplyTo::common_mode) p.delta2 += band;
    return p;
}

double auto_time_step(const EchoExperiment& ex) {
    double peak = 0.0;
    for (const auto& p : ex.schedule.leg_a_pulses())
        peak = std::max(peak, std::abs(p.peak_rabi));

    double delta_max = 0.0;
    for (double b : ex.bands.deltas) {
        const ThreeLevelParams bp = band_params(ex.base, b, ex.apply_to);
        delta_max = std::max({delta_max, std::abs(bp.delta1), std::abs(bp.delta2)});
    }

    double f_max;
    if (ex.model == ModelKind::effective) {
        // fastest band: largest |eta| and two-photon splitting over the comb
        double oe_peak = 0.0, dd_max = 0.0, ge_peak = 0.0;
        for (double b : ex.bands.deltas) {
            const EffectiveParams ep =
                effective_params(band_params(ex.base, b, ex.apply_to));
            oe_peak = std::max(oe_peak, peak * peak * std::abs(ep.eta));
            ge_peak = std::max(ge_peak, ep.gamma_eff(peak * peak));
            dd_max = std::max(dd_max, std::abs(ep.two_photon));
        }
        f_max = std::max(std::hypot(oe_peak, dd_max), ge_peak);
    } else {
        const double ratio = (ex.leg_b == LegBMode::follow_a) ? ex.base.omega_b : 0.0;
        const double omega = std::hypot(peak, ratio * peak);
        f_max = std::max({std::hypot(omega, delta_max), ex.base.gamma,
                          std::abs(ex.base.omega_b)});
    }
    return auto_dt(f_max);
}

EchoResult run_echo_experiment(const EchoExperiment& ex) {
    auto issues = validate_schedule(ex.schedule, ex.t_end);
    if (!issues.empty()) throw ValidationError(std::move(issues));

    EchoResult res;
    res.dt_used = ex.dt > 0.0 ? ex.dt : auto_time_step(ex);
    res.grid = make_time_grid(ex.t_start, ex.t_end, res.dt_used);

    const auto pulses = ex.schedule.leg_a_pulses();
    const std::size_t nb = ex.bands.deltas.size();
    std::vector<std::vector<cxd>> traces(nb);

    parallel_for(nb, [&](std::size_t i) {
        const ThreeLevelParams bp =
            band_params(ex.base, ex.bands.deltas[i], ex.apply_to);
        switch (ex.model) {
            case ModelKind::two_level: {
                const auto traj = evolve_sequence(StateVec2{1.0, 0.0}, pulses,
                                                  bp.delta1, res.grid);
                traces[i] = coherence12(traj);
                break;
            }
            case ModelKind::three_level: {
                const auto traj =
                    integrate_master3(DensityMatrix3::ground(), pulses, bp,
                                      res.grid, ex.leg_b);
                // the detector sees the optical leg, not the doublet coherence
                traces[i] = coherence13(traj);
                break;
            }
            case ModelKind::effective: {
                const auto traj =
                    integrate_effective(DensityMatrix2::ground(), pulses,
                                        effective_params(bp), res.grid);
                traces[i] = coherence12(traj);
                break;
            }
        }
    });

    res.dipole = ensemble_dipole(traces, ex.bands);
    res.magnitude.resize(res.dipole.size());
    for (std::size_t k = 0; k < res.dipole.size(); ++k)
        res.magnitude[k] = std::abs(res.dipole[k]);
    res.report = detect_echoes(res.grid, res.magnitude, ex.schedule,
                               ex.threshold_frac);
    return res;
}

}  // namespace echosim
