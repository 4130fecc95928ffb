#include "echosim/echo.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "echosim/pulse.hpp"
#include "echosim/types.hpp"

using namespace echosim;

namespace {

PulseSchedule three_pulse(double t1, double t2, double t3, double width,
                          double area) {
    PulseSchedule s;
    s.write = gaussian_pulse(t1, width, area);
    s.query = {gaussian_pulse(t2, width, area)};
    s.reference = {gaussian_pulse(t3, width, area)};
    return s;
}

double bump(double t, double c, double w) { return std::exp(-(t - c) * (t - c) / (w * w)); }

EchoExperiment fig2_experiment() {
    EchoExperiment ex;
    ex.model = ModelKind::two_level;
    ex.schedule = three_pulse(1.5, 4.0, 10.5, 0.01, std::numbers::pi / 5);
    ex.bands = detuning_grid(7.0, 65, 4.0);
    ex.t_end = 20.3;
    return ex;
}

}  // namespace

TEST_CASE("synthetic peaks are classified against the schedule") {
    const PulseSchedule s = three_pulse(1.5, 4.0, 10.5, 0.01, 0.6);
    const TimeGrid grid = make_time_grid(0.0, 22.0, 0.01);
    std::vector<double> mag(grid.n_steps + 1);
    for (std::int64_t k = 0; k <= grid.n_steps; ++k) {
        const double t = grid.t(k);
        mag[k] = 0.3 * bump(t, 6.5, 0.15) + 0.5 * bump(t, 13.0, 0.15) +
                 0.2 * bump(t, 17.0, 0.15) + 0.25 * bump(t, 19.5, 0.15) +
                 0.3 * bump(t, 9.0, 0.15) +     // revival-like extra feature
                 0.01 * bump(t, 11.5, 0.15) +   // below threshold
                 1.0 * bump(t, 4.0, 0.004);     // inside the query pulse mask
    }
    const EchoReport rep = detect_echoes(grid, mag, s);

    REQUIRE(rep.peaks.size() == 5);
    CHECK(rep.threshold == doctest::Approx(0.025).epsilon(1e-6));

    const EchoPeak* st = rep.find(EchoKind::stimulated);
    REQUIRE(st != nullptr);
    CHECK(st->time == doctest::Approx(13.0).epsilon(1e-4));
    CHECK(st->amplitude == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(st->expected_time == doctest::Approx(13.0));

    REQUIRE(rep.find(EchoKind::two_pulse_ab) != nullptr);
    CHECK(rep.find(EchoKind::two_pulse_ab)->time == doctest::Approx(6.5).epsilon(1e-4));
    REQUIRE(rep.find(EchoKind::two_pulse_bc) != nullptr);
    CHECK(rep.find(EchoKind::two_pulse_bc)->time == doctest::Approx(17.0).epsilon(1e-4));
    REQUIRE(rep.find(EchoKind::two_pulse_ac) != nullptr);
    CHECK(rep.find(EchoKind::two_pulse_ac)->time == doctest::Approx(19.5).epsilon(1e-4));

    const EchoPeak* extra = rep.find(EchoKind::unidentified);
    REQUIRE(extra != nullptr);
    CHECK(extra->time == doctest::Approx(9.0).epsilon(1e-4));
    CHECK(extra->expected_time == 0.0);

    // peaks come back in time order
    for (std::size_t i = 1; i < rep.peaks.size(); ++i)
        CHECK(rep.peaks[i - 1].time < rep.peaks[i].time);
}

TEST_CASE("vertex fit recovers an off-grid parabola peak exactly") {
    const TimeGrid grid = make_time_grid(0.0, 10.0, 0.1);
    std::vector<double> mag(grid.n_steps + 1);
    for (std::int64_t k = 0; k <= grid.n_steps; ++k) {
        const double t = grid.t(k);
        mag[k] = 1.0 - 2.0 * (t - 5.33) * (t - 5.33);
    }
    const PeakFit fit = peak_near(grid, mag, 5.0, 1.0);
    CHECK(fit.time == doctest::Approx(5.33).epsilon(1e-12));
    CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("band offsets map onto the detuning geometry") {
    ThreeLevelParams base;
    base.delta1 = 2.0;
    base.delta2 = 0.5;
    base.omega_b = 0.3;
    base.gamma = 0.05;

    const ThreeLevelParams leg = band_params(base, 3.5, BandApplyTo::delta1);
    CHECK(leg.delta1 == doctest::Approx(5.5));
    CHECK(leg.delta2 == doctest::Approx(0.5));
    CHECK(leg.omega_b == doctest::Approx(0.3));

    const ThreeLevelParams common = band_params(base, 3.5, BandApplyTo::common_mode);
    CHECK(common.delta1 == doctest::Approx(5.5));
    CHECK(common.delta2 == doctest::Approx(4.0));
    CHECK(common.big_delta() == doctest::Approx(base.big_delta()));
}

TEST_CASE("automatic step resolves the fastest band-edge precession") {
    EchoExperiment ex = fig2_experiment();
    const double peak =
        std::numbers::pi / 5 / (0.01 * std::sqrt(std::numbers::pi));
    const double expect = 0.05 / std::hypot(peak, 28.0);
    CHECK(auto_time_step(ex) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(auto_time_step(ex) == doctest::Approx(0.0011068457947364819).epsilon(1e-12));

    // concurrent pulses do not stack: the rule uses the largest single peak
    EchoExperiment one = ex;
    one.schedule.query.clear();
    one.schedule.reference.clear();
    one.schedule.query = {gaussian_pulse(4.0, 0.01, std::numbers::pi / 5)};
    one.schedule.reference = {gaussian_pulse(10.5, 0.01, std::numbers::pi / 5)};
    CHECK(auto_time_step(one) == doctest::Approx(auto_time_step(ex)).epsilon(1e-15));
}

TEST_CASE("broadened two-level run reproduces the reference echo set") {
    const EchoResult res = run_echo_experiment(fig2_experiment());
    CHECK(res.dt_used == doctest::Approx(0.0011068457947364819).epsilon(1e-12));
    const double tol_t = 2.0 * res.dt_used;

    struct Expect {
        EchoKind kind;
        double time, amp;
    };
    // regression pins from the frozen reference run of this configuration
    const Expect table[] = {
        {EchoKind::two_pulse_ab, 6.5004725470719169, 0.027965072482264663},
        {EchoKind::stimulated, 13.000431496554596, 0.05059697931763206},
        {EchoKind::two_pulse_bc, 17.000507007849219, 0.022631807450363983},
        {EchoKind::two_pulse_ac, 19.501127432600317, 0.025295190589774998},
    };
    for (const auto& e : table) {
        const EchoPeak* p = res.report.find(e.kind);
        REQUIRE(p != nullptr);
        CHECK(std::abs(p->time - p->expected_time) <= tol_t);  // schedule prediction
        CHECK(p->time == doctest::Approx(e.time).epsilon(1e-9));
        CHECK(p->amplitude == doctest::Approx(e.amp).epsilon(1e-7));
    }
    CHECK(res.report.threshold == doctest::Approx(0.013280377315681206).epsilon(1e-7));

    // the stimulated echo dominates every classified two-pulse echo
    const double st = res.report.find(EchoKind::stimulated)->amplitude;
    CHECK(st > res.report.find(EchoKind::two_pulse_ab)->amplitude);
    CHECK(st > res.report.find(EchoKind::two_pulse_bc)->amplitude);
    CHECK(st > res.report.find(EchoKind::two_pulse_ac)->amplitude);
}

TEST_CASE("halving the pulse area scales the echo like sin^3") {
    // The weaker echo sits just below the default 5% detection floor, so run
    // both experiments with a lower one; the quantity under test is the
    // amplitude ratio, not the reporting policy.
    EchoExperiment full = fig2_experiment();
    full.threshold_frac = 0.02;
    const EchoResult big = run_echo_experiment(full);

    EchoExperiment half = fig2_experiment();
    half.threshold_frac = 0.02;
    half.schedule = three_pulse(1.5, 4.0, 10.5, 0.01, std::numbers::pi / 10);
    const EchoResult small = run_echo_experiment(half);

    const EchoPeak* st_small = small.report.find(EchoKind::stimulated);
    const EchoPeak* st_big = big.report.find(EchoKind::stimulated);
    REQUIRE(st_small != nullptr);
    REQUIRE(st_big != nullptr);
    const double ratio = st_small->amplitude / st_big->amplitude;
    // sin(a/2)^3 scaling predicts ~0.134 between pi/5 and pi/10 areas
    CHECK(ratio > 0.12);
    CHECK(ratio < 0.16);
}

TEST_CASE("band count is converged at the production setting") {
    EchoExperiment ex = fig2_experiment();
    const double a65 = run_echo_experiment(ex).report.find(EchoKind::stimulated)->amplitude;
    ex.bands = detuning_grid(7.0, 129, 4.0);
    const double a129 = run_echo_experiment(ex).report.find(EchoKind::stimulated)->amplitude;
    CHECK(std::abs(a65 - a129) / a129 < 0.01);
}

TEST_CASE("echo spacing follows the write-query gap") {
    for (double t2 : {3.0, 4.5}) {
        EchoExperiment ex = fig2_experiment();
        ex.schedule = three_pulse(1.5, t2, 10.5, 0.01, std::numbers::pi / 5);
        ex.t_end = ex.schedule.t4() + 0.8;
        const EchoResult res = run_echo_experiment(ex);
        const EchoPeak* st = res.report.find(EchoKind::stimulated);
        REQUIRE(st != nullptr);
        const double gap_err = std::abs((st->time - 10.5) - (t2 - 1.5));
        CHECK(gap_err <= 2.0 * res.dt_used);
    }
}

TEST_CASE("homogeneous ensemble shows no rephasing structure") {
    EchoExperiment ex = fig2_experiment();
    ex.bands = detuning_grid(0.0, 65, 4.0);
    ex.dt = 0.0011068457947364819;  // keep the step the broadened run used
    const EchoResult res = run_echo_experiment(ex);
    double lo = 1e300, hi = 0.0;
    for (std::int64_t k = 0; k <= res.grid.n_steps; ++k) {
        if (res.grid.t(k) < 11.0 || res.grid.t(k) > 20.0) continue;
        lo = std::min(lo, res.magnitude[static_cast<std::size_t>(k)]);
        hi = std::max(hi, res.magnitude[static_cast<std::size_t>(k)]);
    }
    CHECK(hi > 0.0);
    CHECK((hi - lo) / hi < 1e-12);
}

TEST_CASE("rectangular far-detuned run reproduces the reference echo set") {
    EchoExperiment ex;
    ex.model = ModelKind::effective;
    ex.schedule.write = rectangular_pulse(1.5, 0.032, std::numbers::pi / 3);
    ex.schedule.query = {rectangular_pulse(4.0, 0.032, std::numbers::pi / 3)};
    ex.schedule.reference = {rectangular_pulse(10.5, 0.032, std::numbers::pi / 3)};
    ex.bands = detuning_grid(7.0, 65, 4.0);
    ex.base.delta1 = 100.0;
    ex.base.delta2 = 100.0;
    ex.base.gamma = 1.0;
    ex.t_end = 20.3;
    ex.dt = 4e-3;
    const EchoResult res = run_echo_experiment(ex);

    const double tol_t = 2.0 * res.dt_used;
    REQUIRE(res.report.find(EchoKind::stimulated) != nullptr);
    REQUIRE(res.report.find(EchoKind::two_pulse_ab) != nullptr);
    REQUIRE(res.report.find(EchoKind::two_pulse_bc) != nullptr);
    REQUIRE(res.report.find(EchoKind::two_pulse_ac) != nullptr);
    for (const auto& p : res.report.peaks)
        if (p.kind != EchoKind::unidentified)
            CHECK(std::abs(p.time - p.expected_time) <= tol_t);

    CHECK(res.report.find(EchoKind::stimulated)->amplitude ==
          doctest::Approx(0.1584).epsilon(0.01));
    CHECK(res.report.find(EchoKind::two_pulse_ab)->amplitude ==
          doctest::Approx(0.1065).epsilon(0.01));
    CHECK(res.report.find(EchoKind::two_pulse_bc)->amplitude ==
          doctest::Approx(0.0524).epsilon(0.01));
    CHECK(res.report.find(EchoKind::two_pulse_ac)->amplitude ==
          doctest::Approx(0.0794).epsilon(0.01));
}

TEST_CASE("Lambda-system run with cw return leg classifies all four echoes") {
    EchoExperiment ex;
    ex.model = ModelKind::three_level;
    ex.schedule = three_pulse(1.5, 4.0, 10.5, 0.08, std::numbers::pi / 10);
    ex.bands = detuning_grid(7.0, 65, 4.0);
    ex.base.delta1 = 2.0;
    ex.base.delta2 = 2.0;
    ex.base.omega_b = 0.3;
    ex.base.gamma = 0.05;
    ex.leg_b = LegBMode::cw;
    ex.t_end = 20.3;
    const EchoResult res = run_echo_experiment(ex);

    const double tol_t = 2.0 * res.dt_used;
    const EchoPeak* st = res.report.find(EchoKind::stimulated);
    REQUIRE(st != nullptr);
    CHECK(std::abs(st->time - 13.0) <= tol_t);
    CHECK(st->amplitude == doctest::Approx(4.21e-3).epsilon(0.05));
    for (EchoKind k : {EchoKind::two_pulse_ab, EchoKind::two_pulse_bc,
                       EchoKind::two_pulse_ac}) {
        const EchoPeak* p = res.report.find(k);
        REQUIRE(p != nullptr);
        CHECK(std::abs(p->time - p->expected_time) <= tol_t);
        CHECK(p->amplitude < st->amplitude);
    }
}
