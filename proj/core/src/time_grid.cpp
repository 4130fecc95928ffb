#include "echosim/time_grid.hpp"

#include <cmath>

namespace echosim {

TimeGrid make_time_grid(double t_start, double t_end, double dt) {
    std::vector<std::string> issues;
    if (!(t_end > t_start)) issues.push_back("time grid: t_end must exceed t_start");
    if (!(dt > 0.0)) issues.push_back("time grid: dt must be positive");
    if (!issues.empty()) throw ValidationError(issues);
    TimeGrid g;
    g.t_start = t_start;
    g.t_end = t_end;
    g.dt = dt;
    g.n_steps = static_cast<std::int64_t>(std::llround((t_end - t_start) / dt));
    if (g.n_steps < 1) throw ValidationError("time grid: fewer than one step");
    return g;
}

double auto_dt(double f_max) {
    if (!(f_max > 0.0)) throw ValidationError("auto dt: rate bound must be positive");
    return 0.05 / f_max;
}

void check_sampling(double dt, double f_max) {
    if (dt * f_max > kPi / 4.0) {
        throw SimulationError("undersampled: dt*f_max = " + std::to_string(dt * f_max) +
                              " exceeds pi/4");
    }
}

}  // namespace echosim
