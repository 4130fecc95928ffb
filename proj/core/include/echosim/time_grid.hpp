#pragma once
// Fixed-step time grids and the step-size rules shared by all models.

#include <cstdint>

#include "echosim/types.hpp"

namespace echosim {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    std::int64_t n_steps = 0;  // grid has n_steps + 1 points

    double t(std::int64_t k) const { return t_start + static_cast<double>(k) * dt; }
};

// n_steps = round((t_end - t_start)/dt); the grid then covers
// [t_start, t_start + n_steps*dt].  Rejects degenerate inputs.
TimeGrid make_time_grid(double t_start, double t_end, double dt);

// Default step: dt = 0.05 / f_max, where f_max is the fastest rate in the
// model (generalized Rabi frequency at the largest detuning, decay rate).
double auto_dt(double f_max);

// An explicitly chosen dt is still usable below the quarter-period bound
// dt*f_max <= pi/4 (one-step propagators and RK4 stay in their convergent
// regime there).  Beyond it the run is rejected rather than silently wrong.
void check_sampling(double dt, double f_max);

}  // namespace echosim
