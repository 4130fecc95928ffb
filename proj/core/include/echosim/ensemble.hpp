#pragma once
// Inhomogeneous broadening: the discrete Gaussian detuning comb and the
// weighted ensemble average that turns per-band coherences into the
// macroscopic dipole P(t).

#include <vector>

#include "echosim/types.hpp"

namespace echosim {

// How the band offset enters the Lambda system: on the signal leg only
// (delta1, keeping the two-photon detuning per-band nonzero) or on both
// legs equally (common mode, no spin inhomogeneity).
enum class BandApplyTo { delta1, common_mode };

struct DetuningGrid {
    std::vector<double> deltas;
    std::vector<double> weights;  // renormalized, sum to 1
    double width = 0.0;           // Gaussian sigma (0 = homogeneous sentinel)
    int n_bands = 1;
    double truncation = 4.0;      // grid spans +-truncation*width
};

// Uniform nodes over [-trunc*width, +trunc*width] weighted by the Gaussian
// and renormalized.  n_bands must be odd (delta = 0 must be a node).
// width = 0 is the homogeneous limit: one band at delta 0, weight 1.
//
// Note the revival geometry of a uniform comb: every echo feature repeats
// with period T_rev = pi*(n_bands-1)/(trunc*width), so band counts are
// chosen to push revivals outside the observation window.
DetuningGrid detuning_grid(double width, int n_bands, double truncation);

// P(t) = sum_i w_i trace_i(t), summed in fixed band order with compensated
// (Kahan) accumulation so the result is independent of worker count.
std::vector<cxd> ensemble_dipole(const std::vector<std::vector<cxd>>& traces,
                                 const DetuningGrid& grid);

}  // namespace echosim
