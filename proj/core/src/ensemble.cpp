#include "echosim/ensemble.hpp"

#include <cmath>

namespace echosim {

DetuningGrid detuning_grid(double width, int n_bands, double truncation) {
    std::vector<std::string> issues;
    if (width < 0.0) issues.push_back("ensemble: width must be >= 0");
    if (n_bands < 1) issues.push_back("ensemble: n_bands must be >= 1");
    if (n_bands % 2 == 0) issues.push_back("ensemble: n_bands must be odd (center band required)");
    if (!(truncation > 0.0)) issues.push_back("ensemble: truncation must be positive");
    if (!issues.empty()) throw ValidationError(issues);

    DetuningGrid g;
    g.width = width;
    g.truncation = truncation;
    if (width == 0.0 || n_bands == 1) {
        g.n_bands = 1;
        g.deltas = {0.0};
        g.weights = {1.0};
        return g;
    }
    g.n_bands = n_bands;
    g.deltas.resize(n_bands);
    g.weights.resize(n_bands);
    const double dmax = truncation * width;
    const double step = 2.0 * dmax / static_cast<double>(n_bands - 1);
    const int center = (n_bands - 1) / 2;
    double sum = 0.0;
    for (int i = 0; i < n_bands; ++i) {
        // built from the signed offset so mirror nodes negate exactly
        const double d = step * static_cast<double>(i - center);
        g.deltas[i] = d;
        g.weights[i] = std::exp(-d * d / (2.0 * width * width));
        sum += g.weights[i];
    }
    for (auto& w : g.weights) w /= sum;
    return g;
}

std::vector<cxd> ensemble_dipole(const std::vector<std::vector<cxd>>& traces,
                                 const DetuningGrid& grid) {
    if (traces.size() != grid.deltas.size())
        throw ValidationError("ensemble_dipole: one trace per band required");
    const std::size_t n = traces.empty() ? 0 : traces[0].size();
    for (const auto& tr : traces)
        if (tr.size() != n) throw ValidationError("ensemble_dipole: traces on mismatched grids");

    std::vector<cxd> P(n, cxd{0.0, 0.0});
    std::vector<cxd> comp(n, cxd{0.0, 0.0});  // Kahan compensation
    for (std::size_t b = 0; b < traces.size(); ++b) {
        const double w = grid.weights[b];
        const auto& tr = traces[b];
        for (std::size_t k = 0; k < n; ++k) {
            const cxd y = w * tr[k] - comp[k];
            const cxd t = P[k] + y;
            comp[k] = (t - P[k]) - y;
            P[k] = t;
        }
    }
    return P;
}

}  // namespace echosim
