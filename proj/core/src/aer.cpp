#include "echosim/aer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "echosim/parallel.hpp"

namespace echosim {

namespace {

// Pixels per partial-sum block of the readout energy scan.  Partials are
// accumulated per block and folded in block order, so the worker count can
// never reorder a floating-point reduction.
constexpr std::size_t kEnergyBlock = 256;

// Largest per-pixel grid the three-level engine accepts: it has no analytic
// readout and must store a full per-pixel time scan (npx * n_scan complex
// samples, ~50 MB at this cap with the default scan).
constexpr int kMaxPixelsMaster = 4096;

// A frame after the first lens: the pulse timing plus the atomic-plane field
// split into relative magnitude and phase.  `peak` (the per-pixel peak Rabi
// frequency of the temporal pulse) is filled by the per-model pass, since
// the effective model's drive variable scales differently.
struct PreparedFrame {
    double center = 0.0;
    double width = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double area = 0.0;
    double amp_max = 0.0;      // brightest atomic-plane |E|
    std::vector<double> rel;   // |E| / amp_max, all zero for a dark frame
    std::vector<double> phase;
    std::vector<double> peak;
    double peak_scale = 0.0;   // peak at the brightest pixel
};

struct Timing {
    double t2 = 0.0, t3 = 0.0, t4 = 0.0;
    double dtr = 0.0;          // readout scan step
    double t0 = 0.0;           // first scan sample; t4 lands exactly on k_center
    std::int64_t k_center = 0;
    std::int64_t n_scan = 0;   // 2 * k_center + 1 samples
};

struct Prep {
    OpticsConfig opt;
    int npx = 0;
    // [0] is the write frame, then the query frames, then the reference ones
    std::vector<PreparedFrame> frames;
    std::size_t n_query = 0;
    double write_width = 0.0;
    Timing tm;
    cxd eta_c{};        // effective-model elimination factor at the comb center
    double dt_win = 0.0;  // master-model step inside the pulse windows
};

PreparedFrame lens_and_split(const FieldGrid& slm, double center, double area,
                             double width) {
    PreparedFrame f;
    f.center = center;
    f.width = width;
    f.t_lo = center - 4.0 * width;
    f.t_hi = center + 4.0 * width;
    f.area = area;
    const FieldGrid atom = lens_transform(slm);
    f.rel = amplitude_map(atom);
    f.phase = phase_map(atom);
    for (double a : f.rel) f.amp_max = std::max(f.amp_max, a);
    if (f.amp_max > 0.0)
        for (double& a : f.rel) a /= f.amp_max;
    return f;
}

// Fastest single-window rate at the brightest pixel, mirroring the rate
// bookkeeping of auto_time_step; windows never overlap here, so the maximum
// over frames replaces the sum over pulses.
double window_auto_dt(const AerConfig& cfg, const Prep& prep) {
    double s_max = 0.0;
    for (const auto& f : prep.frames) s_max = std::max(s_max, f.peak_scale);

    double f_max;
    if (cfg.model == ModelKind::effective) {
        const double om2 = s_max * s_max;
        f_max = 0.0;
        for (double b : cfg.bands.deltas) {
            const EffectiveParams ep =
                effective_params(band_params(cfg.base, b, cfg.apply_to));
            f_max = std::max(f_max,
                             std::max(std::hypot(om2 * std::abs(ep.eta),
                                                 std::abs(ep.two_photon)),
                                      ep.gamma_eff(om2)));
        }
    } else {
        double delta_max = 0.0;
        for (double b : cfg.bands.deltas) {
            const ThreeLevelParams bp = band_params(cfg.base, b, cfg.apply_to);
            delta_max =
                std::max({delta_max, std::abs(bp.delta1), std::abs(bp.delta2)});
        }
        const double ratio =
            (cfg.leg_b == LegBMode::follow_a) ? cfg.base.omega_b : 0.0;
        const double omega = std::hypot(s_max, ratio * s_max);
        f_max = std::max({std::hypot(omega, delta_max), cfg.base.gamma,
                          std::abs(cfg.base.omega_b)});
    }
    return auto_dt(f_max);
}

// Validates the whole configuration (collecting every problem), runs each
// frame through the first lens, and resolves the derived timing.
Prep prepare(const AerConfig& cfg) {
    std::vector<std::string> issues;
    auto merge = [&issues](const std::string& label, const ValidationError& e) {
        for (const auto& s : e.issues()) issues.push_back(label + ": " + s);
    };

    Prep prep;
    bool opt_ok = true;
    try {
        prep.opt = validate_optics(cfg.optics);
    } catch (const ValidationError& e) {
        merge("optics", e);
        opt_ok = false;
    }

    if (cfg.bands.deltas.empty())
        issues.push_back("aer: empty detuning grid");
    if (cfg.query.empty())
        issues.push_back("aer: query clip must contain at least one frame");
    if (cfg.reference.empty())
        issues.push_back("aer: reference clip must contain at least one frame");
    if (!(cfg.write_area > 0.0))
        issues.push_back("aer: write pulse area must be positive");
    if (cfg.write_radius_px < 0)
        issues.push_back("aer: write spot radius must be >= 0");
    if (opt_ok && 4 * cfg.write_radius_px >= std::min(prep.opt.nx, prep.opt.ny))
        issues.push_back("write spot too large for plane-wave approximation");
    if (!(cfg.readout_window > 0.0))
        issues.push_back("aer: readout window must be positive");
    if (cfg.readout_dt < 0.0 || cfg.dt < 0.0 || cfg.write_width < 0.0)
        issues.push_back("aer: time steps and widths must be >= 0 (0 = automatic)");
    if (cfg.readout_dt == 0.0 && !(cfg.bands.width > 0.0))
        issues.push_back(
            "aer: readout_dt is required when the ensemble has zero width");
    if (!(cfg.threshold_frac > 0.0 && cfg.threshold_frac < 1.0))
        issues.push_back("aer: threshold fraction must lie in (0, 1)");
    if (cfg.pulse_substeps < 8)
        issues.push_back("aer: at least 8 substeps per pulse window required");
    if (cfg.monitor_pixels < 0)
        issues.push_back("aer: monitored pixel count must be >= 0");

    double w_min = 0.0;
    bool frames_ok = true;
    auto check_frame = [&](const AerFrameSpec& f, const std::string& label) {
        if (!(f.area > 0.0)) {
            issues.push_back(label + ": pulse area must be positive");
            frames_ok = false;
        }
        if (!(f.width > 0.0)) {
            issues.push_back(label + ": pulse width must be positive");
            frames_ok = false;
        } else {
            w_min = (w_min == 0.0) ? f.width : std::min(w_min, f.width);
        }
        if (opt_ok && (f.image.nx != prep.opt.nx || f.image.ny != prep.opt.ny)) {
            issues.push_back(label + ": image is " + std::to_string(f.image.nx) +
                             "x" + std::to_string(f.image.ny) +
                             " but the optics grid is " +
                             std::to_string(prep.opt.nx) + "x" +
                             std::to_string(prep.opt.ny));
            frames_ok = false;
        }
    };
    for (std::size_t i = 0; i < cfg.query.size(); ++i)
        check_frame(cfg.query[i], "query frame " + std::to_string(i + 1));
    for (std::size_t i = 0; i < cfg.reference.size(); ++i)
        check_frame(cfg.reference[i], "reference frame " + std::to_string(i + 1));

    if (cfg.model == ModelKind::three_level && opt_ok &&
        prep.opt.nx * prep.opt.ny > kMaxPixelsMaster) {
        issues.push_back(
            "aer: the three-level engine stores a per-pixel readout scan and "
            "accepts at most " +
            std::to_string(kMaxPixelsMaster) + " pixels (got " +
            std::to_string(prep.opt.nx * prep.opt.ny) +
            "); use a coarser grid or the effective model");
    }
    if (cfg.model == ModelKind::effective) {
        try {
            prep.eta_c =
                effective_params(band_params(cfg.base, 0.0, cfg.apply_to)).eta;
        } catch (const ValidationError& e) {
            merge("aer", e);
        }
    }
    if (!opt_ok || !frames_ok || cfg.query.empty() || cfg.reference.empty())
        throw ValidationError(std::move(issues));

    // The writing beam must be spectrally broad against every frame so the
    // whole comb is written evenly.
    prep.write_width = cfg.write_width > 0.0 ? cfg.write_width : w_min / 3.0;
    if (prep.write_width > w_min / 3.0 + 1e-12)
        issues.push_back("aer: write pulse width must be at most a third of "
                         "the narrowest frame width");
    if (cfg.t1 - 4.0 * prep.write_width < 0.0)
        issues.push_back("aer: write pulse support must start at t >= 0");

    // Pulse ordering: write, query frames, reference frames, with disjoint
    // supports throughout.
    double prev_hi = cfg.t1 + 4.0 * prep.write_width;
    double prev_center = cfg.t1;
    auto check_order = [&](const AerFrameSpec& f, const std::string& label) {
        if (!(f.time > prev_center))
            issues.push_back(label + ": pulse centers must increase in time");
        if (f.time - 4.0 * f.width < prev_hi - 1e-12)
            issues.push_back(label + ": pulse support overlaps the previous one");
        prev_hi = f.time + 4.0 * f.width;
        prev_center = f.time;
    };
    for (std::size_t i = 0; i < cfg.query.size(); ++i)
        check_order(cfg.query[i], "query frame " + std::to_string(i + 1));
    for (std::size_t i = 0; i < cfg.reference.size(); ++i)
        check_order(cfg.reference[i], "reference frame " + std::to_string(i + 1));

    Timing& tm = prep.tm;
    for (const auto& f : cfg.query) tm.t2 += f.time;
    tm.t2 /= static_cast<double>(cfg.query.size());
    for (const auto& f : cfg.reference) tm.t3 += f.time;
    tm.t3 /= static_cast<double>(cfg.reference.size());
    tm.t4 = tm.t3 + tm.t2 - cfg.t1;
    tm.dtr = cfg.readout_dt > 0.0
                 ? cfg.readout_dt
                 : 0.05 / (cfg.bands.truncation * cfg.bands.width);
    tm.k_center = std::llround(cfg.readout_window / tm.dtr);
    if (tm.k_center < 1) tm.k_center = 1;
    tm.n_scan = 2 * tm.k_center + 1;
    tm.t0 = tm.t4 - static_cast<double>(tm.k_center) * tm.dtr;
    if (tm.t0 < prev_hi - 1e-12)
        issues.push_back("aer: readout window reaches back into the last "
                         "reference pulse; shorten it or delay the echo");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    // Through the first lens.  The write spot checks were done above, so
    // build_write_frame cannot throw here.
    prep.npx = prep.opt.nx * prep.opt.ny;
    auto write = build_write_frame(prep.opt, cfg.write_radius_px, prep.write_width);
    prep.frames.reserve(1 + cfg.query.size() + cfg.reference.size());
    prep.frames.push_back(
        lens_and_split(write.first, cfg.t1, cfg.write_area, prep.write_width));
    prep.n_query = cfg.query.size();
    for (const auto& f : cfg.query)
        prep.frames.push_back(lens_and_split(
            encode_image(f.image, prep.opt, f.area, f.width), f.time, f.area,
            f.width));
    for (const auto& f : cfg.reference)
        prep.frames.push_back(lens_and_split(
            encode_image(f.image, prep.opt, f.area, f.width), f.time, f.area,
            f.width));

    // Per-pixel pulse peaks.  For the wavefunction and master models the
    // drive is the field itself, so the peak scales linearly with |E|.  The
    // effective model is driven by the squared field; matching its area
    // convention at the brightest pixel and keeping the physical linearity
    // in |E| means the peak scales with sqrt(rel).
    for (auto& f : prep.frames) {
        f.peak.resize(static_cast<std::size_t>(prep.npx));
        if (cfg.model == ModelKind::effective) {
            f.peak_scale = effective_peak_for_area(PulseShape::gaussian, f.width,
                                                   f.area, prep.eta_c);
            for (int i = 0; i < prep.npx; ++i)
                f.peak[i] = std::sqrt(f.rel[i]) * f.peak_scale;
        } else {
            f.peak_scale = solve_for_peak(PulseShape::gaussian, f.width, f.area);
            for (int i = 0; i < prep.npx; ++i)
                f.peak[i] = f.rel[i] * f.peak_scale;
        }
    }

    if (cfg.model != ModelKind::two_level)
        prep.dt_win = cfg.dt > 0.0 ? cfg.dt : window_auto_dt(cfg, prep);
    return prep;
}

void apply_mat9(const std::array<cxd, 81>& u, std::array<cxd, 9>& y) {
    std::array<cxd, 9> out;
    for (int i = 0; i < 9; ++i) {
        cxd acc{0.0, 0.0};
        for (int j = 0; j < 9; ++j) acc += u[9 * i + j] * y[j];
        out[i] = acc;
    }
    y = out;
}

// Evolves every (pixel, band) pair of the two-level or effective model to
// the start of the readout scan and stores the weighted in-frame coherence
// m[px*nb + b].  Free gaps and the scan itself are pure detuning rotations
// for these models, so the scan later extends m analytically.
std::vector<cxd> coherence_table(const AerConfig& cfg, const Prep& prep,
                                 std::vector<double>& rate) {
    const std::size_t npx = static_cast<std::size_t>(prep.npx);
    const std::size_t nb = cfg.bands.deltas.size();
    const std::size_t nf = prep.frames.size();

    rate.resize(nb);
    std::vector<EffectiveParams> eff(cfg.model == ModelKind::effective ? nb : 0);
    for (std::size_t b = 0; b < nb; ++b) {
        const ThreeLevelParams bp =
            band_params(cfg.base, cfg.bands.deltas[b], cfg.apply_to);
        if (cfg.model == ModelKind::effective) {
            eff[b] = effective_params(bp);
            rate[b] = eff[b].two_photon;
        } else {
            rate[b] = bp.delta1;
        }
    }

    // Shared per-frame envelope tables.  The two-level path samples the
    // gaussian at substep midpoints; the master-model paths integrate with a
    // step bounded by dt_win.
    std::vector<std::vector<double>> mid(nf);
    std::vector<int> nsub(nf);
    std::vector<double> tau(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const PreparedFrame& fr = prep.frames[f];
        const double span = fr.t_hi - fr.t_lo;
        if (cfg.model == ModelKind::two_level) {
            int n = cfg.pulse_substeps;
            // keep the per-substep drive rotation small even for hot pulses
            n = std::max(n, static_cast<int>(
                                std::ceil(span * fr.peak_scale / 0.05)));
            nsub[f] = n;
            tau[f] = span / n;
            mid[f].resize(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                const double t = fr.t_lo + (k + 0.5) * tau[f];
                const double x = (t - fr.center) / fr.width;
                mid[f][static_cast<std::size_t>(k)] = std::exp(-x * x);
            }
        } else {
            const int n = std::max(
                1, static_cast<int>(std::ceil(span / prep.dt_win)));
            nsub[f] = n;
            tau[f] = span / n;
        }
    }

    std::vector<cxd> m(npx * nb);
    const std::size_t nblocks = (npx + kEnergyBlock - 1) / kEnergyBlock;
    parallel_for(nblocks, [&](std::size_t blk) {
        const std::size_t lo = blk * kEnergyBlock;
        const std::size_t hi = std::min(npx, lo + kEnergyBlock);
        for (std::size_t px = lo; px < hi; ++px) {
            for (std::size_t b = 0; b < nb; ++b) {
                const double w_b = cfg.bands.weights[b];
                if (cfg.model == ModelKind::two_level) {
                    const double delta = rate[b];
                    cxd c1{1.0, 0.0}, c2{0.0, 0.0};
                    double prev_phi = prep.frames[0].phase[px];
                    double cursor = prep.frames[0].t_lo;
                    for (std::size_t f = 0; f < nf; ++f) {
                        const PreparedFrame& fr = prep.frames[f];
                        if (f > 0) {
                            c2 *= std::polar(1.0, delta * (fr.t_lo - cursor));
                            c1 *= std::polar(1.0, -(fr.phase[px] - prev_phi));
                            prev_phi = fr.phase[px];
                        }
                        const double pk = fr.peak[px];
                        for (int k = 0; k < nsub[f]; ++k) {
                            const double om =
                                pk * mid[f][static_cast<std::size_t>(k)];
                            if (om == 0.0) {
                                c2 *= std::polar(1.0, delta * tau[f]);
                                continue;
                            }
                            const Propagator2 u =
                                propagator({om, delta}, tau[f]);
                            const StateVec2 s = u.apply({c1, c2});
                            c1 = s[0];
                            c2 = s[1];
                        }
                        cursor = fr.t_hi;
                    }
                    c2 *= std::polar(1.0, delta * (prep.tm.t0 - cursor));
                    m[px * nb + b] = w_b * c1 * std::conj(c2);
                } else {
                    // effective model: analytic two-photon rotation in the
                    // gaps, RK4 inside the windows
                    DensityMatrix2 r = DensityMatrix2::ground();
                    double prev_phi = prep.frames[0].phase[px];
                    double cursor = prep.frames[0].t_lo;
                    for (std::size_t f = 0; f < nf; ++f) {
                        const PreparedFrame& fr = prep.frames[f];
                        if (f > 0) {
                            const double ang =
                                -rate[b] * (fr.t_lo - cursor) -
                                (fr.phase[px] - prev_phi);
                            r.v[1] *= std::polar(1.0, ang);
                            r.v[2] *= std::polar(1.0, -ang);
                            prev_phi = fr.phase[px];
                        }
                        if (fr.peak[px] > 0.0) {
                            PulseEnvelope env;
                            env.center = fr.center;
                            env.width = fr.width;
                            env.peak_rabi = fr.peak[px];
                            TimeGrid wg;
                            wg.t_start = fr.t_lo;
                            wg.t_end = fr.t_hi;
                            wg.dt = tau[f];
                            wg.n_steps = nsub[f];
                            r = integrate_effective(r, {env}, eff[b], wg)
                                    .states.back();
                        }
                        cursor = fr.t_hi;
                    }
                    const double ang = -rate[b] * (prep.tm.t0 - cursor);
                    m[px * nb + b] = w_b * r.v[1] * std::polar(1.0, ang);
                }
            }
        }
    });
    return m;
}

// Three-level engine: no analytic shortcut exists once the cw leg and decay
// act in the gaps, so gaps and readout advance with exact matrix
// exponentials per band and the full per-pixel scan is stored.
std::vector<cxd> master_scan(const AerConfig& cfg, const Prep& prep) {
    const std::size_t npx = static_cast<std::size_t>(prep.npx);
    const std::size_t nb = cfg.bands.deltas.size();
    const std::size_t nf = prep.frames.size();
    const std::size_t ns = static_cast<std::size_t>(prep.tm.n_scan);

    struct BandOps {
        ThreeLevelParams bp;
        std::vector<std::array<cxd, 81>> gap;  // per inter-frame gap, then tail
        std::array<cxd, 81> step;               // one readout scan step
    };
    std::vector<BandOps> ops(nb);
    parallel_for(nb, [&](std::size_t b) {
        BandOps& o = ops[b];
        o.bp = band_params(cfg.base, cfg.bands.deltas[b], cfg.apply_to);
        ThreeLevelParams idle = o.bp;
        idle.omega_a = 0.0;
        if (cfg.leg_b == LegBMode::follow_a) idle.omega_b = 0.0;
        const Liouvillian3 L = liouvillian3(idle);
        o.gap.resize(nf);
        for (std::size_t f = 1; f < nf; ++f)
            o.gap[f] = liouvillian_exp(
                L, prep.frames[f].t_lo - prep.frames[f - 1].t_hi);
        o.gap[0] = liouvillian_exp(L, prep.tm.t0 - prep.frames.back().t_hi);
        o.step = liouvillian_exp(L, prep.tm.dtr);
    });

    std::vector<int> nsub(nf);
    std::vector<double> tau(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const double span = prep.frames[f].t_hi - prep.frames[f].t_lo;
        nsub[f] = std::max(1, static_cast<int>(std::ceil(span / prep.dt_win)));
        tau[f] = span / nsub[f];
    }

    std::vector<cxd> scan(npx * ns);
    const std::size_t nblocks = (npx + kEnergyBlock - 1) / kEnergyBlock;
    parallel_for(nblocks, [&](std::size_t blk) {
        const std::size_t lo = blk * kEnergyBlock;
        const std::size_t hi = std::min(npx, lo + kEnergyBlock);
        for (std::size_t px = lo; px < hi; ++px) {
            cxd* out = &scan[px * ns];
            for (std::size_t b = 0; b < nb; ++b) {
                const double w_b = cfg.bands.weights[b];
                DensityMatrix3 r = DensityMatrix3::ground();
                double prev_phi = prep.frames[0].phase[px];
                for (std::size_t f = 0; f < nf; ++f) {
                    const PreparedFrame& fr = prep.frames[f];
                    if (f > 0) {
                        apply_mat9(ops[b].gap[f], r.v);
                        const cxd rot =
                            std::polar(1.0, -(fr.phase[px] - prev_phi));
                        // leg b is an unpatterned plane wave (constant
                        // phase), so only the leg-a frame turns
                        r.v[1] *= rot;
                        r.v[2] *= rot;
                        r.v[3] *= std::conj(rot);
                        r.v[6] *= std::conj(rot);
                        prev_phi = fr.phase[px];
                    }
                    PulseEnvelope env;
                    env.center = fr.center;
                    env.width = fr.width;
                    env.peak_rabi = fr.peak[px];
                    TimeGrid wg;
                    wg.t_start = fr.t_lo;
                    wg.t_end = fr.t_hi;
                    wg.dt = tau[f];
                    wg.n_steps = nsub[f];
                    r = integrate_master3(r, {env}, ops[b].bp, wg, cfg.leg_b)
                            .states.back();
                }
                apply_mat9(ops[b].gap[0], r.v);
                for (std::size_t k = 0; k < ns; ++k) {
                    out[k] += w_b * r.v[2];  // optical coherence, in frame
                    if (k + 1 < ns) apply_mat9(ops[b].step, r.v);
                }
            }
        }
    });
    return scan;
}

// Ordered-fold energy of per-pixel scan samples; eval(px, k) must be pure.
template <typename Eval>
std::vector<double> scan_energy(std::size_t npx, std::size_t ns, Eval&& eval) {
    const std::size_t nblocks = (npx + kEnergyBlock - 1) / kEnergyBlock;
    std::vector<double> part(nblocks * ns, 0.0);
    parallel_for(nblocks, [&](std::size_t blk) {
        const std::size_t lo = blk * kEnergyBlock;
        const std::size_t hi = std::min(npx, lo + kEnergyBlock);
        double* dst = &part[blk * ns];
        for (std::size_t px = lo; px < hi; ++px)
            for (std::size_t k = 0; k < ns; ++k) dst[k] += std::norm(eval(px, k));
    });
    std::vector<double> energy(ns, 0.0);
    for (std::size_t blk = 0; blk < nblocks; ++blk)
        for (std::size_t k = 0; k < ns; ++k) energy[k] += part[blk * ns + k];
    return energy;
}

}  // namespace

std::vector<AerFrameSpec> frames_from_clip(const EventClip& clip,
                                           const std::vector<double>& areas,
                                           double width) {
    std::vector<std::string> issues;
    const std::size_t n = clip.frames.size();
    if (n == 0) issues.push_back("clip has no frames");
    if (clip.frame_times.size() != n)
        issues.push_back("clip needs one pulse center per frame (got " +
                         std::to_string(clip.frame_times.size()) + " for " +
                         std::to_string(n) + " frames)");
    if (areas.size() != n)
        issues.push_back("clip needs one pulse area per frame (got " +
                         std::to_string(areas.size()) + " for " +
                         std::to_string(n) + " frames)");
    if (!(width > 0.0)) issues.push_back("clip pulse width must be positive");
    for (std::size_t i = 1; i < clip.frame_times.size(); ++i)
        if (!(clip.frame_times[i] > clip.frame_times[i - 1]))
            issues.push_back("clip pulse centers must be strictly increasing");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    // A reference clip recalls the event the way the echo rephases it:
    // first in, last out.  The pulse slots keep their times and areas; only
    // the image order reverses.
    std::vector<AerFrameSpec> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src =
            clip.role == FrameRole::reference ? n - 1 - i : i;
        out[i] = AerFrameSpec{clip.frames[src], clip.frame_times[i], areas[i],
                              width};
    }
    return out;
}

std::pair<FieldGrid, PulseEnvelope> build_write_frame(const OpticsConfig& cfg,
                                                      int spot_radius_px,
                                                      double duration) {
    const OpticsConfig opt = validate_optics(cfg);
    std::vector<std::string> issues;
    if (spot_radius_px < 0) issues.push_back("write spot radius must be >= 0");
    if (4 * spot_radius_px >= std::min(opt.nx, opt.ny))
        issues.push_back("write spot too large for plane-wave approximation");
    if (!(duration > 0.0)) issues.push_back("write duration must be positive");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    FieldGrid slm = make_field(opt, Plane::slm);
    const int cx = opt.nx / 2, cy = opt.ny / 2;
    const int r = spot_radius_px;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) slm.at(cx + dx, cy + dy) = 1.0;

    PulseEnvelope env;
    env.center = 0.0;
    env.width = duration;
    env.peak_rabi = solve_for_peak(PulseShape::gaussian, duration, 1.0);
    return {std::move(slm), env};
}

AerResult run_aer(const AerConfig& cfg) {
    const Prep prep = prepare(cfg);
    const std::size_t npx = static_cast<std::size_t>(prep.npx);
    const std::size_t nb = cfg.bands.deltas.size();
    const std::size_t ns = static_cast<std::size_t>(prep.tm.n_scan);
    const std::vector<double>& phi_last = prep.frames.back().phase;

    AerResult res;
    res.t4 = prep.tm.t4;
    res.readout_dt = prep.tm.dtr;
    res.energy_times.resize(ns);
    for (std::size_t k = 0; k < ns; ++k)
        res.energy_times[k] = prep.tm.t0 + static_cast<double>(k) * prep.tm.dtr;

    FieldGrid atom = make_field(prep.opt, Plane::atomic);
    if (cfg.model == ModelKind::three_level) {
        const std::vector<cxd> scan = master_scan(cfg, prep);
        res.energy = scan_energy(
            npx, ns, [&](std::size_t px, std::size_t k) { return scan[px * ns + k]; });
        const std::size_t k_star = static_cast<std::size_t>(
            std::max_element(res.energy.begin(), res.energy.end()) -
            res.energy.begin());
        res.map.readout_time = res.energy_times[k_star];
        for (std::size_t px = 0; px < npx; ++px)
            atom.v[px] = std::polar(1.0, phi_last[px]) * scan[px * ns + k_star];
    } else {
        std::vector<double> rate;
        const std::vector<cxd> m = coherence_table(cfg, prep, rate);
        // per-band scan phases e^{-i rate (t_k - t0)}, shared by all pixels
        std::vector<cxd> tab(ns * nb);
        for (std::size_t k = 0; k < ns; ++k)
            for (std::size_t b = 0; b < nb; ++b)
                tab[k * nb + b] = std::polar(
                    1.0, -rate[b] * static_cast<double>(k) * prep.tm.dtr);
        res.energy = scan_energy(npx, ns, [&](std::size_t px, std::size_t k) {
            cxd acc{0.0, 0.0};
            const cxd* mp = &m[px * nb];
            const cxd* tp = &tab[k * nb];
            for (std::size_t b = 0; b < nb; ++b) acc += mp[b] * tp[b];
            return acc;
        });
        const std::size_t k_star = static_cast<std::size_t>(
            std::max_element(res.energy.begin(), res.energy.end()) -
            res.energy.begin());
        res.map.readout_time = res.energy_times[k_star];
        for (std::size_t px = 0; px < npx; ++px) {
            cxd acc{0.0, 0.0};
            const cxd* mp = &m[px * nb];
            const cxd* tp = &tab[k_star * nb];
            for (std::size_t b = 0; b < nb; ++b) acc += mp[b] * tp[b];
            atom.v[px] = std::polar(1.0, phi_last[px]) * acc;
        }
    }

    res.detector = second_lens(atom);
    res.map.nx = prep.opt.nx;
    res.map.ny = prep.opt.ny;
    res.map.intensities.resize(npx);
    for (std::size_t px = 0; px < npx; ++px)
        res.map.intensities[px] = std::norm(res.detector.v[px]);
    for (std::size_t px = 0; px < npx; ++px) {
        if (res.map.intensities[px] > res.map.peak_value) {
            res.map.peak_value = res.map.intensities[px];
            res.map.peak_x = static_cast<int>(px) % prep.opt.nx;
            res.map.peak_y = static_cast<int>(px) / prep.opt.nx;
        }
    }

    // Per-pixel echo diagnostics for the brightest query pixels: the exact
    // single-spot experiment with this pixel's drive amplitudes (the pulse
    // phases shift the echo's phase, not its timing or magnitude, so the
    // trace runs with real drives).
    const int n_mon = std::min<int>(cfg.monitor_pixels, prep.npx);
    if (n_mon > 0) {
        const PreparedFrame& fq = prep.frames[1];
        std::vector<std::size_t> idx(npx);
        for (std::size_t i = 0; i < npx; ++i) idx[i] = i;
        std::partial_sort(idx.begin(), idx.begin() + n_mon, idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (fq.rel[a] != fq.rel[b])
                                  return fq.rel[a] > fq.rel[b];
                              return a < b;
                          });
        for (int i = 0; i < n_mon; ++i) {
            const std::size_t px = idx[static_cast<std::size_t>(i)];
            EchoExperiment ex;
            ex.model = cfg.model;
            ex.bands = cfg.bands;
            ex.apply_to = cfg.apply_to;
            ex.base = cfg.base;
            ex.leg_b = cfg.leg_b;
            ex.t_start = 0.0;
            ex.t_end = prep.tm.t4 + cfg.readout_window;
            ex.dt = cfg.dt;
            ex.threshold_frac = cfg.threshold_frac;
            auto pixel_pulse = [&](const PreparedFrame& fr) {
                PulseEnvelope env;
                env.center = fr.center;
                env.width = fr.width;
                env.peak_rabi = fr.peak[px];
                return env;
            };
            ex.schedule.write = pixel_pulse(prep.frames[0]);
            for (std::size_t f = 0; f < prep.n_query; ++f)
                ex.schedule.query.push_back(pixel_pulse(prep.frames[1 + f]));
            for (std::size_t f = 1 + prep.n_query; f < prep.frames.size(); ++f)
                ex.schedule.reference.push_back(pixel_pulse(prep.frames[f]));
            if (cfg.model == ModelKind::three_level &&
                cfg.leg_b == LegBMode::cw)
                ex.schedule.cw_leg_b = cfg.base.omega_b;

            MonitoredPixel mon;
            mon.x = static_cast<int>(px) % prep.opt.nx;
            mon.y = static_cast<int>(px) / prep.opt.nx;
            mon.query_amplitude = fq.rel[px] * fq.amp_max;
            mon.report = run_echo_experiment(ex).report;
            res.monitored.push_back(std::move(mon));
        }
    }
    return res;
}

ShiftReport shift_equivariance_test(const AerConfig& cfg,
                                    const std::vector<std::pair<int, int>>& shifts) {
    AerConfig base_cfg = cfg;
    base_cfg.monitor_pixels = 0;  // diagnostics add nothing to this check
    const AerResult base = run_aer(base_cfg);

    ShiftReport rep;
    rep.base = base.map;
    rep.all_positions_ok = true;
    const double amp0 = std::sqrt(base.map.peak_value);
    const int nx = base.map.nx, ny = base.map.ny;
    auto wrap = [](int v, int n) { return ((v % n) + n) % n; };

    for (const auto& [dx, dy] : shifts) {
        AerConfig shifted = base_cfg;
        for (auto& f : shifted.reference) f.image = circular_shift(f.image, dx, dy);
        const AerResult r = run_aer(shifted);

        ShiftCase c;
        c.dx = dx;
        c.dy = dy;
        c.peak_x = r.map.peak_x;
        c.peak_y = r.map.peak_y;
        c.expected_x = wrap(base.map.peak_x + dx, nx);
        c.expected_y = wrap(base.map.peak_y + dy, ny);
        c.amplitude = std::sqrt(r.map.peak_value);
        c.amplitude_dev = amp0 > 0.0 ? std::abs(c.amplitude - amp0) / amp0 : 0.0;
        c.position_ok = c.peak_x == c.expected_x && c.peak_y == c.expected_y;
        rep.all_positions_ok = rep.all_positions_ok && c.position_ok;
        rep.worst_amplitude_dev = std::max(rep.worst_amplitude_dev, c.amplitude_dev);
        rep.cases.push_back(c);
    }
    return rep;
}

std::vector<ModelPeak> model_comparison(const AerConfig& cfg,
                                        const std::array<double, 3>& areas) {
    const std::array<ModelKind, 3> models{
        ModelKind::two_level, ModelKind::three_level, ModelKind::effective};
    std::vector<ModelPeak> out;
    for (std::size_t i = 0; i < models.size(); ++i) {
        AerConfig c = cfg;
        c.model = models[i];
        c.monitor_pixels = 0;
        c.write_area = areas[i];
        for (auto& f : c.query) f.area = areas[i];
        for (auto& f : c.reference) f.area = areas[i];
        const AerResult r = run_aer(c);
        ModelPeak p;
        p.model = models[i];
        p.readout_time = r.map.readout_time;
        p.peak_x = r.map.peak_x;
        p.peak_y = r.map.peak_y;
        p.amplitude = std::sqrt(r.map.peak_value);
        out.push_back(p);
    }
    return out;
}

}  // namespace echosim
