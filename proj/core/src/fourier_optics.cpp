#include "echosim/fourier_optics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

namespace echosim {

namespace {

// FFTW's planner is not thread-safe (execution is); serialize plan
// create/destroy so transforms can be issued from worker threads too.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Unnormalized in-place 2-D transform.  FFTW_ESTIMATE keeps planning
// deterministic and leaves the input untouched during planning.
void dft2(std::vector<cxd>& v, int nx, int ny, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(v.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_2d(ny, nx, p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

// Swap half-planes along both axes.  For even N this is both fftshift and
// its inverse, which is why odd pixel counts are rejected up front.
void half_swap(std::vector<cxd>& v, int nx, int ny) {
    std::vector<cxd> tmp(v.size());
    const int hx = nx / 2, hy = ny / 2;
    for (int y = 0; y < ny; ++y) {
        const int ys = (y + hy) % ny;
        for (int x = 0; x < nx; ++x)
            tmp[static_cast<std::size_t>(ys) * nx + (x + hx) % nx] =
                v[static_cast<std::size_t>(y) * nx + x];
    }
    v.swap(tmp);
}

cxd lens_prefactor(const OpticsConfig& cfg) {
    const double k = 2.0 * kPi / cfg.wavelength;
    return cxd(0.0, -1.0) *
           std::polar(1.0 / cfg.lambda_l(), 2.0 * k * cfg.focal_length);
}

Plane next_plane(Plane p) {
    switch (p) {
        case Plane::slm: return Plane::atomic;
        case Plane::atomic: return Plane::detector;
        default:
            throw ValidationError(
                "lens_transform: no lens behind the detector plane");
    }
}

Plane prev_plane(Plane p) {
    switch (p) {
        case Plane::detector: return Plane::atomic;
        case Plane::atomic: return Plane::slm;
        default:
            throw ValidationError("inverse_lens: already at the SLM plane");
    }
}

}  // namespace

OpticsConfig validate_optics(OpticsConfig cfg) {
    std::vector<std::string> issues;
    if (cfg.nx <= 0 || cfg.ny <= 0)
        issues.push_back("optics: pixel counts must be positive");
    else if (cfg.nx % 2 != 0 || cfg.ny % 2 != 0)
        issues.push_back("optics: pixel counts must be even (centered transform)");
    if (cfg.pitch_in == 0.0 && cfg.nx > 0) cfg.pitch_in = 1.0 / cfg.nx;
    if (cfg.pitch_in <= 0.0) issues.push_back("optics: pitch_in must be positive");
    if (cfg.wavelength <= 0.0) issues.push_back("optics: wavelength must be positive");
    if (cfg.focal_length <= 0.0)
        issues.push_back("optics: focal_length must be positive");
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return cfg;
}

FieldGrid make_field(const OpticsConfig& cfg, Plane plane) {
    FieldGrid f;
    f.cfg = cfg;
    f.plane = plane;
    f.v.assign(static_cast<std::size_t>(cfg.nx) * cfg.ny, cxd(0.0));
    return f;
}

FieldGrid lens_transform(const FieldGrid& in) {
    FieldGrid out = in;
    out.plane = next_plane(in.plane);
    half_swap(out.v, in.cfg.nx, in.cfg.ny);
    dft2(out.v, in.cfg.nx, in.cfg.ny, FFTW_FORWARD);
    half_swap(out.v, in.cfg.nx, in.cfg.ny);
    const cxd pref = lens_prefactor(in.cfg);
    for (auto& z : out.v) z *= pref;
    return out;
}

FieldGrid inverse_lens(const FieldGrid& in) {
    FieldGrid out = in;
    out.plane = prev_plane(in.plane);
    half_swap(out.v, in.cfg.nx, in.cfg.ny);
    dft2(out.v, in.cfg.nx, in.cfg.ny, FFTW_BACKWARD);
    half_swap(out.v, in.cfg.nx, in.cfg.ny);
    const cxd scale =
        1.0 / (lens_prefactor(in.cfg) *
               static_cast<double>(static_cast<std::size_t>(in.cfg.nx) * in.cfg.ny));
    for (auto& z : out.v) z *= scale;
    return out;
}

FieldGrid second_lens(const FieldGrid& in) {
    if (in.plane != Plane::atomic)
        throw ValidationError("second_lens: input must be on the atomic plane");
    FieldGrid fwd = lens_transform(in);
    // Two forward transforms invert the image through the origin; undo that
    // here so a reference-image shift moves the detector peak the same way
    // (parity +1, the convention all shift reports use).
    FieldGrid out = fwd;
    const int nx = in.cfg.nx, ny = in.cfg.ny;
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
            out.at((nx - x) % nx, (ny - y) % ny) = fwd.at(x, y);
    return out;
}

std::vector<double> amplitude_map(const FieldGrid& f) {
    std::vector<double> a(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) a[i] = std::abs(f.v[i]);
    return a;
}

std::vector<double> phase_map(const FieldGrid& f) {
    double amax = 0.0;
    for (const auto& z : f.v) amax = std::max(amax, std::abs(z));
    const double eps = 1e-12 * amax;
    std::vector<double> ph(f.v.size(), 0.0);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (std::abs(f.v[i]) > eps) ph[i] = std::arg(f.v[i]);
    return ph;
}

double field_energy(const FieldGrid& f) {
    double e = 0.0;
    for (const auto& z : f.v) e += std::norm(z);
    return e;
}

FieldGrid encode_image(const Image& img, const OpticsConfig& cfg,
                       double area_target, double width) {
    std::vector<std::string> issues;
    if (img.nx != cfg.nx || img.ny != cfg.ny)
        issues.push_back("encode_image: frame is " + std::to_string(img.nx) +
                         "x" + std::to_string(img.ny) + " but optics expect " +
                         std::to_string(cfg.nx) + "x" + std::to_string(cfg.ny));
    for (double p : img.pix) {
        if (!(p >= 0.0 && p <= 1.0)) {
            issues.push_back("encode_image: pixel values must lie in [0, 1]");
            break;
        }
    }
    if (!(area_target > 0.0))
        issues.push_back("encode_image: pulse area must be positive");
    if (!(width > 0.0))
        issues.push_back("encode_image: pulse width must be positive");
    if (!issues.empty()) throw ValidationError(std::move(issues));

    FieldGrid f = make_field(cfg, Plane::slm);
    for (std::size_t i = 0; i < img.pix.size(); ++i) f.v[i] = img.pix[i];
    return f;
}

FieldGrid circular_shift(const FieldGrid& f, int dx, int dy) {
    FieldGrid out = f;
    auto wrap = [](int i, int n) {
        const int r = i % n;
        return r < 0 ? r + n : r;
    };
    for (int y = 0; y < f.cfg.ny; ++y)
        for (int x = 0; x < f.cfg.nx; ++x)
            out.at(wrap(x + dx, f.cfg.nx), wrap(y + dy, f.cfg.ny)) = f.at(x, y);
    return out;
}

}  // namespace echosim
