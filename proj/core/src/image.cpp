#include "echosim/image.hpp"

#include <algorithm>
#include <cmath>

namespace echosim {

namespace {

struct P {
    double x, y;
};

// distance from (px, py) to the polyline through pts
double poly_dist(double px, double py, const std::vector<P>& pts) {
    double d = 1e9;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double ax = pts[k].x, ay = pts[k].y;
        const double vx = pts[k + 1].x - ax, vy = pts[k + 1].y - ay;
        const double l2 = vx * vx + vy * vy + 1e-12;
        const double t =
            std::clamp(((px - ax) * vx + (py - ay) * vy) / l2, 0.0, 1.0);
        d = std::min(d, std::hypot(px - (ax + t * vx), py - (ay + t * vy)));
    }
    return d;
}

std::vector<P> bezier(P p0, P p1, P p2, int n = 60) {
    std::vector<P> out(n);
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        const double a = (1.0 - t) * (1.0 - t), b = 2.0 * t * (1.0 - t),
                     c = t * t;
        out[k] = {a * p0.x + b * p1.x + c * p2.x,
                  a * p0.y + b * p1.y + c * p2.y};
    }
    return out;
}

// one-pixel soft edge around a stroke of half-width w
double soft(double d, double w) { return std::clamp(w - d + 0.5, 0.0, 1.0); }

}  // namespace

Image make_image(int nx, int ny, double fill) {
    if (nx <= 0 || ny <= 0) throw ValidationError("image dimensions must be positive");
    Image img;
    img.nx = nx;
    img.ny = ny;
    img.pix.assign(static_cast<std::size_t>(nx) * ny, fill);
    return img;
}

Image circular_shift(const Image& img, int dx, int dy) {
    Image out = img;
    auto wrap = [](int i, int n) {
        const int r = i % n;
        return r < 0 ? r + n : r;
    };
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x)
            out.at(wrap(x + dx, img.nx), wrap(y + dy, img.ny)) = img.at(x, y);
    return out;
}

Image letter_a(int n) {
    const double box = std::round(0.375 * n);
    const double wl = 0.04 * box;   // leg stroke half-width
    const double wc = 0.18 * box;   // crossbar half-width
    const double bow = 0.22 * box;  // control-point offset of the leg bend
    const double spread = 0.42 * box;
    const double cx = 0.5 * n, cy = 0.5 * n;
    const double top = cy - 0.5 * box, bot = cy + 0.5 * box;

    const auto leg_l =
        bezier({cx, top}, {cx - 0.5 * spread - bow, cy}, {cx - spread, bot});
    const auto leg_r =
        bezier({cx, top}, {cx + 0.5 * spread + bow, cy}, {cx + spread, bot});
    const double half_c = 0.5 * spread + 0.5 * bow;
    const std::vector<P> bar{{cx - half_c, cy}, {cx + half_c, cy}};

    // The glyph is mirror-symmetric about x = n/2 by construction; render the
    // left half and copy it across so the symmetry holds bit-exactly.
    Image img = make_image(n, n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; 2 * ix <= n; ++ix) {
            const double x = ix, y = iy;
            const double v = std::max({soft(poly_dist(x, y, leg_l), wl),
                                       soft(poly_dist(x, y, leg_r), wl),
                                       soft(poly_dist(x, y, bar), wc)});
            img.at(ix, iy) = v;
            if (ix >= 1) img.at(n - ix, iy) = v;
        }
    }
    return img;
}

}  // namespace echosim
