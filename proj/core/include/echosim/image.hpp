#pragma once
// Grayscale frames: the container, cyclic shifting for the equivariance
// tests, and the procedural letter-A test glyph.

#include <vector>

#include "echosim/types.hpp"

namespace echosim {

struct Image {
    int nx = 0;
    int ny = 0;
    std::vector<double> pix;  // row-major, [0, 1]

    double& at(int x, int y) { return pix[static_cast<std::size_t>(y) * nx + x]; }
    const double& at(int x, int y) const {
        return pix[static_cast<std::size_t>(y) * nx + x];
    }
};

Image make_image(int nx, int ny, double fill = 0.0);

// Cyclic shift by whole pixels; positive dx moves content toward +x
// (larger column index), positive dy toward +y.
Image circular_shift(const Image& img, int dx, int dy);

// Procedural letter A, centered, with antialiased strokes: two
// quadratic-bezier bowed legs and a heavy crossbar at mid-height.  The legs
// are bowed on purpose: a straight stroke overlaps itself entirely under
// point reflection about its midpoint, which plants strong off-center peaks
// in the glyph's autocorrelation, while a curved stroke only grazes its
// reflected self.  With the heavy centered crossbar the autocorrelation
// argmax sits at the exact center with a healthy margin, which is what the
// recognition tests need from a ground-truth pattern.
Image letter_a(int n);

}  // namespace echosim
