#pragma once
// Ideal f-to-f lens propagation: the focal-plane field is the centered 2-D
// Fourier transform of the input field, scaled by -i e^{2ikL}/(lambda L),
// with frequency mapped to position through rho = lambda*L*f.  The DFT sum
// itself is unnormalized; the physical prefactor is carried explicitly so
// energy bookkeeping stays auditable.

#include <vector>

#include "echosim/image.hpp"
#include "echosim/types.hpp"

namespace echosim {

struct OpticsConfig {
    double wavelength = 1.0;
    double focal_length = 1.0;
    int nx = 0;
    int ny = 0;
    double pitch_in = 0.0;  // 0 selects the dimensionless default 1/nx

    double lambda_l() const { return wavelength * focal_length; }
    // focal-plane pixel pitch along each axis
    double pitch_out_x() const { return lambda_l() / (nx * pitch_in); }
    double pitch_out_y() const { return lambda_l() / (ny * pitch_in); }
};

// Fills defaults and checks positivity and even pixel counts (the centered
// index reordering assumes even N).  Returns the completed config.
OpticsConfig validate_optics(OpticsConfig cfg);

enum class Plane : std::uint32_t { slm = 0, atomic = 1, detector = 2 };

struct FieldGrid {
    OpticsConfig cfg;
    Plane plane = Plane::slm;
    std::vector<cxd> v;  // row-major, v[y*nx + x]

    cxd& at(int x, int y) { return v[static_cast<std::size_t>(y) * cfg.nx + x]; }
    const cxd& at(int x, int y) const {
        return v[static_cast<std::size_t>(y) * cfg.nx + x];
    }
};

FieldGrid make_field(const OpticsConfig& cfg, Plane plane = Plane::slm);

// Centered forward transform with the physical prefactor; advances the
// plane tag slm -> atomic -> detector.  Transforming a detector-plane field
// is rejected (there is no further lens in the apparatus).
FieldGrid lens_transform(const FieldGrid& in);

// Exact inverse of lens_transform (divides out the prefactor and the DFT
// grid factor); steps the plane tag back.
FieldGrid inverse_lens(const FieldGrid& in);

// The lens behind the atomic medium.  Optically it is the same forward
// transform; composed with the first lens that inverts the image through
// the origin, so the detector indices are flipped here, (x, y) ->
// (-x, -y) mod N, to make correlation-peak displacement equal the
// reference-image shift with sign +1.  See shift_equivariance_test.
FieldGrid second_lens(const FieldGrid& in);

// Per-pixel magnitude and phase.  Pixels darker than 1e-12 times the frame
// maximum report phase 0: the phase of a null field is undefined and the
// frame rotations need a fixed convention there.
std::vector<double> amplitude_map(const FieldGrid& f);
std::vector<double> phase_map(const FieldGrid& f);

double field_energy(const FieldGrid& f);  // sum of |v|^2

// Amplitude-only encoding of a grayscale frame (zero phase at the SLM).
// area_target and width describe the temporal envelope the caller attaches
// downstream (the brightest pixel's pulse area becomes area_target); they
// are validated here so a bad frame is rejected before any propagation.
FieldGrid encode_image(const Image& img, const OpticsConfig& cfg,
                       double area_target, double width);

// Cyclic shift by whole pixels (positive dx moves content toward +x).
FieldGrid circular_shift(const FieldGrid& f, int dx, int dy);

}  // namespace echosim
