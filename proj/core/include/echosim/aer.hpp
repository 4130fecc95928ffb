#pragma once
// The full recognition pipeline: each video frame is imprinted on the SLM,
// propagated through the first lens, and drives every pixel of the atomic
// plane as one pulse of a stimulated-echo sequence (write, query packet,
// reference packet).  Per pixel the drive amplitude is the local field
// magnitude and the optical phase is absorbed into a Q frame, with
// frame-to-frame rotations applied between pulses.  At the echo time the
// per-pixel coherence radiates back out, and the second lens turns the
// pixelwise product of stored and recalled patterns into a correlation map
// whose peak marks the recognized event and its displacement.

#include <utility>
#include <vector>

#include "echosim/echo.hpp"
#include "echosim/ensemble.hpp"
#include "echosim/fourier_optics.hpp"
#include "echosim/image.hpp"
#include "echosim/three_level.hpp"
#include "echosim/types.hpp"

namespace echosim {

enum class FrameRole { query, reference };

// A short ordered stack of frames with their pulse centers.  For a matched
// event the reference clip plays the query's frames in reverse order (the
// echo rephases first-in last-out).
struct EventClip {
    std::vector<Image> frames;
    std::vector<double> frame_times;
    FrameRole role = FrameRole::query;
};

// One frame bound to its temporal pulse: the brightest pixel's area hits
// `area`, every other pixel scales with its atomic-plane field magnitude.
struct AerFrameSpec {
    Image image;
    double time = 0.0;
    double area = 0.0;
    double width = 0.0;  // gaussian temporal width
};

std::vector<AerFrameSpec> frames_from_clip(const EventClip& clip,
                                           const std::vector<double>& areas,
                                           double width);

struct AerConfig {
    ModelKind model = ModelKind::two_level;
    OpticsConfig optics;
    DetuningGrid bands;
    BandApplyTo apply_to = BandApplyTo::delta1;
    ThreeLevelParams base;  // static detunings, cw omega_b, gamma
    LegBMode leg_b = LegBMode::cw;

    // write pulse: plain beam from a small SLM spot
    int write_radius_px = 0;  // 0 = single pixel, exact plane wave
    double write_area = 0.0;
    double write_width = 0.0;  // 0 = narrowest frame width / 3
    double t1 = 0.0;

    std::vector<AerFrameSpec> query;
    std::vector<AerFrameSpec> reference;

    double readout_window = 0.7;  // scan T4 +- this
    double readout_dt = 0.0;      // 0 = 0.05/(truncation*band width)
    double dt = 0.0;              // master-equation window step (0 = auto)
    int pulse_substeps = 96;      // two-level midpoint steps per pulse window
    int monitor_pixels = 5;       // per-pixel echo diagnostics, 0 disables
    double threshold_frac = 0.05;
};

struct CorrelationMap {
    int nx = 0, ny = 0;
    std::vector<double> intensities;  // detector-plane |field|^2, row-major
    int peak_x = 0, peak_y = 0;
    double peak_value = 0.0;
    double readout_time = 0.0;
};

struct MonitoredPixel {
    int x = 0, y = 0;
    double query_amplitude = 0.0;  // atomic-plane |E| that selected it
    EchoReport report;
};

struct AerResult {
    CorrelationMap map;
    FieldGrid detector;                // complex detector field at readout
    std::vector<MonitoredPixel> monitored;
    double t4 = 0.0;
    double readout_dt = 0.0;
    // total radiated energy vs readout time (the Parseval image of the
    // detector energy); the map snapshot is taken at its argmax
    std::vector<double> energy_times;
    std::vector<double> energy;
};

// The writing beam: a top-hat spot of the given radius (0 = one pixel) at
// the SLM center plus a unit-area gaussian envelope of the given duration,
// centered at t = 0 for the caller to place.  A spot wider than a quarter
// of the grid no longer looks like a plane wave at the atomic plane and is
// rejected.
std::pair<FieldGrid, PulseEnvelope> build_write_frame(const OpticsConfig& cfg,
                                                      int spot_radius_px,
                                                      double duration);

AerResult run_aer(const AerConfig& cfg);

struct ShiftCase {
    int dx = 0, dy = 0;
    int peak_x = 0, peak_y = 0;
    int expected_x = 0, expected_y = 0;
    double amplitude = 0.0;
    double amplitude_dev = 0.0;  // relative to the unshifted run
    bool position_ok = false;
};

struct ShiftReport {
    CorrelationMap base;
    std::vector<ShiftCase> cases;
    bool all_positions_ok = false;
    double worst_amplitude_dev = 0.0;
};

// Re-runs the pipeline with the reference images cyclically shifted and
// checks that the correlation peak moves by exactly the same vector
// (second_lens parity +1) with amplitude preserved.
ShiftReport shift_equivariance_test(const AerConfig& cfg,
                                    const std::vector<std::pair<int, int>>& shifts);

struct ModelPeak {
    ModelKind model = ModelKind::two_level;
    double readout_time = 0.0;
    int peak_x = 0, peak_y = 0;
    double amplitude = 0.0;  // detector peak |field|
};

// Runs the identical schedule and images through all three models, with the
// frame areas rescaled per model (the conventional areas differ because the
// models' drive variables differ).  areas = {two_level, three_level,
// effective}.
std::vector<ModelPeak> model_comparison(const AerConfig& cfg,
                                        const std::array<double, 3>& areas);

}  // namespace echosim
