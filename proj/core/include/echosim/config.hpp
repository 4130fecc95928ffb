#pragma once
// Run configuration: one flat key=value file with dotted section prefixes
// (ensemble.n_bands=65).  Parsing is strict in both directions: unknown keys
// are rejected, and every violation in the file is reported at once rather
// than one per run attempt.  There is no seed anywhere; runs are fully
// deterministic.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "echosim/aer.hpp"
#include "echosim/echo.hpp"

namespace echosim {

enum class RunMode { echo, aer, compare, shift_test };

const char* run_mode_name(RunMode m);

struct RunConfig {
    RunMode mode = RunMode::echo;
    ModelKind model = ModelKind::two_level;

    // schedule: write pulse at t1, query packet on t2, reference packet on
    // t3.  Packet sub-pulse areas are area * scale, symmetric offsets spaced
    // by packet_spacing.
    double t1 = 1.5;
    double t2 = 4.0;
    double t3 = 10.5;
    double t_end = 0.0;  // echo trace end; 0 = just past the stimulated echo
    PulseShape shape = PulseShape::gaussian;
    double width = 0.01;        // gaussian 1/e half-width or rect duration
    double write_width = 0.0;   // 0 = width (echo) / engine default (aer)
    double area = 0.62831853071795865;  // pi/5
    double write_area = 0.0;    // 0 = area
    std::vector<double> query_scales{1.0};
    std::vector<double> reference_scales{1.0};
    double packet_spacing = 0.0;

    // inhomogeneous ensemble
    double band_width = 7.0;
    int n_bands = 65;
    double truncation = 4.0;
    BandApplyTo apply_to = BandApplyTo::delta1;

    // static atom parameters; omega_a comes from the pulses
    ThreeLevelParams base;
    LegBMode leg_b = LegBMode::cw;

    double dt = 0.0;          // 0 = automatic step
    double threshold = 0.05;  // echo detection threshold fraction

    OpticsConfig optics{1.0, 1.0, 128, 128, 0.0};

    // recognition pipeline
    int write_radius = 0;
    double readout_window = 0.7;
    double readout_dt = 0.0;
    int substeps = 96;
    int monitor_pixels = 5;
    std::string query_frame = "builtin:A";  // PGM path or builtin glyph
    std::string reference_frame;            // empty = query_frame
    std::vector<std::pair<int, int>> shifts{{8, 8}, {8, -8}, {-8, 8}, {-8, -8}};

    // per-model areas for the comparison mode
    std::array<double, 3> compare_areas{0.62831853071795865,
                                        0.31415926535897932,
                                        1.0471975511965977};

    std::string output_dir;  // empty = runner picks "run_<mode>"

    double t4() const { return t3 + t2 - t1; }
};

// Parses and validates a config file; every problem found is collected into
// one ValidationError.  parse_config_text works on the raw text (the file
// variant reports the path in its errors).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Builders mapping the flat config onto the domain structs.  Frame images
// are supplied by the caller; file loading lives with the other readers.
PulseSchedule make_schedule(const RunConfig& rc);
EchoExperiment make_echo_experiment(const RunConfig& rc);
AerConfig make_aer_config(const RunConfig& rc, const Image& query,
                          const Image& reference);

}  // namespace echosim
