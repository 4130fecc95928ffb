#include "echosim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace echosim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool to_double(const std::string& v, double& out) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty()) return false;
    out = d;
    return true;
}

bool to_int(const std::string& v, int& out) {
    errno = 0;
    char* end = nullptr;
    const long l = std::strtol(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty()) return false;
    if (l < -2147483647L || l > 2147483647L) return false;
    out = static_cast<int>(l);
    return true;
}

bool to_list(const std::string& v, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double d;
        if (!to_double(trim(item), d)) return false;
        out.push_back(d);
    }
    return !out.empty();
}

// "dx,dy; dx,dy; ..." pairs
bool to_shifts(const std::string& v, std::vector<std::pair<int, int>>& out) {
    out.clear();
    std::stringstream ss(v);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        const auto comma = pair.find(',');
        if (comma == std::string::npos) return false;
        int dx, dy;
        if (!to_int(trim(pair.substr(0, comma)), dx) ||
            !to_int(trim(pair.substr(comma + 1)), dy))
            return false;
        out.emplace_back(dx, dy);
    }
    return !out.empty();
}

}  // namespace

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::echo: return "echo";
        case RunMode::aer: return "aer";
        case RunMode::compare: return "compare";
        default: return "shift_test";
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig rc;
    std::vector<std::string> issues;
    std::set<std::string> seen;

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string stripped = trim(line);
        const auto hash = stripped.find('#');
        if (hash != std::string::npos) stripped = trim(stripped.substr(0, hash));
        if (stripped.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);

        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            issues.push_back(where + ": expected key=value");
            continue;
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key.empty() || val.empty()) {
            issues.push_back(where + ": expected key=value");
            continue;
        }
        if (!seen.insert(key).second) {
            issues.push_back(where + ": duplicate key '" + key + "'");
            continue;
        }

        auto bad_value = [&]() {
            issues.push_back(where + ": invalid value '" + val + "' for key '" +
                             key + "'");
        };
        auto num = [&](double& dst) {
            if (!to_double(val, dst)) bad_value();
        };
        auto integer = [&](int& dst) {
            if (!to_int(val, dst)) bad_value();
        };
        auto list = [&](std::vector<double>& dst) {
            if (!to_list(val, dst)) bad_value();
        };

        if (key == "mode") {
            if (val == "echo") rc.mode = RunMode::echo;
            else if (val == "aer") rc.mode = RunMode::aer;
            else if (val == "compare") rc.mode = RunMode::compare;
            else if (val == "shift_test") rc.mode = RunMode::shift_test;
            else bad_value();
        } else if (key == "model") {
            if (val == "two_level") rc.model = ModelKind::two_level;
            else if (val == "three_level") rc.model = ModelKind::three_level;
            else if (val == "effective") rc.model = ModelKind::effective;
            else bad_value();
        } else if (key == "schedule.t1") num(rc.t1);
        else if (key == "schedule.t2") num(rc.t2);
        else if (key == "schedule.t3") num(rc.t3);
        else if (key == "schedule.t_end") num(rc.t_end);
        else if (key == "schedule.shape") {
            if (val == "gaussian") rc.shape = PulseShape::gaussian;
            else if (val == "rectangular") rc.shape = PulseShape::rectangular;
            else bad_value();
        } else if (key == "schedule.width") num(rc.width);
        else if (key == "schedule.write_width") num(rc.write_width);
        else if (key == "schedule.area") num(rc.area);
        else if (key == "schedule.write_area") num(rc.write_area);
        else if (key == "schedule.query_scales") list(rc.query_scales);
        else if (key == "schedule.reference_scales") list(rc.reference_scales);
        else if (key == "schedule.packet_spacing") num(rc.packet_spacing);
        else if (key == "ensemble.width") num(rc.band_width);
        else if (key == "ensemble.n_bands") integer(rc.n_bands);
        else if (key == "ensemble.truncation") num(rc.truncation);
        else if (key == "ensemble.apply_to") {
            if (val == "delta1") rc.apply_to = BandApplyTo::delta1;
            else if (val == "common_mode") rc.apply_to = BandApplyTo::common_mode;
            else bad_value();
        } else if (key == "atom.omega_b") num(rc.base.omega_b);
        else if (key == "atom.delta1") num(rc.base.delta1);
        else if (key == "atom.delta2") num(rc.base.delta2);
        else if (key == "atom.gamma") num(rc.base.gamma);
        else if (key == "atom.leg_b") {
            if (val == "cw") rc.leg_b = LegBMode::cw;
            else if (val == "follow_a") rc.leg_b = LegBMode::follow_a;
            else bad_value();
        } else if (key == "sim.dt") num(rc.dt);
        else if (key == "sim.threshold") num(rc.threshold);
        else if (key == "optics.nx") integer(rc.optics.nx);
        else if (key == "optics.ny") integer(rc.optics.ny);
        else if (key == "optics.pitch") num(rc.optics.pitch_in);
        else if (key == "optics.wavelength") num(rc.optics.wavelength);
        else if (key == "optics.focal_length") num(rc.optics.focal_length);
        else if (key == "aer.write_radius") integer(rc.write_radius);
        else if (key == "aer.readout_window") num(rc.readout_window);
        else if (key == "aer.readout_dt") num(rc.readout_dt);
        else if (key == "aer.substeps") integer(rc.substeps);
        else if (key == "aer.monitor_pixels") integer(rc.monitor_pixels);
        else if (key == "aer.query_frame") rc.query_frame = val;
        else if (key == "aer.reference_frame") rc.reference_frame = val;
        else if (key == "aer.shifts") {
            if (!to_shifts(val, rc.shifts)) bad_value();
        } else if (key == "compare.area_two_level") num(rc.compare_areas[0]);
        else if (key == "compare.area_three_level") num(rc.compare_areas[1]);
        else if (key == "compare.area_effective") num(rc.compare_areas[2]);
        else if (key == "output.dir") rc.output_dir = val;
        else issues.push_back(where + ": unknown key '" + key + "'");
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    // Semantic pass: everything checked, everything reported.
    auto req = [&issues](bool ok, const std::string& msg) {
        if (!ok) issues.push_back(msg);
    };
    req(rc.t1 < rc.t2 && rc.t2 < rc.t3,
        "schedule: pulse times must satisfy t1 < t2 < t3");
    req(rc.width > 0.0, "schedule: width must be positive");
    req(rc.write_width >= 0.0, "schedule: write_width must be >= 0");
    req(rc.area > 0.0, "schedule: area must be positive");
    req(rc.write_area >= 0.0, "schedule: write_area must be >= 0");
    for (double s : rc.query_scales)
        req(s > 0.0, "schedule: query_scales must all be positive");
    for (double s : rc.reference_scales)
        req(s > 0.0, "schedule: reference_scales must all be positive");
    req(rc.packet_spacing >= 0.0, "schedule: packet_spacing must be >= 0");
    const std::size_t max_packet =
        std::max(rc.query_scales.size(), rc.reference_scales.size());
    if (max_packet > 1)
        req(rc.packet_spacing > 0.0,
            "schedule: packet_spacing is required for multi-pulse packets");
    req(rc.t_end >= 0.0, "schedule: t_end must be >= 0 (0 = automatic)");
    if (rc.t_end > 0.0)
        req(rc.t_end > rc.t4(),
            "schedule: t_end must lie beyond the stimulated echo at t3+t2-t1");

    req(rc.band_width > 0.0, "ensemble: width must be positive");
    req(rc.n_bands % 2 == 1 && rc.n_bands >= 33 && rc.n_bands <= 4097,
        "ensemble: n_bands must be odd and within [33, 4097]");
    req(rc.truncation >= 3.0 && rc.truncation <= 6.0,
        "ensemble: truncation must lie in [3, 6] (below 3 clips the "
        "distribution, above 6 wastes bands)");

    req(rc.base.gamma >= 0.0, "atom: gamma must be >= 0");
    req(rc.dt >= 0.0, "sim: dt must be >= 0 (0 = automatic)");
    req(rc.threshold > 0.0 && rc.threshold < 1.0,
        "sim: threshold must lie in (0, 1)");

    const bool uses_optics = rc.mode != RunMode::echo;
    if (uses_optics) {
        try {
            rc.optics = validate_optics(rc.optics);
        } catch (const ValidationError& e) {
            for (const auto& s : e.issues()) issues.push_back("optics: " + s);
        }
        req(rc.optics.nx <= 128 && rc.optics.ny <= 128,
            "optics.nx/optics.ny: grids beyond 128x128 exceed the supported "
            "desk scale");
        req(max_packet <= 3,
            "schedule: clips beyond 3 frames exceed the supported desk scale");
        req(rc.shape == PulseShape::gaussian,
            "schedule: the recognition pipeline uses gaussian frame pulses");
        req(rc.write_radius >= 0, "aer: write_radius must be >= 0");
        req(rc.readout_window > 0.0, "aer: readout_window must be positive");
        req(rc.readout_dt >= 0.0, "aer: readout_dt must be >= 0 (0 = automatic)");
        req(rc.substeps >= 8, "aer: substeps must be >= 8");
        req(rc.monitor_pixels >= 0, "aer: monitor_pixels must be >= 0");
        req(!rc.query_frame.empty(), "aer: query_frame must not be empty");
        for (const auto& [dx, dy] : rc.shifts)
            req(4 * std::abs(dx) <= rc.optics.nx && 4 * std::abs(dy) <= rc.optics.ny,
                "aer: shifts beyond a quarter of the grid leave the "
                "equivariant regime");
    }
    for (double a : rc.compare_areas)
        req(a > 0.0, "compare: per-model areas must be positive");

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return rc;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ValidationError& e) {
        std::vector<std::string> issues;
        for (const auto& s : e.issues()) issues.push_back(path + ": " + s);
        throw ValidationError(std::move(issues));
    }
}

PulseSchedule make_schedule(const RunConfig& rc) {
    PulseSchedule s;
    const double ww = rc.write_width > 0.0 ? rc.write_width : rc.width;
    const double wa = rc.write_area > 0.0 ? rc.write_area : rc.area;
    s.write = rc.shape == PulseShape::gaussian
                  ? gaussian_pulse(rc.t1, ww, wa)
                  : rectangular_pulse(rc.t1, ww, wa);
    s.query = make_packet(rc.t2, rc.packet_spacing, rc.query_scales, rc.area,
                          rc.width, rc.shape);
    s.reference = make_packet(rc.t3, rc.packet_spacing, rc.reference_scales,
                              rc.area, rc.width, rc.shape);
    if (rc.model == ModelKind::three_level && rc.leg_b == LegBMode::cw)
        s.cw_leg_b = rc.base.omega_b;
    return s;
}

EchoExperiment make_echo_experiment(const RunConfig& rc) {
    EchoExperiment ex;
    ex.model = rc.model;
    ex.schedule = make_schedule(rc);
    ex.bands = detuning_grid(rc.band_width, rc.n_bands, rc.truncation);
    ex.apply_to = rc.apply_to;
    ex.base = rc.base;
    ex.leg_b = rc.leg_b;
    ex.t_start = 0.0;
    ex.t_end = rc.t_end > 0.0 ? rc.t_end : rc.t4() + 0.7;
    ex.dt = rc.dt;
    ex.threshold_frac = rc.threshold;
    return ex;
}

AerConfig make_aer_config(const RunConfig& rc, const Image& query,
                          const Image& reference) {
    AerConfig a;
    a.model = rc.model;
    a.optics = rc.optics;
    a.bands = detuning_grid(rc.band_width, rc.n_bands, rc.truncation);
    a.apply_to = rc.apply_to;
    a.base = rc.base;
    a.leg_b = rc.leg_b;
    a.write_radius_px = rc.write_radius;
    a.write_area = rc.write_area > 0.0 ? rc.write_area : rc.area;
    a.write_width = rc.write_width;  // 0 keeps the engine default
    a.t1 = rc.t1;
    auto packet = [&rc](const Image& img, double nominal,
                        const std::vector<double>& scales) {
        std::vector<AerFrameSpec> out;
        const double n = static_cast<double>(scales.size());
        for (std::size_t m = 0; m < scales.size(); ++m) {
            const double off =
                (static_cast<double>(m) - 0.5 * (n - 1.0)) * rc.packet_spacing;
            out.push_back(AerFrameSpec{img, nominal + off,
                                       rc.area * scales[m], rc.width});
        }
        return out;
    };
    a.query = packet(query, rc.t2, rc.query_scales);
    a.reference = packet(reference, rc.t3, rc.reference_scales);
    a.readout_window = rc.readout_window;
    a.readout_dt = rc.readout_dt;
    a.dt = rc.dt;
    a.pulse_substeps = rc.substeps;
    a.monitor_pixels = rc.monitor_pixels;
    a.threshold_frac = rc.threshold;
    return a;
}

}  // namespace echosim
