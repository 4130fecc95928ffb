// Command-line front end.  Every run writes a self-contained output
// directory (config copy, report, artifacts) and prints a one-line summary;
// exit codes: 0 success, 1 bad configuration, 2 numeric failure.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "echosim/config.hpp"
#include "echosim/io.hpp"

namespace fs = std::filesystem;
using namespace echosim;

namespace {

std::string fmt(double v, int digits = 17) {
    std::ostringstream o;
    o.precision(digits);
    o << v;
    return o.str();
}

using Report = std::vector<std::pair<std::string, std::string>>;

Image resolve_frame(const std::string& spec, const OpticsConfig& opt) {
    if (spec.rfind("builtin:", 0) == 0) {
        if (spec == "builtin:A") {
            if (opt.nx != opt.ny)
                throw ValidationError(
                    "the builtin glyph needs a square grid (got " +
                    std::to_string(opt.nx) + "x" + std::to_string(opt.ny) + ")");
            return letter_a(opt.nx);
        }
        throw ValidationError("unknown builtin frame '" + spec + "'");
    }
    return load_frame_pgm(spec);
}

// Output directory with the config copied alongside the artifacts, so a run
// can be reproduced from its own folder.
fs::path make_run_dir(const RunConfig& rc, const std::string& cli_out,
                      const std::string& config_path) {
    fs::path dir = !cli_out.empty()
                       ? fs::path(cli_out)
                       : (!rc.output_dir.empty()
                              ? fs::path(rc.output_dir)
                              : fs::path(std::string("run_") +
                                         run_mode_name(rc.mode)));
    fs::create_directories(dir);
    fs::copy_file(config_path, dir / "config.cfg",
                  fs::copy_options::overwrite_existing);
    return dir;
}

void append_peaks(Report& rep, const EchoReport& er, const std::string& prefix) {
    rep.emplace_back(prefix + "threshold", fmt(er.threshold));
    rep.emplace_back(prefix + "peaks", std::to_string(er.peaks.size()));
    for (std::size_t i = 0; i < er.peaks.size(); ++i) {
        const EchoPeak& p = er.peaks[i];
        const std::string key = prefix + "peak" + std::to_string(i) + ".";
        rep.emplace_back(key + "kind", echo_kind_name(p.kind));
        rep.emplace_back(key + "t", fmt(p.time));
        rep.emplace_back(key + "amplitude", fmt(p.amplitude));
        if (p.kind != EchoKind::unidentified)
            rep.emplace_back(key + "expected_t", fmt(p.expected_time));
    }
}

int run_echo_mode(const RunConfig& rc, const fs::path& dir) {
    const EchoExperiment ex = make_echo_experiment(rc);
    const EchoResult res = run_echo_experiment(ex);

    std::vector<double> times(res.magnitude.size());
    for (std::size_t k = 0; k < times.size(); ++k)
        times[k] = res.grid.t(static_cast<std::int64_t>(k));
    write_trace_csv(times, res.dipole, (dir / "trace.csv").string());

    Report rep;
    rep.emplace_back("mode", "echo");
    rep.emplace_back("model", model_kind_name(rc.model));
    rep.emplace_back("dt", fmt(res.dt_used));
    rep.emplace_back("n_bands", std::to_string(rc.n_bands));
    rep.emplace_back("t4_expected", fmt(rc.t4()));
    append_peaks(rep, res.report, "echo.");
    write_report(rep, (dir / "report.txt").string());

    const EchoPeak* st = res.report.find(EchoKind::stimulated);
    const EchoPeak* top = st;
    if (!top)
        for (const auto& p : res.report.peaks)
            if (!top || p.amplitude > top->amplitude) top = &p;
    if (top) {
        std::cout << echo_kind_name(top->kind) << " echo |P| = "
                  << fmt(top->amplitude, 6) << " at t = " << fmt(top->time, 6)
                  << " (T3+T2-T1 = " << fmt(rc.t4(), 6) << ")\n";
    } else {
        std::cout << "no echo peaks above threshold (max |P| "
                  << fmt(*std::max_element(res.magnitude.begin(),
                                           res.magnitude.end()),
                         6)
                  << ")\n";
    }
    return 0;
}

int run_aer_mode(const RunConfig& rc, const fs::path& dir) {
    const Image query = resolve_frame(rc.query_frame, rc.optics);
    const Image reference =
        rc.reference_frame.empty() ? query
                                   : resolve_frame(rc.reference_frame, rc.optics);
    const AerConfig cfg = make_aer_config(rc, query, reference);
    const AerResult res = run_aer(cfg);

    write_field(res.detector, (dir / "correlation.fldg").string());
    const PngScale sc = render_png(res.map.intensities, res.map.nx, res.map.ny,
                                   (dir / "correlation.png").string());

    Report rep;
    rep.emplace_back("mode", "aer");
    rep.emplace_back("model", model_kind_name(rc.model));
    rep.emplace_back("t4_expected", fmt(res.t4));
    rep.emplace_back("readout.t", fmt(res.map.readout_time));
    rep.emplace_back("readout.dt", fmt(res.readout_dt));
    rep.emplace_back("peak.x", std::to_string(res.map.peak_x));
    rep.emplace_back("peak.y", std::to_string(res.map.peak_y));
    rep.emplace_back("peak.intensity", fmt(res.map.peak_value));
    rep.emplace_back("png.lo", fmt(sc.lo));
    rep.emplace_back("png.hi", fmt(sc.hi));
    rep.emplace_back("png.scale", fmt(sc.scale));
    for (std::size_t i = 0; i < res.monitored.size(); ++i) {
        const MonitoredPixel& m = res.monitored[i];
        const std::string key = "monitor" + std::to_string(i) + ".";
        rep.emplace_back(key + "x", std::to_string(m.x));
        rep.emplace_back(key + "y", std::to_string(m.y));
        rep.emplace_back(key + "query_amplitude", fmt(m.query_amplitude));
        append_peaks(rep, m.report, key);
    }
    write_report(rep, (dir / "report.txt").string());

    std::cout << "correlation peak " << fmt(res.map.peak_value, 6) << " at ("
              << res.map.peak_x << ", " << res.map.peak_y << "), t = "
              << fmt(res.map.readout_time, 6) << " (T3+T2-T1 = "
              << fmt(res.t4, 6) << ")\n";
    return 0;
}

int run_compare_mode(const RunConfig& rc, const fs::path& dir) {
    const Image query = resolve_frame(rc.query_frame, rc.optics);
    const Image reference =
        rc.reference_frame.empty() ? query
                                   : resolve_frame(rc.reference_frame, rc.optics);
    const AerConfig cfg = make_aer_config(rc, query, reference);
    const auto peaks = model_comparison(cfg, rc.compare_areas);

    Report rep;
    rep.emplace_back("mode", "compare");
    for (const auto& p : peaks) {
        const std::string key = std::string(model_kind_name(p.model)) + ".";
        rep.emplace_back(key + "t", fmt(p.readout_time));
        rep.emplace_back(key + "x", std::to_string(p.peak_x));
        rep.emplace_back(key + "y", std::to_string(p.peak_y));
        rep.emplace_back(key + "amplitude", fmt(p.amplitude));
    }
    write_report(rep, (dir / "report.txt").string());

    std::cout << "peak |field| per model:";
    for (const auto& p : peaks)
        std::cout << " " << model_kind_name(p.model) << " "
                  << fmt(p.amplitude, 6) << " @ t=" << fmt(p.readout_time, 6);
    std::cout << "\n";
    return 0;
}

int run_shift_mode(const RunConfig& rc, const fs::path& dir) {
    const Image query = resolve_frame(rc.query_frame, rc.optics);
    const Image reference =
        rc.reference_frame.empty() ? query
                                   : resolve_frame(rc.reference_frame, rc.optics);
    const AerConfig cfg = make_aer_config(rc, query, reference);
    const ShiftReport res = shift_equivariance_test(cfg, rc.shifts);

    render_png(res.base.intensities, res.base.nx, res.base.ny,
               (dir / "base_correlation.png").string());
    Report rep;
    rep.emplace_back("mode", "shift_test");
    rep.emplace_back("model", model_kind_name(rc.model));
    rep.emplace_back("base.x", std::to_string(res.base.peak_x));
    rep.emplace_back("base.y", std::to_string(res.base.peak_y));
    rep.emplace_back("base.intensity", fmt(res.base.peak_value));
    int ok = 0;
    for (std::size_t i = 0; i < res.cases.size(); ++i) {
        const ShiftCase& c = res.cases[i];
        const std::string key = "shift" + std::to_string(i) + ".";
        rep.emplace_back(key + "dxdy", std::to_string(c.dx) + "," +
                                           std::to_string(c.dy));
        rep.emplace_back(key + "peak",
                         std::to_string(c.peak_x) + "," + std::to_string(c.peak_y));
        rep.emplace_back(key + "expected", std::to_string(c.expected_x) + "," +
                                               std::to_string(c.expected_y));
        rep.emplace_back(key + "amplitude", fmt(c.amplitude));
        rep.emplace_back(key + "amplitude_dev", fmt(c.amplitude_dev));
        rep.emplace_back(key + "position_ok", c.position_ok ? "yes" : "no");
        ok += c.position_ok ? 1 : 0;
    }
    rep.emplace_back("all_positions_ok", res.all_positions_ok ? "yes" : "no");
    rep.emplace_back("worst_amplitude_dev", fmt(res.worst_amplitude_dev));
    write_report(rep, (dir / "report.txt").string());

    std::cout << ok << "/" << res.cases.size()
              << " shifts track the reference displacement exactly, worst "
                 "amplitude deviation "
              << fmt(100.0 * res.worst_amplitude_dev, 3) << "%\n";
    return 0;
}

int dispatch(RunMode want, const std::string& config_path,
             const std::string& cli_out) {
    const RunConfig rc = parse_config(config_path);
    if (rc.mode != want) {
        throw ValidationError(std::string("config mode '") +
                              run_mode_name(rc.mode) +
                              "' does not match the subcommand '" +
                              run_mode_name(want) + "'");
    }
    const fs::path dir = make_run_dir(rc, cli_out, config_path);
    switch (want) {
        case RunMode::echo: return run_echo_mode(rc, dir);
        case RunMode::aer: return run_aer_mode(rc, dir);
        case RunMode::compare: return run_compare_mode(rc, dir);
        default: return run_shift_mode(rc, dir);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stimulated-photon-echo simulator and pattern recognizer"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        RunMode mode;
        std::string config;
        std::string output;
        bool validate_only = false;
    };
    std::vector<Sub> subs;
    subs.reserve(8);  // add_option binds references into the elements
    auto add = [&](const char* name, const char* help, RunMode mode,
                   bool validate_only) {
        CLI::App* c = app.add_subcommand(name, help);
        subs.push_back({c, mode, "", "", validate_only});
        Sub& s = subs.back();
        c->add_option("--config", s.config, "run configuration file")
            ->required();
        if (!validate_only)
            c->add_option("--output", s.output,
                          "output directory (default: config output.dir or "
                          "run_<mode>)");
    };
    add("echo", "single-spot echo trace", RunMode::echo, false);
    add("aer", "full recognition pipeline", RunMode::aer, false);
    add("compare", "per-model correlation peaks", RunMode::compare, false);
    add("shift-test", "translation equivariance check", RunMode::shift_test,
        false);
    add("validate", "parse and validate a config, run nothing", RunMode::echo,
        true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (auto& s : subs) {
            if (!s.cmd->parsed()) continue;
            if (s.validate_only) {
                const RunConfig rc = parse_config(s.config);
                std::cout << "config OK: mode " << run_mode_name(rc.mode)
                          << ", model " << model_kind_name(rc.model) << "\n";
                return 0;
            }
            return dispatch(s.mode, s.config, s.output);
        }
    } catch (const ValidationError& e) {
        std::cerr << "configuration error:\n";
        for (const auto& msg : e.issues()) std::cerr << "  " << msg << "\n";
        return 1;
    } catch (const SimulationError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
