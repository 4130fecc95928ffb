#include "echosim/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "echosim/fourier_optics.hpp"
#include "echosim/io.hpp"
#include "echosim/types.hpp"

using namespace echosim;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/echosim_test_") + name;
}

std::vector<std::string> parse_errors(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ValidationError& e) {
        return e.issues();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

int run_cli(const std::string& args) {
    const int rc = std::system((std::string(ECHOSIM_CLI_PATH) + " " + args +
                                " > /dev/null 2>&1")
                                   .c_str());
    return WEXITSTATUS(rc);
}

void remove_tree(const std::string& dir) {
    if (std::system(("rm -rf " + dir).c_str()) != 0) FAIL("cleanup failed");
}

}  // namespace

TEST_CASE("minimal config picks up the documented defaults") {
    const RunConfig cfg = parse_config_text("mode = echo\nmodel = two_level\n");
    CHECK(cfg.mode == RunMode::echo);
    CHECK(cfg.t1 == 1.5);
    CHECK(cfg.t2 == 4.0);
    CHECK(cfg.t3 == 10.5);
    CHECK(cfg.area == doctest::Approx(std::numbers::pi / 5).epsilon(1e-15));
    CHECK(cfg.shape == PulseShape::gaussian);
    CHECK(cfg.width == 0.01);
    CHECK(cfg.n_bands == 65);
    CHECK(cfg.band_width == 7.0);
    CHECK(cfg.truncation == 4.0);
    CHECK(cfg.dt == 0.0);  // automatic
    CHECK(cfg.threshold == 0.05);
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
    const RunConfig cfg = parse_config_text(
        "# a comment\n"
        "mode=echo\n"
        "\n"
        "model =  three_level   # trailing comment\n"
        "atom.omega_b = 0.3\n"
        "atom.leg_b = cw\n"
        "schedule.width = 0.08\n"
        "schedule.area = 0.3141592653589793\n");
    CHECK(cfg.model == ModelKind::three_level);
    CHECK(cfg.base.omega_b == 0.3);
    CHECK(cfg.width == 0.08);
}

TEST_CASE("all semantic violations are reported together") {
    const auto errs = parse_errors(
        "mode = echo\n"
        "model = two_level\n"
        "schedule.t1 = 5.0\n"      // out of order with t2
        "schedule.t2 = 4.0\n"
        "schedule.width = -1\n"    // not positive
        "ensemble.n_bands = 64\n"  // even
        "ensemble.truncation = 9\n"
        "sim.threshold = 1.5\n");
    CHECK(errs.size() >= 5);
    CHECK(any_contains(errs, "t1"));
    CHECK(any_contains(errs, "width"));
    CHECK(any_contains(errs, "n_bands"));
    CHECK(any_contains(errs, "truncation"));
    CHECK(any_contains(errs, "threshold"));
}

TEST_CASE("unknown and duplicate keys are named with line numbers") {
    const auto unknown = parse_errors("mode = echo\nmodel = two_level\nfoo.bar = 1\n");
    REQUIRE(!unknown.empty());
    CHECK(any_contains(unknown, "line 3"));
    CHECK(any_contains(unknown, "foo.bar"));

    const auto dup = parse_errors(
        "mode = echo\nmodel = two_level\nschedule.t1 = 1\nschedule.t1 = 2\n");
    CHECK(any_contains(dup, "duplicate"));
    CHECK(any_contains(dup, "schedule.t1"));

    const auto garbled = parse_errors("mode = echo\nmodel = two_level\nnonsense\n");
    CHECK(any_contains(garbled, "line 3"));
}

TEST_CASE("numbers and lists are parsed strictly") {
    CHECK(any_contains(parse_errors("mode = echo\nmodel = two_level\nschedule.t1 = abc\n"),
                       "schedule.t1"));
    CHECK(any_contains(parse_errors("mode = echo\nmodel = two_level\nschedule.t1 = 1.5x\n"),
                       "schedule.t1"));
    CHECK(any_contains(
        parse_errors("mode = echo\nmodel = two_level\nensemble.n_bands = 65.5\n"),
        "n_bands"));

    const RunConfig cfg = parse_config_text(
        "mode = echo\nmodel = two_level\n"
        "schedule.packet_spacing = 0.5\n"
        "schedule.query_scales = 1, 0.6, 0.3\n"
        "schedule.reference_scales = 0.3, 0.6, 1\n");
    REQUIRE(cfg.query_scales.size() == 3);
    CHECK(cfg.query_scales[1] == 0.6);
    CHECK(cfg.reference_scales[0] == 0.3);
}

TEST_CASE("aer-specific bounds only apply to optics modes") {
    // desk-scale cap on the grid
    const auto big = parse_errors(
        "mode = aer\nmodel = two_level\noptics.nx = 256\noptics.ny = 256\n");
    CHECK(any_contains(big, "optics.nx"));

    // the same grid is irrelevant to a plain echo run, but the echo parser
    // must still reject it as misplaced rather than silently ignore it
    const RunConfig echo_cfg = parse_config_text("mode = echo\nmodel = two_level\n");
    CHECK(echo_cfg.optics.nx == 128);

    const auto shift = parse_errors(
        "mode = shift_test\nmodel = two_level\naer.shifts = 40,0\n");
    CHECK(any_contains(shift, "shift"));

    const auto shape = parse_errors(
        "mode = aer\nmodel = two_level\nschedule.shape = rectangular\n");
    CHECK(any_contains(shape, "gaussian"));
}

TEST_CASE("mode and model enums reject unknown names") {
    CHECK(any_contains(parse_errors("mode = turbo\nmodel = two_level\n"), "mode"));
    CHECK(any_contains(parse_errors("mode = echo\nmodel = four_level\n"), "model"));
    CHECK(any_contains(parse_errors("mode = echo\nmodel = two_level\natom.leg_b = x\n"),
                       "leg_b"));
    CHECK(any_contains(
        parse_errors("mode = echo\nmodel = two_level\nensemble.apply_to = z\n"),
        "apply_to"));
}

TEST_CASE("field files round trip bit for bit") {
    OpticsConfig ocfg;
    ocfg.nx = 8;
    ocfg.ny = 4;
    FieldGrid f = make_field(validate_optics(ocfg), Plane::atomic);
    for (std::size_t k = 0; k < f.v.size(); ++k)
        f.v[k] = cxd(std::sin(0.1 * k) * 1e10, -std::cos(0.2 * k) * 1e-10);

    const std::string path = temp_path("field.fldg");
    write_field(f, path);
    const FieldGrid back = read_field(path);
    CHECK(back.cfg.nx == 8);
    CHECK(back.cfg.ny == 4);
    CHECK(back.plane == Plane::atomic);
    REQUIRE(back.v.size() == f.v.size());
    for (std::size_t k = 0; k < f.v.size(); ++k) {
        CHECK(back.v[k].real() == f.v[k].real());
        CHECK(back.v[k].imag() == f.v[k].imag());
    }

    // header is 24 bytes: magic, dims, plane, reserved
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    CHECK(static_cast<long>(in.tellg()) == 24 + 8 * 4 * 16);
    std::remove(path.c_str());
}

TEST_CASE("field reader rejects corrupt headers") {
    const std::string path = temp_path("corrupt.fldg");
    std::ofstream(path, std::ios::binary) << "GLDF12345678901234567890";
    CHECK_THROWS_AS(read_field(path), ValidationError);

    // truncated payload
    OpticsConfig ocfg;
    ocfg.nx = ocfg.ny = 4;
    write_field(make_field(validate_optics(ocfg)), path);
    std::ofstream trunc(path, std::ios::binary | std::ios::app);
    trunc << "zz";
    trunc.close();
    CHECK_THROWS_AS(read_field(path), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("trace files carry full precision") {
    const std::string path = temp_path("trace.csv");
    write_trace_csv({0.0, 0.1, 0.2},
                    {cxd(0.1, -0.2), cxd(1.0 / 3.0, 0.0), cxd(0, 1)}, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,re,im,abs");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.find("0.33333333333333331") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("PNG rendering normalizes and flags degenerate maps") {
    const std::string path = temp_path("map.png");
    const PngScale s = render_png({0.0, 0.5, 1.0, 0.25}, 2, 2, path);
    CHECK(s.lo == 0.0);
    CHECK(s.hi == 1.0);
    CHECK(s.scale == doctest::Approx(255.0));

    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8];
    in.read(reinterpret_cast<char*>(sig), 8);
    CHECK(sig[0] == 0x89);
    CHECK(sig[1] == 'P');
    CHECK(sig[2] == 'N');
    CHECK(sig[3] == 'G');
    // IHDR width and height, big-endian at fixed offsets
    unsigned char hdr[17];
    in.read(reinterpret_cast<char*>(hdr), 17);
    CHECK(hdr[4] == 'I');
    CHECK(hdr[11] == 2);  // width 2
    CHECK(hdr[15] == 2);  // height 2
    in.close();
    std::remove(path.c_str());

    const PngScale flat = render_png({0.7, 0.7, 0.7, 0.7}, 2, 2, path);
    CHECK(flat.scale == 0.0);  // constant map sentinel
    std::remove(path.c_str());
}

TEST_CASE("cli exit codes separate config errors from numeric failures") {
    const std::string good = temp_path("good.cfg");
    std::ofstream(good) << "mode = echo\nmodel = two_level\nschedule.t_end = 14.0\n";

    const std::string bad = temp_path("bad.cfg");
    std::ofstream(bad) << "mode = echo\nmodel = two_level\nexplode = yes\n";

    const std::string undersampled = temp_path("undersampled.cfg");
    std::ofstream(undersampled)
        << "mode = echo\nmodel = two_level\nsim.dt = 1.0\nschedule.t_end = 14.0\n";

    CHECK(run_cli("validate --config " + good) == 0);
    CHECK(run_cli("validate --config " + bad) == 1);
    CHECK(run_cli("echo --config " + bad) == 1);
    // validate stops before numerics, so the undersampled file passes it
    CHECK(run_cli("validate --config " + undersampled) == 0);

    const std::string outdir = temp_path("undersampled_run");
    CHECK(run_cli("echo --config " + undersampled + " --output " + outdir) == 2);

    // mode/subcommand mismatch is a configuration error
    CHECK(run_cli("aer --config " + good) == 1);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("bogus-subcommand") == 1);

    std::remove(good.c_str());
    std::remove(bad.c_str());
    std::remove(undersampled.c_str());
    remove_tree(outdir);
}

TEST_CASE("echo runs write the documented artifacts") {
    const std::string cfgp = temp_path("artifacts.cfg");
    std::ofstream(cfgp) << "mode = echo\nmodel = two_level\n"
                        << "ensemble.n_bands = 33\nschedule.t_end = 14.0\n";
    const std::string outdir = temp_path("artifacts_run");
    remove_tree(outdir);
    REQUIRE(run_cli("echo --config " + cfgp + " --output " + outdir) == 0);
    CHECK(std::ifstream(outdir + "/trace.csv").good());
    CHECK(std::ifstream(outdir + "/report.txt").good());
    CHECK(std::ifstream(outdir + "/config.cfg").good());

    std::string first;
    std::getline(std::ifstream(outdir + "/trace.csv"), first);
    CHECK(first == "t,re,im,abs");

    std::remove(cfgp.c_str());
    remove_tree(outdir);
}
