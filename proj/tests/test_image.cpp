#include "echosim/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "echosim/io.hpp"
#include "echosim/types.hpp"

using namespace echosim;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/echosim_test_") + name;
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string error_of(const std::string& path) {
    try {
        load_frame_pgm(path);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("letter glyph has the expected gross shape") {
    const Image a = letter_a(64);
    CHECK(a.nx == 64);
    CHECK(a.ny == 64);

    double lo = 1.0, hi = 0.0, mass = 0.0;
    for (double p : a.pix) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        mass += p;
    }
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);
    CHECK(mass > 30.0);   // a real stroke pattern, not a speck
    CHECK(mass < 1500.0); // and not a filled block

    // mirror symmetry about the vertical center axis is exact by construction
    for (int y = 0; y < 64; ++y)
        for (int x = 1; x < 64; ++x)
            CHECK(a.at(x, y) == a.at(64 - x, y));

    // the crossbar makes the center row-band much heavier than the top band
    auto band_mass = [&](int y0, int y1) {
        double m = 0.0;
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < 64; ++x) m += a.at(x, y);
        return m;
    };
    CHECK(band_mass(30, 36) > 2.0 * band_mass(20, 26));

    // corners stay empty (glyph box is ~3/8 of the frame)
    CHECK(a.at(2, 2) == 0.0);
    CHECK(a.at(61, 61) == 0.0);
}

TEST_CASE("glyph scales with the frame and stays centered") {
    for (int n : {16, 128}) {
        const Image a = letter_a(n);
        CHECK(a.nx == n);
        double cx = 0.0, cy = 0.0, mass = 0.0;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                cx += x * a.at(x, y);
                cy += y * a.at(x, y);
                mass += a.at(x, y);
            }
        CHECK(mass > 0.0);
        CHECK(cx / mass == doctest::Approx(n / 2.0).epsilon(0.02));
        // center of mass sits a bit below mid-height: legs plus crossbar
        CHECK(cy / mass > 0.45 * n);
        CHECK(cy / mass < 0.65 * n);
    }
}

TEST_CASE("PGM round trip preserves pixels to 8-bit quantization") {
    Image img = make_image(5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) img.at(x, y) = (x + 5.0 * y) / 14.0;
    const std::string path = temp_path("roundtrip.pgm");
    write_frame_pgm(img, path);
    const Image back = load_frame_pgm(path);
    REQUIRE(back.nx == 5);
    REQUIRE(back.ny == 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) {
            const double q = std::round(img.at(x, y) * 255.0) / 255.0;
            CHECK(back.at(x, y) == doctest::Approx(q).epsilon(1e-12));
        }
    std::remove(path.c_str());
}

TEST_CASE("PGM reader accepts comments and single-whitespace separators") {
    const std::string path = temp_path("comment.pgm");
    const std::string payload = {'\x00', '\x40', '\x80', '\xff'};
    write_bytes(path, "P5 # format\n# a comment line\n2 2\n255\n" + payload);
    const Image img = load_frame_pgm(path);
    CHECK(img.at(0, 0) == 0.0);
    CHECK(img.at(1, 1) == 1.0);
    CHECK(img.at(1, 0) == doctest::Approx(64.0 / 255.0));
    std::remove(path.c_str());
}

TEST_CASE("PGM reader rejects malformed files with byte offsets") {
    const std::string path = temp_path("bad.pgm");

    write_bytes(path, "P2\n2 2\n255\n0 0 0 0\n");
    CHECK(error_of(path).find("P2") != std::string::npos);  // names the ascii variant

    write_bytes(path, "P6\n2 2\n255\n" + std::string(12, 'x'));
    CHECK(error_of(path).find("P6") != std::string::npos);

    write_bytes(path, "P5\n2 2\n65535\n" + std::string(8, 'x'));
    CHECK(error_of(path).find("65535") != std::string::npos);

    // truncated payload: 3 bytes instead of 4
    write_bytes(path, "P5\n2 2\n255\nabc");
    CHECK(error_of(path).find("byte") != std::string::npos);

    // trailing garbage after the payload
    write_bytes(path, "P5\n2 2\n255\nabcdE");
    CHECK(!error_of(path).empty());

    // missing dimensions
    write_bytes(path, "P5\n");
    CHECK(error_of(path).find("byte") != std::string::npos);

    // the message carries the path and a byte offset
    write_bytes(path, "P5\n2 2\n255\nabc");
    const std::string msg = error_of(path);
    CHECK(msg.find(path) != std::string::npos);
    CHECK(msg.find("malformed PGM at byte") != std::string::npos);

    std::remove(path.c_str());
    CHECK(!error_of(temp_path("missing.pgm")).empty());
}
