#include "echosim/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace echosim {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("short write to '" + path + "'");
}

// little-endian doubles; the byte order is part of the format, so flag the
// odd platform instead of silently writing native order
static_assert(std::endian::native == std::endian::little,
              "field container assumes a little-endian host");

void put_u32le(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) |
           (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32be(std::string& s, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

Image load_frame_pgm(const std::string& path) {
    const std::string buf = slurp(path);
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ValidationError(path + ": malformed PGM at byte " +
                              std::to_string(pos) + ": " + msg);
    };

    if (buf.size() < 2 || buf[0] != 'P') fail("missing PGM magic");
    if (buf[1] == '2') fail("ASCII P2 is not supported, need binary P5");
    if (buf[1] == '6') fail("P6 is color PPM, need grayscale P5");
    if (buf[1] != '5') fail("not a PGM file");
    pos = 2;

    auto skip_space = [&] {
        while (pos < buf.size()) {
            if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
                ++pos;
            } else if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&](const char* what) -> long {
        skip_space();
        if (pos >= buf.size() || !std::isdigit(static_cast<unsigned char>(buf[pos])))
            fail(std::string("expected ") + what);
        long v = 0;
        while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
            v = v * 10 + (buf[pos] - '0');
            if (v > 1 << 24) fail(std::string(what) + " out of range");
            ++pos;
        }
        return v;
    };

    const long w = read_int("width");
    const long h = read_int("height");
    const long maxval = read_int("maxval");
    if (w <= 0 || h <= 0) fail("image dimensions must be positive");
    if (maxval > 255)
        fail("16-bit PGM is not supported (maxval " + std::to_string(maxval) + ")");
    if (maxval < 1) fail("maxval must be >= 1");
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos])))
        fail("expected single whitespace before pixel data");
    ++pos;

    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (buf.size() - pos < need) {
        fail("pixel payload truncated: need " + std::to_string(need) +
             " bytes, found " + std::to_string(buf.size() - pos));
    }
    if (buf.size() - pos > need) {
        pos += need;
        fail("trailing data after pixel payload");
    }

    Image img = make_image(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < need; ++i)
        img.pix[i] = static_cast<unsigned char>(buf[pos + i]) /
                     static_cast<double>(maxval);
    return img;
}

void write_frame_pgm(const Image& img, const std::string& path) {
    if (img.nx <= 0 || img.ny <= 0)
        throw ValidationError("write_frame_pgm: empty image");
    std::string out = "P5\n" + std::to_string(img.nx) + " " +
                      std::to_string(img.ny) + "\n255\n";
    out.reserve(out.size() + img.pix.size());
    for (double v : img.pix) {
        const double c = std::clamp(v, 0.0, 1.0) * 255.0;
        out.push_back(static_cast<char>(std::lround(c)));
    }
    spill(path, out);
}

void write_trace_csv(const std::vector<double>& times,
                     const std::vector<cxd>& trace, const std::string& path) {
    if (times.size() != trace.size())
        throw ValidationError("write_trace_csv: time and trace lengths differ");
    std::ostringstream out;
    out << std::setprecision(17);
    out << "t,re,im,abs\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << times[i] << ',' << trace[i].real() << ',' << trace[i].imag()
            << ',' << std::abs(trace[i]) << '\n';
    }
    spill(path, out.str());
}

void write_field(const FieldGrid& f, const std::string& path) {
    const std::size_t n = static_cast<std::size_t>(f.cfg.nx) * f.cfg.ny;
    if (f.v.size() != n)
        throw ValidationError("write_field: field size does not match its grid");
    std::string out;
    out.reserve(24 + 16 * n);
    out += "FLDG";
    put_u32le(out, static_cast<std::uint32_t>(f.cfg.nx));
    put_u32le(out, static_cast<std::uint32_t>(f.cfg.ny));
    put_u32le(out, static_cast<std::uint32_t>(f.plane));
    for (int i = 0; i < 8; ++i) out.push_back('\0');  // reserved
    for (const cxd& z : f.v) {
        const double re = z.real(), im = z.imag();
        char b[16];
        std::memcpy(b, &re, 8);
        std::memcpy(b + 8, &im, 8);
        out.append(b, 16);
    }
    spill(path, out);
}

FieldGrid read_field(const std::string& path) {
    const std::string buf = slurp(path);
    if (buf.size() < 24 || buf.compare(0, 4, "FLDG") != 0)
        throw ValidationError(path + ": not a field container (bad magic)");
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    const std::uint32_t nx = get_u32le(p + 4);
    const std::uint32_t ny = get_u32le(p + 8);
    const std::uint32_t plane = get_u32le(p + 12);
    if (plane > 2)
        throw ValidationError(path + ": unknown plane id " + std::to_string(plane));
    if (nx == 0 || ny == 0 || nx > (1u << 16) || ny > (1u << 16))
        throw ValidationError(path + ": implausible grid " + std::to_string(nx) +
                              "x" + std::to_string(ny));
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    if (buf.size() != 24 + 16 * n) {
        throw ValidationError(path + ": payload size mismatch: header promises " +
                              std::to_string(24 + 16 * n) + " bytes, file has " +
                              std::to_string(buf.size()));
    }
    OpticsConfig cfg;
    cfg.nx = static_cast<int>(nx);
    cfg.ny = static_cast<int>(ny);
    cfg.pitch_in = 1.0 / cfg.nx;
    FieldGrid f = make_field(cfg, static_cast<Plane>(plane));
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        std::memcpy(&re, buf.data() + 24 + 16 * i, 8);
        std::memcpy(&im, buf.data() + 24 + 16 * i + 8, 8);
        f.v[i] = cxd(re, im);
    }
    return f;
}

PngScale render_png(const std::vector<double>& values, int nx, int ny,
                    const std::string& path) {
    if (nx <= 0 || ny <= 0 ||
        values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        throw ValidationError("render_png: value count does not match the grid");

    PngScale sc;
    sc.lo = values[0];
    sc.hi = values[0];
    for (double v : values) {
        sc.lo = std::min(sc.lo, v);
        sc.hi = std::max(sc.hi, v);
    }
    sc.scale = sc.hi > sc.lo ? 255.0 / (sc.hi - sc.lo) : 0.0;

    // filter byte 0 before each scanline
    std::string raw;
    raw.reserve(static_cast<std::size_t>(ny) * (nx + 1));
    for (int y = 0; y < ny; ++y) {
        raw.push_back('\0');
        for (int x = 0; x < nx; ++x) {
            const double v = values[static_cast<std::size_t>(y) * nx + x];
            raw.push_back(static_cast<char>(
                std::lround((v - sc.lo) * sc.scale)));
        }
    }

    uLongf zcap = compressBound(static_cast<uLong>(raw.size()));
    std::string z(zcap, '\0');
    if (compress2(reinterpret_cast<Bytef*>(z.data()), &zcap,
                  reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw SimulationError("render_png: deflate failed");
    z.resize(zcap);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    auto chunk = [&out](const char* type, const std::string& data) {
        put_u32be(out, static_cast<std::uint32_t>(data.size()));
        std::string body = std::string(type, 4) + data;
        out += body;
        const auto crc =
            crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                  static_cast<uInt>(body.size()));
        put_u32be(out, static_cast<std::uint32_t>(crc));
    };
    std::string ihdr;
    put_u32be(ihdr, static_cast<std::uint32_t>(nx));
    put_u32be(ihdr, static_cast<std::uint32_t>(ny));
    ihdr.push_back(8);     // bit depth
    ihdr.push_back(0);     // grayscale
    ihdr.push_back(0);     // deflate
    ihdr.push_back(0);     // adaptive filtering
    ihdr.push_back(0);     // no interlace
    chunk("IHDR", ihdr);
    chunk("IDAT", z);
    chunk("IEND", "");
    spill(path, out);
    return sc;
}

void write_report(const std::vector<std::pair<std::string, std::string>>& rows,
                  const std::string& path) {
    std::string out;
    for (const auto& [k, v] : rows) out += k + " = " + v + "\n";
    spill(path, out);
}

}  // namespace echosim
