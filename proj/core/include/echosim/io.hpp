#pragma once
// File formats: strict binary PGM frames in, CSV traces, the raw complex
// field container, gray PNG heatmaps, and plain-text run reports.  Readers
// reject anything out of contract with the offending location; writers are
// deterministic byte for byte.

#include <string>
#include <utility>
#include <vector>

#include "echosim/fourier_optics.hpp"
#include "echosim/image.hpp"
#include "echosim/types.hpp"

namespace echosim {

// Binary 8-bit PGM (P5).  ASCII P2 and color P6 are rejected outright, as
// is any maxval above 255; comments are allowed anywhere in the header.
// Parse errors carry the byte offset.  Pixels load as value/maxval.
Image load_frame_pgm(const std::string& path);

// P5 writer: maxval 255, no comments, rows top to bottom.
void write_frame_pgm(const Image& img, const std::string& path);

// CSV with header t,re,im,abs and 17 significant digits (doubles survive a
// round trip exactly).
void write_trace_csv(const std::vector<double>& times,
                     const std::vector<cxd>& trace, const std::string& path);

// Raw complex field: magic "FLDG", u32 nx, u32 ny, u32 plane id, u64
// reserved zero (24-byte header), then row-major little-endian float64
// (re, im) pairs.  The container stores grid geometry only; optical
// constants stay in the run config.
void write_field(const FieldGrid& f, const std::string& path);
FieldGrid read_field(const std::string& path);

// 8-bit grayscale PNG of a real map, min-max normalized.  A constant map
// (all-zero included) has no usable scale: it is written all black and
// reported with the zero-scale sentinel so downstream tooling can tell
// "uniform" from "dim".
struct PngScale {
    double lo = 0.0;
    double hi = 0.0;
    double scale = 0.0;  // counts per unit value; 0 = degenerate map
};
PngScale render_png(const std::vector<double>& values, int nx, int ny,
                    const std::string& path);

// "key = value" lines, written in the given order.
void write_report(const std::vector<std::pair<std::string, std::string>>& rows,
                  const std::string& path);

}  // namespace echosim
