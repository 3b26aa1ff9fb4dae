#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "otkit/measures.hpp"

namespace otkit::io {

// CSV with header `x1[,x2[,x3]],w`, one atom per row.
DiscreteMeasure read_measure_csv(std::istream& in);
DiscreteMeasure read_measure_csv(const std::filesystem::path& path);
void write_measure_csv(std::ostream& out, const DiscreteMeasure& m);

// Binary (P5) or ASCII (P2) PGM, maxval <= 65535; intensity = value / maxval.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm_ascii(std::ostream& out, const GrayImage& image, int maxval = 255);

// Dispatches on extension: .pgm is an image (zero pixels dropped), anything
// else is a measure CSV.
DiscreteMeasure read_measure_file(const std::filesystem::path& path);

// Shortest round-trip decimal (17 significant digits).
std::string format_double(double x);

// 64-bit FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace otkit::io
