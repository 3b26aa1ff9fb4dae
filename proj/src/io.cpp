#include "otkit/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "otkit/error.hpp"

namespace otkit::io {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw InputError("line " + std::to_string(line) + ": cannot parse number '" + s + "'");
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

DiscreteMeasure read_measure_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  int dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
    if (line.empty()) continue;
    const auto header = split_commas(line);
    const int cols = static_cast<int>(header.size());
    if (cols < 2 || cols > 4 || header.back() != "w") {
      throw InputError("measure CSV header must be x1[,x2[,x3]],w");
    }
    for (int t = 0; t + 1 < cols; ++t) {
      if (header[t] != "x" + std::to_string(t + 1)) throw InputError("measure CSV header must be x1[,x2[,x3]],w");
    }
    dim = cols - 1;
    break;
  }
  if (dim == 0) throw InputError("measure CSV is empty");
  std::vector<double> coords;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) +
                       " fields");
    }
    for (int t = 0; t < dim; ++t) coords.push_back(parse_number(fields[t], lineno));
    const double w = parse_number(fields[dim], lineno);
    if (!(w > 0.0)) throw InputError("line " + std::to_string(lineno) + ": weight must be > 0");
    weights.push_back(w);
  }
  if (weights.empty()) throw InputError("empty measure");
  return DiscreteMeasure(std::move(coords), std::move(weights), dim);
}

DiscreteMeasure read_measure_csv(const std::filesystem::path& path) {
  auto in = open_input(path, false);
  return read_measure_csv(in);
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& m) {
  for (int t = 0; t < m.dim(); ++t) out << 'x' << (t + 1) << ',';
  out << "w\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double x : m.point(i)) out << format_double(x) << ',';
    out << format_double(m.weight(i)) << '\n';
  }
}

namespace {

// Next whitespace-delimited header token, skipping # comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw InputError("truncated PGM header");
  return tok;
}

std::size_t pgm_int(std::istream& in) {
  const std::string tok = pgm_token(in);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw InputError("bad PGM header value '" + tok + "'");
  return v;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw InputError("not a PGM file (expected P2 or P5)");
  GrayImage img;
  img.cols = pgm_int(in);
  img.rows = pgm_int(in);
  // pgm_token consumed exactly one whitespace byte after maxval
  const std::size_t maxval = pgm_int(in);
  if (img.rows == 0 || img.cols == 0) throw InputError("PGM must have at least one row and column");
  if (maxval == 0 || maxval > 65535) throw InputError("PGM maxval must be in [1, 65535]");
  const std::size_t count = img.rows * img.cols;
  img.pixels.resize(count);
  const double scale = static_cast<double>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t v = pgm_int(in);
      if (v > maxval) throw InputError("PGM sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) / scale;
    }
    return img;
  }
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw InputError("truncated PGM data");
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t v = raw[i * bytes];
    if (bytes == 2) v = (v << 8) | raw[i * bytes + 1];
    if (v > maxval) throw InputError("PGM sample exceeds maxval");
    img.pixels[i] = static_cast<double>(v) / scale;
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  auto in = open_input(path, true);
  return read_pgm(in);
}

void write_pgm_ascii(std::ostream& out, const GrayImage& image, int maxval) {
  out << "P2\n" << image.cols << ' ' << image.rows << '\n' << maxval << '\n';
  for (std::size_t r = 0; r < image.rows; ++r) {
    for (std::size_t c = 0; c < image.cols; ++c) {
      const long v = std::lround(image.pixels[r * image.cols + c] * maxval);
      out << v << (c + 1 == image.cols ? '\n' : ' ');
    }
  }
}

DiscreteMeasure read_measure_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("no such file '" + path.string() + "'");
  auto ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".pgm") return from_grayscale_grid(read_pgm(path), true);
  return read_measure_csv(path);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  auto in = open_input(path, true);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace otkit::io
