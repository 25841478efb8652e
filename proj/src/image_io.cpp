#include "nkg/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "nkg/error.hpp"

namespace nkg::io {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  if (tok.empty()) throw Error(ErrorKind::Io, "truncated PGM header");
  return tok;
}

std::size_t header_number(std::istream& in, const char* what) {
  const std::string tok = header_token(in);
  try {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Io, std::string("bad PGM ") + what + " '" + tok + "'");
  }
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

hmrf::ImageGrid read_pgm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2") throw Error(ErrorKind::Io, "not a PGM file (magic '" + magic + "')");
  const std::size_t width = header_number(in, "width");
  const std::size_t height = header_number(in, "height");
  const std::size_t maxval = header_number(in, "maxval");
  if (width == 0 || height == 0) throw Error(ErrorKind::Io, "PGM has zero size");
  if (maxval == 0 || maxval > 255) throw Error(ErrorKind::Io, "only 8-bit PGM is supported");

  std::vector<double> pixels(width * height);
  if (magic == "P5") {
    std::vector<unsigned char> raw(pixels.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw Error(ErrorKind::Io, "truncated PGM raster");
    std::transform(raw.begin(), raw.end(), pixels.begin(), [](unsigned char v) { return static_cast<double>(v); });
  } else {
    for (auto& p : pixels) {
      unsigned v;
      if (!(in >> v) || v > maxval) throw Error(ErrorKind::Io, "bad or truncated ASCII PGM raster");
      p = v;
    }
  }
  return hmrf::ImageGrid(width, height, std::move(pixels));
}

hmrf::ImageGrid read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_pgm(in);
}

void write_pgm(const std::filesystem::path& path, const hmrf::ImageGrid& image) {
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> raw(image.size());
  std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(),
                 [](double v) { return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)); });
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

hmrf::ImageGrid read_matrix(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows == 0 || cols == 0) throw Error(ErrorKind::Io, "matrix header must be `rows cols`");
  std::vector<double> pixels(rows * cols);
  for (auto& p : pixels) {
    if (!(in >> p)) throw Error(ErrorKind::Io, "matrix has fewer than rows*cols values");
  }
  return hmrf::ImageGrid(cols, rows, std::move(pixels));
}

hmrf::ImageGrid read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

hmrf::ImageGrid read_image(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" ? read_pgm(path) : read_matrix(path);
}

void write_matrix(std::ostream& out, const hmrf::LabelField& labels) {
  out << labels.height << ' ' << labels.width << '\n';
  for (std::size_t r = 0; r < labels.height; ++r) {
    for (std::size_t c = 0; c < labels.width; ++c) {
      if (c) out << ' ';
      out << labels.labels[r * labels.width + c];
    }
    out << '\n';
  }
}

void write_label_pgm(const std::filesystem::path& path, const hmrf::LabelField& labels, int K) {
  const int step = K > 1 ? 255 / (K - 1) : 0;
  std::vector<double> px(labels.size());
  std::transform(labels.labels.begin(), labels.labels.end(), px.begin(), [&](int l) { return double(l * step); });
  write_pgm(path, hmrf::ImageGrid(labels.width, labels.height, std::move(px)));
}

void write_label_matrix(const std::filesystem::path& path, const hmrf::LabelField& labels) {
  auto out = open_out(path);
  write_matrix(out, labels);
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void write_trace_csv(std::ostream& out, const std::vector<hmrf::TraceEntry>& trace) {
  out << "iteration,phase,energy\n";
  char buf[128];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.12e\n", t.iteration, t.phase.c_str(), t.energy);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing energy trace");
}

void write_samples(std::ostream& out, const SampleBlock& block) {
  char buf[64];
  for (double x : block.values()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing samples");
}

SampleBlock read_samples(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, "'" + path.string() + "': cannot parse sample '" + tok + "'");
    }
  }
  if (values.empty()) throw Error(ErrorKind::Io, "'" + path.string() + "' contains no samples");
  try {
    return SampleBlock(std::move(values));
  } catch (const Error& e) {
    throw Error(ErrorKind::Domain, "'" + path.string() + "': " + e.what());
  }
}

}  // namespace nkg::io
