#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nkg/hmrf.hpp"

namespace nkg::io {

/// Reads binary (P5) or ASCII (P2) greymaps with maxval <= 255. Intensities
/// are returned as raw sample values.
hmrf::ImageGrid read_pgm(const std::filesystem::path& path);
hmrf::ImageGrid read_pgm(std::istream& in);

/// Writes an 8-bit P5 greymap. Values are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const hmrf::ImageGrid& image);

/// Plain-text matrix: header `rows cols`, then rows*cols whitespace-separated reals.
hmrf::ImageGrid read_matrix(const std::filesystem::path& path);
hmrf::ImageGrid read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const hmrf::LabelField& labels);

/// PGM or matrix by extension (.pgm / anything else).
hmrf::ImageGrid read_image(const std::filesystem::path& path);

/// Label l is written as l * floor(255 / (K - 1)).
void write_label_pgm(const std::filesystem::path& path, const hmrf::LabelField& labels, int K);
void write_label_matrix(const std::filesystem::path& path, const hmrf::LabelField& labels);

/// CSV `iteration,phase,energy`.
void write_trace_csv(std::ostream& out, const std::vector<hmrf::TraceEntry>& trace);

/// One decimal per line, 17 significant digits.
void write_samples(std::ostream& out, const SampleBlock& block);
SampleBlock read_samples(const std::filesystem::path& path);

}  // namespace nkg::io
