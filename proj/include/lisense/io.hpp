#pragma once

#include <filesystem>
#include <string>

#include "lisense/grid.hpp"
#include "lisense/passive.hpp"
#include "lisense/radiomap.hpp"

namespace lisense {

/// Binary (P5) 8-bit graymap.
void write_pgm(const std::filesystem::path& path, const ByteGrid& image);
ByteGrid read_pgm(const std::filesystem::path& path);

/// 0/1 bits stored as 0/255 gray.
void write_binary_pgm(const std::filesystem::path& path, const ByteGrid& bits);
ByteGrid read_binary_pgm(const std::filesystem::path& path);

/// Header `re,im`, then one row per element in row-major order.
void write_signal_csv(const std::filesystem::path& path, const ComplexGrid& grid);
ComplexGrid read_signal_csv(const std::filesystem::path& path, std::size_t width,
                            std::size_t height);

/// Magnitudes as a matrix, one CSV line per map row, preceded by a `#` line with
/// the lattice metadata (width, height, origin_x, origin_y, spacing,
/// carrier_frequency).
void write_magnitude_csv(const std::filesystem::path& path, const RadioMap& map);
RadioMap read_magnitude_csv(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// FNV-1a 64 of the file bytes as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace lisense
