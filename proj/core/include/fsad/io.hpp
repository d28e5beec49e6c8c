#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fsad::io {

/// Shortest text that round-trips a double (17 significant digits).
std::string format_double(double v);

/// Comma separated output with a fixed header; every row must match its width.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::initializer_list<double> values);
  void row(std::span<const double> values);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::filesystem::path path_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const char> bytes);
/// FNV-1a of a file's bytes as 16 lowercase hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace fsad::io
