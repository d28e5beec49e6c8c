#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fsad {

/// Philox4x32-10 counter-based generator. Each (seed, path_index, substream)
/// triple selects an independent stream, so a path's randomness does not
/// depend on how many paths are generated or on the thread that runs it.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path_index, std::uint32_t substream = 0);

  std::uint32_t next_u32();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller on two uniforms).
  double normal();
  void fill_normal(std::span<double> out);

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fsad
