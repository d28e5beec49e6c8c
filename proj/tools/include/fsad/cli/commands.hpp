#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsad/params.hpp"

namespace fsad::cli {

enum class ExitCode : int { success = 0, criterion_failure = 1, usage = 2, numeric = 3 };

enum class Tier { quick, full };

/// Everything a command needs; filled from flags and an optional INI file.
struct RunConfig {
  ModelParams params;
  std::size_t steps = 0;  ///< 0 selects the command default
  std::size_t paths = 1000;
  std::uint64_t seed = 20240611;
  std::vector<double> eps;  ///< empty selects the command default
  std::filesystem::path out_dir = "fsad_out";
  int threads = 1;
  Tier tier = Tier::quick;
  std::string method = "gaussian_exact";
  std::vector<double> levels;  ///< local time levels; empty means {z}
  double bandwidth = 0.0;      ///< 0 selects max(0.05 sigma_T, guard)
  QuadratureSpec quad;
};

/// Parses argv and runs one command. Never throws; returns the process exit code.
int main_entry(int argc, char** argv);

/// Runs a parsed command, writing CSVs and manifest.json into cfg.out_dir.
/// Library exceptions propagate.
ExitCode run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

/// Small artifacts from every module, used by verify and by the determinism check.
std::vector<std::filesystem::path> write_quick_artifacts(const std::filesystem::path& dir, int threads);

struct CriterionResult {
  int id = 0;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs for the tightest sub-check
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

/// Runs acceptance criteria (all when `only` is empty) and prints one line per criterion.
std::vector<CriterionResult> run_acceptance(Tier tier, int threads, const std::filesystem::path& work_dir,
                                            std::ostream& log, const std::vector<int>& only = {});

std::string format_result(const CriterionResult& r);

}  // namespace fsad::cli
