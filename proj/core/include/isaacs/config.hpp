#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isaacs/experiments.hpp"
#include "isaacs/problem.hpp"
#include "isaacs/solver.hpp"
#include "isaacs/stencil.hpp"

namespace isaacs {

enum class RunMode {
  solve,
  rates,
  sandwich,
  check_decomposition,
  verify_barrier
};

std::string to_string(RunMode mode);

/// A fully validated and resolved run description: named coefficient
/// families are instantiated, stencils built, defaults filled in. Loading
/// fails fast with ConfigError (naming the offending field) before any
/// solve starts.
struct RunConfig {
  RunMode mode = RunMode::solve;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 1;

  std::string problem_family;
  double chi = 0.1;  // diagnostic Hoelder index; gamma = hoelder_gamma(chi)
  IsaacsProblem problem;
  std::optional<ManufacturedCase> manufactured;  // benchmark families only

  std::string stencil_name = "standard";
  Stencil stencil = default_stencil(2);
  PucciParams pucci;  // defaults derived from the problem bounds
  bool pucci_overridden = false;

  SolveConfig solver;

  double h = 0.125;                // solve and sandwich modes
  std::vector<double> h_sequence;  // rates mode
  std::vector<double> levels;      // sandwich mode
  int samples = 0;  // probe count: verify-barrier (10^4), check-decomposition (200)
};

/// Parses and validates a configuration document (JSON; // and /* */
/// comments allowed). Unknown keys, missing required fields, values outside
/// their documented ranges, and family/mode mismatches all raise ConfigError
/// with the offending field in the message.
RunConfig parse_config(const std::string& text);

/// parse_config on the contents of `path`; unreadable files raise
/// ConfigError.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace isaacs
