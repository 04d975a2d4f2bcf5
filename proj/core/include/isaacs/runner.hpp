#pragma once

#include <iosfwd>

#include "isaacs/config.hpp"

namespace isaacs {

/// Executes one configured job and writes its artifacts into
/// config.output_dir (created if absent):
///   solve                grid.csv, solution.csv, report.json
///   rates                rates.csv, summary.json
///   sandwich             sandwich.csv, summary.json
///   check-decomposition  audit.csv, summary.json
///   verify-barrier       barrier.json
/// Every mode also writes timing.json with wall-clock seconds — the one
/// artifact allowed to differ between reruns; everything else is
/// byte-identical for a fixed configuration. Progress notes go to `log`
/// when non-null. Throws the library error types on failure; diagnostic
/// artifacts produced before the failure are left in place.
void run_job(const RunConfig& config, std::ostream* log = nullptr);

/// run_job wrapped in the process-level error mapping. Returns 0 on
/// success; otherwise prints the failure to `err` and returns
///   2  invalid configuration or arguments
///   3  coefficient matrix not decomposable on the stencil
///      (the offending matrix is printed)
///   4  solver exhausted its iteration budgets
///   5  truncation ordering violated
///   6  barrier certification failed
///   1  any other error.
int run_to_exit_code(const RunConfig& config, std::ostream& err,
                     std::ostream* log = nullptr);

}  // namespace isaacs
