#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace nldp {

// Batch entry points behind the command line front end. Each returns a process
// exit code: 0 success, 1 configuration or usage error, 2 iteration cap hit
// before convergence (solve only). Diagnostics go to standard error.
//
// out_override wins over the NLDP_OUT environment variable, which wins over
// the config's output.dir. seed_override replaces the config's top-level seed.

// Minimize the configured energy. Writes config_echo.json, solution.csv,
// solve_report.json and energy_trace.csv into the output directory.
int cmd_solve(const std::string& config_path,
              const std::optional<std::string>& out_override,
              std::optional<std::uint64_t> seed_override);

// Run the config's verify list against a stored solution. Writes
// verify_report.jsonl (one object per check) plus oscillation_<i>.csv and
// levelset_<i>.csv trace files for those check types. Exit 0 iff every check
// passed.
int cmd_verify(const std::string& config_path, const std::string& solution_path,
               const std::optional<std::string>& out_override,
               std::optional<std::uint64_t> seed_override);

// Evaluate the config's sweep block: one CSV row per parameter value with
// assumption flags, optional solver statistics and an optional fitted decay
// exponent. Exit 0 iff at least one row completed without error.
int cmd_sweep(const std::string& config_path,
              const std::optional<std::string>& out_override,
              std::optional<std::uint64_t> seed_override);

// Print the geometric drain recursion trace as CSV on standard output.
int cmd_iterate_demo(double y0, double b1, double b2, double beta, std::size_t imax);

} // namespace nldp
