#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracell/config.hpp"
#include "fracell/io.hpp"

namespace fracell {

/// One checked property of a run: `value` compared against `limit` with
/// `relation` ("<=", ">=", "=="), or for "in" |value - target| <= limit.
struct Assertion {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation = "<=";
  bool pass = false;
  double target = 0.0;

  /// "value (relation limit)" or "value (target +- limit)".
  std::string describe() const;
};

struct RunReport {
  Json json;
  std::vector<Assertion> assertions;
  bool pass() const;
};

/// Executes one command. Artifacts (report.json and CSV tables) go to the
/// configured output directory unless `write_files` is false. Results are a
/// pure function of the configuration.
RunReport run_command(const RunConfig& config, bool write_files = true);

/// Entry point of the fracell executable. Returns 0 iff every assertion
/// passes, 1 on assertion failure, 2 on invalid usage or configuration.
int cli_main(int argc, char** argv);

}  // namespace fracell
