#ifndef RITOR_VERIFY_HPP
#define RITOR_VERIFY_HPP

#include <string>
#include <vector>

#include "ritor/config.hpp"

namespace ritor {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The module invariant suites, run against the configured reference
/// problem. Each entry prints one pass/fail line in the CLI.
std::vector<CheckResult> run_verify(const RunConfig& cfg);

}  // namespace ritor

#endif
