#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fep::harness {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

using SuiteReport = std::vector<Check>;

bool all_pass(const SuiteReport& report);

/// core, measures, exact, paths, pde, decay.
const std::vector<std::string>& suite_names();

/// Runs a named property suite with fixed seeds. Throws
/// std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name);

struct Criterion {
  int id;
  std::string title;
  std::function<Check()> run;
};

/// The acceptance criteria in order, each a self-contained check.
const std::vector<Criterion>& acceptance_criteria();

/// "PASS  5 title: detail" style line.
std::string format_check(const Check& check, int id = 0);

}  // namespace fep::harness
