#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  // a pinned gate the measured physics cannot reach; reported red but not
  // counted as a regression (see the project notes for the analysis)
  bool expected_fail = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every criterion in order, streaming progress to log.  Expensive
// intermediate results (reference traces, error curves) are shared between
// criteria through an internal context so nothing is propagated twice.
std::vector<CriterionResult> run_all(std::ostream& log);

}  // namespace acceptance
