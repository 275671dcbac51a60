#pragma once

#include <string>
#include <vector>

namespace ucp {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values against their pinned tolerances
  double seconds = 0.0;
};

// Criteria are numbered 1..13; an empty selection runs all of them.
// A criterion that throws is reported as FAIL with the error message.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& selection = {});

// "C01 PASS  title  [detail] (1.2 s)"
std::string format_result(const CriterionResult& result);

}  // namespace ucp
