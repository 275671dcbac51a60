#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "ucp/acceptance.hpp"

// Usage: ucp_acceptance [criterion ids...]
int main(int argc, char** argv) {
  std::vector<int> selection;
  for (int k = 1; k < argc; ++k) selection.push_back(std::atoi(argv[k]));
  int failed = 0;
  for (const auto& r : ucp::run_acceptance(selection)) {
    std::cout << ucp::format_result(r) << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
