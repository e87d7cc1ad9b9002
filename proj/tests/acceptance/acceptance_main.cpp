// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "adcs/verify.hpp"

#include <iostream>

int main() {
  adcs::AcceptanceOptions opt;
  opt.progress = [](const std::string& m) { std::cerr << "... " << m << std::endl; };
  bool all = true;
  adcs::run_acceptance(opt, [&](const adcs::CriterionResult& r) {
    all = all && r.pass;
    std::cout << adcs::format_result(r) << std::endl;
  });
  return all ? 0 : 1;
}
