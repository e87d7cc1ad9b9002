#pragma once

// The acceptance suite: exactness of the three protocols over the schedule
// suite, the conservation, mixing and expansion inequalities, the flooding
// bound, the alarm lemmas, the congestion audit, and determinism. All
// comparisons are exact; the only tolerances are the wall-clock budgets.

#include "adcs/exact_math.hpp"

#include <functional>
#include <string>
#include <vector>

namespace adcs {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  /// Worker threads for the protocol grids; 0 = hardware concurrency.
  unsigned workers = 0;
  /// Runs only these criteria (1-based); empty = all. Criteria 2, 9 and 10
  /// reuse the runs of 1-4 and trigger them when selected alone.
  std::vector<int> only;
  std::function<void(const std::string&)> progress;
};

inline constexpr double kRmcBudgetSeconds = 600;
inline constexpr double kMultiplicityBudgetSeconds = 300;
inline constexpr int kCriterionCount = 11;

/// Runs the suite in criterion order, calling `on_result` as each finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result(const CriterionResult& r);

}  // namespace adcs
