#pragma once

#include <string>

#include "koiter/experiments.hpp"

namespace koiter {

struct Verdict {
  bool pass = false;
  std::string summary;
};

/// Runtime budget of one case sweep in seconds.
inline constexpr double kCaseBudgetSeconds = 600.0;

/// ErrLK, Err3DK, Err3DL strictly decreasing and ErrLK falling at least 10x
/// from the first to the last eps.
Verdict elliptic_trend(const CaseResult& r);
/// Err3DK strictly decreasing with consecutive-decade ratios in [2, 10].
Verdict generalized_trend(const CaseResult& r);
/// ErrLK and Err3DK strictly decreasing, ErrLK ratios at least 20 per decade,
/// and penalty energies within 1% of each other.
Verdict flexural_trend(const CaseResult& r);
/// Dispatches on the case kind.
Verdict trend(const CaseResult& r);

/// Smallest-eps flexural fraction of the elliptic case below 1e-3 and
/// membrane fraction of the flexural case below 0.05.
Verdict regime_energies(const CaseResult& elliptic, const CaseResult& flexural);

}  // namespace koiter
