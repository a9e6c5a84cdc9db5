#pragma once

#include <cstdint>

namespace uralab {
namespace stats {

/// Two-sided 95% normal quantile, frozen so intervals are reproducible.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson(uint64_t events, uint64_t population, double z = kZ95);

/// Two-proportion z statistic with pooled variance; 0 when degenerate.
double two_proportion_z(uint64_t x1, uint64_t n1, uint64_t x2, uint64_t n2);

/// Upper critical value of the chi-square distribution at significance
/// 0.01, for 1 <= df <= 30.
double chi2_critical_001(unsigned df);

}  // namespace stats
}  // namespace uralab
