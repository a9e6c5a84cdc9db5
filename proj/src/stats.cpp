#include "uralab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace uralab {
namespace stats {

Interval wilson(uint64_t events, uint64_t population, double z) {
  if (population == 0) return Interval{0.0, 1.0};
  double n = static_cast<double>(population);
  double phat = static_cast<double>(events) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  Interval iv;
  iv.lo = center - half;
  iv.hi = center + half;
  if (iv.lo < 0.0) iv.lo = 0.0;
  if (iv.hi > 1.0) iv.hi = 1.0;
  // The Wilson interval contains the point estimate by construction; keep
  // that true under rounding at phat = 0 or 1, where lo and hi land on the
  // boundary only up to one ulp.
  if (iv.lo > phat) iv.lo = phat;
  if (iv.hi < phat) iv.hi = phat;
  return iv;
}

double two_proportion_z(uint64_t x1, uint64_t n1, uint64_t x2, uint64_t n2) {
  if (n1 == 0 || n2 == 0) return 0.0;
  double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  double var = pooled * (1.0 - pooled) *
               (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0.0) return 0.0;
  return (p1 - p2) / std::sqrt(var);
}

double chi2_critical_001(unsigned df) {
  static const double kTable[30] = {
      6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090,
      21.666, 23.209, 24.725, 26.217, 27.688, 29.141, 30.578, 32.000,
      33.409, 34.805, 36.191, 37.566, 38.932, 40.289, 41.638, 42.980,
      44.314, 45.642, 46.963, 48.278, 49.588, 50.892,
  };
  if (df < 1 || df > 30) throw std::out_of_range("chi2_critical_001: df must be 1..30");
  return kTable[df - 1];
}

}  // namespace stats
}  // namespace uralab
