#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coopnet {

/// Critical benefit-to-cost ratio (b/c)* expressed as a ratio of two
/// structure-dependent quantities. The denominator crosses zero on some
/// graphs; `pole` flags that case and `value` is then +inf by convention so
/// downstream plots of 1/(b/c)* pass smoothly through zero.
struct CriticalRatio {
  double numerator = 0.0;
  double denominator = 0.0;
  bool pole = false;
  double value = 0.0;

  static CriticalRatio make(double numerator, double denominator,
                            double pole_eps) {
    CriticalRatio r;
    r.numerator = numerator;
    r.denominator = denominator;
    r.pole = std::fabs(denominator) <= pole_eps;
    r.value = r.pole ? std::numeric_limits<double>::infinity()
                     : numerator / denominator;
    return r;
  }

  /// 1/(b/c)*, finite (= 0 at a pole) as long as the numerator is nonzero.
  double reciprocal() const {
    if (pole) return 0.0;
    return denominator / numerator;
  }

  /// True when cooperation is favored for some b > c > 0, i.e. the
  /// denominator is positive and the ratio exceeds 1.
  bool favors_cooperation() const {
    return !pole && denominator > 0.0 && value > 1.0;
  }
};

/// Structure coefficient sigma = ((b/c)* + 1) / ((b/c)* - 1).
inline double structure_coefficient(const CriticalRatio& ratio) {
  if (ratio.pole) {
    throw std::range_error(
        "structure coefficient undefined: critical ratio at a pole");
  }
  if (ratio.value == 1.0) {
    throw std::range_error(
        "structure coefficient undefined: critical ratio equals 1");
  }
  return (ratio.value + 1.0) / (ratio.value - 1.0);
}

}  // namespace coopnet
