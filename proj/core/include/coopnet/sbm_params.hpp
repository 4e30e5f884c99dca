#pragma once

#include <stdexcept>
#include <string>

namespace coopnet {

/// Stochastic block model with m equally sized groups (node i belongs to
/// group i mod m), intra-community link probability p and inter-community
/// link probability q.
struct SbmParams {
  int n = 0;
  int m = 1;
  double p = 0.0;
  double q = 0.0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("SbmParams: n must be >= 1");
    if (m < 1 || m > n) {
      throw std::invalid_argument("SbmParams: need 1 <= m <= n, got m=" +
                                  std::to_string(m) +
                                  " n=" + std::to_string(n));
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("SbmParams: p must be in [0,1]");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
      throw std::invalid_argument("SbmParams: q must be in [0,1]");
    }
  }
};

}  // namespace coopnet
