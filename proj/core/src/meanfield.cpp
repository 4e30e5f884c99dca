#include "coopnet/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace coopnet {

namespace {

double pole_eps(double numerator) {
  return 1e-9 * std::max(1.0, std::fabs(numerator));
}

void require_positive_mu2(const DegreeMoments& m, const char* who) {
  if (!(m.mu2 > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": mu2 must be positive");
  }
}

}  // namespace

double tau_mf(const DegreeMoments& m) {
  require_positive_mu2(m, "tau_mf");
  return static_cast<double>(m.n) * m.mu1 * m.mu1 / m.mu2;
}

CriticalRatio critical_ratio_mf(const DegreeMoments& m) {
  if (!(m.mu1 > 0.0)) {
    throw std::invalid_argument("critical_ratio_mf: mu1 must be positive");
  }
  const double n = static_cast<double>(m.n);
  const double twice_ratio = 2.0 * m.mu2 / (m.mu1 * m.mu1);
  const double num = n - twice_ratio;
  const double den = n / m.mu1 - twice_ratio;
  return CriticalRatio::make(num, den, pole_eps(num));
}

double fixation_mf(const DegreeMoments& m, double b, double c, double delta) {
  if (delta < 0.0) {
    throw std::invalid_argument("fixation_mf: delta must be >= 0");
  }
  require_positive_mu2(m, "fixation_mf");
  const double n = static_cast<double>(m.n);
  // Benefit pairs with the p_x-weighted sum (mean-field value n*mu1/mu2), so
  // the slope vanishes exactly at b = c * critical_ratio_mf.
  const double benefit_term = b * (n * m.mu1 / m.mu2 - 2.0);
  const double cost_term = c * (n * m.mu1 * m.mu1 / m.mu2 - 2.0);
  return 1.0 / n + delta / (2.0 * n) * (benefit_term - cost_term);
}

DegreeMoments sbm_moments(const SbmParams& params) {
  params.validate();
  const double n = static_cast<double>(params.n);
  const double intra = (n - 1.0) / params.m;
  const double inter = (n - 1.0) * (1.0 - 1.0 / params.m);
  DegreeMoments out;
  out.n = params.n;
  out.mu1 = params.p * intra + params.q * inter;
  const double var = params.p * (1.0 - params.p) * intra +
                     params.q * (1.0 - params.q) * inter;
  out.mu2 = var + out.mu1 * out.mu1;
  return out;
}

CriticalRatio critical_ratio_sbm(const SbmParams& params) {
  params.validate();
  const double n = static_cast<double>(params.n);
  const double alpha = 1.0 / params.m;
  const double beta = 1.0 - alpha;
  const double mean_prob = alpha * params.p + beta * params.q;
  if (!(mean_prob > 0.0)) {
    throw std::invalid_argument(
        "critical_ratio_sbm: expected degree is zero (p = q = 0)");
  }
  const double g = (alpha * params.p * (1.0 - params.p) +
                    beta * params.q * (1.0 - params.q)) /
                   (mean_prob * mean_prob);
  const double shared = 2.0 / (n - 1.0) * g;
  const double num = n - 2.0 - shared;
  const double den = n / (n - 1.0) / mean_prob - 2.0 - shared;
  return CriticalRatio::make(num, den, pole_eps(num));
}

CriticalRatio critical_ratio_er(int n, double p) {
  if (n < 3) throw std::invalid_argument("critical_ratio_er: n must be >= 3");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("critical_ratio_er: p must be in (0,1]");
  }
  const double nn = static_cast<double>(n);
  const double num = p * (nn * nn - 3.0 * nn + 4.0) - 2.0;
  const double den = (nn - 2.0) * (1.0 - 2.0 * p);
  return CriticalRatio::make(num, den, pole_eps(num));
}

QHat q_hat(int m, double p, int n) {
  if (m < 2) throw std::invalid_argument("q_hat: m must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("q_hat: p must be in [0,1]");
  }
  if (n < 3) throw std::invalid_argument("q_hat: n must be >= 3");

  QHat out;
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  out.expansion = (md - 2.0 * p) / (2.0 * (md - 1.0)) +
                  2.0 * md * (0.5 - p) * (0.5 - p) /
                      ((md - 1.0) * (md - 1.0) * nd);

  // The critical-ratio denominator, cleared of its positive prefactor
  // (n-1)(alpha p + beta q)^2, is the quadratic A q^2 + B q + C.
  const double alpha = 1.0 / md;
  const double beta = 1.0 - alpha;
  const double A = 2.0 * beta * (1.0 - (nd - 1.0) * beta);
  const double B = beta * (nd - 2.0 - 4.0 * (nd - 1.0) * alpha * p);
  const double C =
      alpha * p * (nd - 2.0 + 2.0 * p - 2.0 * (nd - 1.0) * alpha * p);

  const auto keep_in_range = [&out](double root) {
    if (root >= 0.0 && root <= 1.0 &&
        (!out.exact_root || root < *out.exact_root)) {
      out.exact_root = root;
    }
  };
  if (std::fabs(A) <= 1e-14 * std::max(1.0, std::fabs(B))) {
    if (B != 0.0) keep_in_range(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      keep_in_range((-B - sq) / (2.0 * A));
      keep_in_range((-B + sq) / (2.0 * A));
    }
  }
  return out;
}

CriticalRatio bstar_small_q(int n, int m, double p) {
  if (m < 2) throw std::invalid_argument("bstar_small_q: m must be >= 2");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bstar_small_q: p must be in (0,1]");
  }
  if (n < 3) throw std::invalid_argument("bstar_small_q: n must be >= 3");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double num = nd * (nd - 2.0) * p - 2.0 * md * (1.0 - p);
  const double den = nd * (md - 2.0 * p) - 2.0 * md * (1.0 - p);
  return CriticalRatio::make(num, den, pole_eps(num));
}

double sigma_mf(const DegreeMoments& m) {
  if (!(m.mu1 > 1.0)) {
    throw std::range_error("sigma_mf: requires mu1 > 1, got mu1 = " +
                           std::to_string(m.mu1));
  }
  const double n = static_cast<double>(m.n);
  return (n * (m.mu1 + 1.0) - 4.0 * m.mu2 / m.mu1) / (n * (m.mu1 - 1.0));
}

MeanFieldReport mean_field_report(const DegreeMoments& moments, double b,
                                  double c, double delta) {
  MeanFieldReport report;
  report.tau_mf = tau_mf(moments);
  report.bstar_mf = critical_ratio_mf(moments);
  report.sigma_mf = moments.mu1 > 1.0
                        ? sigma_mf(moments)
                        : std::numeric_limits<double>::quiet_NaN();
  report.rho_mf = fixation_mf(moments, b, c, delta);
  return report;
}

}  // namespace coopnet
