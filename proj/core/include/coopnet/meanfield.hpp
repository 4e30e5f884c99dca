#pragma once

#include <optional>

#include "coopnet/critical_ratio.hpp"
#include "coopnet/graph.hpp"
#include "coopnet/sbm_params.hpp"

namespace coopnet {

/// Mean-field remeeting time n*mu1^2/mu2 (every node's remeeting time
/// replaced by the population average).
double tau_mf(const DegreeMoments& moments);

/// Mean-field critical benefit-to-cost ratio
///   (n - 2*mu2/mu1^2) / (n/mu1 - 2*mu2/mu1^2).
/// Exact on vertex-transitive graphs.
CriticalRatio critical_ratio_mf(const DegreeMoments& moments);

/// Mean-field fixation probability of a single cooperator under weak
/// selection delta in the donation game with benefit b and cost c:
///   1/n + delta/(2n) * [ b(n*mu1/mu2 - 2) - c(n*mu1^2/mu2 - 2) ]
/// (zero slope exactly at b = c * critical_ratio_mf).
double fixation_mf(const DegreeMoments& moments, double b, double c,
                   double delta);

/// Expected degree moments of the stochastic block model: mu1 and mu2 from
/// the intra/inter binomial mixture (mu2 = variance + mu1^2).
DegreeMoments sbm_moments(const SbmParams& params);

/// Closed-form mean-field critical ratio for the SBM. Same algebra as
/// critical_ratio_mf(sbm_moments(params)) after simplification.
CriticalRatio critical_ratio_sbm(const SbmParams& params);

/// Closed-form mean-field critical ratio for the Erdos-Renyi model:
///   [p(n^2 - 3n + 4) - 2] / [(n - 2)(1 - 2p)].
/// The denominator vanishes at p = 1/2 (pole between cooperation and spite).
CriticalRatio critical_ratio_er(int n, double p);

/// Inter-community probability where the SBM critical ratio diverges.
struct QHat {
  /// Large-n two-term expansion
  ///   (m - 2p)/(2(m-1)) + 2m(1/2 - p)^2/((m-1)^2 n).
  double expansion = 0.0;
  /// Exact root of the SBM critical-ratio denominator (a quadratic in q),
  /// absent when no root lies in [0,1].
  std::optional<double> exact_root;
};
QHat q_hat(int m, double p, int n);

/// Sparsely interconnected communities (q -> 0) critical ratio:
///   [n(n-2)p - 2m(1-p)] / [n(m - 2p) - 2m(1-p)].
CriticalRatio bstar_small_q(int n, int m, double p);

/// Mean-field structure coefficient
///   [n(mu1 + 1) - 4*mu2/mu1] / [n(mu1 - 1)], valid for mu1 > 1.
double sigma_mf(const DegreeMoments& moments);

/// Bundle of the mean-field quantities for one graph and one game setting.
struct MeanFieldReport {
  double tau_mf = 0.0;
  CriticalRatio bstar_mf;
  double sigma_mf = 0.0;  // NaN when mu1 <= 1 (formula outside its validity)
  double rho_mf = 0.0;
};

MeanFieldReport mean_field_report(const DegreeMoments& moments, double b,
                                  double c, double delta);

}  // namespace coopnet
