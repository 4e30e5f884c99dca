#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "coopnet/critical_ratio.hpp"
#include "coopnet/graph.hpp"

namespace coopnet {

/// Pairwise expected meeting times of two coalescing random walkers under
/// asynchronous stepping (each step one of the two walkers, chosen with
/// probability 1/2, moves to a uniform random neighbor):
///   tau_ij = 1 + (1/(2 k_i)) sum_{l~i} tau_lj + (1/(2 k_j)) sum_{l~j} tau_li
/// with tau_ii = 0.
struct MeetingTimes {
  int n = 0;
  std::vector<double> tau;  // row-major n*n, symmetric, zero diagonal
  double solver_residual = 0.0;  // max |equation residual| at termination
  double tolerance = 0.0;        // configured target for the above
  long iterations = 0;           // sweeps/iterations the solver used

  double at(int i, int j) const { return tau[static_cast<size_t>(i) * n + j]; }
};

/// Per-node remeeting times tau_x = 1 + (1/k_x) sum_{y~x} tau_yx together
/// with the reciprocal-degree weights p_x and the mean degree.
struct CoalescenceSummary {
  int n = 0;
  double mu1 = 0.0;
  std::vector<double> tau_x;
  std::vector<double> p_x;
  /// Relative error of the exact identity sum_x k_x^2 tau_x = n^2 mu1^2,
  /// recorded as a solver-quality diagnostic.
  double identity_relative_error = 0.0;
};

/// Raised when the iterative solver fails to reach the requested residual
/// within the sweep budget. Carries the recent residual history.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& residual_trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

struct MeetingTimesOptions {
  double tolerance = 1e-10;  // max absolute residual of the recurrence
  long max_sweeps = 100000;
  enum class Method {
    Auto,               // Direct for small n, ConjugateGradient otherwise
    Direct,             // sparse Cholesky on the pair system (small n)
    ConjugateGradient,  // Jacobi-preconditioned CG on the symmetrized system
    GaussSeidel,        // in-place relaxation sweeps
  };
  Method method = Method::Auto;
  double relaxation = 1.0;  // Gauss-Seidel only
};

MeetingTimes meeting_times(const Graph& g, const MeetingTimesOptions& options);
MeetingTimes meeting_times(const Graph& g, double tolerance = 1e-10,
                           long max_sweeps = 100000);

CoalescenceSummary remeeting_times(const Graph& g, const MeetingTimes& mt);

/// First-order fixation probability of a single cooperator placed uniformly
/// at random, donation game with benefit b and cost c, selection strength
/// delta:
///   rho = 1/n + (delta/(2n)) [ b (sum_x (k_x/(n mu1)) tau_x p_x - 2)
///                            - c (sum_x (k_x/(n mu1)) tau_x - 2) ]
/// so that rho crosses 1/n exactly at b = c * (b/c)*.
double fixation_probability_exact(const Graph& g,
                                  const CoalescenceSummary& summary, double b,
                                  double c, double delta);

/// Exact critical benefit-to-cost ratio
///   (sum_x tau_x k_x - 2 n mu1) / (sum_x tau_x k_x p_x - 2 n mu1),
/// pole flagged when |denominator| < 1e-9 * n * mu1.
CriticalRatio critical_ratio_exact(const Graph& g,
                                   const CoalescenceSummary& summary);

/// Binary dump of a meeting-time table: u64 n, f64 tolerance, f64 residual,
/// then the n(n-1)/2 upper-triangle entries row-major, all little-endian.
void write_meeting_times_file(const MeetingTimes& mt, const std::string& path);
MeetingTimes read_meeting_times_file(const std::string& path);

}  // namespace coopnet
