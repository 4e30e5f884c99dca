#include "coopnet/meeting_times.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

namespace coopnet {

namespace {

constexpr size_t kTraceCap = 128;

void push_trace(std::vector<double>& trace, double residual) {
  if (trace.size() == kTraceCap) trace.erase(trace.begin());
  trace.push_back(residual);
}

std::vector<double> node_degrees(const Graph& g) {
  std::vector<double> deg(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) {
    deg[i] = static_cast<double>(g.degree(i));
  }
  return deg;
}

// The recurrence, multiplied through by k_i k_j, is the symmetric positive
// definite pair system
//   k_i k_j tau_ij - (k_j/2)(A tau)_ij - (k_i/2)(A tau)_ji = k_i k_j
// for i != j (symmetric because the coefficient tying pair {i,j} to pair
// {l,j} is k_j/2 from either equation). This evaluates that left-hand side
// for a full symmetric zero-diagonal table x, using w as scratch for A*x.
void apply_pair_operator(const Graph& g, const std::vector<double>& deg,
                         const std::vector<double>& x, std::vector<double>& w,
                         std::vector<double>& out) {
  const int n = g.node_count();
  std::fill(w.begin(), w.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    double* wrow = w.data() + static_cast<size_t>(i) * n;
    for (int l : g.neighbors(i)) {
      const double* xrow = x.data() + static_cast<size_t>(l) * n;
      for (int j = 0; j < n; ++j) wrow[j] += xrow[j];
    }
  }
  for (int i = 0; i < n; ++i) {
    const size_t ri = static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        out[ri + j] = 0.0;
      } else {
        out[ri + j] =
            deg[i] * deg[j] * x[ri + j] -
            0.5 * (deg[j] * w[ri + j] +
                   deg[i] * w[static_cast<size_t>(j) * n + i]);
      }
    }
  }
}

// Pair-system residual entries divided by k_i k_j give the residual of the
// original recurrence; convergence is judged on its maximum.
double max_recurrence_residual(const std::vector<double>& pair_residual,
                               const std::vector<double>& deg, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const size_t ri = static_cast<size_t>(i) * n;
    for (int j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::fabs(pair_residual[ri + j]) /
                                  (deg[i] * deg[j]));
    }
  }
  return worst;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void fill_rhs(const std::vector<double>& deg, int n, std::vector<double>& r) {
  for (int i = 0; i < n; ++i) {
    const size_t ri = static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      r[ri + j] = (i == j) ? 0.0 : deg[i] * deg[j];
    }
  }
}

[[noreturn]] void throw_nonconvergence(const char* method, long sweeps,
                                       double residual, double tolerance,
                                       std::vector<double> trace) {
  std::ostringstream msg;
  msg << "meeting_times: " << method << " did not reach residual " << tolerance
      << " within " << sweeps << " sweeps (last residual " << residual << ")";
  throw ConvergenceError(msg.str(), std::move(trace));
}

MeetingTimes solve_conjugate_gradient(const Graph& g,
                                      const MeetingTimesOptions& opt) {
  const int n = g.node_count();
  const size_t nn = static_cast<size_t>(n) * n;
  const auto deg = node_degrees(g);

  std::vector<double> x(nn, 0.0), r(nn), z(nn), p(nn, 0.0), bp(nn), w(nn);
  fill_rhs(deg, n, r);

  std::vector<double> trace;
  double rho_prev = 0.0;
  long iter = 0;
  bool restart = true;
  double true_residual = std::numeric_limits<double>::infinity();

  for (;;) {
    const double estimate = max_recurrence_residual(r, deg, n);
    push_trace(trace, estimate);
    if (estimate <= opt.tolerance) {
      // The recursive residual drifts; confirm against the exact one.
      apply_pair_operator(g, deg, x, w, bp);
      fill_rhs(deg, n, r);
      for (size_t k = 0; k < nn; ++k) r[k] -= bp[k];
      true_residual = max_recurrence_residual(r, deg, n);
      if (true_residual <= opt.tolerance) break;
      restart = true;
    }
    if (iter >= opt.max_sweeps) {
      throw_nonconvergence("conjugate gradient", iter, estimate, opt.tolerance,
                           std::move(trace));
    }
    for (int i = 0; i < n; ++i) {
      const size_t ri = static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        z[ri + j] = (i == j) ? 0.0 : r[ri + j] / (deg[i] * deg[j]);
      }
    }
    const double rho = dot(r, z);
    if (restart) {
      p = z;
      restart = false;
    } else {
      const double beta = rho / rho_prev;
      for (size_t k = 0; k < nn; ++k) p[k] = z[k] + beta * p[k];
    }
    apply_pair_operator(g, deg, p, w, bp);
    const double curvature = dot(p, bp);
    if (!(curvature > 0.0)) {
      throw_nonconvergence("conjugate gradient (lost definiteness)", iter,
                           estimate, opt.tolerance, std::move(trace));
    }
    const double alpha = rho / curvature;
    for (size_t k = 0; k < nn; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * bp[k];
    }
    rho_prev = rho;
    ++iter;
  }

  MeetingTimes mt;
  mt.n = n;
  mt.tau = std::move(x);
  mt.solver_residual = true_residual;
  mt.tolerance = opt.tolerance;
  mt.iterations = iter;
  return mt;
}

MeetingTimes solve_gauss_seidel(const Graph& g,
                                const MeetingTimesOptions& opt) {
  const int n = g.node_count();
  const size_t nn = static_cast<size_t>(n) * n;
  const auto deg = node_degrees(g);
  std::vector<double> x(nn, 0.0);
  std::vector<double> trace;

  const auto equation_value = [&](int i, int j) {
    double si = 0.0;
    for (int l : g.neighbors(i)) si += x[static_cast<size_t>(l) * n + j];
    double sj = 0.0;
    for (int l : g.neighbors(j)) sj += x[static_cast<size_t>(l) * n + i];
    return 1.0 + 0.5 * si / deg[i] + 0.5 * sj / deg[j];
  };

  for (long sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const size_t ij = static_cast<size_t>(i) * n + j;
        double v = equation_value(i, j);
        if (opt.relaxation != 1.0) {
          v = x[ij] + opt.relaxation * (v - x[ij]);
        }
        x[ij] = v;
        x[static_cast<size_t>(j) * n + i] = v;
      }
    }
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        residual =
            std::max(residual, std::fabs(x[static_cast<size_t>(i) * n + j] -
                                         equation_value(i, j)));
      }
    }
    push_trace(trace, residual);
    if (residual <= opt.tolerance) {
      MeetingTimes mt;
      mt.n = n;
      mt.tau = std::move(x);
      mt.solver_residual = residual;
      mt.tolerance = opt.tolerance;
      mt.iterations = sweep;
      return mt;
    }
  }
  throw_nonconvergence("Gauss-Seidel", opt.max_sweeps,
                       trace.empty() ? 0.0 : trace.back(), opt.tolerance,
                       std::move(trace));
}

MeetingTimes solve_direct(const Graph& g, const MeetingTimesOptions& opt) {
  const int n = g.node_count();
  const auto deg = node_degrees(g);
  const long pairs = static_cast<long>(n) * (n - 1) / 2;

  const auto pair_index = [n](int i, int j) {
    return static_cast<long>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
  };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(pairs) +
                   static_cast<size_t>(2 * g.edge_count()) * (n - 1));
  Eigen::VectorXd rhs(pairs);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const long row = pair_index(i, j);
      triplets.emplace_back(row, row, deg[i] * deg[j]);
      rhs[row] = deg[i] * deg[j];
      for (int l : g.neighbors(i)) {
        if (l == j) continue;
        const long col = l < j ? pair_index(l, j) : pair_index(j, l);
        triplets.emplace_back(row, col, -0.5 * deg[j]);
      }
      for (int l : g.neighbors(j)) {
        if (l == i) continue;
        const long col = l < i ? pair_index(l, i) : pair_index(i, l);
        triplets.emplace_back(row, col, -0.5 * deg[i]);
      }
    }
  }
  Eigen::SparseMatrix<double> B(pairs, pairs);
  B.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(B);
  if (factor.info() != Eigen::Success) {
    throw std::runtime_error(
        "meeting_times: direct factorization of the pair system failed");
  }
  Eigen::VectorXd sol = factor.solve(rhs);

  std::vector<double> trace;
  for (int refine = 0; refine <= 3; ++refine) {
    Eigen::VectorXd residual = rhs - B * sol;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        worst = std::max(worst, std::fabs(residual[pair_index(i, j)]) /
                                    (deg[i] * deg[j]));
      }
    }
    push_trace(trace, worst);
    if (worst <= opt.tolerance) {
      MeetingTimes mt;
      mt.n = n;
      mt.tau.assign(static_cast<size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double v = sol[pair_index(i, j)];
          mt.tau[static_cast<size_t>(i) * n + j] = v;
          mt.tau[static_cast<size_t>(j) * n + i] = v;
        }
      }
      mt.solver_residual = worst;
      mt.tolerance = opt.tolerance;
      mt.iterations = refine + 1;
      return mt;
    }
    sol += factor.solve(residual);
  }
  throw_nonconvergence("direct solve with refinement", 4,
                       trace.empty() ? 0.0 : trace.back(), opt.tolerance,
                       std::move(trace));
}

}  // namespace

MeetingTimes meeting_times(const Graph& g, const MeetingTimesOptions& options) {
  if (g.node_count() < 2) {
    throw std::invalid_argument("meeting_times: need at least 2 nodes");
  }
  if (!is_connected(g)) {
    throw std::invalid_argument("meeting_times: graph is disconnected");
  }
  if (!(options.tolerance > 0.0)) {
    throw std::invalid_argument("meeting_times: tolerance must be positive");
  }

  using Method = MeetingTimesOptions::Method;
  Method method = options.method;
  // The factorization fills in heavily on the pair system, so the direct
  // solver only wins on small graphs.
  if (method == Method::Auto) {
    method = g.node_count() <= 32 ? Method::Direct : Method::ConjugateGradient;
  }
  switch (method) {
    case Method::Direct:
      return solve_direct(g, options);
    case Method::GaussSeidel:
      return solve_gauss_seidel(g, options);
    case Method::ConjugateGradient:
    default:
      return solve_conjugate_gradient(g, options);
  }
}

MeetingTimes meeting_times(const Graph& g, double tolerance, long max_sweeps) {
  MeetingTimesOptions opt;
  opt.tolerance = tolerance;
  opt.max_sweeps = max_sweeps;
  return meeting_times(g, opt);
}

CoalescenceSummary remeeting_times(const Graph& g, const MeetingTimes& mt) {
  const int n = g.node_count();
  if (mt.n != n) {
    throw std::invalid_argument(
        "remeeting_times: meeting-time table size does not match the graph");
  }
  CoalescenceSummary s;
  s.n = n;
  s.mu1 = degree_moments(g).mu1;
  s.tau_x.resize(n);
  s.p_x.resize(n);
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int y : g.neighbors(x)) sum += mt.at(y, x);
    s.tau_x[x] = 1.0 + sum / static_cast<double>(g.degree(x));
    s.p_x[x] = reciprocal_degree_weight(g, x);
  }

  double weighted = 0.0;
  for (int x = 0; x < n; ++x) {
    const double k = static_cast<double>(g.degree(x));
    weighted += k * k * s.tau_x[x];
  }
  const double expected = static_cast<double>(n) * n * s.mu1 * s.mu1;
  s.identity_relative_error = std::fabs(weighted - expected) / expected;
  if (s.identity_relative_error > 1e-6) {
    std::ostringstream msg;
    msg << "remeeting_times: identity sum k^2 tau = (n mu1)^2 violated: "
        << weighted << " vs " << expected << " (relative "
        << s.identity_relative_error
        << "); meeting times look under-converged";
    throw std::runtime_error(msg.str());
  }
  return s;
}

double fixation_probability_exact(const Graph& g,
                                  const CoalescenceSummary& summary, double b,
                                  double c, double delta) {
  if (delta < 0.0) {
    throw std::invalid_argument(
        "fixation_probability_exact: delta must be >= 0");
  }
  const int n = g.node_count();
  if (summary.n != n) {
    throw std::invalid_argument(
        "fixation_probability_exact: summary does not match the graph");
  }
  const double nd = static_cast<double>(n);
  double tau_sum = 0.0;
  double tau_p_sum = 0.0;
  for (int x = 0; x < n; ++x) {
    const double weight =
        static_cast<double>(g.degree(x)) / (nd * summary.mu1);
    tau_sum += weight * summary.tau_x[x];
    tau_p_sum += weight * summary.tau_x[x] * summary.p_x[x];
  }
  // The benefit pairs with the p_x-weighted sum: that makes the slope vanish
  // exactly at b = c * (b/c)* and reproduces the enumeration oracle (on K4
  // the slope is -10/24 for b=2, c=1).
  return 1.0 / nd +
         delta / (2.0 * nd) * (b * (tau_p_sum - 2.0) - c * (tau_sum - 2.0));
}

CriticalRatio critical_ratio_exact(const Graph& g,
                                   const CoalescenceSummary& summary) {
  const int n = g.node_count();
  if (summary.n != n) {
    throw std::invalid_argument(
        "critical_ratio_exact: summary does not match the graph");
  }
  const double nd = static_cast<double>(n);
  double weighted_tau = 0.0;
  double weighted_tau_p = 0.0;
  for (int x = 0; x < n; ++x) {
    const double k = static_cast<double>(g.degree(x));
    weighted_tau += summary.tau_x[x] * k;
    weighted_tau_p += summary.tau_x[x] * k * summary.p_x[x];
  }
  const double shift = 2.0 * nd * summary.mu1;
  return CriticalRatio::make(weighted_tau - shift, weighted_tau_p - shift,
                             1e-9 * nd * summary.mu1);
}

namespace {

void put_u64_le(std::ostream& os, uint64_t v) {
  unsigned char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

void put_f64_le(std::ostream& os, double d) {
  put_u64_le(os, std::bit_cast<uint64_t>(d));
}

uint64_t get_u64_le(std::istream& is, const char* what) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::runtime_error(std::string("meeting-time file truncated at ") +
                             what);
  }
  uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | bytes[k];
  return v;
}

double get_f64_le(std::istream& is, const char* what) {
  return std::bit_cast<double>(get_u64_le(is, what));
}

}  // namespace

void write_meeting_times_file(const MeetingTimes& mt,
                              const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  put_u64_le(os, static_cast<uint64_t>(mt.n));
  put_f64_le(os, mt.tolerance);
  put_f64_le(os, mt.solver_residual);
  for (int i = 0; i < mt.n; ++i) {
    for (int j = i + 1; j < mt.n; ++j) put_f64_le(os, mt.at(i, j));
  }
  if (!os) {
    throw std::runtime_error("write failed: " + path);
  }
}

MeetingTimes read_meeting_times_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  const uint64_t n64 = get_u64_le(is, "node count");
  if (n64 < 1 || n64 > (1u << 20)) {
    throw std::runtime_error("meeting-time file has implausible node count " +
                             std::to_string(n64));
  }
  MeetingTimes mt;
  mt.n = static_cast<int>(n64);
  mt.tolerance = get_f64_le(is, "tolerance");
  mt.solver_residual = get_f64_le(is, "residual");
  mt.tau.assign(static_cast<size_t>(mt.n) * mt.n, 0.0);
  for (int i = 0; i < mt.n; ++i) {
    for (int j = i + 1; j < mt.n; ++j) {
      const double v = get_f64_le(is, "tau entry");
      mt.tau[static_cast<size_t>(i) * mt.n + j] = v;
      mt.tau[static_cast<size_t>(j) * mt.n + i] = v;
    }
  }
  return mt;
}

}  // namespace coopnet
