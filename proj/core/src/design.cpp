#include "gsreg/design.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "gsreg/errors.hpp"
#include "gsreg/rng.hpp"

namespace gsreg {

double x_norm_star(const Eigen::MatrixXd& x) {
  if (x.cols() < 1) throw ShapeError("x_norm_star: empty design");
  return x.colwise().norm().maxCoeff();
}

namespace {

std::int64_t n_choose_k(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (int i = 0; i < k; ++i) {
    out = out * (n - i) / (i + 1);
    if (out > (std::int64_t{1} << 62) / n) return std::int64_t{1} << 62;
  }
  return out;
}

/// Calls visit(support) for every size-t subset of {0..p-1}, or for a random
/// sample when enumeration exceeds the budget.
void scan_supports(int p, int t, const SupportScanOptions& opts,
                   const std::function<void(const std::vector<int>&)>& visit) {
  if (n_choose_k(p, t) <= opts.budget) {
    std::vector<int> s(t);
    for (int i = 0; i < t; ++i) s[i] = i;
    while (true) {
      visit(s);
      int i = t - 1;
      while (i >= 0 && s[i] == p - t + i) --i;
      if (i < 0) break;
      ++s[i];
      for (int j = i + 1; j < t; ++j) s[j] = s[j - 1] + 1;
    }
  } else {
    if (!opts.randomized_fallback)
      throw BudgetError("support enumeration budget exceeded for s = " +
                        std::to_string(t));
    Rng rng = make_rng(opts.seed, 0xd351);
    std::vector<int> pool(p);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> s(t);
    for (int rep = 0; rep < opts.sample_size; ++rep) {
      for (int i = 0; i < t; ++i) {
        std::uniform_int_distribution<int> pick(i, p - 1);
        std::swap(pool[i], pool[pick(rng)]);
        s[i] = pool[i];
      }
      std::sort(s.begin(), s.end());
      visit(s);
    }
  }
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x,
                               const std::vector<int>& support) {
  Eigen::MatrixXd out(x.rows(), support.size());
  for (std::size_t k = 0; k < support.size(); ++k)
    out.col(k) = x.col(support[k]);
  return out;
}

double min_singular_value(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().minCoeff();
}

/// Exact min over the l1 sphere restricted to the orthant faces of a single
/// support: min over sign patterns of the hyperplane-constrained quadratic
/// minimum, keeping only sign-feasible minimizers (infeasible ones are
/// dominated by smaller supports).
double l1_sphere_min_norm(const Eigen::MatrixXd& x_s) {
  const int t = static_cast<int>(x_s.cols());
  const Eigen::MatrixXd gram = x_s.transpose() * x_s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const Eigen::VectorXd d = es.eigenvalues();
  const double d_tol = std::max(d.maxCoeff(), 1.0) * 1e-13;
  double best = std::numeric_limits<double>::infinity();
  // u and -u give the same value: fix the first sign to +1.
  for (std::uint32_t bits = 0; bits < (1u << (t - 1)); ++bits) {
    Eigen::VectorXd sign(t);
    sign(0) = 1.0;
    for (int j = 1; j < t; ++j) sign(j) = (bits >> (j - 1)) & 1u ? -1.0 : 1.0;
    const Eigen::VectorXd c = es.eigenvectors().transpose() * sign;
    bool singular_hit = false;
    double inv_sum = 0.0;
    for (int k = 0; k < t; ++k) {
      if (d(k) <= d_tol) {
        if (std::abs(c(k)) > 1e-10) singular_hit = true;  // null direction
      } else {
        inv_sum += c(k) * c(k) / d(k);
      }
    }
    if (singular_hit) return 0.0;
    if (inv_sum <= 0.0) continue;
    const double val2 = 1.0 / inv_sum;  // min of u^T G u on {sign^T u = 1}
    // minimizer u* = val2 * G^+ sign; feasibility in the orthant
    Eigen::VectorXd w = c;
    for (int k = 0; k < t; ++k) w(k) = (d(k) > d_tol) ? c(k) / d(k) : 0.0;
    const Eigen::VectorXd u = val2 * (es.eigenvectors() * w);
    bool feasible = true;
    for (int j = 0; j < t; ++j)
      if (sign(j) * u(j) < -1e-12) { feasible = false; break; }
    if (feasible) best = std::min(best, std::sqrt(std::max(val2, 0.0)));
  }
  return best;
}

}  // namespace

double phi2(const Eigen::MatrixXd& x, int s, const SupportScanOptions& opts) {
  if (s < 1) return 1.0;  // sizes below 1 are understood as 1
  const int p = static_cast<int>(x.cols());
  if (s > p) throw ParameterRangeError("phi2: s exceeds p");
  const double norm_star = x_norm_star(x);
  double best = std::numeric_limits<double>::infinity();
  // sigma_min only decreases as columns are added: size s suffices.
  scan_supports(p, s, opts, [&](const std::vector<int>& supp) {
    best = std::min(best, min_singular_value(select_columns(x, supp)));
  });
  return best / norm_star;
}

double phi1(const Eigen::MatrixXd& x, int s, const SupportScanOptions& opts) {
  if (s < 1) return 1.0;
  const int p = static_cast<int>(x.cols());
  if (s > p) throw ParameterRangeError("phi1: s exceeds p");
  const double norm_star = x_norm_star(x);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= s; ++t) {
    const double root_t = std::sqrt(static_cast<double>(t));
    scan_supports(p, t, opts, [&](const std::vector<int>& supp) {
      const double inner = l1_sphere_min_norm(select_columns(x, supp));
      if (std::isfinite(inner)) best = std::min(best, root_t * inner);
    });
  }
  return best / norm_star;
}

double joint_min_singular(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                          int s, const SupportScanOptions& opts) {
  const int p = static_cast<int>(x.cols());
  if (s < 0 || s > p)
    throw ParameterRangeError("joint_min_singular: s out of range");
  if (z.size() > 0 && z.rows() != x.rows())
    throw ShapeError("joint_min_singular: row count mismatch");
  double best = std::numeric_limits<double>::infinity();
  if (s == 0) {
    if (z.size() == 0) throw ShapeError("joint_min_singular: empty problem");
    return min_singular_value(z);
  }
  scan_supports(p, s, opts, [&](const std::vector<int>& supp) {
    Eigen::MatrixXd xs = select_columns(x, supp);
    Eigen::MatrixXd joint(x.rows(), xs.cols() + z.cols());
    joint << xs, z;
    best = std::min(best, min_singular_value(joint));
  });
  return best;
}

double beta_min_threshold(const Eigen::MatrixXd& x, int s0, double k4,
                          double k5, bool* phi2_zero,
                          const SupportScanOptions& opts) {
  if (phi2_zero) *phi2_zero = false;
  if (s0 < 1) throw ParameterRangeError("beta_min_threshold: s0 must be >= 1");
  const int p = static_cast<int>(x.cols());
  const int arg = std::min(static_cast<int>(std::floor((k4 + 1.0) * s0)), p);
  const double ph2 = phi2(x, arg, opts);
  if (ph2 <= 0.0) {
    if (phi2_zero) *phi2_zero = true;
    return std::numeric_limits<double>::infinity();
  }
  return k5 * std::sqrt(s0 * std::log(static_cast<double>(p))) /
         (ph2 * x_norm_star(x));
}

DiagnosticsReport diagnostics(const Eigen::MatrixXd& x, int s_max, double k4,
                              double k5, const SupportScanOptions& opts) {
  DiagnosticsReport report;
  report.x_norm_star = x_norm_star(x);
  const int p = static_cast<int>(x.cols());
  for (int s = 1; s <= std::min(s_max, p); ++s) {
    bool randomized = n_choose_k(p, s) > opts.budget;
    report.phi2[s] = phi2(x, s, opts);
    report.phi1[s] = phi1(x, s, opts);
    if (randomized) report.method = "randomized-lower-bound";
  }
  bool flag = false;
  report.beta_min = beta_min_threshold(x, std::max(1, std::min(s_max, p)), k4,
                                       k5, &flag, opts);
  if (flag) report.beta_min.reset();
  return report;
}

}  // namespace gsreg
