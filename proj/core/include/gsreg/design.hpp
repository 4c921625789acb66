#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace gsreg {

/// max_j || X_{.j} ||_2.
double x_norm_star(const Eigen::MatrixXd& x);

struct SupportScanOptions {
  std::int64_t budget = 1000000;  ///< max number of supports to enumerate
  bool randomized_fallback = false;  ///< sample supports when over budget
  int sample_size = 20000;
  std::uint64_t seed = 0;
};

/// Smallest scaled singular value phi_2(s) = min over |S| <= s of
/// sigma_min(X_S) / ||X||_*. Exact by enumeration within the budget;
/// a randomized support sample otherwise (flagged by the caller's options).
/// Values of s < 1 are understood as 1 (compatibility convention).
double phi2(const Eigen::MatrixXd& x, int s,
            const SupportScanOptions& opts = {});

/// Uniform compatibility number phi_1(s) = min over |S| <= s of
/// sqrt(|S|) min_{||u||_1 = 1, supp(u) in S} ||X_S u||_2 / ||X||_*.
/// The inner minimum is exact: per sign orthant the quadratic is minimized on
/// the affine slice {sign^T u = 1} in closed form, and minimizers violating
/// their orthant are covered by smaller supports.
double phi1(const Eigen::MatrixXd& x, int s,
            const SupportScanOptions& opts = {});

/// min over |S| <= s of the smallest singular value of [X_S, Z].
double joint_min_singular(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                          int s, const SupportScanOptions& opts = {});

/// Beta-min threshold K5 sqrt(s0 log p) / (phi2((K4+1) s0) ||X||_*).
/// Returns +inf (flag set) when phi2 is zero.
double beta_min_threshold(const Eigen::MatrixXd& x, int s0, double k4,
                          double k5, bool* phi2_zero = nullptr,
                          const SupportScanOptions& opts = {});

/// Finite-sample design diagnostics with method tags.
struct DiagnosticsReport {
  double x_norm_star = 0.0;
  std::map<int, double> phi1;
  std::map<int, double> phi2;
  std::map<int, double> joint_sv;
  std::optional<double> beta_min;
  std::string method = "exact";  ///< "exact" or "randomized-lower-bound"
};

DiagnosticsReport diagnostics(const Eigen::MatrixXd& x, int s_max,
                              double k4 = 1.0, double k5 = 1.0,
                              const SupportScanOptions& opts = {});

}  // namespace gsreg
