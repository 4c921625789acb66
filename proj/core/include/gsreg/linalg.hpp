#pragma once

#include <Eigen/Dense>
#include <string>

namespace gsreg {

// Relative eigenvalue floor below which a symmetric matrix is treated as
// not positive definite.
inline constexpr double kSpdTol = 1e-12;

/// True if A is symmetric up to a small relative tolerance.
bool is_symmetric(const Eigen::MatrixXd& a, double tol = 1e-10);

/// Throws NotSpdError (with `context` in the message) unless A is symmetric
/// with minimum eigenvalue > kSpdTol * max eigenvalue.
void require_spd(const Eigen::MatrixXd& a, const std::string& context);

/// Symmetric PSD square root via eigendecomposition.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a, const std::string& context);

/// Symmetric inverse square root via eigendecomposition.
Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& a,
                             const std::string& context);

/// log det of an SPD matrix via Cholesky.
double spd_log_det(const Eigen::MatrixXd& a, const std::string& context);

/// Inverse of an SPD matrix via Cholesky solve.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a,
                            const std::string& context);

/// Random SPD matrix with spectrum in [lo, hi]; eigenvectors Haar-ish from a
/// QR of a Gaussian matrix. Test/simulation helper.
Eigen::MatrixXd random_spd(int dim, double lo, double hi, std::uint64_t seed);

}  // namespace gsreg
