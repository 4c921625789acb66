#include "gsreg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include "gsreg/errors.hpp"
#include "gsreg/rng.hpp"

namespace gsreg {

bool is_symmetric(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> checked_eigen(
    const Eigen::MatrixXd& a, const std::string& context) {
  if (a.rows() != a.cols())
    throw ShapeError(context + ": matrix is not square");
  if (!is_symmetric(a)) throw NotSpdError(context + ": matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double max_ev = es.eigenvalues().maxCoeff();
  if (!(max_ev > 0.0) || es.eigenvalues().minCoeff() <= kSpdTol * max_ev)
    throw NotSpdError(context + ": matrix not positive definite");
  return es;
}

}  // namespace

void require_spd(const Eigen::MatrixXd& a, const std::string& context) {
  (void)checked_eigen(a, context);
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a, const std::string& context) {
  auto es = checked_eigen(a, context);
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& a,
                             const std::string& context) {
  auto es = checked_eigen(a, context);
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

double spd_log_det(const Eigen::MatrixXd& a, const std::string& context) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    // fall back to the eigen check for a consistent error message
    (void)checked_eigen(a, context);
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a,
                            const std::string& context) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) (void)checked_eigen(a, context);
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

Eigen::MatrixXd random_spd(int dim, double lo, double hi, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd evals(dim);
  for (int i = 0; i < dim; ++i) evals(i) = unif(rng);
  return q * evals.asDiagonal() * q.transpose();
}

}  // namespace gsreg
