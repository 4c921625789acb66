#include "gsreg/splines.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "gsreg/errors.hpp"

namespace gsreg {

SplineBasis::SplineBasis(int dimension, int order) : j_(dimension), q_(order) {
  if (order < 1) throw ParameterRangeError("SplineBasis: order must be >= 1");
  if (dimension < order)
    throw ParameterRangeError("SplineBasis: dimension must be >= order");
  const int interior = j_ - q_;
  knots_.resize(j_ + q_);
  for (int i = 0; i < q_; ++i) knots_[i] = 0.0;
  for (int i = 0; i < interior; ++i)
    knots_[q_ + i] = static_cast<double>(i + 1) / (interior + 1);
  for (int i = 0; i < q_; ++i) knots_[j_ + i] = 1.0;
}

std::vector<double> SplineBasis::greville() const {
  std::vector<double> xi(j_);
  for (int j = 0; j < j_; ++j) {
    if (q_ == 1) {
      xi[j] = 0.5 * (knots_[j] + knots_[j + 1]);
    } else {
      double sum = 0.0;
      for (int k = 1; k < q_; ++k) sum += knots_[j + k];
      xi[j] = sum / (q_ - 1);
    }
  }
  return xi;
}

Eigen::VectorXd SplineBasis::eval(double z) const {
  if (z < 0.0 || z > 1.0)
    throw ParameterRangeError("SplineBasis::eval: z outside [0,1]");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(j_);
  // Locate the knot interval [t_mu, t_{mu+1}) containing z; at z = 1 use the
  // last nonempty interval so the right endpoint is included.
  int mu = q_ - 1;
  while (mu < j_ - 1 && z >= knots_[mu + 1]) ++mu;
  // Order-1 seed, then the Cox-de Boor triangle in place.
  b(mu) = 1.0;
  for (int k = 2; k <= q_; ++k) {
    for (int j = mu - k + 1; j <= mu; ++j) {
      if (j < 0) continue;
      const double tj = knots_[j];
      const double tjk = knots_[j + k];
      const double tj1 = knots_[j + 1];
      const double tjk1 = (j + k - 1 < static_cast<int>(knots_.size()))
                              ? knots_[j + k - 1]
                              : 1.0;
      double left = 0.0, right = 0.0;
      if (tjk1 > tj) left = (z - tj) / (tjk1 - tj) * b(j);
      if (j + 1 <= mu && tjk > tj1) right = (tjk - z) / (tjk - tj1) * b(j + 1);
      b(j) = left + right;
    }
  }
  return b;
}

Eigen::MatrixXd spline_design(const SplineBasis& basis,
                              const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd w(n, basis.dimension());
  for (int i = 0; i < n; ++i) w.row(i) = basis.eval(z[i]).transpose();
  return w;
}

Eigen::MatrixXd projection(const Eigen::MatrixXd& w, bool allow_pseudo_inverse,
                           bool* used_pseudo_inverse) {
  if (used_pseudo_inverse) *used_pseudo_inverse = false;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(w);
  qr.setThreshold(1e-10);
  if (qr.rank() < w.cols()) {
    if (!allow_pseudo_inverse)
      throw ShapeError("projection: design matrix is rank deficient");
    if (used_pseudo_inverse) *used_pseudo_inverse = true;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = 1e-10 * svd.singularValues().maxCoeff();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(w.rows(), w.rows());
    for (int k = 0; k < svd.singularValues().size(); ++k) {
      if (svd.singularValues()(k) > tol)
        h += svd.matrixU().col(k) * svd.matrixU().col(k).transpose();
    }
    return h;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> thin(w);
  Eigen::MatrixXd q = thin.householderQ() *
                      Eigen::MatrixXd::Identity(w.rows(), w.cols());
  return q * q.transpose();
}

double approx_error(const std::function<double(double)>& f,
                    const SplineBasis& basis, int grid_size) {
  std::vector<double> grid(grid_size);
  for (int i = 0; i < grid_size; ++i)
    grid[i] = static_cast<double>(i) / (grid_size - 1);
  Eigen::MatrixXd w = spline_design(basis, grid);
  Eigen::VectorXd fv(grid_size);
  for (int i = 0; i < grid_size; ++i) fv(i) = f(grid[i]);
  Eigen::VectorXd beta = w.colPivHouseholderQr().solve(fv);
  return (w * beta - fv).cwiseAbs().maxCoeff();
}

}  // namespace gsreg
