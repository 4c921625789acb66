#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace gsreg {

/// B-spline basis of order q (degree q-1) on [0,1] with equispaced interior
/// knots and boundary knots repeated q times. Dimension J >= q.
class SplineBasis {
public:
  SplineBasis(int dimension, int order);

  int dimension() const { return j_; }
  int order() const { return q_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Greville abscissae (averages of q-1 consecutive interior knot values);
  /// collocation at these points gives a nonsingular square design.
  std::vector<double> greville() const;

  /// Cox-de Boor evaluation of all J basis functions at z in [0,1].
  /// Nonnegative, sums to 1.
  Eigen::VectorXd eval(double z) const;

private:
  int j_ = 0;
  int q_ = 0;
  std::vector<double> knots_;  // length J + q
};

/// Design matrix W_J with row i = B_J(z_i).
Eigen::MatrixXd spline_design(const SplineBasis& basis,
                              const std::vector<double>& z);

/// Orthogonal projection W (W^T W)^{-1} W^T onto the column span of W.
/// Throws on rank deficiency unless allow_pseudo_inverse, in which case an
/// SVD pseudo-inverse is used and *used_pseudo_inverse is set.
Eigen::MatrixXd projection(const Eigen::MatrixXd& w,
                           bool allow_pseudo_inverse = false,
                           bool* used_pseudo_inverse = nullptr);

/// Sup-norm distance on an evaluation grid between f and its least-squares
/// B-spline fit; measures how well the basis can approximate f.
double approx_error(const std::function<double(double)>& f,
                    const SplineBasis& basis, int grid_size = 10000);

}  // namespace gsreg
