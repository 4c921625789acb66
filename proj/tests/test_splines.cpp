#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsreg/splines.hpp"

using namespace gsreg;

namespace {

// textbook Cox-de Boor recursion, deliberately slow
double bspline_recursive(const std::vector<double>& t, int i, int k, double z) {
  if (k == 1) {
    // right-closed at the last interval so z = 1 is covered
    const bool last = t[i + 1] >= 1.0 && z >= t[i] && z <= t[i + 1];
    return (z >= t[i] && z < t[i + 1]) || last ? 1.0 : 0.0;
  }
  double left = 0.0, right = 0.0;
  if (t[i + k - 1] > t[i])
    left = (z - t[i]) / (t[i + k - 1] - t[i]) *
           bspline_recursive(t, i, k - 1, z);
  if (t[i + k] > t[i + 1])
    right = (t[i + k] - z) / (t[i + k] - t[i + 1]) *
            bspline_recursive(t, i + 1, k - 1, z);
  return left + right;
}

}  // namespace

TEST_CASE("basis evaluation matches the recursive definition") {
  for (int q : {2, 3, 4}) {
    for (int j : {q, q + 3, 11}) {
      const SplineBasis basis(j, q);
      const std::vector<double>& t = basis.knots();
      REQUIRE(static_cast<int>(t.size()) == j + q);
      for (int g = 0; g <= 37; ++g) {
        const double z = static_cast<double>(g) / 37.0;
        const Eigen::VectorXd b = basis.eval(z);
        for (int i = 0; i < j; ++i)
          CHECK(b(i) ==
                doctest::Approx(bspline_recursive(t, i, q, z)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("partition of unity and local support") {
  const SplineBasis basis(9, 4);
  for (int g = 0; g <= 50; ++g) {
    const Eigen::VectorXd b = basis.eval(g / 50.0);
    CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(b.minCoeff() >= 0.0);
    int active = 0;
    for (int i = 0; i < 9; ++i)
      if (b(i) > 0.0) ++active;
    CHECK(active <= 4);  // order q functions cover each point
  }
}

TEST_CASE("greville collocation is square and nonsingular") {
  const SplineBasis basis(7, 3);
  const std::vector<double> g = basis.greville();
  REQUIRE(static_cast<int>(g.size()) == 7);
  CHECK(g.front() == doctest::Approx(0.0));
  CHECK(g.back() == doctest::Approx(1.0));
  const Eigen::MatrixXd w = spline_design(basis, g);
  CHECK(std::abs(w.fullPivLu().determinant()) > 1e-8);
}

TEST_CASE("projection is an orthogonal projector onto the span") {
  const SplineBasis basis(5, 3);
  std::vector<double> z;
  for (int i = 0; i < 12; ++i) z.push_back((i + 0.5) / 12.0);
  const Eigen::MatrixXd w = spline_design(basis, z);
  const Eigen::MatrixXd h = projection(w);
  CHECK((h * h - h).norm() < 1e-10);
  CHECK((h - h.transpose()).norm() < 1e-10);
  CHECK((h * w - w).norm() < 1e-10);
  // rank-deficient input throws unless a pseudo-inverse is allowed
  Eigen::MatrixXd defective(4, 2);
  defective << 1, 1, 2, 2, 3, 3, 4, 4;
  CHECK_THROWS(projection(defective));
  bool used = false;
  const Eigen::MatrixXd hp = projection(defective, true, &used);
  CHECK(used);
  CHECK((hp * hp - hp).norm() < 1e-10);
}

TEST_CASE("approx_error is small for a function inside the span") {
  const SplineBasis basis(8, 3);
  // affine functions are reproduced exactly by order >= 2 bases
  CHECK(approx_error([](double z) { return 2.0 * z - 0.3; }, basis) < 1e-12);
  CHECK(approx_error([](double z) { return std::sin(6.0 * z); }, basis) <
        approx_error([](double z) { return std::sin(6.0 * z); },
                     SplineBasis(4, 3)));
}
