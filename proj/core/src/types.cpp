#include "gsreg/types.hpp"

#include <algorithm>
#include <numeric>

#include "gsreg/errors.hpp"

namespace gsreg {

SparseVector::SparseVector(std::vector<int> support, Eigen::VectorXd values,
                           int ambient_dim)
    : ambient_dim_(ambient_dim) {
  if (static_cast<int>(support.size()) != values.size())
    throw ShapeError("SparseVector: support/value length mismatch");
  if (ambient_dim < 0) throw ShapeError("SparseVector: negative ambient dim");
  std::vector<int> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return support[a] < support[b]; });
  support_.reserve(order.size());
  std::vector<double> vals;
  vals.reserve(order.size());
  int prev = -1;
  for (int k : order) {
    const int j = support[k];
    if (j < 0 || j >= ambient_dim)
      throw ShapeError("SparseVector: index out of range");
    if (j == prev) throw ShapeError("SparseVector: duplicate index");
    prev = j;
    if (values(k) == 0.0) continue;  // canonical form: no explicit zeros
    support_.push_back(j);
    vals.push_back(values(k));
  }
  values_ = Eigen::Map<Eigen::VectorXd>(vals.data(),
                                        static_cast<Eigen::Index>(vals.size()));
}

SparseVector SparseVector::from_dense(const Eigen::VectorXd& dense) {
  std::vector<int> support;
  std::vector<double> vals;
  for (int j = 0; j < dense.size(); ++j) {
    if (dense(j) != 0.0) {
      support.push_back(j);
      vals.push_back(dense(j));
    }
  }
  return SparseVector(
      std::move(support),
      Eigen::Map<Eigen::VectorXd>(vals.data(),
                                  static_cast<Eigen::Index>(vals.size())),
      static_cast<int>(dense.size()));
}

Eigen::VectorXd SparseVector::to_dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ambient_dim_);
  for (int k = 0; k < size(); ++k) out(support_[k]) = values_(k);
  return out;
}

GroupedDataset::GroupedDataset(std::vector<Group> groups, int p)
    : groups_(std::move(groups)), p_(p) {
  if (p_ < 1) throw ShapeError("GroupedDataset: p must be positive");
  if (groups_.empty()) throw ShapeError("GroupedDataset: need at least one group");
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const auto& g = groups_[i];
    if (g.y.size() < 1)
      throw ShapeError("GroupedDataset: empty group " + std::to_string(i));
    if (g.x.rows() != g.y.size() || g.x.cols() != p_)
      throw ShapeError("GroupedDataset: design shape mismatch in group " +
                       std::to_string(i));
    n_star_ += static_cast<int>(g.y.size());
  }
}

Eigen::MatrixXd GroupedDataset::stacked_design() const {
  Eigen::MatrixXd x(n_star_, p_);
  int row = 0;
  for (const auto& g : groups_) {
    x.middleRows(row, g.x.rows()) = g.x;
    row += static_cast<int>(g.x.rows());
  }
  return x;
}

Eigen::VectorXd GroupedDataset::stacked_response() const {
  Eigen::VectorXd y(n_star_);
  int row = 0;
  for (const auto& g : groups_) {
    y.segment(row, g.y.size()) = g.y;
    row += static_cast<int>(g.y.size());
  }
  return y;
}

}  // namespace gsreg
