#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace gsreg {

/// Sparse coefficient vector in canonical form: strictly increasing 0-based
/// support, no stored zeros. Support comparisons are therefore set equality.
class SparseVector {
public:
  SparseVector() = default;

  /// Constructs from (support, values); indices must be in [0, ambient_dim).
  /// Entries with value exactly zero are dropped; indices are sorted.
  SparseVector(std::vector<int> support, Eigen::VectorXd values,
               int ambient_dim);

  /// Canonicalizes a dense vector (drops exact zeros).
  static SparseVector from_dense(const Eigen::VectorXd& dense);

  const std::vector<int>& support() const { return support_; }
  const Eigen::VectorXd& values() const { return values_; }
  int ambient_dim() const { return ambient_dim_; }
  int size() const { return static_cast<int>(support_.size()); }

  Eigen::VectorXd to_dense() const;

  bool same_support(const SparseVector& other) const {
    return support_ == other.support_;
  }
  bool operator==(const SparseVector& other) const {
    return ambient_dim_ == other.ambient_dim_ && support_ == other.support_ &&
           values_ == other.values_;
  }

private:
  std::vector<int> support_;
  Eigen::VectorXd values_;
  int ambient_dim_ = 0;
};

/// Optional per-group payload; which fields are present depends on the model
/// family and is validated at model construction, not here.
struct GroupMeta {
  std::optional<Eigen::VectorXi> pattern;  ///< observation indicator in {0,1}
  std::optional<double> z;                 ///< scalar covariate in [0,1]
  std::optional<Eigen::MatrixXd> random_design;  ///< Z_i (m_i x q)
};

struct Group {
  Eigen::VectorXd y;  ///< responses, length m_i
  Eigen::MatrixXd x;  ///< design block, m_i x p
  GroupMeta meta;
};

/// n response groups (y_i, X_i) sharing a column count p.
class GroupedDataset {
public:
  GroupedDataset(std::vector<Group> groups, int p);

  int p() const { return p_; }
  int n() const { return static_cast<int>(groups_.size()); }
  int n_star() const { return n_star_; }  ///< total response length
  const std::vector<Group>& groups() const { return groups_; }
  const Group& group(int i) const { return groups_.at(i); }

  /// Vertical stack of the X_i blocks (n_star x p).
  Eigen::MatrixXd stacked_design() const;
  /// Concatenated responses (length n_star).
  Eigen::VectorXd stacked_response() const;

private:
  std::vector<Group> groups_;
  int p_ = 0;
  int n_star_ = 0;
};

/// Whitened quantities at a reference nuisance value eta0: row blocks of
/// x_tilde and entries of xi_tilde/u align with the dataset's groups.
struct WhitenedDesign {
  Eigen::MatrixXd x_tilde;   ///< stack of Delta_i^{-1/2} X_i
  Eigen::VectorXd xi_tilde;  ///< stack of Delta_i^{-1/2} xi_i
  Eigen::VectorXd u;         ///< standardized residuals
  std::vector<int> offsets;  ///< row offset of each group block
};

}  // namespace gsreg
