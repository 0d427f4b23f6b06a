#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace coreprune {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Rows are points (neurons, weight vectors). Weights default to 1.
class PointSet {
 public:
  explicit PointSet(Matrix data);
  PointSet(Matrix data, Vector weights);

  const Matrix& data() const noexcept { return data_; }
  Index size() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }

  bool has_weights() const noexcept { return weights_.has_value(); }
  // Returns the explicit weights or a vector of ones.
  Vector weights() const;
  double weight(Index i) const { return weights_ ? (*weights_)(i) : 1.0; }

  Eigen::RowVectorXd row(Index i) const { return data_.row(i); }

  // Largest row norm; zero for the all-zero set.
  double scale() const;

  // Row subset in the given order (weights carried along).
  PointSet select(const std::vector<Index>& rows) const;

 private:
  Matrix data_;
  std::optional<Vector> weights_;
};

}  // namespace coreprune
