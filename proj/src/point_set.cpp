#include "coreprune/point_set.hpp"

#include "coreprune/error.hpp"

namespace coreprune {

namespace {

void check_finite(const Matrix& data) {
  if (data.rows() < 1 || data.cols() < 1)
    throw Error(ErrorKind::InvalidParameter, "point set must have at least one row and column");
  if (!data.allFinite()) throw Error(ErrorKind::InvalidParameter, "point set has non-finite entries");
}

}  // namespace

PointSet::PointSet(Matrix data) : data_(std::move(data)) { check_finite(data_); }

PointSet::PointSet(Matrix data, Vector weights) : data_(std::move(data)), weights_(std::move(weights)) {
  check_finite(data_);
  if (weights_->size() != data_.rows())
    throw Error(ErrorKind::DimensionMismatch, "weights length " + std::to_string(weights_->size()) +
                                                  " != rows " + std::to_string(data_.rows()));
  if (!weights_->allFinite()) throw Error(ErrorKind::InvalidParameter, "weights have non-finite entries");
}

Vector PointSet::weights() const {
  if (weights_) return *weights_;
  return Vector::Ones(data_.rows());
}

double PointSet::scale() const { return data_.rowwise().norm().maxCoeff(); }

PointSet PointSet::select(const std::vector<Index>& rows) const {
  Matrix sub(static_cast<Index>(rows.size()), data_.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) sub.row(static_cast<Index>(k)) = data_.row(rows[k]);
  if (!weights_) return PointSet(std::move(sub));
  Vector w(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) w(static_cast<Index>(k)) = (*weights_)(rows[k]);
  return PointSet(std::move(sub), std::move(w));
}

}  // namespace coreprune
