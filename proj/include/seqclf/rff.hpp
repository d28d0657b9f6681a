#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "seqclf/dense.hpp"
#include "seqclf/error.hpp"
#include "seqclf/random.hpp"

namespace seqclf {

/// Random Fourier feature map z(x)_j = sqrt(2/D) cos(w_j . x + b_j) for the
/// Gaussian kernel exp(-gamma ||a - b||^2): rows w_j ~ N(0, 2 gamma I),
/// phases b_j ~ U[0, 2 pi). Weights are regenerated from the seed, so a
/// projector is fully described by (input_dim, output_dim, gamma, seed).
template <typename Scalar = double>
class RffProjector {
 public:
  RffProjector(Eigen::Index input_dim, Eigen::Index output_dim, Scalar gamma, std::uint64_t seed)
      : input_dim_(input_dim), output_dim_(output_dim), gamma_(gamma), seed_(seed) {
    if (input_dim < 1 || output_dim < 1) {
      throw Error(ErrorKind::InvalidDimension, "RFF dimensions must be >= 1 (got d = " + std::to_string(input_dim) +
                                                   ", D = " + std::to_string(output_dim) + ")");
    }
    if (!(gamma > Scalar(0)) || !std::isfinite(static_cast<double>(gamma))) {
      throw Error(ErrorKind::InvalidGamma, "gamma must be a positive finite number");
    }
    const CounterRng weight_rng(seed, /*stream=*/1);
    const CounterRng phase_rng(seed, /*stream=*/2);
    const double scale = std::sqrt(2.0 * static_cast<double>(gamma));
    weights_.resize(output_dim, input_dim);
    for (Eigen::Index j = 0; j < output_dim; ++j) {
      const auto base = static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(input_dim);
      for (Eigen::Index i = 0; i < input_dim; ++i) {
        weights_(j, i) = static_cast<Scalar>(scale * weight_rng.normal(base + static_cast<std::uint64_t>(i)));
      }
    }
    phases_.resize(output_dim);
    for (Eigen::Index j = 0; j < output_dim; ++j) {
      phases_(j) = static_cast<Scalar>(2.0 * std::numbers::pi * phase_rng.uniform(static_cast<std::uint64_t>(j)));
    }
  }

  Eigen::Index input_dim() const noexcept { return input_dim_; }
  Eigen::Index output_dim() const noexcept { return output_dim_; }
  Scalar gamma() const noexcept { return gamma_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const RowMatrix<Scalar>& weights() const noexcept { return weights_; }
  const Vector<Scalar>& phases() const noexcept { return phases_; }

  Scalar amplitude() const noexcept { return std::sqrt(Scalar(2) / static_cast<Scalar>(output_dim_)); }

  /// z(x) for a single dense or sparse column vector.
  template <typename XType>
  Vector<Scalar> project(const XType& x) const {
    if (x.rows() != input_dim_ || x.cols() != 1) {
      throw Error(ErrorKind::DimensionMismatch, "RFF input has dimension " + std::to_string(x.rows()) +
                                                    ", projector expects " + std::to_string(input_dim_));
    }
    Vector<Scalar> z = weights_ * x;
    z += phases_;
    return amplitude() * z.array().cos().matrix();
  }

  /// z applied to every row of an n x d dense or sparse matrix.
  template <typename XType>
  Matrix<Scalar> project_rows(const XType& x) const {
    if (x.cols() != input_dim_) {
      throw Error(ErrorKind::DimensionMismatch, "RFF input has " + std::to_string(x.cols()) +
                                                    " columns, projector expects " + std::to_string(input_dim_));
    }
    Matrix<Scalar> z = x * weights_.transpose();
    z.rowwise() += phases_.transpose();
    return amplitude() * z.array().cos().matrix();
  }

 private:
  Eigen::Index input_dim_;
  Eigen::Index output_dim_;
  Scalar gamma_;
  std::uint64_t seed_;
  RowMatrix<Scalar> weights_;
  Vector<Scalar> phases_;
};

/// exp(-gamma ||a - b||^2).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar exact_kernel(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                       typename DerivedA::Scalar gamma) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "kernel arguments differ in dimension");
  return std::exp(-gamma * (a - b).squaredNorm());
}

}  // namespace seqclf
