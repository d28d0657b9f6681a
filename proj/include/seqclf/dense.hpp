#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace seqclf {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using SparseRows = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Rows `indices` of a dense matrix, in the given order.
template <typename Derived>
Matrix<typename Derived::Scalar> gather_rows(const Eigen::MatrixBase<Derived>& x, std::span<const std::size_t> indices) {
  Matrix<typename Derived::Scalar> out(static_cast<Eigen::Index>(indices.size()), x.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(indices[i]));
  return out;
}

/// Rows `indices` of a row-major sparse matrix, in the given order.
template <typename Scalar, typename StorageIndex>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex> gather_rows(
    const Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex>& x, std::span<const std::size_t> indices) {
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex>;
  Sparse out(static_cast<Eigen::Index>(indices.size()), x.cols());
  Eigen::Index nnz = 0;
  for (auto r : indices) nnz += x.outerIndexPtr()[r + 1] - x.outerIndexPtr()[r];
  out.reserve(nnz);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.startVec(static_cast<Eigen::Index>(i));
    for (typename Sparse::InnerIterator it(x, static_cast<Eigen::Index>(indices[i])); it; ++it) {
      out.insertBack(static_cast<Eigen::Index>(i), it.col()) = it.value();
    }
  }
  out.finalize();
  return out;
}

/// n x C indicator matrix of integer labels.
template <typename Scalar>
Matrix<Scalar> one_hot_labels(std::span<const int> labels, Eigen::Index classes) {
  Matrix<Scalar> y = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), labels[i]) = Scalar(1);
  return y;
}

/// Row-wise softmax with max subtraction.
template <typename Derived>
void softmax_rows_inplace(Eigen::MatrixBase<Derived>& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

/// Column sums of a dense or sparse matrix, as a column vector.
template <typename XType>
Vector<typename XType::Scalar> column_sums(const XType& x) {
  using Scalar = typename XType::Scalar;
  return (Vector<Scalar>::Ones(x.rows()).transpose() * x).transpose();
}

/// W X^T (m x n) for dense W (m x d) and row-major sparse X (n x d). Each
/// output column is a sum of columns of W, so W should be column-major.
template <typename Derived, typename Scalar, typename StorageIndex>
Matrix<Scalar> times_transpose(const Eigen::MatrixBase<Derived>& w,
                               const Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex>& x) {
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex>;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(w.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (typename Sparse::InnerIterator it(x, i); it; ++it) out.col(i).noalias() += it.value() * w.col(it.col());
  }
  return out;
}

template <typename DerivedW, typename DerivedX>
Matrix<typename DerivedW::Scalar> times_transpose(const Eigen::MatrixBase<DerivedW>& w,
                                                  const Eigen::MatrixBase<DerivedX>& x) {
  return w * x.transpose();
}

/// G += A X for dense A (m x n) and row-major sparse X (n x d).
template <typename Scalar, typename DerivedA, typename StorageIndex>
void add_product(Matrix<Scalar>& g, const Eigen::MatrixBase<DerivedA>& a,
                 const Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex>& x) {
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, StorageIndex>;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (typename Sparse::InnerIterator it(x, i); it; ++it) g.col(it.col()).noalias() += it.value() * a.col(i);
  }
}

template <typename Scalar, typename DerivedA, typename DerivedX>
void add_product(Matrix<Scalar>& g, const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedX>& x) {
  g.noalias() += a * x;
}

}  // namespace seqclf
