#pragma once

// MAJORITY baseline plus the three classical classifiers. Every model takes
// either a dense matrix or a row-major sparse matrix of features (n x d) and
// reports n x C class scores.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "seqclf/dense.hpp"
#include "seqclf/error.hpp"

namespace seqclf {

namespace detail {

inline std::vector<std::int64_t> class_counts(std::span<const int> y, int class_count) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(class_count), 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= class_count) {
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(y[i]) + " at index " + std::to_string(i) +
                                                  " outside [0, " + std::to_string(class_count) + ")");
    }
    ++counts[static_cast<std::size_t>(y[i])];
  }
  return counts;
}

template <typename XType>
void check_rows(const XType& x, std::span<const int> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                                                  std::to_string(y.size()) + ") differ");
  }
}

inline void check_cols(Eigen::Index got, Eigen::Index expected) {
  if (got != expected) {
    throw Error(ErrorKind::DimensionMismatch,
                "features have " + std::to_string(got) + " columns, model expects " + std::to_string(expected));
  }
}

/// X^T X as a dense matrix, for dense or sparse X.
template <typename XType>
Matrix<typename XType::Scalar> gram(const XType& x) {
  using Scalar = typename XType::Scalar;
  if constexpr (std::is_base_of_v<Eigen::SparseMatrixBase<XType>, XType>) {
    const Eigen::SparseMatrix<Scalar> xt = x.transpose();
    const Eigen::SparseMatrix<Scalar> g = xt * x;
    return Matrix<Scalar>(g);
  } else {
    return x.transpose() * x;
  }
}

/// X X^T as a dense matrix.
template <typename XType>
Matrix<typename XType::Scalar> outer_gram(const XType& x) {
  using Scalar = typename XType::Scalar;
  if constexpr (std::is_base_of_v<Eigen::SparseMatrixBase<XType>, XType>) {
    const Eigen::SparseMatrix<Scalar, Eigen::ColMajor> xt = x.transpose();
    const Eigen::SparseMatrix<Scalar> g = x * xt;
    return Matrix<Scalar>(g);
  } else {
    return x * x.transpose();
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MAJORITY

struct MajorityModel {
  int majority_class = 0;
  int class_count = 0;
  std::vector<double> priors;
};

/// Most frequent training label; ties go to the smallest class id.
inline MajorityModel majority_fit(std::span<const int> labels, int class_count) {
  if (labels.empty()) throw Error(ErrorKind::EmptyTrainingSet, "MAJORITY needs at least one training label");
  const auto counts = detail::class_counts(labels, class_count);
  MajorityModel model;
  model.class_count = class_count;
  model.majority_class = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  for (auto c : counts) model.priors.push_back(static_cast<double>(c) / static_cast<double>(labels.size()));
  return model;
}

inline MajorityModel majority_fit(std::span<const int> labels) {
  if (labels.empty()) throw Error(ErrorKind::EmptyTrainingSet, "MAJORITY needs at least one training label");
  return majority_fit(labels, *std::max_element(labels.begin(), labels.end()) + 1);
}

inline std::vector<int> majority_predict(const MajorityModel& model, std::size_t n) {
  return std::vector<int>(n, model.majority_class);
}

/// Training priors repeated for every row: constant scores.
inline Eigen::MatrixXd majority_scores(const MajorityModel& model, std::size_t n) {
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(n), model.class_count);
  const Eigen::Map<const Eigen::RowVectorXd> priors(model.priors.data(), model.class_count);
  scores.rowwise() = priors;
  return scores;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

template <typename Scalar = double>
struct GaussianNbModel {
  Vector<Scalar> priors;     // C
  Matrix<Scalar> means;      // C x d
  Matrix<Scalar> variances;  // C x d, floor already added
  Scalar var_floor = Scalar(0);

  Eigen::Index class_count() const noexcept { return priors.size(); }
  Eigen::Index dim() const noexcept { return means.cols(); }
};

/// Per-class feature means and variances; every variance gets
/// 1e-9 * (largest per-feature variance of X) added, so sigma^2 >= floor > 0.
template <typename XType>
GaussianNbModel<typename XType::Scalar> gnb_fit(const XType& x, std::span<const int> y, int class_count) {
  using Scalar = typename XType::Scalar;
  detail::check_rows(x, y);
  if (y.empty()) throw Error(ErrorKind::EmptyTrainingSet, "naive Bayes needs training data");
  const auto counts = detail::class_counts(y, class_count);
  const auto n = static_cast<Scalar>(y.size());

  const Matrix<Scalar> indicator = one_hot_labels<Scalar>(y, class_count);
  const XType x2 = x.cwiseAbs2();
  Matrix<Scalar> sums = indicator.transpose() * x;
  Matrix<Scalar> sq_sums = indicator.transpose() * x2;

  GaussianNbModel<Scalar> model;
  model.priors.resize(class_count);
  model.means.setZero(class_count, x.cols());
  model.variances.setZero(class_count, x.cols());
  for (int c = 0; c < class_count; ++c) {
    const auto count = static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
    model.priors(c) = count / n;
    if (count == Scalar(0)) continue;
    model.means.row(c) = sums.row(c) / count;
    model.variances.row(c) =
        (sq_sums.row(c) / count - model.means.row(c).cwiseAbs2()).cwiseMax(Scalar(0));
  }

  const Vector<Scalar> mean_all = column_sums(x) / n;
  const Vector<Scalar> var_all = (column_sums(x2) / n - mean_all.cwiseAbs2()).cwiseMax(Scalar(0));
  const Scalar max_var = var_all.size() > 0 ? var_all.maxCoeff() : Scalar(0);
  model.var_floor = Scalar(1e-9) * (max_var > Scalar(0) ? max_var : Scalar(1));
  model.variances.array() += model.var_floor;
  return model;
}

/// n x C log-posteriors (up to the shared evidence term). Classes with no
/// training examples score the lowest finite value.
template <typename Scalar, typename XType>
Matrix<Scalar> gnb_scores(const GaussianNbModel<Scalar>& model, const XType& x) {
  detail::check_cols(x.cols(), model.dim());
  const Matrix<Scalar> inv_var = model.variances.cwiseInverse();
  const Matrix<Scalar> weighted_means = model.means.cwiseProduct(inv_var);
  const XType x2 = x.cwiseAbs2();

  Vector<Scalar> constant(model.class_count());
  for (Eigen::Index c = 0; c < model.class_count(); ++c) {
    constant(c) = (model.means.row(c).cwiseAbs2().cwiseProduct(inv_var.row(c))).sum() +
                  (Scalar(2) * std::numbers::pi_v<Scalar> * model.variances.row(c).array()).log().sum();
  }

  Matrix<Scalar> quad = x2 * inv_var.transpose();
  Matrix<Scalar> cross = x * weighted_means.transpose();
  Matrix<Scalar> scores = Scalar(-0.5) * (quad - Scalar(2) * cross);
  for (Eigen::Index c = 0; c < model.class_count(); ++c) {
    if (model.priors(c) > Scalar(0)) {
      scores.col(c).array() += std::log(model.priors(c)) - Scalar(0.5) * constant(c);
    } else {
      scores.col(c).setConstant(std::numeric_limits<Scalar>::lowest());
    }
  }
  return scores;
}

template <typename Scalar, typename XType>
std::vector<int> gnb_predict(const GaussianNbModel<Scalar>& model, const XType& x) {
  const Eigen::MatrixXd scores = gnb_scores(model, x).template cast<double>();
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression

struct LogRegOptions {
  double l2_lambda = 1e-4;
  int max_iters = 1000;
  double tol = 1e-6;  // on the gradient norm
  std::uint64_t seed = 0;
};

template <typename Scalar = double>
struct LogisticRegressionModel {
  Matrix<Scalar> weights;  // C x d
  Vector<Scalar> bias;     // C
  LogRegOptions options;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_trace;  // objective after each accepted step, first entry at init
};

/// Mean multinomial cross-entropy + (lambda / 2) ||W||^2 (bias unpenalized).
/// Fills the gradients when the output pointers are non-null.
template <typename XType, typename Scalar = typename XType::Scalar>
Scalar logreg_objective(const XType& x, std::span<const int> y, const Matrix<Scalar>& weights,
                        const Vector<Scalar>& bias, Scalar l2_lambda, Matrix<Scalar>* grad_weights = nullptr,
                        Vector<Scalar>* grad_bias = nullptr) {
  const auto n = static_cast<Scalar>(y.size());
  Matrix<Scalar> logits = x * weights.transpose();
  logits.rowwise() += bias.transpose();

  Scalar loss = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    const Scalar m = row.maxCoeff();
    const Scalar lse = m + std::log((row.array() - m).exp().sum());
    loss += lse - row(y[static_cast<std::size_t>(i)]);
    row = (row.array() - lse).exp().matrix();  // row now holds probabilities
  }
  loss = loss / n + Scalar(0.5) * l2_lambda * weights.squaredNorm();

  if (grad_weights || grad_bias) {
    for (std::size_t i = 0; i < y.size(); ++i) logits(static_cast<Eigen::Index>(i), y[i]) -= Scalar(1);
    logits /= n;
    if (grad_weights) {
      *grad_weights = (logits.transpose() * x);
      *grad_weights += l2_lambda * weights;
    }
    if (grad_bias) *grad_bias = logits.colwise().sum().transpose();
  }
  return loss;
}

/// Full-batch gradient descent with Armijo backtracking. Starts from zero
/// weights, so the fit is deterministic; the objective never increases
/// between accepted steps.
template <typename XType>
LogisticRegressionModel<typename XType::Scalar> logreg_fit(const XType& x, std::span<const int> y, int class_count,
                                                           const LogRegOptions& options = {}) {
  using Scalar = typename XType::Scalar;
  detail::check_rows(x, y);
  const auto counts = detail::class_counts(y, class_count);
  if (std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) < 2) {
    throw Error(ErrorKind::DegenerateLabels, "logistic regression needs at least two distinct training labels");
  }

  LogisticRegressionModel<Scalar> model;
  model.options = options;
  model.weights.setZero(class_count, x.cols());
  model.bias.setZero(class_count);
  const auto lambda = static_cast<Scalar>(options.l2_lambda);

  Matrix<Scalar> gw;
  Vector<Scalar> gb;
  Scalar loss = logreg_objective(x, y, model.weights, model.bias, lambda, &gw, &gb);
  if (!std::isfinite(static_cast<double>(loss))) throw Error(ErrorKind::NonFiniteLoss, "initial logistic loss is not finite");
  model.loss_trace.push_back(static_cast<double>(loss));

  Scalar step = Scalar(1);
  for (int iter = 0; iter < options.max_iters; ++iter) {
    const Scalar grad_norm2 = gw.squaredNorm() + gb.squaredNorm();
    if (std::sqrt(static_cast<double>(grad_norm2)) < options.tol) {
      model.converged = true;
      break;
    }
    bool accepted = false;
    while (step > Scalar(1e-20)) {
      const Matrix<Scalar> w_try = model.weights - step * gw;
      const Vector<Scalar> b_try = model.bias - step * gb;
      const Scalar trial = logreg_objective(x, y, w_try, b_try, lambda);
      if (std::isfinite(static_cast<double>(trial)) && trial <= loss - Scalar(1e-4) * step * grad_norm2) {
        model.weights = w_try;
        model.bias = b_try;
        accepted = true;
        break;
      }
      step *= Scalar(0.5);
    }
    if (!accepted) {
      model.converged = true;  // no further decrease representable
      break;
    }
    loss = logreg_objective(x, y, model.weights, model.bias, lambda, &gw, &gb);
    if (!std::isfinite(static_cast<double>(loss))) throw Error(ErrorKind::NonFiniteLoss, "logistic loss diverged");
    model.loss_trace.push_back(static_cast<double>(loss));
    model.iterations = iter + 1;
    step = std::min<Scalar>(step * Scalar(2), Scalar(1e6));
  }
  return model;
}

/// Row-stochastic n x C class probabilities.
template <typename Scalar, typename XType>
Matrix<Scalar> logreg_proba(const LogisticRegressionModel<Scalar>& model, const XType& x) {
  detail::check_cols(x.cols(), model.weights.cols());
  Matrix<Scalar> p = x * model.weights.transpose();
  p.rowwise() += model.bias.transpose();
  softmax_rows_inplace(p);
  return p;
}

// ---------------------------------------------------------------------------
// Ridge classifier

enum class RidgeSolver {
  Auto,             // normal equations if d <= min(n, 20000), else dual if n <= 20000, else CG
  NormalEquations,  // (Xc^T Xc + alpha I) W^T = Xc^T Tc, d x d
  Dual,             // W^T = Xc^T (Xc Xc^T + alpha I)^-1 Tc, n x n
  ConjugateGradient,
};

inline std::string_view to_string(RidgeSolver solver) noexcept;

struct RidgeOptions {
  double alpha = 1.0;
  RidgeSolver solver = RidgeSolver::Auto;
  double cg_tol = 1e-8;
  int cg_max_iters = 0;  // 0: 2 * d + 100
};

template <typename Scalar = double>
struct RidgeClassifierModel {
  Matrix<Scalar> weights;  // C x d
  Vector<Scalar> bias;     // C
  double alpha = 1.0;
  RidgeSolver solver = RidgeSolver::Auto;  // the solver actually used
};

inline constexpr Eigen::Index kDenseSolveLimit = 20000;

/// One-vs-rest least squares against +1/-1 targets with an unpenalized
/// intercept. The intercept is handled by centering features and targets,
/// which is the same problem as augmenting an unpenalized constant column.
template <typename XType>
RidgeClassifierModel<typename XType::Scalar> ridge_fit(const XType& x, std::span<const int> y, int class_count,
                                                       const RidgeOptions& options = {}) {
  using Scalar = typename XType::Scalar;
  detail::check_rows(x, y);
  if (y.empty()) throw Error(ErrorKind::EmptyTrainingSet, "ridge needs at least one training row");
  if (!(options.alpha > 0.0)) throw Error(ErrorKind::InvalidConfig, "ridge alpha must be positive");
  detail::class_counts(y, class_count);

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto alpha = static_cast<Scalar>(options.alpha);

  Matrix<Scalar> targets = Matrix<Scalar>::Constant(n, class_count, Scalar(-1));
  for (Eigen::Index i = 0; i < n; ++i) targets(i, y[static_cast<std::size_t>(i)]) = Scalar(1);
  const Vector<Scalar> x_mean = column_sums(x) / static_cast<Scalar>(n);
  const Vector<Scalar> t_mean = targets.colwise().mean().transpose();
  const Matrix<Scalar> t_centered = targets.rowwise() - t_mean.transpose();

  RidgeSolver solver = options.solver;
  if (solver == RidgeSolver::Auto) {
    if (d <= kDenseSolveLimit && d <= n) {
      solver = RidgeSolver::NormalEquations;
    } else if (n <= kDenseSolveLimit) {
      solver = RidgeSolver::Dual;
    } else {
      solver = RidgeSolver::ConjugateGradient;
    }
  }

  Matrix<Scalar> wt(d, class_count);  // W^T
  switch (solver) {
    case RidgeSolver::NormalEquations: {
      Matrix<Scalar> g = detail::gram(x);
      g.noalias() -= static_cast<Scalar>(n) * x_mean * x_mean.transpose();
      g.diagonal().array() += alpha;
      // Xc^T Tc = X^T Tc because Tc has zero column sums.
      const Matrix<Scalar> rhs = x.transpose() * t_centered;
      wt = g.ldlt().solve(rhs);
      break;
    }
    case RidgeSolver::Dual: {
      const Vector<Scalar> u = x * x_mean;
      Matrix<Scalar> k = detail::outer_gram(x);
      k.rowwise() -= u.transpose();
      k.colwise() -= u;
      k.array() += x_mean.squaredNorm();
      k.diagonal().array() += alpha;
      const Matrix<Scalar> coef = k.ldlt().solve(t_centered);
      wt = x.transpose() * coef;
      wt -= x_mean * coef.colwise().sum();
      break;
    }
    case RidgeSolver::ConjugateGradient: {
      const int max_iters = options.cg_max_iters > 0 ? options.cg_max_iters : static_cast<int>(2 * d + 100);
      auto apply = [&](const Vector<Scalar>& v) -> Vector<Scalar> {
        Vector<Scalar> r = x * v;
        r.array() -= x_mean.dot(v);
        Vector<Scalar> out = x.transpose() * r;
        out -= x_mean * r.sum();
        out += alpha * v;
        return out;
      };
      for (int c = 0; c < class_count; ++c) {
        const Vector<Scalar> rhs = x.transpose() * t_centered.col(c);
        Vector<Scalar> w = Vector<Scalar>::Zero(d);
        Vector<Scalar> r = rhs;
        Vector<Scalar> p = r;
        Scalar rr = r.squaredNorm();
        const Scalar stop = static_cast<Scalar>(options.cg_tol) * rhs.norm();
        for (int it = 0; it < max_iters && std::sqrt(rr) > stop; ++it) {
          const Vector<Scalar> ap = apply(p);
          const Scalar step = rr / p.dot(ap);
          w += step * p;
          r -= step * ap;
          const Scalar rr_next = r.squaredNorm();
          p = r + (rr_next / rr) * p;
          rr = rr_next;
        }
        wt.col(c) = w;
      }
      break;
    }
    case RidgeSolver::Auto:
      break;
  }

  RidgeClassifierModel<Scalar> model;
  model.weights = wt.transpose();
  model.bias = t_mean - model.weights * x_mean;
  model.alpha = options.alpha;
  model.solver = solver;
  if (!model.weights.allFinite()) throw Error(ErrorKind::NonFiniteLoss, "ridge solve produced non-finite weights");
  return model;
}

/// n x C decision scores X W^T + b.
template <typename Scalar, typename XType>
Matrix<Scalar> ridge_scores(const RidgeClassifierModel<Scalar>& model, const XType& x) {
  detail::check_cols(x.cols(), model.weights.cols());
  Matrix<Scalar> s = x * model.weights.transpose();
  s.rowwise() += model.bias.transpose();
  return s;
}

inline std::string_view to_string(RidgeSolver solver) noexcept {
  switch (solver) {
    case RidgeSolver::Auto: return "auto";
    case RidgeSolver::NormalEquations: return "normal_equations";
    case RidgeSolver::Dual: return "dual";
    case RidgeSolver::ConjugateGradient: return "conjugate_gradient";
  }
  return "auto";
}

}  // namespace seqclf
