#pragma once

// One-hidden-layer classifier: softmax(W2 relu(W1 x + b1) + b2), trained with
// Adam on integer-label cross-entropy in shuffled mini-batches.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "seqclf/dense.hpp"
#include "seqclf/error.hpp"
#include "seqclf/random.hpp"

namespace seqclf {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct NetConfig {
  Eigen::Index input_dim = 0;
  /// 0 means "same as input_dim", one hidden unit per input feature.
  Eigen::Index hidden_width = 0;
  int class_count = 0;
  int batch_size = 100;
  int epochs = 10;
  AdamConfig adam;
  std::uint64_t seed = 0;

  Eigen::Index resolved_hidden() const noexcept { return hidden_width > 0 ? hidden_width : input_dim; }

  void validate() const {
    if (input_dim < 1) throw Error(ErrorKind::InvalidConfig, "network input_dim must be >= 1");
    if (hidden_width < 0 || resolved_hidden() < 1) throw Error(ErrorKind::InvalidConfig, "hidden width must be >= 1");
    if (class_count < 1) throw Error(ErrorKind::InvalidConfig, "class_count must be >= 1");
    if (batch_size < 1) throw Error(ErrorKind::InvalidConfig, "batch_size must be >= 1");
    if (epochs < 1) throw Error(ErrorKind::InvalidConfig, "epochs must be >= 1");
    if (!(adam.learning_rate > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
        !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "invalid Adam hyperparameters");
    }
  }
};

/// Parameters, or a gradient / moment with the same shapes.
template <typename Scalar = double>
struct FeedForwardNet {
  Matrix<Scalar> w1;  // h x d
  Vector<Scalar> b1;  // h
  Matrix<Scalar> w2;  // C x h
  Vector<Scalar> b2;  // C

  Eigen::Index input_dim() const noexcept { return w1.cols(); }
  Eigen::Index hidden_width() const noexcept { return w1.rows(); }
  Eigen::Index class_count() const noexcept { return w2.rows(); }

  static FeedForwardNet zeros_like(const FeedForwardNet& other) {
    FeedForwardNet z;
    z.w1.setZero(other.w1.rows(), other.w1.cols());
    z.b1.setZero(other.b1.size());
    z.w2.setZero(other.w2.rows(), other.w2.cols());
    z.b2.setZero(other.b2.size());
    return z;
  }

  bool all_finite() const { return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite(); }
};

template <typename Scalar = double>
struct AdamState {
  FeedForwardNet<Scalar> first_moment;
  FeedForwardNet<Scalar> second_moment;
  std::int64_t step = 0;

  explicit AdamState(const FeedForwardNet<Scalar>& net)
      : first_moment(FeedForwardNet<Scalar>::zeros_like(net)), second_moment(FeedForwardNet<Scalar>::zeros_like(net)) {}
};

/// Glorot-uniform weights, zero biases.
template <typename Scalar = double>
FeedForwardNet<Scalar> nn_init(const NetConfig& config) {
  config.validate();
  const Eigen::Index d = config.input_dim;
  const Eigen::Index h = config.resolved_hidden();
  const Eigen::Index c = config.class_count;

  auto glorot = [&](Eigen::Index rows, Eigen::Index cols, std::uint64_t stream) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    const CounterRng rng(config.seed, stream);
    Matrix<Scalar> w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        const auto counter = static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(rows) + static_cast<std::uint64_t>(i);
        w(i, j) = static_cast<Scalar>(limit * (2.0 * rng.uniform(counter) - 1.0));
      }
    }
    return w;
  };

  FeedForwardNet<Scalar> net;
  net.w1 = glorot(h, d, 11);
  net.b1.setZero(h);
  net.w2 = glorot(c, h, 12);
  net.b2.setZero(c);
  return net;
}

template <typename Scalar>
void check_input(const FeedForwardNet<Scalar>& net, Eigen::Index cols) {
  if (cols != net.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "network expects " + std::to_string(net.input_dim()) +
                                                  " input features, got " + std::to_string(cols));
  }
}

// Activations are kept transposed (one column per row of X) so that sparse
// inputs reduce to column axpys on the column-major W1.

/// relu(W1 X^T + b1), h x n.
template <typename Scalar, typename XType>
Matrix<Scalar> nn_hidden(const FeedForwardNet<Scalar>& net, const XType& x) {
  Matrix<Scalar> hidden = times_transpose(net.w1, x);
  hidden.colwise() += net.b1;
  return hidden.cwiseMax(Scalar(0));
}

/// n x C logits.
template <typename Scalar, typename XType>
Matrix<Scalar> nn_logits(const FeedForwardNet<Scalar>& net, const XType& x) {
  check_input(net, x.cols());
  Matrix<Scalar> logits = net.w2 * nn_hidden(net, x);
  logits.colwise() += net.b2;
  return logits.transpose();
}

/// n x C class probabilities; evaluated in row blocks to bound memory.
template <typename Scalar, typename XType>
Matrix<Scalar> nn_forward(const FeedForwardNet<Scalar>& net, const XType& x) {
  check_input(net, x.cols());
  constexpr Eigen::Index kBlock = 1024;
  if (x.rows() <= kBlock) {
    Matrix<Scalar> probs = nn_logits(net, x);
    softmax_rows_inplace(probs);
    return probs;
  }
  Matrix<Scalar> probs(x.rows(), net.class_count());
  for (Eigen::Index start = 0; start < x.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, x.rows() - start);
    const typename XType::PlainObject slice = x.middleRows(start, rows);
    Matrix<Scalar> block = nn_logits(net, slice);
    softmax_rows_inplace(block);
    probs.middleRows(start, rows) = block;
  }
  return probs;
}

/// Scores used for ranking metrics: the class probabilities.
template <typename Scalar, typename XType>
Matrix<Scalar> nn_scores(const FeedForwardNet<Scalar>& net, const XType& x) {
  return nn_forward(net, x);
}

inline constexpr double kProbabilityFloor = 1e-12;

/// Mean of -log max(p[i, y_i], 1e-12).
template <typename Derived>
typename Derived::Scalar nn_loss(const Eigen::MatrixBase<Derived>& probs, std::span<const int> y) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(probs.rows()) != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "probability rows and labels differ in length");
  }
  if (y.empty()) return Scalar(0);
  Scalar total = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= probs.cols()) {
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(y[i]) + " outside [0, " +
                                                  std::to_string(probs.cols()) + ")");
    }
    total -= std::log(std::max(probs(static_cast<Eigen::Index>(i), y[i]), static_cast<Scalar>(kProbabilityFloor)));
  }
  return total / static_cast<Scalar>(y.size());
}

/// Loss of a batch and its gradients with respect to all four tensors.
template <typename Scalar, typename XType>
Scalar nn_loss_and_gradients(const FeedForwardNet<Scalar>& net, const XType& x, std::span<const int> y,
                             FeedForwardNet<Scalar>& grad) {
  check_input(net, x.cols());
  const auto n = static_cast<Scalar>(y.size());
  Matrix<Scalar> pre = times_transpose(net.w1, x);  // h x n
  pre.colwise() += net.b1;
  const Matrix<Scalar> hidden = pre.cwiseMax(Scalar(0));
  Matrix<Scalar> logits = net.w2 * hidden;
  logits.colwise() += net.b2;
  Matrix<Scalar> probs = logits.transpose();
  softmax_rows_inplace(probs);
  const Scalar loss = nn_loss(probs, y);

  // (P - Y)^T / n, C x n
  Matrix<Scalar> delta_out = probs.transpose();
  for (std::size_t i = 0; i < y.size(); ++i) delta_out(y[i], static_cast<Eigen::Index>(i)) -= Scalar(1);
  delta_out /= n;

  grad.w2.noalias() = delta_out * hidden.transpose();
  grad.b2 = delta_out.rowwise().sum();
  Matrix<Scalar> delta_hidden = net.w2.transpose() * delta_out;
  delta_hidden = (pre.array() > Scalar(0)).select(delta_hidden, Scalar(0));
  grad.w1.setZero(net.w1.rows(), net.w1.cols());
  add_product(grad.w1, delta_hidden, x);
  grad.b1 = delta_hidden.rowwise().sum();
  return loss;
}

/// One bias-corrected Adam update.
template <typename Scalar>
void adam_step(FeedForwardNet<Scalar>& net, AdamState<Scalar>& state, const FeedForwardNet<Scalar>& grad,
               const AdamConfig& adam) {
  ++state.step;
  const auto b1 = static_cast<Scalar>(adam.beta1);
  const auto b2 = static_cast<Scalar>(adam.beta2);
  const auto correction1 = static_cast<Scalar>(1.0 - std::pow(adam.beta1, static_cast<double>(state.step)));
  const auto correction2 = static_cast<Scalar>(1.0 - std::pow(adam.beta2, static_cast<double>(state.step)));
  const auto lr = static_cast<Scalar>(adam.learning_rate);
  const auto eps = static_cast<Scalar>(adam.epsilon);

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m.array() = b1 * m.array() + (Scalar(1) - b1) * g.array();
    v.array() = b2 * v.array() + (Scalar(1) - b2) * g.array().square();
    param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  update(net.w1, state.first_moment.w1, state.second_moment.w1, grad.w1);
  update(net.b1, state.first_moment.b1, state.second_moment.b1, grad.b1);
  update(net.w2, state.first_moment.w2, state.second_moment.w2, grad.w2);
  update(net.b2, state.first_moment.b2, state.second_moment.b2, grad.b2);
}

template <typename Scalar = double>
struct TrainedNet {
  FeedForwardNet<Scalar> net;
  std::vector<double> loss_trace;  // mean training loss per epoch
};

/// Trains for config.epochs epochs. Each epoch visits the rows in a seeded
/// permutation; the last partial batch is kept. When `row_keys` is given the
/// permutation is applied to rows ranked by key instead of by position, so
/// the result does not depend on the order rows were supplied in.
template <typename XType>
TrainedNet<typename XType::Scalar> nn_train(const NetConfig& config, const XType& x, std::span<const int> y,
                                            std::span<const std::uint64_t> row_keys = {}) {
  using Scalar = typename XType::Scalar;
  config.validate();
  if (x.rows() < 1) throw Error(ErrorKind::EmptyTrainingSet, "network training needs at least one row");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "feature rows and labels differ in length");
  }
  for (int label : y) {
    if (label < 0 || label >= config.class_count) {
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(label) + " outside [0, " +
                                                  std::to_string(config.class_count) + ")");
    }
  }
  if (!row_keys.empty() && row_keys.size() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch, "row_keys must have one entry per row");
  }

  TrainedNet<Scalar> result;
  result.net = nn_init<Scalar>(config);
  check_input(result.net, x.cols());
  AdamState<Scalar> state(result.net);
  auto grad = FeedForwardNet<Scalar>::zeros_like(result.net);

  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> canonical(n);
  std::iota(canonical.begin(), canonical.end(), std::size_t{0});
  if (!row_keys.empty()) {
    std::stable_sort(canonical.begin(), canonical.end(),
                     [&](std::size_t a, std::size_t b) { return row_keys[a] < row_keys[b]; });
  }

  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto perm = random_permutation(n, config.seed, 1000 + static_cast<std::uint64_t>(epoch));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      rows.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        rows.push_back(canonical[perm[i]]);
        labels.push_back(y[rows.back()]);
      }
      const auto xb = gather_rows(x, rows);
      const Scalar loss = nn_loss_and_gradients(result.net, xb, labels, grad);
      if (!std::isfinite(static_cast<double>(loss))) {
        throw Error(ErrorKind::NonFiniteLoss, "network loss became non-finite in epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += static_cast<double>(loss) * static_cast<double>(end - start);
      adam_step(result.net, state, grad, config.adam);
    }
    if (!result.net.all_finite()) {
      throw Error(ErrorKind::NonFiniteLoss, "network parameters became non-finite in epoch " + std::to_string(epoch + 1));
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

}  // namespace seqclf
