#include "seqclf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqclf/error.hpp"

namespace seqclf {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int class_count) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::DimensionMismatch, "y_true and y_pred differ in length");
  }
  ConfusionMatrix m = ConfusionMatrix::Zero(class_count, class_count);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
      throw Error(ErrorKind::LabelOutOfRange, "label outside [0, " + std::to_string(class_count) + ") at index " +
                                                  std::to_string(i));
    }
    ++m(t, p);
  }
  return m;
}

Summary summarize(const ConfusionMatrix& m) {
  const auto n = m.sum();
  if (n <= 0) throw Error(ErrorKind::EmptyMatrix, "confusion matrix has no observations");
  const auto classes = m.rows();
  const double total = static_cast<double>(n);

  Summary s;
  s.accuracy = static_cast<double>(m.diagonal().sum()) / total;
  for (Eigen::Index c = 0; c < classes; ++c) {
    const auto tp = m(c, c);
    const auto predicted = m.col(c).sum();
    const auto support = m.row(c).sum();

    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    if (predicted > 0) {
      precision = static_cast<double>(tp) / static_cast<double>(predicted);
    } else {
      ++s.zero_division_warnings;
    }
    if (support > 0) {
      recall = static_cast<double>(tp) / static_cast<double>(support);
    } else {
      ++s.zero_division_warnings;
    }
    if (precision + recall > 0.0) f1 = 2.0 * precision * recall / (precision + recall);
    if (predicted == 0 && support == 0) ++s.zero_division_warnings;

    const double weight = static_cast<double>(support) / total;
    s.precision_weighted += weight * precision;
    s.recall_weighted += weight * recall;
    s.f1_weighted += weight * f1;
    s.f1_macro += f1;
  }
  s.f1_macro /= static_cast<double>(classes);
  return s;
}

double binary_auc(std::span<const double> scores, std::span<const char> positive) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // ranks i+1 .. j share the midrank
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const double u = rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

AucResult roc_auc_ovr_weighted(const Eigen::Ref<const Eigen::MatrixXd>& scores, std::span<const int> y_true) {
  const auto n = static_cast<std::size_t>(scores.rows());
  const auto classes = static_cast<int>(scores.cols());
  if (y_true.size() != n) throw Error(ErrorKind::DimensionMismatch, "score rows and labels differ in length");
  if (n == 0) throw Error(ErrorKind::EmptyMatrix, "no scored observations");
  if (!scores.allFinite()) throw Error(ErrorKind::NonFiniteLoss, "scores contain NaN or infinity");

  std::vector<std::size_t> support(static_cast<std::size_t>(classes), 0);
  for (int y : y_true) {
    if (y < 0 || y >= classes) throw Error(ErrorKind::LabelOutOfRange, "label outside score columns");
    ++support[static_cast<std::size_t>(y)];
  }
  if (std::count_if(support.begin(), support.end(), [](std::size_t s) { return s > 0; }) < 2) {
    throw Error(ErrorKind::DegenerateClass, "ROC-AUC needs at least two classes present in y_true");
  }

  AucResult result;
  result.value = 0.0;
  double weight_total = 0.0;
  std::vector<double> column(n);
  std::vector<char> positive(n);
  for (int c = 0; c < classes; ++c) {
    const auto s = support[static_cast<std::size_t>(c)];
    if (s == 0 || s == n) {
      result.excluded_classes.push_back(c);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = scores(static_cast<Eigen::Index>(i), c);
      positive[i] = y_true[i] == c ? 1 : 0;
    }
    const double w = static_cast<double>(s);
    result.value += w * binary_auc(column, positive);
    weight_total += w;
  }
  result.value /= weight_total;
  return result;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyRuns, "no values to aggregate");
  const double count = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / count)};
}

AggregateMetrics aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw Error(ErrorKind::EmptyRuns, "no runs to aggregate");
  auto field = [&](double RunMetrics::*member) {
    std::vector<double> values;
    values.reserve(runs.size());
    for (const auto& r : runs) values.push_back(r.*member);
    return mean_std(values);
  };
  AggregateMetrics agg;
  agg.accuracy = field(&RunMetrics::accuracy);
  agg.precision_weighted = field(&RunMetrics::precision_weighted);
  agg.recall_weighted = field(&RunMetrics::recall_weighted);
  agg.f1_weighted = field(&RunMetrics::f1_weighted);
  agg.f1_macro = field(&RunMetrics::f1_macro);
  agg.roc_auc_weighted_ovr = field(&RunMetrics::roc_auc_weighted_ovr);
  agg.train_runtime_seconds = field(&RunMetrics::train_runtime_seconds);
  agg.run_count = static_cast<int>(runs.size());
  return agg;
}

std::vector<int> argmax_rows(const Eigen::Ref<const Eigen::MatrixXd>& scores) {
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

}  // namespace seqclf
