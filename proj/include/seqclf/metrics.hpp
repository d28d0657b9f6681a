#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace seqclf {

/// Row = true class, column = predicted class.
using ConfusionMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int class_count);

struct Summary {
  double accuracy = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  double f1_macro = 0.0;
  /// Per-class precision/recall/F1 values that fell back to 0 because their
  /// denominator was 0.
  int zero_division_warnings = 0;
};

/// Per-class P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R), each 0 on a
/// zero denominator. Weighted averages use support/n, macro averages run over
/// every class in the matrix including those with zero support.
Summary summarize(const ConfusionMatrix& m);

struct AucResult {
  double value = 0.5;
  /// Classes left out of the average for lacking positives or negatives.
  std::vector<int> excluded_classes;
};

/// Binary ROC-AUC of `scores` for positives vs the rest, via the rank-sum
/// statistic with midranks for ties.
double binary_auc(std::span<const double> scores, std::span<const char> positive);

/// Support-weighted one-vs-rest ROC-AUC over the columns of an n x C score
/// matrix.
AucResult roc_auc_ovr_weighted(const Eigen::Ref<const Eigen::MatrixXd>& scores, std::span<const int> y_true);

struct RunMetrics {
  double accuracy = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  double f1_macro = 0.0;
  double roc_auc_weighted_ovr = 0.0;
  double train_runtime_seconds = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateMetrics {
  MeanStd accuracy;
  MeanStd precision_weighted;
  MeanStd recall_weighted;
  MeanStd f1_weighted;
  MeanStd f1_macro;
  MeanStd roc_auc_weighted_ovr;
  MeanStd train_runtime_seconds;
  int run_count = 0;
};

/// Mean and population standard deviation of every field.
AggregateMetrics aggregate(std::span<const RunMetrics> runs);

MeanStd mean_std(std::span<const double> values);

/// Index of the largest entry in each row; ties resolve to the smallest index.
std::vector<int> argmax_rows(const Eigen::Ref<const Eigen::MatrixXd>& scores);

}  // namespace seqclf
