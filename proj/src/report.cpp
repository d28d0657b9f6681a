#include "seqclf/report.hpp"

#include <cstdio>

#include "seqclf/error.hpp"

namespace seqclf {

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns = {"Approach", "Embedding", "Algorithm", "Accuracy",
                                                   "Precision", "Recall", "F1 weigh.", "F1 Macro",
                                                   "ROC-AUC", "Training runtime"};
  return columns;
}

std::string format_mean_std(double mean, double std) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.3f ± %.3f", mean, std);
  return buffer;
}

ReportRow report_row(const nlohmann::json& report) {
  try {
    const auto& config = report.at("config");
    const auto model = config.at("model").get<std::string>();
    const auto encoding = config.at("encoding").get<std::string>();
    const bool rff = config.at("rff.enabled").get<bool>();

    ReportRow row;
    if (model == "majority") {
      row.approach = "MAJORITY";
      row.embedding = "_";
      row.algorithm = "_";
    } else {
      row.approach = model == "nn" ? "NN" : "Feature Engineering";
      row.embedding = encoding == "ohe" ? "OHE" : "k-mers";
      if (rff) row.embedding += " + RFF";
      if (model == "nb") row.algorithm = "NB";
      if (model == "lr") row.algorithm = "LR";
      if (model == "ridge") row.algorithm = "RC";
      if (model == "nn") row.algorithm = "Neural Network";
    }

    const auto& agg = report.at("aggregate");
    for (const char* key : {"accuracy", "precision_weighted", "recall_weighted", "f1_weighted", "f1_macro",
                            "roc_auc_weighted_ovr"}) {
      row.cells.push_back(format_mean_std(agg.at(key).at("mean").get<double>(), agg.at(key).at("std").get<double>()));
    }
    const auto& runtime = report.at("timing").at("train_runtime_seconds");
    row.cells.push_back(format_mean_std(runtime.at("mean").get<double>(), runtime.at("std").get<double>()));
    return row;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedFile, std::string("report JSON is missing fields: ") + e.what());
  }
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
  const auto& columns = report_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    out << row.approach << ',' << row.embedding << ',' << row.algorithm;
    for (const auto& cell : row.cells) out << ',' << cell;
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing report CSV");
}

}  // namespace seqclf
