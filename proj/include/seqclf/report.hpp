#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace seqclf {

/// Approach, Embedding, Algorithm, Accuracy, Precision, Recall, F1 weigh.,
/// F1 Macro, ROC-AUC, Training runtime.
const std::vector<std::string>& report_columns();

struct ReportRow {
  std::string approach;
  std::string embedding;
  std::string algorithm;
  std::vector<std::string> cells;  // seven "mean ± std" cells
};

/// One table row from a report.json document.
ReportRow report_row(const nlohmann::json& report);

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);

/// "0.600 ± 0.000"
std::string format_mean_std(double mean, double std);

}  // namespace seqclf
