#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqclf/config.hpp"
#include "seqclf/ingest.hpp"
#include "seqclf/metrics.hpp"

namespace seqclf {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunSeeds {
  std::uint64_t split = 0;
  std::uint64_t rff = 0;
  std::uint64_t model = 0;
};

struct RunTiming {
  double featurize_seconds = 0.0;
  double fit_seconds = 0.0;
  double score_seconds = 0.0;
};

struct RunRecord {
  int index = 0;
  RunSeeds seeds;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::int64_t input_dim = 0;  // raw encoding dimension
  std::int64_t model_dim = 0;  // after the optional projection
  RunMetrics metrics;          // train_runtime_seconds mirrors timing.fit_seconds
  int zero_division_warnings = 0;
  std::vector<int> auc_excluded_classes;
  nlohmann::json model_summary;
  RunTiming timing;
  std::map<std::string, std::string> artifacts;  // name -> path relative to output_dir
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> class_names;
  std::size_t corpus_size = 0;
  std::size_t skipped_without_label = 0;
  std::vector<RunRecord> runs;
  AggregateMetrics aggregate;
  std::string started_at;
  std::string finished_at;
};

/// The configured binary corpus, or the FASTA joined with its metadata.
std::vector<LabeledSequence> load_experiment_corpus(const ExperimentConfig& config, std::size_t* dropped = nullptr);

/// Runs config.runs repetitions; run i uses split.seed + i, rff.seed + i and
/// nn.seed + i. Per-run artifacts go under config.output_dir/run_<i>. Stage
/// failures are rethrown with the run index and stage name prepended.
ExperimentReport run_experiment(const ExperimentConfig& config, std::span<const LabeledSequence> corpus);

/// Everything except wall-clock fields; identical for identical configs.
nlohmann::json metrics_json(const ExperimentReport& report);

/// metrics_json plus a "timing" object (runtimes and timestamps).
nlohmann::json report_json(const ExperimentReport& report);

/// Per-run seeds and artifact paths; enough to repeat the experiment.
nlohmann::json manifest_json(const ExperimentReport& report);

/// Loads the corpus, runs the experiment and writes metrics.json,
/// report.json, report.csv and manifest.json into config.output_dir.
ExperimentReport cmd_run(const ExperimentConfig& config);

}  // namespace seqclf
