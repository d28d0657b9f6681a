#include "seqclf/experiment.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>

#include "seqclf/corpus_io.hpp"
#include "seqclf/error.hpp"
#include "seqclf/feature_io.hpp"
#include "seqclf/features.hpp"
#include "seqclf/linear_models.hpp"
#include "seqclf/model_io.hpp"
#include "seqclf/neural_net.hpp"
#include "seqclf/parallel.hpp"
#include "seqclf/report.hpp"
#include "seqclf/rff.hpp"

namespace seqclf {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

template <typename Fn>
auto stage(int run, const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_context("run " + std::to_string(run) + ", stage '" + name + "'");
  }
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "' for writing");
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing '" + path.string() + "'");
}

std::vector<LabeledSequence> subset(std::span<const LabeledSequence> data, std::span<const std::size_t> indices) {
  std::vector<LabeledSequence> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(data[i]);
  return out;
}

std::vector<int> subset(std::span<const int> labels, std::span<const std::size_t> indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(labels[i]);
  return out;
}

nlohmann::json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

nlohmann::json run_metrics_json(const RunMetrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision_weighted", m.precision_weighted},
          {"recall_weighted", m.recall_weighted},
          {"f1_weighted", m.f1_weighted},
          {"f1_macro", m.f1_macro},
          {"roc_auc_weighted_ovr", m.roc_auc_weighted_ovr}};
}

nlohmann::json run_json(const RunRecord& r) {
  return {{"index", r.index},
          {"seeds", {{"split", r.seeds.split}, {"rff", r.seeds.rff}, {"model", r.seeds.model}}},
          {"train_size", r.train_size},
          {"test_size", r.test_size},
          {"input_dim", r.input_dim},
          {"model_dim", r.model_dim},
          {"metrics", run_metrics_json(r.metrics)},
          {"zero_division_warnings", r.zero_division_warnings},
          {"auc_excluded_classes", r.auc_excluded_classes},
          {"model", r.model_summary}};
}

struct RunContext {
  const ExperimentConfig& config;
  std::span<const LabeledSequence> corpus;
  std::span<const int> labels;
  int class_count;
  FeatureOptions features;
  std::int64_t input_dim;
  fs::path output_dir;
};

struct Fitted {
  Eigen::MatrixXd scores;
  std::vector<int> predictions;
};

template <typename Fn>
void save_blob(const fs::path& path, Fn&& save) {
  auto out = open_output(path, std::ios::binary);
  save(out);
}

template <typename XType>
Fitted fit_and_score(const RunContext& ctx, RunRecord& record, const XType& x_train, std::span<const int> y_train,
                     const XType& x_test, const fs::path& run_dir) {
  const auto& cfg = ctx.config;
  const int c = ctx.class_count;
  const int i = record.index;
  const fs::path rel = "run_" + std::to_string(i);
  const fs::path blob = run_dir / "model.bin";
  Fitted out;

  const auto t_fit = Clock::now();
  Clock::time_point t_score;
  switch (cfg.model) {
    case ModelKind::Majority: {
      const auto model = stage(i, "fit", [&] { return majority_fit(y_train, c); });
      record.timing.fit_seconds = seconds_since(t_fit);
      record.model_summary = model_summary(model);
      save_blob(blob, [&](std::ostream& os) { save_model(os, model); });
      t_score = Clock::now();
      const auto n = static_cast<std::size_t>(x_test.rows());
      out.predictions = majority_predict(model, n);
      out.scores = majority_scores(model, n);
      break;
    }
    case ModelKind::NaiveBayes: {
      const auto model = stage(i, "fit", [&] { return gnb_fit(x_train, y_train, c); });
      record.timing.fit_seconds = seconds_since(t_fit);
      record.model_summary = model_summary(model);
      save_blob(blob, [&](std::ostream& os) { save_model(os, model); });
      t_score = Clock::now();
      out.scores = stage(i, "score", [&] { return Eigen::MatrixXd(gnb_scores(model, x_test)); });
      break;
    }
    case ModelKind::LogisticRegression: {
      LogRegOptions opts = cfg.logreg;
      opts.seed = record.seeds.model;
      const auto model = stage(i, "fit", [&] { return logreg_fit(x_train, y_train, c, opts); });
      record.timing.fit_seconds = seconds_since(t_fit);
      record.model_summary = model_summary(model);
      save_blob(blob, [&](std::ostream& os) { save_model(os, model); });
      t_score = Clock::now();
      out.scores = stage(i, "score", [&] { return Eigen::MatrixXd(logreg_proba(model, x_test)); });
      break;
    }
    case ModelKind::Ridge: {
      RidgeOptions opts;
      opts.alpha = cfg.ridge_alpha;
      const auto model = stage(i, "fit", [&] { return ridge_fit(x_train, y_train, c, opts); });
      record.timing.fit_seconds = seconds_since(t_fit);
      record.model_summary = model_summary(model);
      save_blob(blob, [&](std::ostream& os) { save_model(os, model); });
      t_score = Clock::now();
      out.scores = stage(i, "score", [&] { return Eigen::MatrixXd(ridge_scores(model, x_test)); });
      break;
    }
    case ModelKind::NeuralNet: {
      NetConfig net;
      net.input_dim = x_train.cols();
      net.hidden_width = cfg.nn.hidden_width;
      net.class_count = c;
      net.batch_size = cfg.nn.batch_size;
      net.epochs = cfg.nn.epochs;
      net.adam = {cfg.nn.learning_rate, cfg.nn.beta1, cfg.nn.beta2, cfg.nn.epsilon};
      net.seed = record.seeds.model;
      const auto trained = stage(i, "fit", [&] { return nn_train(net, x_train, y_train); });
      record.timing.fit_seconds = seconds_since(t_fit);
      record.model_summary = model_summary(net, trained.loss_trace);
      save_blob(blob, [&](std::ostream& os) { save_model(os, net, trained.net); });
      {
        auto csv = open_output(run_dir / "loss_trace.csv");
        write_loss_trace_csv(csv, trained.loss_trace);
      }
      record.artifacts["loss_trace"] = (rel / "loss_trace.csv").string();
      t_score = Clock::now();
      out.scores = stage(i, "score", [&] { return Eigen::MatrixXd(nn_scores(trained.net, x_test)); });
      break;
    }
  }
  if (cfg.model != ModelKind::Majority) out.predictions = argmax_rows(out.scores);
  record.timing.score_seconds = seconds_since(t_score);
  record.metrics.train_runtime_seconds = record.timing.fit_seconds;

  record.artifacts["model"] = (rel / "model.bin").string();
  write_json(run_dir / "model.json", record.model_summary);
  record.artifacts["model_summary"] = (rel / "model.json").string();
  return out;
}

RunRecord run_once(const RunContext& ctx, int index) {
  const auto& cfg = ctx.config;
  RunRecord record;
  record.index = index;
  const auto offset = static_cast<std::uint64_t>(index);
  record.seeds = {cfg.split.seed + offset, cfg.rff_settings.seed + offset, cfg.nn.seed + offset};
  if (cfg.model == ModelKind::LogisticRegression) record.seeds.model = cfg.logreg.seed + offset;

  const fs::path rel = "run_" + std::to_string(index);
  const fs::path run_dir = ctx.output_dir / rel;
  fs::create_directories(run_dir);

  const SplitIndices split = stage(index, "split", [&] {
    SplitSpec spec = cfg.split;
    spec.seed = record.seeds.split;
    return split_indices(ctx.labels, spec);
  });
  record.train_size = split.train.size();
  record.test_size = split.test.size();
  const auto y_train = subset(ctx.labels, split.train);
  const auto y_test = subset(ctx.labels, split.test);
  record.input_dim = ctx.input_dim;
  record.model_dim = ctx.input_dim;

  // The projector depends only on (d, D, gamma, seed) and exists before any
  // row is featurized.
  std::optional<RffProjector<double>> projector;
  if (cfg.use_rff()) {
    projector = stage(index, "rff", [&] {
      const double gamma = cfg.rff_settings.gamma > 0.0 ? cfg.rff_settings.gamma : 1.0 / static_cast<double>(ctx.input_dim);
      return RffProjector<double>(ctx.input_dim, cfg.rff_settings.output_dim, gamma, record.seeds.rff);
    });
    write_json(run_dir / "rff.json", rff_header(*projector));
    record.artifacts["rff"] = (rel / "rff.json").string();
    record.model_dim = projector->output_dim();
  }

  const auto t_feat = Clock::now();
  auto featurize = [&](std::span<const std::size_t> rows, const char* name) {
    return stage(index, "featurize", [&] {
      const auto part = subset(ctx.corpus, rows);
      SparseMatrix x = featurize_rows(part, ctx.features, cfg.threads);
      if (cfg.save_features) {
        auto out = open_output(run_dir / (std::string(name) + ".sqfv"), std::ios::binary);
        write_features(out, x, ctx.features.encoding);
        record.artifacts[std::string(name) + "_features"] = (rel / (std::string(name) + ".sqfv")).string();
      }
      return x;
    });
  };

  Fitted fitted;
  if (projector) {
    const Eigen::MatrixXd x_train = stage(index, "rff", [&] { return projector->project_rows(featurize(split.train, "train")); });
    const Eigen::MatrixXd x_test = stage(index, "rff", [&] { return projector->project_rows(featurize(split.test, "test")); });
    record.timing.featurize_seconds = seconds_since(t_feat);
    fitted = fit_and_score(ctx, record, x_train, y_train, x_test, run_dir);
  } else {
    const SparseMatrix x_train = featurize(split.train, "train");
    const SparseMatrix x_test = featurize(split.test, "test");
    record.timing.featurize_seconds = seconds_since(t_feat);
    fitted = fit_and_score(ctx, record, x_train, y_train, x_test, run_dir);
  }

  stage(index, "evaluate", [&] {
    const auto summary = summarize(confusion(y_test, fitted.predictions, ctx.class_count));
    const auto auc = roc_auc_ovr_weighted(fitted.scores, y_test);
    record.metrics.accuracy = summary.accuracy;
    record.metrics.precision_weighted = summary.precision_weighted;
    record.metrics.recall_weighted = summary.recall_weighted;
    record.metrics.f1_weighted = summary.f1_weighted;
    record.metrics.f1_macro = summary.f1_macro;
    record.metrics.roc_auc_weighted_ovr = auc.value;
    record.zero_division_warnings = summary.zero_division_warnings;
    record.auc_excluded_classes = auc.excluded_classes;
  });
  write_json(run_dir / "metrics.json", run_json(record));
  record.artifacts["metrics"] = (rel / "metrics.json").string();
  return record;
}

}  // namespace

std::vector<LabeledSequence> load_experiment_corpus(const ExperimentConfig& config, std::size_t* dropped) {
  if (dropped) *dropped = 0;
  if (!config.corpus.empty()) return load_corpus(config.corpus);
  if (config.fasta.empty() || config.metadata.empty()) {
    throw Error(ErrorKind::InvalidConfig, "set 'corpus', or both 'fasta' and 'metadata'");
  }

  std::ifstream fasta(config.fasta);
  if (!fasta) throw Error(ErrorKind::IoFailure, "cannot open FASTA '" + config.fasta + "'");
  std::ifstream metadata(config.metadata);
  if (!metadata) throw Error(ErrorKind::IoFailure, "cannot open metadata '" + config.metadata + "'");
  std::vector<SequenceRecord> records;
  try {
    records = parse_fasta(fasta);
  } catch (const Error& e) {
    throw e.with_context(config.fasta);
  }
  std::vector<MetadataRow> rows;
  try {
    rows = read_metadata_tsv(metadata);
  } catch (const Error& e) {
    throw e.with_context(config.metadata);
  }
  auto joined = join_metadata(std::move(records), rows);
  if (dropped) *dropped = joined.dropped;
  return std::move(joined.labeled);
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::span<const LabeledSequence> corpus_in) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.started_at = utc_now();

  std::vector<LabeledSequence> filtered;
  std::span<const LabeledSequence> corpus = corpus_in;
  if (config.class_level == ClassLevel::State) {
    for (const auto& s : corpus_in) {
      if (s.label.state) filtered.push_back(s);
    }
    report.skipped_without_label = corpus_in.size() - filtered.size();
    corpus = filtered;
  }
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "no labelled sequences at level '" +
                                                              std::string(to_string(config.class_level)) + "'");
  report.corpus_size = corpus.size();

  const auto table = ClassTable::from_corpus(corpus, config.class_level);
  report.class_names = table.names();
  const auto labels = table.encode(corpus, config.class_level);
  const int class_count = static_cast<int>(table.size());
  if (config.model == ModelKind::NeuralNet && class_count < 2) {
    throw Error(ErrorKind::InvalidConfig, "model 'nn' needs at least two classes");
  }

  FeatureOptions options;
  options.encoding = config.encoding;
  options.kmer.k = config.k;
  options.kmer.l2_normalize = config.l2_normalize;
  options = resolve_options(options, corpus);
  if (options.encoding == Encoding::OneHot) {
    for (const auto& s : corpus) {
      if (static_cast<Eigen::Index>(strip_stop(s.record.residues).size()) != options.expected_len) {
        throw Error(ErrorKind::LengthMismatch, "encoding 'ohe' needs equal lengths; '" + s.record.id + "' has " +
                                                   std::to_string(strip_stop(s.record.residues).size()) +
                                                   ", expected " + std::to_string(options.expected_len));
      }
    }
  }

  const RunContext ctx{config, corpus, labels, class_count, options, feature_dim(options), config.output_dir};
  fs::create_directories(ctx.output_dir);

  report.runs.resize(static_cast<std::size_t>(config.runs));
  const unsigned workers = config.parallel_runs ? static_cast<unsigned>(config.runs) : 1u;
  parallel_for(report.runs.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) report.runs[i] = run_once(ctx, static_cast<int>(i));
  });

  std::vector<RunMetrics> metrics;
  for (const auto& r : report.runs) metrics.push_back(r.metrics);
  report.aggregate = aggregate(metrics);
  report.finished_at = utc_now();
  return report;
}

nlohmann::json metrics_json(const ExperimentReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) runs.push_back(run_json(r));
  const auto& a = report.aggregate;
  return {{"schema_version", kReportSchemaVersion},
          {"tool_version", kToolVersion},
          {"config", report.config.to_json()},
          {"corpus",
           {{"size", report.corpus_size},
            {"skipped_without_label", report.skipped_without_label},
            {"class_names", report.class_names}}},
          {"runs", runs},
          {"aggregate",
           {{"run_count", a.run_count},
            {"accuracy", mean_std_json(a.accuracy)},
            {"precision_weighted", mean_std_json(a.precision_weighted)},
            {"recall_weighted", mean_std_json(a.recall_weighted)},
            {"f1_weighted", mean_std_json(a.f1_weighted)},
            {"f1_macro", mean_std_json(a.f1_macro)},
            {"roc_auc_weighted_ovr", mean_std_json(a.roc_auc_weighted_ovr)}}}};
}

nlohmann::json report_json(const ExperimentReport& report) {
  nlohmann::json j = metrics_json(report);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"index", r.index},
                    {"featurize_seconds", r.timing.featurize_seconds},
                    {"fit_seconds", r.timing.fit_seconds},
                    {"score_seconds", r.timing.score_seconds}});
  }
  j["timing"] = {{"started_at", report.started_at},
                 {"finished_at", report.finished_at},
                 {"train_runtime_seconds", mean_std_json(report.aggregate.train_runtime_seconds)},
                 {"runs", runs}};
  return j;
}

nlohmann::json manifest_json(const ExperimentReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"index", r.index},
                    {"seeds", {{"split", r.seeds.split}, {"rff", r.seeds.rff}, {"model", r.seeds.model}}},
                    {"artifacts", r.artifacts}});
  }
  return {{"tool_version", kToolVersion},
          {"schema_version", kReportSchemaVersion},
          {"config", report.config.to_json()},
          {"runs", runs},
          {"artifacts",
           {{"metrics", "metrics.json"}, {"report", "report.json"}, {"table", "report.csv"}}},
          {"started_at", report.started_at},
          {"finished_at", report.finished_at}};
}

ExperimentReport cmd_run(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  try {
    const auto corpus = load_experiment_corpus(config);
    auto report = run_experiment(config, corpus);
    write_json(dir / "metrics.json", metrics_json(report));
    const auto full = report_json(report);
    write_json(dir / "report.json", full);
    {
      auto csv = open_output(dir / "report.csv");
      const ReportRow row = report_row(full);
      write_report_csv(csv, std::span<const ReportRow>(&row, 1));
    }
    write_json(dir / "manifest.json", manifest_json(report));
    return report;
  } catch (const Error& e) {
    // Keep whatever the failed run produced and say why it stopped.
    std::ofstream failure(dir / "failure.json");
    failure << nlohmann::json{{"error", e.what()}, {"kind", to_string(e.kind())}, {"config", config.to_json()}}.dump(2)
            << '\n';
    throw;
  }
}

}  // namespace seqclf
