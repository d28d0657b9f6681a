// seqclf: ingest, featurize, run, ig and report subcommands.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqclf/config.hpp"
#include "seqclf/corpus_io.hpp"
#include "seqclf/error.hpp"
#include "seqclf/experiment.hpp"
#include "seqclf/feature_io.hpp"
#include "seqclf/features.hpp"
#include "seqclf/infogain.hpp"
#include "seqclf/ingest.hpp"
#include "seqclf/report.hpp"

namespace {

using namespace seqclf;

std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
  return out;
}

struct IngestArgs {
  std::string fasta, metadata, out;
};

void cmd_ingest(const IngestArgs& args) {
  auto fasta = open_input(args.fasta);
  auto metadata = open_input(args.metadata);
  std::vector<SequenceRecord> records;
  try {
    records = parse_fasta(fasta);
  } catch (const Error& e) {
    throw e.with_context(args.fasta);
  }
  std::vector<MetadataRow> rows;
  try {
    rows = read_metadata_tsv(metadata);
  } catch (const Error& e) {
    throw e.with_context(args.metadata);
  }
  if (records.empty()) throw Error(ErrorKind::EmptyCorpus, "no sequences in '" + args.fasta + "'");
  const auto joined = join_metadata(std::move(records), rows);
  save_corpus(args.out, joined.labeled);
  std::cerr << joined.labeled.size() << " sequences, " << joined.dropped << " dropped\n";
}

struct FeaturizeArgs {
  std::string corpus, out, csv, labels, encoding = "kmers", class_level = "continent";
  int k = 3;
  bool l2_normalize = false;
  unsigned threads = 1;
};

void cmd_featurize(const FeaturizeArgs& args) {
  FeatureOptions options;
  if (args.encoding == "kmers") {
    options.encoding = Encoding::KmerCounts;
  } else if (args.encoding == "ohe") {
    options.encoding = Encoding::OneHot;
  } else {
    throw Error(ErrorKind::InvalidConfig, "encoding must be kmers or ohe");
  }
  options.kmer.k = args.k;
  options.kmer.l2_normalize = args.l2_normalize;
  const auto level = parse_class_level(args.class_level);
  const auto corpus = load_corpus(args.corpus);
  const auto featurized = featurize_corpus(corpus, options, level, args.threads);

  auto out = open_output(args.out, std::ios::binary);
  write_features(out, featurized.features, featurized.encoding);
  if (!args.csv.empty()) {
    auto csv = open_output(args.csv);
    write_features_csv(csv, featurized.features);
  }
  if (!args.labels.empty()) {
    auto labels = open_output(args.labels);
    labels << labels_json(featurized.labels, featurized.class_names) << '\n';
  }
  std::cerr << featurized.features.rows() << " rows x " << featurized.features.cols() << " columns, "
            << featurized.features.nonZeros() << " non-zeros\n";
}

struct IgArgs {
  std::string corpus, out, histograms, class_level = "continent";
  std::size_t subsample = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void cmd_ig(const IgArgs& args) {
  const auto level = parse_class_level(args.class_level);
  const auto corpus = load_corpus(args.corpus);
  if (args.subsample > corpus.size()) {
    std::cerr << "warning: subsample " << args.subsample << " exceeds corpus size " << corpus.size()
              << "; using the whole corpus\n";
  }
  const auto sample = subsample(corpus, args.subsample, args.seed);
  const auto result = information_gain(sample, level, args.threads);
  export_ig(args.out, result.table);
  if (!args.histograms.empty()) {
    auto out = open_output(args.histograms);
    out << ig_histograms_json(result) << '\n';
  }
  std::cerr << result.table.sequence_length << " positions from " << sample.size() << " sequences\n";
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

void cmd_report(const ReportArgs& args) {
  std::vector<ReportRow> rows;
  for (const auto& path : args.inputs) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedFile, path + ": " + e.what());
    }
    try {
      rows.push_back(report_row(j));
    } catch (const Error& e) {
      throw e.with_context(path);
    }
  }
  if (args.out.empty()) {
    write_report_csv(std::cout, rows);
  } else {
    auto out = open_output(args.out);
    write_report_csv(out, rows);
  }
}

void print_summary(const ExperimentReport& report) {
  const auto& a = report.aggregate;
  std::printf("%d run(s), %zu sequences, %zu classes\n", a.run_count, report.corpus_size, report.class_names.size());
  std::printf("accuracy   %s\n", format_mean_std(a.accuracy.mean, a.accuracy.std).c_str());
  std::printf("precision  %s\n", format_mean_std(a.precision_weighted.mean, a.precision_weighted.std).c_str());
  std::printf("recall     %s\n", format_mean_std(a.recall_weighted.mean, a.recall_weighted.std).c_str());
  std::printf("f1 weigh.  %s\n", format_mean_std(a.f1_weighted.mean, a.f1_weighted.std).c_str());
  std::printf("f1 macro   %s\n", format_mean_std(a.f1_macro.mean, a.f1_macro.std).c_str());
  std::printf("roc-auc    %s\n", format_mean_std(a.roc_auc_weighted_ovr.mean, a.roc_auc_weighted_ovr.std).c_str());
  std::printf("train s    %s\n", format_mean_std(a.train_runtime_seconds.mean, a.train_runtime_seconds.std).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amino-acid sequence classification"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate FASTA + metadata into a binary corpus");
  ingest_cmd->add_option("--fasta", ingest.fasta, "FASTA file")->required();
  ingest_cmd->add_option("--metadata", ingest.metadata, "TSV: id, continent, country[, state]")->required();
  ingest_cmd->add_option("--out", ingest.out, "output corpus file")->required();

  FeaturizeArgs featurize;
  auto* featurize_cmd = app.add_subcommand("featurize", "Write the k-mer or one-hot feature matrix");
  featurize_cmd->add_option("--corpus", featurize.corpus, "corpus from 'ingest'")->required();
  featurize_cmd->add_option("--out", featurize.out, "binary feature file")->required();
  featurize_cmd->add_option("--encoding", featurize.encoding, "kmers | ohe")->capture_default_str();
  featurize_cmd->add_option("--k", featurize.k, "k-mer length")->capture_default_str();
  featurize_cmd->add_flag("--l2-normalize", featurize.l2_normalize, "unit-length k-mer vectors");
  featurize_cmd->add_option("--class_level", featurize.class_level, "continent | country | state")
      ->capture_default_str();
  featurize_cmd->add_option("--csv", featurize.csv, "also write row,column,value triplets");
  featurize_cmd->add_option("--labels", featurize.labels, "also write labels JSON");
  featurize_cmd->add_option("--threads", featurize.threads, "worker threads (0: all cores)")->capture_default_str();

  std::string config_path;
  std::map<std::string, std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate over repeated splits");
  run_cmd->add_option("--config", config_path, "flat key = value file");
  for (const auto& key : config_keys()) {
    const std::string name(key.name);
    run_cmd->add_option_function<std::string>(
        "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; }, std::string(key.help));
  }

  IgArgs ig;
  auto* ig_cmd = app.add_subcommand("ig", "Per-position information gain");
  ig_cmd->add_option("--corpus", ig.corpus, "aligned corpus from 'ingest'")->required();
  ig_cmd->add_option("--class_level", ig.class_level, "continent | country | state")->capture_default_str();
  ig_cmd->add_option("--subsample", ig.subsample, "random subset size (0: all)")->capture_default_str();
  ig_cmd->add_option("--seed", ig.seed, "subsample seed")->capture_default_str();
  ig_cmd->add_option("--out", ig.out, "IG CSV")->required();
  ig_cmd->add_option("--histograms", ig.histograms, "per-position symbol/class counts JSON");
  ig_cmd->add_option("--threads", ig.threads, "worker threads (0: all cores)")->capture_default_str();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Merge report.json files into one table");
  report_cmd->add_option("inputs", report.inputs, "report.json files")->required();
  report_cmd->add_option("--out", report.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::Config);
  }

  try {
    if (*ingest_cmd) {
      cmd_ingest(ingest);
    } else if (*featurize_cmd) {
      cmd_featurize(featurize);
    } else if (*run_cmd) {
      ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
      for (const auto& [key, value] : overrides) config.set(key, value);
      const auto result = cmd_run(config);
      print_summary(result);
    } else if (*ig_cmd) {
      cmd_ig(ig);
    } else if (*report_cmd) {
      cmd_report(report);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return static_cast<int>(ErrorCategory::Numerical);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::Data);
  }
  return 0;
}
