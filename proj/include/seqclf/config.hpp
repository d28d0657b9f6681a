#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqclf/features.hpp"
#include "seqclf/ingest.hpp"
#include "seqclf/linear_models.hpp"
#include "seqclf/neural_net.hpp"

namespace seqclf {

enum class ModelKind { Majority, NaiveBayes, LogisticRegression, Ridge, NeuralNet };
std::string_view to_string(ModelKind model) noexcept;

/// auto: project for nb/lr/ridge, raw vectors for majority/nn.
enum class RffMode { Auto, On, Off };
std::string_view to_string(RffMode mode) noexcept;

struct RffSettings {
  Eigen::Index output_dim = 1000;
  double gamma = 0.0;  // 0: 1 / input_dim
  std::uint64_t seed = 0;
};

struct NetSettings {
  Eigen::Index hidden_width = 0;  // 0: input dim
  int batch_size = 100;
  int epochs = 10;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string fasta;
  std::string metadata;
  std::string corpus;  // binary corpus; takes precedence over fasta + metadata
  ClassLevel class_level = ClassLevel::Continent;
  Encoding encoding = Encoding::KmerCounts;
  int k = 3;
  bool l2_normalize = false;
  RffMode rff = RffMode::Auto;
  RffSettings rff_settings;
  ModelKind model = ModelKind::Majority;
  SplitSpec split;
  int runs = 5;
  std::string output_dir = "seqclf_out";
  LogRegOptions logreg;
  double ridge_alpha = 1.0;
  NetSettings nn;
  unsigned threads = 1;
  bool parallel_runs = false;
  bool save_features = false;

  bool use_rff() const noexcept;

  /// Sets one key from its text form; throws InvalidConfig for unknown keys
  /// or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Cross-field checks that do not need the data.
  void validate() const;

  /// Every key with its resolved value, as text.
  nlohmann::json to_json() const;

  /// Flat "key = value" lines; '#' starts a comment.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct ConfigKey {
  std::string_view name;
  std::string_view help;
};

/// All recognised keys, in the order they are reported.
const std::vector<ConfigKey>& config_keys();

}  // namespace seqclf
