#include "seqclf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "seqclf/error.hpp"

namespace seqclf {

std::string_view to_string(ModelKind model) noexcept {
  switch (model) {
    case ModelKind::Majority: return "majority";
    case ModelKind::NaiveBayes: return "nb";
    case ModelKind::LogisticRegression: return "lr";
    case ModelKind::Ridge: return "ridge";
    case ModelKind::NeuralNet: return "nn";
  }
  return "majority";
}

std::string_view to_string(RffMode mode) noexcept {
  switch (mode) {
    case RffMode::Auto: return "auto";
    case RffMode::On: return "on";
    case RffMode::Off: return "off";
  }
  return "auto";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorKind::InvalidConfig,
              "key '" + std::string(key) + "': '" + std::string(value) + "' is not " + std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

struct KeyEntry {
  ConfigKey key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<nlohmann::json(const ExperimentConfig&)> get;
};

#define SEQCLF_NUMBER(NAME, HELP, FIELD, TYPE)                                                        \
  KeyEntry {                                                                                          \
    {NAME, HELP}, [](ExperimentConfig& c, std::string_view v) { c.FIELD = parse_number<TYPE>(NAME, v); }, \
        [](const ExperimentConfig& c) { return nlohmann::json(c.FIELD); }                             \
  }
#define SEQCLF_BOOL(NAME, HELP, FIELD)                                                          \
  KeyEntry {                                                                                    \
    {NAME, HELP}, [](ExperimentConfig& c, std::string_view v) { c.FIELD = parse_bool(NAME, v); }, \
        [](const ExperimentConfig& c) { return nlohmann::json(c.FIELD); }                       \
  }
#define SEQCLF_STRING(NAME, HELP, FIELD)                                                         \
  KeyEntry {                                                                                     \
    {NAME, HELP}, [](ExperimentConfig& c, std::string_view v) { c.FIELD = std::string(v); },       \
        [](const ExperimentConfig& c) { return nlohmann::json(c.FIELD); }                        \
  }

const std::vector<KeyEntry>& entries() {
  static const std::vector<KeyEntry> table = {
      SEQCLF_STRING("fasta", "FASTA file of sequences", fasta),
      SEQCLF_STRING("metadata", "TSV with id, continent, country[, state]", metadata),
      SEQCLF_STRING("corpus", "binary corpus from 'ingest' (overrides fasta/metadata)", corpus),
      KeyEntry{{"class_level", "continent | country | state"},
               [](ExperimentConfig& c, std::string_view v) { c.class_level = parse_class_level(v); },
               [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.class_level)); }},
      KeyEntry{{"encoding", "kmers | ohe"},
               [](ExperimentConfig& c, std::string_view v) {
                 if (v == "kmers") {
                   c.encoding = Encoding::KmerCounts;
                 } else if (v == "ohe") {
                   c.encoding = Encoding::OneHot;
                 } else {
                   bad_value("encoding", v, "one of kmers, ohe");
                 }
               },
               [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.encoding)); }},
      SEQCLF_NUMBER("k", "k-mer length", k, int),
      SEQCLF_BOOL("kmer.l2_normalize", "scale each k-mer vector to unit length", l2_normalize),
      KeyEntry{{"rff", "auto | on | off"},
               [](ExperimentConfig& c, std::string_view v) {
                 if (v == "auto") {
                   c.rff = RffMode::Auto;
                 } else if (v == "on" || v == "true") {
                   c.rff = RffMode::On;
                 } else if (v == "off" || v == "false") {
                   c.rff = RffMode::Off;
                 } else {
                   bad_value("rff", v, "one of auto, on, off");
                 }
               },
               [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.rff)); }},
      SEQCLF_NUMBER("rff.D", "number of random Fourier features", rff_settings.output_dim, Eigen::Index),
      SEQCLF_NUMBER("rff.gamma", "Gaussian kernel gamma (0: 1 / input dim)", rff_settings.gamma, double),
      SEQCLF_NUMBER("rff.seed", "projector seed (run i uses seed + i)", rff_settings.seed, std::uint64_t),
      KeyEntry{{"model", "majority | nb | lr | ridge | nn"},
               [](ExperimentConfig& c, std::string_view v) {
                 if (v == "majority") {
                   c.model = ModelKind::Majority;
                 } else if (v == "nb") {
                   c.model = ModelKind::NaiveBayes;
                 } else if (v == "lr") {
                   c.model = ModelKind::LogisticRegression;
                 } else if (v == "ridge") {
                   c.model = ModelKind::Ridge;
                 } else if (v == "nn") {
                   c.model = ModelKind::NeuralNet;
                 } else {
                   bad_value("model", v, "one of majority, nb, lr, ridge, nn");
                 }
               },
               [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.model)); }},
      SEQCLF_NUMBER("split.train_fraction", "fraction of each run used for training", split.train_fraction, double),
      SEQCLF_BOOL("split.stratified", "keep class proportions in both halves", split.stratified),
      SEQCLF_NUMBER("split.seed", "split seed (run i uses seed + i)", split.seed, std::uint64_t),
      SEQCLF_NUMBER("runs", "number of repetitions", runs, int),
      SEQCLF_STRING("output_dir", "directory for reports and per-run artifacts", output_dir),
      SEQCLF_NUMBER("lr.l2_lambda", "logistic regression L2 penalty", logreg.l2_lambda, double),
      SEQCLF_NUMBER("lr.max_iters", "logistic regression iteration cap", logreg.max_iters, int),
      SEQCLF_NUMBER("lr.tol", "logistic regression gradient-norm tolerance", logreg.tol, double),
      SEQCLF_NUMBER("ridge.alpha", "ridge penalty", ridge_alpha, double),
      SEQCLF_NUMBER("nn.hidden", "hidden width (0: input dim)", nn.hidden_width, Eigen::Index),
      SEQCLF_NUMBER("nn.batch_size", "mini-batch size", nn.batch_size, int),
      SEQCLF_NUMBER("nn.epochs", "training epochs", nn.epochs, int),
      SEQCLF_NUMBER("nn.learning_rate", "Adam learning rate", nn.learning_rate, double),
      SEQCLF_NUMBER("nn.beta1", "Adam beta1", nn.beta1, double),
      SEQCLF_NUMBER("nn.beta2", "Adam beta2", nn.beta2, double),
      SEQCLF_NUMBER("nn.epsilon", "Adam epsilon", nn.epsilon, double),
      SEQCLF_NUMBER("nn.seed", "init and shuffle seed (run i uses seed + i)", nn.seed, std::uint64_t),
      SEQCLF_NUMBER("threads", "featurization threads (0: all cores)", threads, unsigned),
      SEQCLF_BOOL("parallel_runs", "run repetitions concurrently", parallel_runs),
      SEQCLF_BOOL("save_features", "write per-run feature matrices", save_features),
  };
  return table;
}

#undef SEQCLF_NUMBER
#undef SEQCLF_BOOL
#undef SEQCLF_STRING

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

bool ExperimentConfig::use_rff() const noexcept {
  switch (rff) {
    case RffMode::On: return true;
    case RffMode::Off: return false;
    case RffMode::Auto: break;
  }
  return model == ModelKind::NaiveBayes || model == ModelKind::LogisticRegression || model == ModelKind::Ridge;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  for (const auto& e : entries()) {
    if (e.key.name == key) {
      e.set(*this, value);
      return;
    }
  }
  throw Error(ErrorKind::InvalidConfig, "unknown key '" + std::string(key) + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
  if (encoding == Encoding::KmerCounts && (k < 1 || k > KmerSpec::kMaxK)) {
    fail("k must be in [1, " + std::to_string(KmerSpec::kMaxK) + "]");
  }
  if (runs < 1) fail("runs must be >= 1");
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) fail("split.train_fraction must be in (0, 1)");
  if (use_rff()) {
    if (rff_settings.output_dim < 1) throw Error(ErrorKind::InvalidDimension, "rff.D must be >= 1");
    if (rff_settings.gamma < 0.0 || !std::isfinite(rff_settings.gamma)) {
      throw Error(ErrorKind::InvalidGamma, "rff.gamma must be >= 0 (0 selects 1 / input dim)");
    }
  }
  if (!(logreg.l2_lambda >= 0.0) || logreg.max_iters < 1 || !(logreg.tol > 0.0)) fail("invalid lr.* settings");
  if (!(ridge_alpha > 0.0)) fail("ridge.alpha must be > 0");
  if (nn.hidden_width < 0 || nn.batch_size < 1 || nn.epochs < 1) fail("invalid nn.* settings");
  if (output_dir.empty()) fail("output_dir must not be empty");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : entries()) j[std::string(e.key.name)] = e.get(*this);
  j["rff.enabled"] = use_rff();
  return j;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      config.set(trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const Error& e) {
      throw e.with_context("line " + std::to_string(line_no));
    }
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open config '" + path.string() + "'");
  return parse(in);
}

}  // namespace seqclf
