// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "seqclf/corpus_io.hpp"
#include "seqclf/experiment.hpp"
#include "seqclf/features.hpp"
#include "seqclf/infogain.hpp"
#include "seqclf/metrics.hpp"
#include "seqclf/rff.hpp"
#include "support/gradcheck.hpp"
#include "support/ig_oracle.hpp"
#include "support/metric_oracles.hpp"
#include "support/synthetic.hpp"

using namespace seqclf;
namespace fs = std::filesystem;
namespace st = seqclf::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, value);
  return buffer;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

/// Saves a corpus and runs the CLI on it; returns the parsed metrics.json.
nlohmann::json cli_run(const std::vector<LabeledSequence>& corpus, const fs::path& dir, const std::string& flags) {
  save_corpus(dir / "corpus.bin", corpus);
  const int code = st::run_cli("run --corpus " + quoted(dir / "corpus.bin") + " --output_dir " + quoted(dir / "out") +
                                   " " + flags,
                               dir / "cli.log");
  if (code != 0) throw std::runtime_error("cli exited with " + std::to_string(code) + ": " + st::read_file(dir / "cli.log"));
  return nlohmann::json::parse(st::read_file(dir / "out" / "metrics.json"));
}

Outcome majority_continent() {
  Outcome o;
  const auto corpus = st::labelled_corpus(st::majority_sizes(10000, 5, 0.60), 1273, 101);
  const auto dir = st::temp_dir("acc1");
  const auto start = Clock::now();
  const auto metrics = cli_run(corpus, dir, "--model majority --class_level country");
  const double elapsed = seconds_since(start);
  const auto& a = metrics["aggregate"];
  struct Want {
    const char* key;
    double value;
  };
  for (const auto w : {Want{"accuracy", 0.60}, Want{"precision_weighted", 0.36}, Want{"recall_weighted", 0.60},
                       Want{"f1_weighted", 0.45}, Want{"f1_macro", 0.15}, Want{"roc_auc_weighted_ovr", 0.50}}) {
    const double mean = a[w.key]["mean"];
    const double std = a[w.key]["std"];
    o.require(within(mean, w.value, 1e-3) && within(std, 0.0, 1e-3),
              std::string(w.key) + "=" + fmt("%.4f", mean) + "±" + fmt("%.4f", std));
  }
  o.require(elapsed < 10.0, "runtime " + fmt("%.2f", elapsed) + " s (n=10000, L=1273, 5 runs)");
  return o;
}

Outcome majority_country_state() {
  Outcome o;
  struct Case {
    int classes;
    double share, f1_weighted, f1_macro;
  };
  for (const auto c : {Case{27, 0.27, 0.12, 0.01}, Case{12, 0.33, 0.17, 0.04}}) {
    const auto corpus =
        st::labelled_corpus(st::majority_sizes(10000, static_cast<std::size_t>(c.classes), c.share), 60, 102);
    const auto dir = st::temp_dir("acc2");
    const auto metrics = cli_run(corpus, dir, "--model majority --class_level country");
    const double weighted = metrics["aggregate"]["f1_weighted"]["mean"];
    const double macro = metrics["aggregate"]["f1_macro"]["mean"];
    const std::string tag = "C=" + std::to_string(c.classes) + " p=" + fmt("%.2f", c.share) + ": ";
    o.require(within(weighted, c.f1_weighted, 0.005),
              tag + "F1w=" + fmt("%.4f", weighted) + " (want " + fmt("%.2f", c.f1_weighted) + "±0.005)");
    o.require(within(macro, c.f1_macro, 0.005),
              tag + "F1m=" + fmt("%.4f", macro) + " (want " + fmt("%.2f", c.f1_macro) + "±0.005)");
  }
  return o;
}

Outcome kmer_arithmetic() {
  Outcome o;
  std::mt19937_64 rng(103);
  std::vector<LabeledSequence> corpus;
  for (int i = 0; i < 1000; ++i) {
    corpus.push_back({{"r" + std::to_string(i), st::random_sequence(1273, rng)}, {"A", "A", std::nullopt}});
  }
  const auto start = Clock::now();
  const auto x = featurize_rows(corpus, FeatureOptions{});
  bool sums = true;
  for (Eigen::Index i = 0; i < x.rows(); ++i) sums = sums && x.row(i).sum() == 1271.0;

  bool decompositions = true;
  const std::vector<std::pair<int, std::vector<std::string>>> expected{
      {3, {"MDP", "DPE", "PEG"}}, {4, {"MDPE", "DPEG"}}, {5, {"MDPEG"}}};
  for (const auto& [k, kmers] : expected) {
    KmerSpec spec;
    spec.k = k;
    const auto v = kmer_vector({"mdpeg", "MDPEG"}, spec);
    decompositions = decompositions && v.values.nonZeros() == static_cast<Eigen::Index>(kmers.size());
    for (const auto& kmer : kmers) decompositions = decompositions && v.values.coeff(kmer_index(kmer)) == 1.0;
  }
  const double elapsed = seconds_since(start);
  o.require(x.cols() == 9261, "dim=" + std::to_string(x.cols()));
  o.require(sums, "every row sums to 1271");
  o.require(decompositions, "MDPEG k=3/4/5 decompositions");
  o.require(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s");
  return o;
}

Outcome rff_fidelity() {
  Outcome o;
  const auto start = Clock::now();
  const Eigen::Index d = 32;
  const double gamma = 1.0;
  std::mt19937_64 rng(104);
  std::normal_distribution<double> g;
  auto unit = [&] {
    Eigen::VectorXd v(d);
    for (auto& e : v) e = g(rng);
    return Eigen::VectorXd(v.normalized());
  };
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  for (int i = 0; i < 100; ++i) pairs.emplace_back(unit(), unit());

  auto rmse = [&](Eigen::Index D) {
    const RffProjector<double> projector(d, D, gamma, 7);
    double sq = 0;
    for (const auto& [a, b] : pairs) {
      const double err = projector.project(a).dot(projector.project(b)) - exact_kernel(a, b, gamma);
      sq += err * err;
    }
    return std::sqrt(sq / static_cast<double>(pairs.size()));
  };
  const double large = rmse(4096);
  const double small = rmse(256);
  int self_ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RffProjector<double> projector(d, 4096, gamma, seed);
    const auto a = unit();
    const auto z = projector.project(a);
    self_ok += std::abs(z.dot(z) - 1.0) <= 0.1;
  }
  const double elapsed = seconds_since(start);
  o.require(large < 0.5 * small, "RMSE D=4096 " + fmt("%.4f", large) + " vs D=256 " + fmt("%.4f", small));
  o.require(large < 0.1 && small < 0.1, "both below 0.1");
  o.require(self_ok >= 95, "self kernel within 0.1 for " + std::to_string(self_ok) + "/100 seeds");
  o.require(elapsed < 30.0, "runtime " + fmt("%.2f", elapsed) + " s");
  return o;
}

Outcome gradients() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(105);
  double worst_nn = 0, worst_lr = 0;
  for (int i = 0; i < 50; ++i) worst_nn = std::max(worst_nn, st::nn_gradient_gap(st::tiny_net_case(rng)));
  for (int i = 0; i < 50; ++i) worst_lr = std::max(worst_lr, st::logreg_gradient_gap(rng));
  const double elapsed = seconds_since(start);
  o.require(worst_nn <= 1e-4, "NN worst relative gap " + fmt("%.2e", worst_nn));
  o.require(worst_lr <= 1e-4, "LR worst relative gap " + fmt("%.2e", worst_lr));
  o.require(elapsed < 30.0, "runtime " + fmt("%.2f", elapsed) + " s");
  return o;
}

Outcome learnability() {
  Outcome o;
  const auto motifs = st::motif_corpus(5000, 4, 300, 106);
  const auto dir = st::temp_dir("acc6");
  const auto start = Clock::now();
  auto accuracy = [&](ModelKind model) {
    ExperimentConfig config;
    config.model = model;
    config.class_level = ClassLevel::Country;
    config.runs = 1;
    config.output_dir = (dir / std::string(to_string(model))).string();
    const auto report = run_experiment(config, motifs.data);
    return report.aggregate.accuracy.mean;
  };
  const double majority = accuracy(ModelKind::Majority);
  const double nn = accuracy(ModelKind::NeuralNet);
  const double lr = accuracy(ModelKind::LogisticRegression);
  const double ridge = accuracy(ModelKind::Ridge);
  const double elapsed = seconds_since(start);
  o.require(nn >= 0.95, "NN+k-mers " + fmt("%.4f", nn));
  o.require(nn > majority, "MAJORITY " + fmt("%.4f", majority));
  o.require(lr >= 0.85, "LR " + fmt("%.4f", lr));
  o.require(ridge >= 0.85, "ridge " + fmt("%.4f", ridge));
  o.require(elapsed < 300.0, "runtime " + fmt("%.1f", elapsed) + " s");
  return o;
}

Outcome metrics_oracle() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(107);
  int counts_equal = 0, summary_equal = 0, auc_equal = 0;
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 2 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 199);
    std::vector<int> t(n), p(n);
    for (int i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng() % classes);
      p[i] = rng() % 2 ? t[i] : static_cast<int>(rng() % classes);
    }
    t[0] = 0;
    t[1] = 1;
    const auto m = confusion(t, p, classes);
    bool same = true;
    for (int i = 0; i < n; ++i) same = same && m(t[i], p[i]) > 0;
    for (int a = 0; a < classes; ++a) {
      for (int b = 0; b < classes; ++b) {
        std::int64_t count = 0;
        for (int i = 0; i < n; ++i) count += t[i] == a && p[i] == b;
        same = same && m(a, b) == count;
      }
    }
    counts_equal += same;

    const auto s = summarize(m);
    const auto r = st::oracle_summary(t, p, classes);
    const double gap = std::max({std::abs(s.accuracy - r.accuracy), std::abs(s.precision_weighted - r.precision_weighted),
                                 std::abs(s.recall_weighted - r.recall_weighted), std::abs(s.f1_weighted - r.f1_weighted),
                                 std::abs(s.f1_macro - r.f1_macro)});
    worst = std::max(worst, gap);
    summary_equal += s.accuracy == r.accuracy && gap <= 1e-12;

    Eigen::MatrixXd scores(n, classes);
    for (auto& v : scores.reshaped()) v = static_cast<double>(rng() % 9);
    bool auc_same = true;
    for (int c = 0; c < classes; ++c) {
      std::vector<double> column(scores.col(c).begin(), scores.col(c).end());
      std::vector<char> positive(n);
      int support = 0;
      for (int i = 0; i < n; ++i) support += positive[i] = t[i] == c;
      if (support == 0 || support == n) continue;
      auc_same = auc_same && binary_auc(column, positive) == st::pairwise_auc(column, positive);
    }
    const double ovr = roc_auc_ovr_weighted(scores, t).value;
    auc_same = auc_same && std::abs(ovr - st::pairwise_auc_ovr(scores, t)) <= 1e-12;
    auc_equal += auc_same;
  }
  const double elapsed = seconds_since(start);
  o.require(counts_equal == 200, "confusion counts " + std::to_string(counts_equal) + "/200");
  o.require(summary_equal == 200, "summaries " + std::to_string(summary_equal) + "/200 (worst gap " + fmt("%.1e", worst) + ")");
  o.require(auc_equal == 200, "AUC " + std::to_string(auc_equal) + "/200");
  o.require(elapsed < 10.0, "runtime " + fmt("%.2f", elapsed) + " s");
  return o;
}

Outcome infogain_correctness() {
  Outcome o;
  const auto start = Clock::now();
  auto corpus = [](const std::vector<std::string>& seqs, const std::vector<std::string>& labels) {
    std::vector<LabeledSequence> out;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      out.push_back({{"s" + std::to_string(i), seqs[i]}, {"Asia", labels[i], std::nullopt}});
    }
    return out;
  };
  std::mt19937_64 rng(108);
  double worst = 0;
  bool exact_cases = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 150;
    const std::size_t length = 2 + rng() % 30;
    const int classes = 2 + static_cast<int>(rng() % 5);
    std::vector<std::string> seqs(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = "L" + std::to_string(i < 2 ? i : rng() % classes);
      seqs[i] = st::random_sequence(length, rng);
      seqs[i][0] = 'M';  // constant position
      seqs[i][1] = "ACDEFGHIKLMNPQRSTVWXY"[std::stoi(labels[i].substr(1))];  // determines the class
    }
    const auto r = information_gain(corpus(seqs, labels), ClassLevel::Country);
    const auto expected = st::ig_by_joint_entropy(seqs, labels);
    for (std::size_t p = 0; p < length; ++p) worst = std::max(worst, std::abs(r.table.ig_bits[p] - expected[p]));
    exact_cases = exact_cases && r.table.ig_bits[0] == 0.0 && r.table.ig_bits[1] == r.table.class_entropy;
  }
  const auto worked = information_gain(corpus({"A", "A", "A", "C"}, {"X", "X", "Y", "Y"}), ClassLevel::Country);
  const double elapsed = seconds_since(start);
  o.require(worst <= 1e-9, "worst gap vs H(C)+H(P)-H(C,P) " + fmt("%.1e", worst));
  o.require(exact_cases, "constant -> 0 and perfect predictor -> H(C) exactly");
  o.require(within(worked.table.ig_bits[0], 0.3113, 1e-4), "worked example " + fmt("%.6f", worked.table.ig_bits[0]));
  o.require(elapsed < 10.0, "runtime " + fmt("%.2f", elapsed) + " s");
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto motifs = st::motif_corpus(600, 3, 120, 109);
  for (const char* flags : {"--model lr --runs 3", "--model nn --nn.hidden 32 --nn.epochs 3 --runs 2"}) {
    const auto dir = st::temp_dir("acc9");
    cli_run(motifs.data, dir, std::string(flags) + " --class_level country");
    const auto first = st::read_file(dir / "out" / "metrics.json");
    cli_run(motifs.data, dir, std::string(flags) + " --class_level country");
    const auto second = st::read_file(dir / "out" / "metrics.json");
    o.require(!first.empty() && first == second,
              std::string(flags) + ": " + std::to_string(first.size()) + " bytes " + (first == second ? "identical" : "differ"));
  }
  return o;
}

Outcome throughput() {
  Outcome o;
  std::mt19937_64 rng(110);
  std::vector<LabeledSequence> corpus;
  corpus.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    corpus.push_back({{"t" + std::to_string(i), st::random_sequence(1273, rng)}, {"A", "A", std::nullopt}});
  }
  double single = 0, eight = 0;
  Eigen::Index nnz = 0;
  {
    const auto start = Clock::now();
    const auto x = featurize_rows(corpus, FeatureOptions{}, 1);
    single = seconds_since(start);
    nnz = x.nonZeros();
  }
  {
    const auto start = Clock::now();
    const auto x = featurize_rows(corpus, FeatureOptions{}, 8);
    eight = seconds_since(start);
  }
  const double speedup = single / eight;
  o.require(single < 60.0, "1 thread " + fmt("%.2f", single) + " s (" + std::to_string(nnz) + " non-zeros)");
  o.require(speedup >= 3.0, "8 threads " + fmt("%.2f", eight) + " s, speedup " + fmt("%.2f", speedup) + "x on " +
                                std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"MAJORITY reproduction, continent scale", majority_continent},
      {"MAJORITY reproduction, country and state scale", majority_country_state},
      {"k-mer arithmetic", kmer_arithmetic},
      {"RFF fidelity", rff_fidelity},
      {"gradient correctness", gradients},
      {"learnability ordering", learnability},
      {"metrics oracle", metrics_oracle},
      {"information gain correctness", infogain_correctness},
      {"determinism", determinism},
      {"featurization throughput", throughput},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    failures += !outcome.pass;
    std::printf("%s %2d %s: %s\n", outcome.pass ? "PASS" : "FAIL", number, criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
