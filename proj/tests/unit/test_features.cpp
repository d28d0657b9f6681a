#include <doctest.h>

#include <map>
#include <sstream>

#include "seqclf/error.hpp"
#include "seqclf/feature_io.hpp"
#include "seqclf/features.hpp"
#include "support/synthetic.hpp"

using namespace seqclf;

namespace {

std::map<std::string, double> decoded_counts(const FeatureVector& fv, int k) {
  std::map<std::string, double> out;
  for (SparseVector::InnerIterator it(fv.values); it; ++it) out[kmer_decode(it.index(), k)] = it.value();
  return out;
}

double total(const FeatureVector& fv) { return fv.values.sum(); }

}  // namespace

TEST_CASE("kmer_index examples") {
  CHECK(kmer_index("AAA") == 0);
  CHECK(kmer_index("MDP") == 10 * 441 + 2 * 21 + 12);
  CHECK(kmer_index("MDP") == 4464);
  CHECK(kmer_index("YYY") == 9260);
  CHECK_THROWS_AS(kmer_index("AZA"), Error);
}

TEST_CASE("kmer_index is a bijection") {
  std::mt19937_64 rng(2);
  for (int k = 1; k <= KmerSpec::kMaxK; ++k) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto kmer = testing::random_sequence(static_cast<std::size_t>(k), rng);
      const auto idx = kmer_index(kmer);
      CHECK(idx >= 0);
      CHECK(idx < KmerSpec{k}.dim());
      CHECK(kmer_decode(idx, k) == kmer);
    }
  }
  for (std::int64_t i = 0; i < 9261; ++i) REQUIRE(kmer_index(kmer_decode(i, 3)) == i);
}

TEST_CASE("kmer_vector decomposes MDPEG for k = 3, 4, 5") {
  const SequenceRecord seq{"s", "MDPEG"};
  const auto k3 = decoded_counts(kmer_vector(seq, {3}), 3);
  CHECK(k3 == std::map<std::string, double>{{"DPE", 1}, {"MDP", 1}, {"PEG", 1}});
  const auto k4 = decoded_counts(kmer_vector(seq, {4}), 4);
  CHECK(k4 == std::map<std::string, double>{{"DPEG", 1}, {"MDPE", 1}});
  const auto k5 = decoded_counts(kmer_vector(seq, {5}), 5);
  CHECK(k5 == std::map<std::string, double>{{"MDPEG", 1}});
  CHECK(kmer_vector(seq, {3}).dim() == 9261);
}

TEST_CASE("kmer_vector counts overlaps and ignores the stop") {
  const auto fv = kmer_vector({"s", "AAAA*"}, {3});
  CHECK(fv.values.nonZeros() == 1);
  CHECK(fv.values.coeff(0) == 2.0);
}

TEST_CASE("kmer totals equal N - k + 1") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 6);
    const std::size_t n = static_cast<std::size_t>(k) + rng() % 400;
    const auto fv = kmer_vector({"s", testing::random_sequence(n, rng)}, {k});
    CHECK(total(fv) == static_cast<double>(n - static_cast<std::size_t>(k) + 1));
  }
  const auto spike = kmer_vector({"s", testing::random_sequence(1273, rng) + "*"}, {3});
  CHECK(total(spike) == 1271.0);
}

TEST_CASE("kmer_vector errors and normalization") {
  CHECK_THROWS_AS(kmer_vector({"s", "MD"}, {3}), Error);
  try {
    kmer_vector({"short", "MD"}, {3});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SequenceTooShort);
    CHECK(std::string(e.what()).find("short") != std::string::npos);
  }
  for (int bad : {0, 7}) {
    try {
      kmer_vector({"s", "MDPEGMDPEG"}, {bad});
      FAIL("k accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidConfig);
    }
  }
  const auto unit = kmer_vector({"s", "MDPEGAAAA"}, {3, true});
  CHECK(unit.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ohe_vector examples") {
  const auto a = ohe_vector({"s", "A"}, 1);
  CHECK(a.dim() == 21);
  CHECK(a.values.nonZeros() == 1);
  CHECK(a.values.coeff(0) == 1.0);

  const auto ca = ohe_vector({"s", "CA"}, 2);
  CHECK(ca.values.nonZeros() == 2);
  CHECK(ca.values.coeff(1) == 1.0);
  CHECK(ca.values.coeff(21) == 1.0);

  std::mt19937_64 rng(5);
  const auto spike = ohe_vector({"s", testing::random_sequence(1273, rng) + "*"}, 1273);
  CHECK(spike.dim() == 26733);
  CHECK(spike.values.sum() == 1273.0);

  try {
    ohe_vector({"odd", "CA"}, 3);
    FAIL("length accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("OHE inner product counts agreeing positions") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    auto a = testing::random_sequence(n, rng);
    auto b = testing::random_sequence(n, rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3 == 0) b[i] = a[i];
    }
    int same = 0;
    for (std::size_t i = 0; i < n; ++i) same += a[i] == b[i];
    const auto va = ohe_vector({"a", a}, static_cast<Eigen::Index>(n));
    const auto vb = ohe_vector({"b", b}, static_cast<Eigen::Index>(n));
    CHECK(va.values.dot(vb.values) == static_cast<double>(same));
  }
}

TEST_CASE("featurize_corpus assigns sorted class ids in input order") {
  std::vector<LabeledSequence> data = {{{"x", "MDPEG"}, {"Europe", "Italy", std::nullopt}},
                                       {{"y", "MDPEA"}, {"Asia", "China", std::nullopt}}};
  const auto corpus = featurize_corpus(data, {}, ClassLevel::Continent);
  CHECK(corpus.class_names == std::vector<std::string>{"Asia", "Europe"});
  CHECK(corpus.labels == std::vector<int>{1, 0});
  CHECK(corpus.features.rows() == 2);
  CHECK(corpus.features.cols() == 9261);
  CHECK(corpus.features.coeff(0, kmer_index("PEG")) == 1.0);
  CHECK(corpus.features.coeff(1, kmer_index("PEA")) == 1.0);
}

TEST_CASE("featurize_corpus errors") {
  std::vector<LabeledSequence> mixed = {{{"x", "MDPEG"}, {"Asia", "China", std::nullopt}},
                                        {{"bad_len", "MDP"}, {"Asia", "China", std::nullopt}}};
  FeatureOptions ohe;
  ohe.encoding = Encoding::OneHot;
  try {
    featurize_corpus(mixed, ohe, ClassLevel::Continent);
    FAIL("ragged OHE accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
    CHECK(std::string(e.what()).find("bad_len") != std::string::npos);
  }
  try {
    featurize_corpus({}, {}, ClassLevel::Continent);
    FAIL("empty accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyCorpus);
  }
  FeatureOptions rff;
  rff.encoding = Encoding::Rff;
  CHECK_THROWS_AS(featurize_corpus(mixed, rff, ClassLevel::Continent), Error);
}

TEST_CASE("featurization does not depend on the thread count") {
  const auto data = testing::labelled_corpus({40, 37, 23}, 150, 9);
  for (auto encoding : {Encoding::KmerCounts, Encoding::OneHot}) {
    FeatureOptions options;
    options.encoding = encoding;
    const SparseMatrix one = featurize_rows(data, options, 1);
    for (unsigned threads : {2u, 3u, 8u}) {
      const SparseMatrix many = featurize_rows(data, options, threads);
      REQUIRE(many.nonZeros() == one.nonZeros());
      CHECK(std::equal(one.outerIndexPtr(), one.outerIndexPtr() + one.rows() + 1, many.outerIndexPtr()));
      CHECK(std::equal(one.innerIndexPtr(), one.innerIndexPtr() + one.nonZeros(), many.innerIndexPtr()));
      CHECK(std::equal(one.valuePtr(), one.valuePtr() + one.nonZeros(), many.valuePtr()));
    }
  }
}

TEST_CASE("feature matrix round trip through the binary container") {
  const auto data = testing::labelled_corpus({10, 10}, 60, 10);
  const SparseMatrix x = featurize_rows(data, {}, 1);
  std::stringstream buffer;
  write_features(buffer, x, Encoding::KmerCounts);
  CHECK(buffer.str().substr(0, 5) == "SQFV1");
  const auto file = read_features(buffer);
  CHECK(file.encoding == Encoding::KmerCounts);
  CHECK(file.features.rows() == x.rows());
  CHECK(file.features.cols() == x.cols());
  CHECK((Eigen::MatrixXd(file.features) - Eigen::MatrixXd(x)).norm() == 0.0);

  std::stringstream truncated(buffer.str().substr(0, buffer.str().size() - 3));
  CHECK_THROWS_AS(read_features(truncated), Error);
  std::stringstream garbage("NOPE!");
  CHECK_THROWS_AS(read_features(garbage), Error);

  std::ostringstream csv;
  write_features_csv(csv, x);
  const auto text = csv.str();
  CHECK(text.rfind("row,column,value\n", 0) == 0);
  CHECK(static_cast<Eigen::Index>(std::count(text.begin(), text.end(), '\n')) == x.nonZeros() + 1);
}
