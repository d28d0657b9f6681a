#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "seqclf/error.hpp"
#include "seqclf/linear_models.hpp"
#include "seqclf/metrics.hpp"

using namespace seqclf;

namespace {

struct Blobs {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Blobs blobs(const std::vector<Eigen::VectorXd>& centers, int per_class, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  const auto d = centers.front().size();
  Blobs b;
  b.x.resize(static_cast<Eigen::Index>(centers.size()) * per_class, d);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < per_class; ++i, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) b.x(row, j) = centers[c](j) + g(rng);
      b.y.push_back(static_cast<int>(c));
    }
  }
  return b;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  int same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoFailure;
}

}  // namespace

TEST_CASE("majority baseline") {
  const std::vector<int> labels = {0, 0, 1};
  const auto model = majority_fit(labels);
  CHECK(model.majority_class == 0);
  CHECK(model.class_count == 2);
  CHECK(majority_predict(model, 4) == std::vector<int>(4, 0));

  const std::vector<int> tie = {2, 1, 1, 2, 0};
  CHECK(majority_fit(tie, 3).majority_class == 1);
  CHECK(kind_of([] { majority_fit(std::vector<int>{}); }) == ErrorKind::EmptyTrainingSet);

  const auto scores = majority_scores(majority_fit(tie, 3), 3);
  CHECK(scores.rows() == 3);
  CHECK(scores(2, 1) == doctest::Approx(0.4));
  CHECK(argmax_rows(scores) == std::vector<int>(3, 1));
}

TEST_CASE("naive Bayes separates distant blobs") {
  const auto train = blobs({vec({0, 0}), vec({10, 10})}, 100, 1.0, 1);
  const auto test = blobs({vec({0, 0}), vec({10, 10})}, 200, 1.0, 2);
  const auto model = gnb_fit(train.x, train.y, 2);
  CHECK(model.priors.sum() == doctest::Approx(1.0));
  CHECK(model.variances.minCoeff() >= model.var_floor);
  CHECK(model.var_floor > 0.0);
  CHECK(accuracy(gnb_predict(model, test.x), test.y) == 1.0);
}

TEST_CASE("naive Bayes scores equal the direct log-density sum") {
  const auto train = blobs({vec({0, 1, 2}), vec({1, 0, -1}), vec({2, 2, 2})}, 30, 0.8, 3);
  const auto model = gnb_fit(train.x, train.y, 3);
  const auto scores = gnb_scores(model, train.x);
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      double expected = std::log(model.priors(c));
      for (Eigen::Index j = 0; j < 3; ++j) {
        const double v = model.variances(c, j);
        const double diff = train.x(i, j) - model.means(c, j);
        expected += -0.5 * std::log(2 * std::numbers::pi * v) - diff * diff / (2 * v);
      }
      CHECK(scores(i, c) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("naive Bayes edge cases") {
  SUBCASE("single class") {
    const auto train = blobs({vec({1, 1})}, 20, 1.0, 4);
    const auto model = gnb_fit(train.x, train.y, 1);
    const auto test = blobs({vec({-5, 5})}, 10, 1.0, 5);
    CHECK(gnb_predict(model, test.x) == std::vector<int>(10, 0));
  }
  SUBCASE("midpoint of symmetric classes ties toward class 0") {
    Eigen::MatrixXd x(4, 1);
    x << -2, -1, 1, 2;
    const std::vector<int> y = {0, 0, 1, 1};
    const auto model = gnb_fit(x, y, 2);
    const Eigen::MatrixXd mid = Eigen::MatrixXd::Zero(1, 1);
    const auto s = gnb_scores(model, mid);
    CHECK(std::abs(s(0, 0) - s(0, 1)) <= 1e-9);
    CHECK(gnb_predict(model, mid) == std::vector<int>{0});
  }
  SUBCASE("singleton class with zero variance stays finite") {
    Eigen::MatrixXd x(3, 2);
    x << 0, 0, 0, 1, 5, 5;
    const auto model = gnb_fit(x, std::vector<int>{0, 0, 1}, 2);
    CHECK(model.variances.minCoeff() > 0.0);
    CHECK(gnb_scores(model, x).allFinite());
  }
  SUBCASE("dimension mismatch") {
    const auto train = blobs({vec({1, 1}), vec({2, 2})}, 5, 1.0, 6);
    const auto model = gnb_fit(train.x, train.y, 2);
    CHECK(kind_of([&] { gnb_scores(model, Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 3))); }) ==
          ErrorKind::DimensionMismatch);
    CHECK(kind_of([&] { gnb_fit(train.x, std::vector<int>{0, 1}, 2); }) == ErrorKind::DimensionMismatch);
  }
  SUBCASE("sparse and dense inputs agree") {
    const auto train = blobs({vec({0, 3, 0, 1}), vec({2, 0, 1, 0})}, 20, 0.5, 7);
    Eigen::MatrixXd dense = train.x.cwiseMax(0.0);
    const SparseRows<double> sparse = dense.sparseView();
    const auto md = gnb_fit(dense, train.y, 2);
    const auto ms = gnb_fit(sparse, train.y, 2);
    CHECK((md.means - ms.means).norm() < 1e-12);
    CHECK((md.variances - ms.variances).norm() < 1e-12);
    CHECK((gnb_scores(md, dense) - gnb_scores(ms, sparse)).norm() < 1e-8);
  }
}

TEST_CASE("logistic regression fits separable blobs") {
  const auto train = blobs({vec({-3, -3}), vec({3, 3})}, 50, 1.0, 8);
  LogRegOptions opts;
  opts.max_iters = 500;
  const auto model = logreg_fit(train.x, train.y, 2, opts);
  CHECK(model.iterations <= 500);
  CHECK(accuracy(argmax_rows(logreg_proba(model, train.x)), train.y) == 1.0);
  // brute-force margin check: every point lies on its side of the boundary
  const Eigen::VectorXd w = (model.weights.row(1) - model.weights.row(0)).transpose();
  const double b = model.bias(1) - model.bias(0);
  for (Eigen::Index i = 0; i < train.x.rows(); ++i) {
    const double margin = train.x.row(i).dot(w) + b;
    CHECK((train.y[static_cast<std::size_t>(i)] == 1 ? margin > 0 : margin < 0));
  }
  for (std::size_t i = 1; i < model.loss_trace.size(); ++i) CHECK(model.loss_trace[i] <= model.loss_trace[i - 1]);
}

TEST_CASE("logistic regression probabilities and errors") {
  const auto train = blobs({vec({0, 0, 1}), vec({1, 0, 0}), vec({0, 1, 0})}, 20, 0.7, 9);
  const auto model = logreg_fit(train.x, train.y, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 50.0);
  Eigen::MatrixXd probe(30, 3);
  for (auto& v : probe.reshaped()) v = g(rng);
  const auto p = logreg_proba(model, probe);
  CHECK(p.allFinite());
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
  CHECK(kind_of([&] { logreg_fit(train.x, std::vector<int>(train.y.size(), 1), 3); }) == ErrorKind::DegenerateLabels);

  const auto again = logreg_fit(train.x, train.y, 3);
  CHECK(again.weights == model.weights);
}

TEST_CASE("logistic gradient matches central differences") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 19);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 5);
    const int c = 2 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd x(n, d), w(c, d);
    Eigen::VectorXd b(c);
    for (auto& v : x.reshaped()) v = g(rng);
    for (auto& v : w.reshaped()) v = g(rng);
    for (auto& v : b) v = g(rng);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = static_cast<int>(rng() % static_cast<std::uint64_t>(c));
    const double lambda = 0.1;
    Eigen::MatrixXd gw;
    Eigen::VectorXd gb;
    logreg_objective(x, y, w, b, lambda, &gw, &gb);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Eigen::MatrixXd wp = w, wm = w;
      wp.reshaped()(i) += h;
      wm.reshaped()(i) -= h;
      const double fd = (logreg_objective(x, y, wp, b, lambda) - logreg_objective(x, y, wm, b, lambda)) / (2 * h);
      CHECK(std::abs(fd - gw.reshaped()(i)) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      Eigen::VectorXd bp = b, bm = b;
      bp(i) += h;
      bm(i) -= h;
      const double fd = (logreg_objective(x, y, w, bp, lambda) - logreg_objective(x, y, w, bm, lambda)) / (2 * h);
      CHECK(std::abs(fd - gb(i)) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("ridge 1-d boundary at zero") {
  Eigen::MatrixXd x(4, 1);
  x << -1, -1, 1, 1;
  const std::vector<int> y = {0, 0, 1, 1};
  RidgeOptions opts;
  opts.alpha = 1e-8;
  const auto model = ridge_fit(x, y, 2, opts);
  // closed form: w = +-1 / (1 + alpha / n), bias 0
  CHECK(model.weights(1, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(model.weights(0, 0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(model.bias(0)) < 1e-12);
  Eigen::MatrixXd probe(2, 1);
  probe << -1e-3, 1e-3;
  CHECK(argmax_rows(ridge_scores(model, probe)) == std::vector<int>{0, 1});
}

TEST_CASE("ridge strong penalty falls back to the target means") {
  const auto train = blobs({vec({0, 0}), vec({4, 4}), vec({0, 4})}, 10, 1.0, 11);
  std::vector<int> y = train.y;
  y[10] = 2;  // class 2 is now the most frequent
  RidgeOptions opts;
  opts.alpha = 1e12;
  const auto model = ridge_fit(train.x, y, 3, opts);
  CHECK(model.weights.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(argmax_rows(ridge_scores(model, train.x)) == std::vector<int>(30, 2));
}

TEST_CASE("ridge solvers agree with each other and with the augmented closed form") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng() % 30);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 40);
    const int c = 2 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd x(n, d);
    for (auto& v : x.reshaped()) v = g(rng);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = static_cast<int>(rng() % static_cast<std::uint64_t>(c));
    const double alpha = 0.5;

    // oracle: [X 1] with an unpenalized last coefficient
    Eigen::MatrixXd xa(n, d + 1);
    xa << x, Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, c, -1.0);
    for (Eigen::Index i = 0; i < n; ++i) t(i, y[static_cast<std::size_t>(i)]) = 1.0;
    Eigen::MatrixXd penalty = alpha * Eigen::MatrixXd::Identity(d + 1, d + 1);
    penalty(d, d) = 0.0;
    const Eigen::MatrixXd coef = (xa.transpose() * xa + penalty).fullPivLu().solve(xa.transpose() * t);

    for (auto solver : {RidgeSolver::NormalEquations, RidgeSolver::Dual, RidgeSolver::ConjugateGradient}) {
      RidgeOptions opts;
      opts.alpha = alpha;
      opts.solver = solver;
      const auto model = ridge_fit(x, y, c, opts);
      CHECK(model.solver == solver);
      const double scale = coef.norm();
      CHECK((model.weights.transpose() - coef.topRows(d)).norm() <= 1e-6 * scale);
      CHECK((model.bias - coef.row(d).transpose()).norm() <= 1e-6 * scale);
    }
  }
}

TEST_CASE("ridge auto solver choice, sparse input and determinism") {
  std::mt19937_64 rng(13);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(40, 60);
  for (int i = 0; i < 200; ++i) dense(static_cast<Eigen::Index>(rng() % 40), static_cast<Eigen::Index>(rng() % 60)) += 1.0;
  std::vector<int> y(40);
  for (auto& v : y) v = static_cast<int>(rng() % 3);
  const SparseRows<double> sparse = dense.sparseView();
  const auto a = ridge_fit(sparse, y, 3);
  CHECK(a.solver == RidgeSolver::Dual);  // n < d
  const auto b = ridge_fit(sparse, y, 3);
  CHECK(a.weights == b.weights);
  const auto c = ridge_fit(dense, y, 3);
  CHECK((a.weights - c.weights).norm() < 1e-9);
  CHECK(ridge_fit(Eigen::MatrixXd(dense.leftCols(10)), y, 3).solver == RidgeSolver::NormalEquations);
  CHECK(ridge_scores(a, sparse).rows() == 40);
  CHECK(ridge_scores(a, sparse).cols() == 3);
  CHECK(kind_of([&] { ridge_scores(a, Eigen::MatrixXd(Eigen::MatrixXd::Zero(1, 59))); }) == ErrorKind::DimensionMismatch);
  RidgeOptions bad;
  bad.alpha = 0.0;
  CHECK(kind_of([&] { ridge_fit(dense, y, 3, bad); }) == ErrorKind::InvalidConfig);
}
