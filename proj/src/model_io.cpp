#include "seqclf/model_io.hpp"

#include "seqclf/binary_io.hpp"
#include "seqclf/error.hpp"

namespace seqclf {

namespace {

constexpr std::string_view kMagic = "SQMDL";

void write_header(std::ostream& out, ModelTag tag) {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  binary::write<std::uint16_t>(out, kModelFormatVersion);
  binary::write<std::uint8_t>(out, static_cast<std::uint8_t>(tag));
}

void expect_tag(std::istream& in, ModelTag expected) {
  const auto tag = read_model_header(in);
  if (tag != expected) {
    throw Error(ErrorKind::MalformedFile, "expected a " + std::string(to_string(expected)) + " model, found " +
                                              std::string(to_string(tag)));
  }
}

template <typename Derived>
void write_tensor(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
  const Eigen::MatrixXd dense = m.template cast<double>();
  binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(dense.rows()));
  binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(dense.cols()));
  binary::write_array(out, dense.data(), static_cast<std::size_t>(dense.size()));
}

Eigen::MatrixXd read_tensor(std::istream& in) {
  const auto rows = binary::read<std::uint64_t>(in);
  const auto cols = binary::read<std::uint64_t>(in);
  if (rows > (1ULL << 32) || cols > (1ULL << 32) || rows * cols > (1ULL << 33)) {
    throw Error(ErrorKind::MalformedFile, "implausible tensor shape");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  binary::read_array(in, m.data(), static_cast<std::size_t>(m.size()));
  return m;
}

Eigen::VectorXd read_vector(std::istream& in) {
  Eigen::MatrixXd m = read_tensor(in);
  if (m.cols() != 1) throw Error(ErrorKind::MalformedFile, "expected a column vector");
  return m.col(0);
}

void write_trace(std::ostream& out, std::span<const double> trace) {
  binary::write<std::uint64_t>(out, trace.size());
  binary::write_array(out, trace.data(), trace.size());
}

std::vector<double> read_trace(std::istream& in) {
  const auto size = binary::read<std::uint64_t>(in);
  if (size > (1ULL << 32)) throw Error(ErrorKind::MalformedFile, "implausible loss trace length");
  std::vector<double> trace(size);
  binary::read_array(in, trace.data(), trace.size());
  return trace;
}

void check_written(std::ostream& out) {
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing model");
}

}  // namespace

std::string_view to_string(ModelTag tag) noexcept {
  switch (tag) {
    case ModelTag::Majority: return "majority";
    case ModelTag::GaussianNb: return "nb";
    case ModelTag::LogisticRegression: return "lr";
    case ModelTag::Ridge: return "ridge";
    case ModelTag::NeuralNet: return "nn";
  }
  return "unknown";
}

ModelTag read_model_header(std::istream& in) {
  binary::expect_magic(in, kMagic);
  const auto version = binary::read<std::uint16_t>(in);
  if (version != kModelFormatVersion) {
    throw Error(ErrorKind::MalformedFile, "unsupported model format version " + std::to_string(version));
  }
  const auto tag = binary::read<std::uint8_t>(in);
  if (tag > static_cast<std::uint8_t>(ModelTag::NeuralNet)) {
    throw Error(ErrorKind::MalformedFile, "unknown model tag " + std::to_string(tag));
  }
  return static_cast<ModelTag>(tag);
}

void save_model(std::ostream& out, const MajorityModel& model) {
  write_header(out, ModelTag::Majority);
  binary::write<std::int32_t>(out, model.majority_class);
  binary::write<std::int32_t>(out, model.class_count);
  write_trace(out, model.priors);
  check_written(out);
}

MajorityModel load_majority(std::istream& in) {
  expect_tag(in, ModelTag::Majority);
  MajorityModel model;
  model.majority_class = binary::read<std::int32_t>(in);
  model.class_count = binary::read<std::int32_t>(in);
  model.priors = read_trace(in);
  if (model.class_count < 1 || model.majority_class < 0 || model.majority_class >= model.class_count ||
      model.priors.size() != static_cast<std::size_t>(model.class_count)) {
    throw Error(ErrorKind::MalformedFile, "inconsistent MAJORITY model");
  }
  return model;
}

void save_model(std::ostream& out, const GaussianNbModel<double>& model) {
  write_header(out, ModelTag::GaussianNb);
  binary::write<double>(out, model.var_floor);
  write_tensor(out, model.priors);
  write_tensor(out, model.means);
  write_tensor(out, model.variances);
  check_written(out);
}

GaussianNbModel<double> load_gnb(std::istream& in) {
  expect_tag(in, ModelTag::GaussianNb);
  GaussianNbModel<double> model;
  model.var_floor = binary::read<double>(in);
  model.priors = read_vector(in);
  model.means = read_tensor(in);
  model.variances = read_tensor(in);
  if (model.means.rows() != model.priors.size() || model.variances.rows() != model.means.rows() ||
      model.variances.cols() != model.means.cols()) {
    throw Error(ErrorKind::MalformedFile, "inconsistent naive Bayes tensors");
  }
  return model;
}

void save_model(std::ostream& out, const LogisticRegressionModel<double>& model) {
  write_header(out, ModelTag::LogisticRegression);
  binary::write<double>(out, model.options.l2_lambda);
  binary::write<std::int32_t>(out, model.options.max_iters);
  binary::write<double>(out, model.options.tol);
  binary::write<std::uint64_t>(out, model.options.seed);
  binary::write<std::int32_t>(out, model.iterations);
  binary::write<std::uint8_t>(out, model.converged ? 1 : 0);
  write_tensor(out, model.weights);
  write_tensor(out, model.bias);
  write_trace(out, model.loss_trace);
  check_written(out);
}

LogisticRegressionModel<double> load_logreg(std::istream& in) {
  expect_tag(in, ModelTag::LogisticRegression);
  LogisticRegressionModel<double> model;
  model.options.l2_lambda = binary::read<double>(in);
  model.options.max_iters = binary::read<std::int32_t>(in);
  model.options.tol = binary::read<double>(in);
  model.options.seed = binary::read<std::uint64_t>(in);
  model.iterations = binary::read<std::int32_t>(in);
  model.converged = binary::read<std::uint8_t>(in) != 0;
  model.weights = read_tensor(in);
  model.bias = read_vector(in);
  model.loss_trace = read_trace(in);
  if (model.bias.size() != model.weights.rows()) throw Error(ErrorKind::MalformedFile, "inconsistent logistic tensors");
  return model;
}

void save_model(std::ostream& out, const RidgeClassifierModel<double>& model) {
  write_header(out, ModelTag::Ridge);
  binary::write<double>(out, model.alpha);
  binary::write<std::uint8_t>(out, static_cast<std::uint8_t>(model.solver));
  write_tensor(out, model.weights);
  write_tensor(out, model.bias);
  check_written(out);
}

RidgeClassifierModel<double> load_ridge(std::istream& in) {
  expect_tag(in, ModelTag::Ridge);
  RidgeClassifierModel<double> model;
  model.alpha = binary::read<double>(in);
  const auto solver = binary::read<std::uint8_t>(in);
  if (solver > static_cast<std::uint8_t>(RidgeSolver::ConjugateGradient)) {
    throw Error(ErrorKind::MalformedFile, "unknown ridge solver tag");
  }
  model.solver = static_cast<RidgeSolver>(solver);
  model.weights = read_tensor(in);
  model.bias = read_vector(in);
  if (model.bias.size() != model.weights.rows()) throw Error(ErrorKind::MalformedFile, "inconsistent ridge tensors");
  return model;
}

void save_model(std::ostream& out, const NetConfig& config, const FeedForwardNet<double>& net) {
  write_header(out, ModelTag::NeuralNet);
  binary::write<std::int64_t>(out, config.input_dim);
  binary::write<std::int64_t>(out, config.resolved_hidden());
  binary::write<std::int32_t>(out, config.class_count);
  binary::write<std::int32_t>(out, config.batch_size);
  binary::write<std::int32_t>(out, config.epochs);
  binary::write<double>(out, config.adam.learning_rate);
  binary::write<double>(out, config.adam.beta1);
  binary::write<double>(out, config.adam.beta2);
  binary::write<double>(out, config.adam.epsilon);
  binary::write<std::uint64_t>(out, config.seed);
  write_tensor(out, net.w1);
  write_tensor(out, net.b1);
  write_tensor(out, net.w2);
  write_tensor(out, net.b2);
  check_written(out);
}

FeedForwardNet<double> load_net(std::istream& in, NetConfig* config) {
  expect_tag(in, ModelTag::NeuralNet);
  NetConfig c;
  c.input_dim = binary::read<std::int64_t>(in);
  c.hidden_width = binary::read<std::int64_t>(in);
  c.class_count = binary::read<std::int32_t>(in);
  c.batch_size = binary::read<std::int32_t>(in);
  c.epochs = binary::read<std::int32_t>(in);
  c.adam.learning_rate = binary::read<double>(in);
  c.adam.beta1 = binary::read<double>(in);
  c.adam.beta2 = binary::read<double>(in);
  c.adam.epsilon = binary::read<double>(in);
  c.seed = binary::read<std::uint64_t>(in);
  FeedForwardNet<double> net;
  net.w1 = read_tensor(in);
  net.b1 = read_vector(in);
  net.w2 = read_tensor(in);
  net.b2 = read_vector(in);
  if (net.w1.rows() != c.hidden_width || net.w1.cols() != c.input_dim || net.b1.size() != c.hidden_width ||
      net.w2.rows() != c.class_count || net.w2.cols() != c.hidden_width || net.b2.size() != c.class_count) {
    throw Error(ErrorKind::MalformedFile, "network tensors do not match the stored config");
  }
  if (config) *config = c;
  return net;
}

nlohmann::json model_summary(const MajorityModel& model) {
  return {{"model", "majority"},
          {"class_count", model.class_count},
          {"majority_class", model.majority_class},
          {"priors", model.priors}};
}

nlohmann::json model_summary(const GaussianNbModel<double>& model) {
  return {{"model", "nb"},
          {"class_count", model.class_count()},
          {"input_dim", model.dim()},
          {"likelihood", "gaussian"},
          {"var_floor", model.var_floor}};
}

nlohmann::json model_summary(const LogisticRegressionModel<double>& model) {
  return {{"model", "lr"},
          {"class_count", model.weights.rows()},
          {"input_dim", model.weights.cols()},
          {"l2_lambda", model.options.l2_lambda},
          {"max_iters", model.options.max_iters},
          {"tol", model.options.tol},
          {"iterations", model.iterations},
          {"converged", model.converged},
          {"loss_trace", model.loss_trace}};
}

nlohmann::json model_summary(const RidgeClassifierModel<double>& model) {
  return {{"model", "ridge"},
          {"class_count", model.weights.rows()},
          {"input_dim", model.weights.cols()},
          {"alpha", model.alpha},
          {"solver", to_string(model.solver)}};
}

nlohmann::json model_summary(const NetConfig& config, std::span<const double> loss_trace) {
  return {{"model", "nn"},
          {"class_count", config.class_count},
          {"input_dim", config.input_dim},
          {"hidden_width", config.resolved_hidden()},
          {"batch_size", config.batch_size},
          {"epochs", config.epochs},
          {"learning_rate", config.adam.learning_rate},
          {"beta1", config.adam.beta1},
          {"beta2", config.adam.beta2},
          {"epsilon", config.adam.epsilon},
          {"seed", config.seed},
          {"loss_trace", std::vector<double>(loss_trace.begin(), loss_trace.end())}};
}

void write_loss_trace_csv(std::ostream& out, std::span<const double> loss_trace) {
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < loss_trace.size(); ++i) {
    out << (i + 1) << ',' << nlohmann::json(loss_trace[i]).dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing loss trace");
}

nlohmann::json rff_header(const RffProjector<double>& projector) {
  return {{"input_dim", projector.input_dim()},
          {"output_dim", projector.output_dim()},
          {"gamma", projector.gamma()},
          {"seed", projector.seed()}};
}

}  // namespace seqclf
