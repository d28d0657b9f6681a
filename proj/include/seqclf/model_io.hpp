#pragma once

// Versioned binary model blobs and JSON summaries.
//
// Blob layout: "SQMDL" magic, u16 version, u8 model tag, then the model's
// hyperparameters and tensors. Tensors are u64 rows, u64 cols, f64 column-major.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "seqclf/linear_models.hpp"
#include "seqclf/neural_net.hpp"
#include "seqclf/rff.hpp"

namespace seqclf {

enum class ModelTag : std::uint8_t { Majority = 0, GaussianNb = 1, LogisticRegression = 2, Ridge = 3, NeuralNet = 4 };

inline constexpr std::uint16_t kModelFormatVersion = 1;

std::string_view to_string(ModelTag tag) noexcept;

void save_model(std::ostream& out, const MajorityModel& model);
void save_model(std::ostream& out, const GaussianNbModel<double>& model);
void save_model(std::ostream& out, const LogisticRegressionModel<double>& model);
void save_model(std::ostream& out, const RidgeClassifierModel<double>& model);
/// Checkpoint: network config plus the four tensors.
void save_model(std::ostream& out, const NetConfig& config, const FeedForwardNet<double>& net);

/// Reads the header and returns the tag; throws MalformedFile on a bad magic
/// or an unsupported version.
ModelTag read_model_header(std::istream& in);

// Each loader reads the header itself and checks the tag.
MajorityModel load_majority(std::istream& in);
GaussianNbModel<double> load_gnb(std::istream& in);
LogisticRegressionModel<double> load_logreg(std::istream& in);
RidgeClassifierModel<double> load_ridge(std::istream& in);
FeedForwardNet<double> load_net(std::istream& in, NetConfig* config = nullptr);

nlohmann::json model_summary(const MajorityModel& model);
nlohmann::json model_summary(const GaussianNbModel<double>& model);
nlohmann::json model_summary(const LogisticRegressionModel<double>& model);
nlohmann::json model_summary(const RidgeClassifierModel<double>& model);
nlohmann::json model_summary(const NetConfig& config, std::span<const double> loss_trace);

/// "epoch,loss" rows, epochs 1-based.
void write_loss_trace_csv(std::ostream& out, std::span<const double> loss_trace);

/// Everything needed to rebuild a projector: dimensions, gamma and seed.
nlohmann::json rff_header(const RffProjector<double>& projector);

}  // namespace seqclf
