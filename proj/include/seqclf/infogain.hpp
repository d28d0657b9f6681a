#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seqclf/ingest.hpp"

namespace seqclf {

/// Base-2 Shannon entropy with 0 log 0 = 0. Throws NotNormalized unless the
/// entries are non-negative and sum to 1 within 1e-9.
double entropy(std::span<const double> probabilities);

/// Entropy of a histogram of counts; skips the normalization check.
double entropy_of_counts(std::span<const std::int64_t> counts);

/// Symbol-by-class counts at one alignment position: rows are the 21
/// alphabet symbols, columns are class ids.
struct PositionDistribution {
  std::size_t position = 0;  // zero-based
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::int64_t total = 0;
};

struct IgTable {
  std::size_t sequence_length = 0;
  std::vector<double> ig_bits;  // one entry per position, zero-based index
  double class_entropy = 0.0;
};

struct IgResult {
  IgTable table;
  std::vector<PositionDistribution> histograms;
  std::vector<std::string> class_names;
};

/// IG(C, P) = H(C) - sum_s P(s) H(C | s) at every position of an aligned
/// corpus. Sequences must share one length after stop stripping.
IgResult information_gain(std::span<const LabeledSequence> sequences, ClassLevel level, unsigned threads = 1);

/// Uniform sample without replacement of `size` items (the whole corpus when
/// `size` is 0 or not smaller than the corpus), in original order.
std::vector<LabeledSequence> subsample(std::span<const LabeledSequence> data, std::size_t size, std::uint64_t seed);

/// `position,information_gain` with 1-based positions.
void export_ig(std::ostream& out, const IgTable& table);
void export_ig(const std::string& path, const IgTable& table);
IgTable parse_ig_csv(std::istream& in);

/// Per-position per-symbol class histograms as JSON.
std::string ig_histograms_json(const IgResult& result);

}  // namespace seqclf
