#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "seqclf/alphabet.hpp"
#include "seqclf/ingest.hpp"

namespace seqclf {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SparseVector = Eigen::SparseVector<double>;

enum class Encoding : std::uint8_t { KmerCounts = 0, OneHot = 1, Rff = 2 };

std::string_view to_string(Encoding encoding) noexcept;

struct KmerSpec {
  int k = 3;
  /// Scale each vector to unit Euclidean norm (useful ahead of RFF).
  bool l2_normalize = false;

  static constexpr int kMaxK = 6;

  void validate() const;
  /// 21^k.
  std::int64_t dim() const;
};

struct FeatureVector {
  Encoding encoding = Encoding::KmerCounts;
  SparseVector values;

  Eigen::Index dim() const noexcept { return values.size(); }
};

/// Base-21 positional code of a k-mer, leftmost symbol most significant.
std::int64_t kmer_index(std::string_view kmer);

/// Inverse of kmer_index for a given k.
std::string kmer_decode(std::int64_t index, int k);

/// Overlapping k-mer counts; a trailing stop is ignored.
FeatureVector kmer_vector(const SequenceRecord& seq, const KmerSpec& spec);

/// Per-position indicator blocks: position p with symbol r sets 21*p + r.
FeatureVector ohe_vector(const SequenceRecord& seq, Eigen::Index expected_len);

struct FeatureOptions {
  Encoding encoding = Encoding::KmerCounts;
  KmerSpec kmer;
  /// Required residue length for one-hot; 0 means "length of the first row".
  Eigen::Index expected_len = 0;
};

/// Dense class ids assigned by sorted class name.
class ClassTable {
 public:
  ClassTable() = default;
  explicit ClassTable(std::vector<std::string> names);

  static ClassTable from_corpus(std::span<const LabeledSequence> data, ClassLevel level);

  int id_of(std::string_view name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  int size() const noexcept { return static_cast<int>(names_.size()); }

  std::vector<int> encode(std::span<const LabeledSequence> data, ClassLevel level) const;

 private:
  std::vector<std::string> names_;
};

struct FeaturizedCorpus {
  Encoding encoding = Encoding::KmerCounts;
  SparseMatrix features;  // one row per sequence, input order
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

/// Feature rows for a corpus. Rows are computed independently across
/// `threads` workers and assembled in input order, so the result does not
/// depend on the thread count. Per-sequence failures carry the sequence id.
SparseMatrix featurize_rows(std::span<const LabeledSequence> data, const FeatureOptions& options,
                            unsigned threads = 1);

FeaturizedCorpus featurize_corpus(std::span<const LabeledSequence> data, const FeatureOptions& options,
                                  ClassLevel level, unsigned threads = 1);

/// Resolves expected_len = 0 against the corpus.
FeatureOptions resolve_options(FeatureOptions options, std::span<const LabeledSequence> data);

std::int64_t feature_dim(const FeatureOptions& options);

}  // namespace seqclf
