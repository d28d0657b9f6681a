#include "seqclf/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "seqclf/error.hpp"
#include "seqclf/parallel.hpp"

namespace seqclf {

std::string_view to_string(Encoding encoding) noexcept {
  switch (encoding) {
    case Encoding::KmerCounts: return "kmers";
    case Encoding::OneHot: return "ohe";
    case Encoding::Rff: return "rff";
  }
  return "kmers";
}

void KmerSpec::validate() const {
  if (k < 1 || k > kMaxK) {
    throw Error(ErrorKind::InvalidConfig, "k must lie in [1, " + std::to_string(kMaxK) + "], got " + std::to_string(k));
  }
}

std::int64_t KmerSpec::dim() const {
  validate();
  std::int64_t d = 1;
  for (int i = 0; i < k; ++i) d *= kAlphabetSize;
  return d;
}

std::int64_t kmer_index(std::string_view kmer) {
  std::int64_t index = 0;
  for (std::size_t i = 0; i < kmer.size(); ++i) {
    const int r = residue_index(kmer[i]);
    if (r < 0) {
      throw Error(ErrorKind::InvalidResidue, "k-mer '" + std::string(kmer) + "' position " + std::to_string(i + 1) +
                                                 ": '" + std::string(1, kmer[i]) + "' is not in the alphabet");
    }
    index = index * kAlphabetSize + r;
  }
  return index;
}

std::string kmer_decode(std::int64_t index, int k) {
  std::string kmer(static_cast<std::size_t>(k), kAlphabet[0]);
  for (int i = k - 1; i >= 0; --i) {
    kmer[static_cast<std::size_t>(i)] = kAlphabet[static_cast<std::size_t>(index % kAlphabetSize)];
    index /= kAlphabetSize;
  }
  return kmer;
}

namespace {

void check_residues(const SequenceRecord& seq, std::string_view residues) {
  for (std::size_t i = 0; i < residues.size(); ++i) {
    if (!is_residue(residues[i])) {
      throw Error(ErrorKind::InvalidResidue, "record '" + seq.id + "' position " + std::to_string(i + 1) + ": '" +
                                                 std::string(1, residues[i]) + "' is not in the alphabet");
    }
  }
}

}  // namespace

FeatureVector kmer_vector(const SequenceRecord& seq, const KmerSpec& spec) {
  const std::int64_t dim = spec.dim();
  const auto residues = strip_stop(seq.residues);
  const auto k = static_cast<std::size_t>(spec.k);
  if (residues.size() < k) {
    throw Error(ErrorKind::SequenceTooShort, "record '" + seq.id + "' has " + std::to_string(residues.size()) +
                                                 " residues, fewer than k = " + std::to_string(spec.k));
  }
  check_residues(seq, residues);

  // Rolling base-21 code: drop the leading symbol, shift, append.
  const std::int64_t lead = dim / kAlphabetSize;
  std::vector<std::int32_t> codes;
  codes.reserve(residues.size() - k + 1);
  std::int64_t code = 0;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    if (i >= k) code -= lead * residue_index(residues[i - k]);
    code = code * kAlphabetSize + residue_index(residues[i]);
    if (i + 1 >= k) codes.push_back(static_cast<std::int32_t>(code));
  }
  std::sort(codes.begin(), codes.end());

  FeatureVector fv;
  fv.encoding = Encoding::KmerCounts;
  fv.values.resize(dim);
  fv.values.reserve(static_cast<Eigen::Index>(codes.size()));
  double norm2 = 0.0;
  for (std::size_t i = 0; i < codes.size();) {
    std::size_t j = i;
    while (j < codes.size() && codes[j] == codes[i]) ++j;
    const auto count = static_cast<double>(j - i);
    fv.values.insertBack(codes[i]) = count;
    norm2 += count * count;
    i = j;
  }
  if (spec.l2_normalize) fv.values /= std::sqrt(norm2);
  return fv;
}

FeatureVector ohe_vector(const SequenceRecord& seq, Eigen::Index expected_len) {
  const auto residues = strip_stop(seq.residues);
  if (expected_len < 1 || static_cast<Eigen::Index>(residues.size()) != expected_len) {
    throw Error(ErrorKind::LengthMismatch, "record '" + seq.id + "' has " + std::to_string(residues.size()) +
                                               " residues, expected " + std::to_string(expected_len));
  }
  check_residues(seq, residues);
  FeatureVector fv;
  fv.encoding = Encoding::OneHot;
  fv.values.resize(kAlphabetSize * expected_len);
  fv.values.reserve(expected_len);
  for (Eigen::Index p = 0; p < expected_len; ++p) {
    fv.values.insertBack(kAlphabetSize * p + residue_index(residues[static_cast<std::size_t>(p)])) = 1.0;
  }
  return fv;
}

ClassTable::ClassTable(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

ClassTable ClassTable::from_corpus(std::span<const LabeledSequence> data, ClassLevel level) {
  std::set<std::string> names;
  for (const auto& item : data) {
    try {
      names.insert(label_at(item.label, level));
    } catch (const Error& e) {
      throw Error(e.kind(), "record '" + item.record.id + "' has no " + std::string(to_string(level)) + " label");
    }
  }
  return ClassTable(std::vector<std::string>(names.begin(), names.end()));
}

int ClassTable::id_of(std::string_view name) const {
  const auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) {
    throw Error(ErrorKind::LabelOutOfRange, "class '" + std::string(name) + "' is not in the class table");
  }
  return static_cast<int>(it - names_.begin());
}

std::vector<int> ClassTable::encode(std::span<const LabeledSequence> data, ClassLevel level) const {
  std::vector<int> ids;
  ids.reserve(data.size());
  for (const auto& item : data) {
    try {
      ids.push_back(id_of(label_at(item.label, level)));
    } catch (const Error& e) {
      throw Error(e.kind(), "record '" + item.record.id + "': " + e.what());
    }
  }
  return ids;
}

FeatureOptions resolve_options(FeatureOptions options, std::span<const LabeledSequence> data) {
  if (options.encoding == Encoding::KmerCounts) options.kmer.validate();
  if (options.encoding == Encoding::OneHot && options.expected_len == 0 && !data.empty()) {
    options.expected_len = static_cast<Eigen::Index>(strip_stop(data.front().record.residues).size());
  }
  if (options.encoding == Encoding::Rff) {
    throw Error(ErrorKind::InvalidConfig, "RFF is a projection of k-mer or one-hot rows, not a raw encoding");
  }
  return options;
}

std::int64_t feature_dim(const FeatureOptions& options) {
  switch (options.encoding) {
    case Encoding::KmerCounts: return options.kmer.dim();
    case Encoding::OneHot: return kAlphabetSize * static_cast<std::int64_t>(options.expected_len);
    case Encoding::Rff: break;
  }
  throw Error(ErrorKind::InvalidConfig, "no raw dimension for RFF");
}

SparseMatrix featurize_rows(std::span<const LabeledSequence> data, const FeatureOptions& options_in,
                            unsigned threads) {
  if (data.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no sequences");
  const FeatureOptions options = resolve_options(options_in, data);
  const auto dim = feature_dim(options);

  std::vector<SparseVector> rows(data.size());
  parallel_for(data.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& seq = data[i].record;
      rows[i] = options.encoding == Encoding::KmerCounts ? kmer_vector(seq, options.kmer).values
                                                         : ohe_vector(seq, options.expected_len).values;
    }
  });

  SparseMatrix matrix(static_cast<Eigen::Index>(data.size()), dim);
  std::vector<Eigen::Index> offsets(rows.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) offsets[i + 1] = offsets[i] + rows[i].nonZeros();
  matrix.resizeNonZeros(offsets.back());
  auto* outer = matrix.outerIndexPtr();
  for (std::size_t i = 0; i <= rows.size(); ++i) outer[i] = static_cast<SparseMatrix::StorageIndex>(offsets[i]);
  parallel_for(rows.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto nnz = rows[i].nonZeros();
      std::copy_n(rows[i].innerIndexPtr(), nnz, matrix.innerIndexPtr() + offsets[i]);
      std::copy_n(rows[i].valuePtr(), nnz, matrix.valuePtr() + offsets[i]);
    }
  });
  return matrix;
}

FeaturizedCorpus featurize_corpus(std::span<const LabeledSequence> data, const FeatureOptions& options,
                                  ClassLevel level, unsigned threads) {
  if (data.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no sequences");
  const auto table = ClassTable::from_corpus(data, level);
  FeaturizedCorpus corpus;
  corpus.encoding = options.encoding;
  corpus.features = featurize_rows(data, options, threads);
  corpus.labels = table.encode(data, level);
  corpus.class_names = table.names();
  return corpus;
}

}  // namespace seqclf
