#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seqclf/features.hpp"

namespace seqclf {

/// Binary feature container, little-endian:
///
///   "SQFV1"            5 bytes magic
///   encoding tag       u8   (0 k-mer counts, 1 one-hot, 2 RFF)
///   dim                u64
///   rows               u64
///   nnz                u64
///   row_ptr[rows + 1]  u64
///   col[nnz]           u32
///   value[nnz]         f64
struct FeatureFile {
  Encoding encoding = Encoding::KmerCounts;
  SparseMatrix features;
};

void write_features(std::ostream& out, const SparseMatrix& features, Encoding encoding);
FeatureFile read_features(std::istream& in);

/// `row,column,value` triplets with a header line, zero-based indices.
void write_features_csv(std::ostream& out, const SparseMatrix& features);

/// Sidecar JSON: {"labels": [...], "class_names": [...]}.
std::string labels_json(const std::vector<int>& labels, const std::vector<std::string>& class_names);

}  // namespace seqclf
