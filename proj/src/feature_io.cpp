#include "seqclf/feature_io.hpp"

#include <ostream>
#include <vector>

#include <json.hpp>

#include "seqclf/binary_io.hpp"

namespace seqclf {

namespace {
constexpr std::string_view kMagic = "SQFV1";
}

void write_features(std::ostream& out, const SparseMatrix& features, Encoding encoding) {
  SparseMatrix compressed = features;
  compressed.makeCompressed();
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  binary::write<std::uint8_t>(out, static_cast<std::uint8_t>(encoding));
  binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(compressed.cols()));
  binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(compressed.rows()));
  binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(compressed.nonZeros()));
  for (Eigen::Index i = 0; i <= compressed.rows(); ++i) {
    binary::write<std::uint64_t>(out, static_cast<std::uint64_t>(compressed.outerIndexPtr()[i]));
  }
  for (Eigen::Index i = 0; i < compressed.nonZeros(); ++i) {
    binary::write<std::uint32_t>(out, static_cast<std::uint32_t>(compressed.innerIndexPtr()[i]));
  }
  binary::write_array(out, compressed.valuePtr(), static_cast<std::size_t>(compressed.nonZeros()));
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing feature container");
}

FeatureFile read_features(std::istream& in) {
  binary::expect_magic(in, kMagic);
  const auto tag = binary::read<std::uint8_t>(in);
  if (tag > static_cast<std::uint8_t>(Encoding::Rff)) {
    throw Error(ErrorKind::MalformedFile, "unknown encoding tag " + std::to_string(tag));
  }
  const auto dim = binary::read<std::uint64_t>(in);
  const auto rows = binary::read<std::uint64_t>(in);
  const auto nnz = binary::read<std::uint64_t>(in);

  std::vector<std::uint64_t> row_ptr(rows + 1);
  binary::read_array(in, row_ptr.data(), row_ptr.size());
  if (row_ptr.front() != 0 || row_ptr.back() != nnz) throw Error(ErrorKind::MalformedFile, "inconsistent row pointers");
  std::vector<std::uint32_t> cols(nnz);
  binary::read_array(in, cols.data(), cols.size());

  FeatureFile file;
  file.encoding = static_cast<Encoding>(tag);
  file.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  file.features.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  for (std::size_t i = 0; i <= rows; ++i) {
    if (i > 0 && row_ptr[i] < row_ptr[i - 1]) throw Error(ErrorKind::MalformedFile, "row pointers not monotone");
    file.features.outerIndexPtr()[i] = static_cast<SparseMatrix::StorageIndex>(row_ptr[i]);
  }
  for (std::size_t i = 0; i < nnz; ++i) {
    if (cols[i] >= dim) throw Error(ErrorKind::MalformedFile, "column index out of range");
    file.features.innerIndexPtr()[i] = static_cast<SparseMatrix::StorageIndex>(cols[i]);
  }
  binary::read_array(in, file.features.valuePtr(), nnz);
  return file;
}

void write_features_csv(std::ostream& out, const SparseMatrix& features) {
  out << "row,column,value\n";
  for (Eigen::Index r = 0; r < features.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(features, r); it; ++it) {
      out << r << ',' << it.col() << ',' << nlohmann::json(it.value()).dump() << '\n';
    }
  }
}

std::string labels_json(const std::vector<int>& labels, const std::vector<std::string>& class_names) {
  nlohmann::json j;
  j["labels"] = labels;
  j["class_names"] = class_names;
  return j.dump(2);
}

}  // namespace seqclf
