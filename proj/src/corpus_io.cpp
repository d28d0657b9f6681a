#include "seqclf/corpus_io.hpp"

#include <fstream>

#include "seqclf/binary_io.hpp"

namespace seqclf {

namespace {
constexpr std::string_view kMagic = "SQCORP1";
}

void write_corpus(std::ostream& out, std::span<const LabeledSequence> corpus) {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  binary::write<std::uint64_t>(out, corpus.size());
  for (const auto& item : corpus) {
    binary::write_string(out, item.record.id);
    binary::write_string(out, item.label.continent);
    binary::write_string(out, item.label.country);
    binary::write<std::uint8_t>(out, item.label.state ? 1 : 0);
    if (item.label.state) binary::write_string(out, *item.label.state);
    binary::write_string(out, item.record.residues);
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing corpus");
}

std::vector<LabeledSequence> read_corpus(std::istream& in) {
  binary::expect_magic(in, kMagic);
  const auto count = binary::read<std::uint64_t>(in);
  std::vector<LabeledSequence> corpus;
  corpus.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) {
    LabeledSequence item;
    item.record.id = binary::read_string(in);
    item.label.continent = binary::read_string(in);
    item.label.country = binary::read_string(in);
    if (binary::read<std::uint8_t>(in) != 0) item.label.state = binary::read_string(in);
    item.record.residues = binary::read_string(in);
    corpus.push_back(std::move(item));
  }
  return corpus;
}

void save_corpus(const std::filesystem::path& path, std::span<const LabeledSequence> corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "' for writing");
  write_corpus(out, corpus);
}

std::vector<LabeledSequence> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open corpus '" + path.string() + "'");
  return read_corpus(in);
}

}  // namespace seqclf
