#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "seqclf/ingest.hpp"

namespace seqclf {

/// Binary corpus of labeled, stop-stripped sequences:
///
///   "SQCORP1"  magic
///   count      u64
///   per record: id, continent, country (u32 length + bytes each),
///               has_state u8, [state], residues
void write_corpus(std::ostream& out, std::span<const LabeledSequence> corpus);
std::vector<LabeledSequence> read_corpus(std::istream& in);

void save_corpus(const std::filesystem::path& path, std::span<const LabeledSequence> corpus);
std::vector<LabeledSequence> load_corpus(const std::filesystem::path& path);

}  // namespace seqclf
