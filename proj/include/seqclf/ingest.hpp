#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqclf {

/// One FASTA record. `residues` may carry a single trailing stop '*' straight
/// out of the parser; everything after ingest sees stop-free sequences.
struct SequenceRecord {
  std::string id;
  std::string residues;

  bool operator==(const SequenceRecord&) const = default;
};

struct LabelHierarchy {
  std::string continent;
  std::string country;
  std::optional<std::string> state;

  bool operator==(const LabelHierarchy&) const = default;
};

struct LabeledSequence {
  SequenceRecord record;
  LabelHierarchy label;

  bool operator==(const LabeledSequence&) const = default;
};

enum class ClassLevel { Continent, Country, State };

std::string_view to_string(ClassLevel level) noexcept;
ClassLevel parse_class_level(std::string_view text);

/// The label string at the requested level. Throws MissingLabel for an
/// absent state.
const std::string& label_at(const LabelHierarchy& label, ClassLevel level);

struct SplitSpec {
  double train_fraction = 0.10;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct MetadataRow {
  std::string id;
  LabelHierarchy label;
};

struct JoinResult {
  std::vector<LabeledSequence> labeled;
  std::size_t dropped = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct TrainTestSplit {
  std::vector<LabeledSequence> train;
  std::vector<LabeledSequence> test;
};

/// Removes one trailing stop character, if present.
std::string_view strip_stop(std::string_view residues) noexcept;

/// Reads FASTA text. Headers start with '>', the record id is the header text
/// up to the first whitespace, sequence lines are concatenated with all
/// whitespace removed. Residues are validated against the amino-acid alphabet
/// plus one optional trailing '*'.
std::vector<SequenceRecord> parse_fasta(std::istream& in);

/// Writes records wrapped at `line_width` residues per line.
void write_fasta(std::ostream& out, std::span<const SequenceRecord> records,
                 std::size_t line_width = 60);

/// Reads the `id<TAB>continent<TAB>country<TAB>state` table. The header line is
/// mandatory; the state column may be empty or absent.
std::vector<MetadataRow> read_metadata_tsv(std::istream& in);

/// Inner join on record id, preserving record order and stripping stops.
JoinResult join_metadata(std::vector<SequenceRecord> records, std::span<const MetadataRow> metadata);

/// Partition of [0, labels.size()) into train and test index sets, each in
/// ascending order. In stratified mode every class contributes
/// floor(f * n_c) items plus a largest-remainder share of what is left, so the
/// total is always round(f * n).
SplitIndices split_indices(std::span<const int> labels, const SplitSpec& spec);

TrainTestSplit split_train_test(std::span<const LabeledSequence> data, const SplitSpec& spec,
                                ClassLevel level);

}  // namespace seqclf
