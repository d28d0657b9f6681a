#include "seqclf/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "seqclf/alphabet.hpp"
#include "seqclf/error.hpp"
#include "seqclf/random.hpp"

namespace seqclf {

std::string_view to_string(ClassLevel level) noexcept {
  switch (level) {
    case ClassLevel::Continent: return "continent";
    case ClassLevel::Country: return "country";
    case ClassLevel::State: return "state";
  }
  return "continent";
}

ClassLevel parse_class_level(std::string_view text) {
  if (text == "continent") return ClassLevel::Continent;
  if (text == "country") return ClassLevel::Country;
  if (text == "state") return ClassLevel::State;
  throw Error(ErrorKind::InvalidConfig, "unknown class level '" + std::string(text) + "'");
}

const std::string& label_at(const LabelHierarchy& label, ClassLevel level) {
  switch (level) {
    case ClassLevel::Continent: return label.continent;
    case ClassLevel::Country: return label.country;
    case ClassLevel::State:
      if (!label.state || label.state->empty()) throw Error(ErrorKind::MissingLabel, "no state label");
      return *label.state;
  }
  return label.continent;
}

std::string_view strip_stop(std::string_view residues) noexcept {
  if (!residues.empty() && residues.back() == kStopSymbol) residues.remove_suffix(1);
  return residues;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct PendingRecord {
  SequenceRecord record;
  std::size_t header_line = 0;
  std::size_t stop_position = 0;  // 1-based position of a '*', 0 if none yet
  std::size_t stop_line = 0;
};

void finish_record(PendingRecord& pending, std::vector<SequenceRecord>& out,
                   std::unordered_set<std::string>& seen) {
  const auto& residues = pending.record.residues;
  if (strip_stop(residues).empty()) {
    throw Error(ErrorKind::MalformedFasta, "record '" + pending.record.id + "' (line " +
                                               std::to_string(pending.header_line) +
                                               ") has an empty sequence body");
  }
  if (!seen.insert(pending.record.id).second) {
    throw Error(ErrorKind::DuplicateRecordId,
                "record id '" + pending.record.id + "' repeated at line " + std::to_string(pending.header_line));
  }
  out.push_back(std::move(pending.record));
}

}  // namespace

std::vector<SequenceRecord> parse_fasta(std::istream& in) {
  std::vector<SequenceRecord> records;
  std::unordered_set<std::string> seen;
  std::optional<PendingRecord> pending;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() == '>') {
      if (pending) finish_record(*pending, records, seen);
      auto header = trim(std::string_view(line).substr(1));
      const auto id_end = std::find_if(header.begin(), header.end(), is_space);
      std::string id(header.begin(), id_end);
      if (id.empty()) {
        throw Error(ErrorKind::MalformedFasta, "empty record id at line " + std::to_string(line_no));
      }
      pending = PendingRecord{SequenceRecord{std::move(id), {}}, line_no, 0, 0};
      continue;
    }
    for (char c : line) {
      if (is_space(c)) continue;
      if (!pending) {
        throw Error(ErrorKind::MalformedFasta,
                    "sequence data before the first header at line " + std::to_string(line_no));
      }
      auto& residues = pending->record.residues;
      if (pending->stop_position != 0) {
        // a stop is only legal as the very last character
        throw Error(ErrorKind::InvalidResidue, "record '" + pending->record.id + "' position " +
                                                   std::to_string(pending->stop_position) +
                                                   ": '*' before the end of the sequence (line " +
                                                   std::to_string(pending->stop_line) + ")");
      }
      if (c == kStopSymbol) {
        pending->stop_position = residues.size() + 1;
        pending->stop_line = line_no;
      } else if (!is_residue(c)) {
        throw Error(ErrorKind::InvalidResidue, "record '" + pending->record.id + "' position " +
                                                   std::to_string(residues.size() + 1) + ": '" +
                                                   std::string(1, c) + "' is not in the alphabet (line " +
                                                   std::to_string(line_no) + ")");
      }
      residues.push_back(c);
    }
  }
  if (pending) finish_record(*pending, records, seen);
  return records;
}

void write_fasta(std::ostream& out, std::span<const SequenceRecord> records, std::size_t line_width) {
  if (line_width == 0) line_width = 60;
  for (const auto& record : records) {
    out << '>' << record.id << '\n';
    for (std::size_t pos = 0; pos < record.residues.size(); pos += line_width) {
      out << std::string_view(record.residues).substr(pos, line_width) << '\n';
    }
  }
}

std::vector<MetadataRow> read_metadata_tsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<MetadataRow> rows;

  auto split_tabs = [](std::string_view s) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = s.find('\t', start);
      fields.push_back(s.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    return fields;
  };

  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);
    if (!header_seen) {
      if (fields.size() < 3 || trim(fields[0]) != "id" || trim(fields[1]) != "continent" ||
          trim(fields[2]) != "country" || (fields.size() >= 4 && trim(fields[3]) != "state") ||
          fields.size() > 4) {
        throw Error(ErrorKind::MalformedMetadata,
                    "expected header 'id<TAB>continent<TAB>country<TAB>state' at line " + std::to_string(line_no));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      throw Error(ErrorKind::MalformedMetadata,
                  "expected 3 or 4 tab-separated fields at line " + std::to_string(line_no));
    }
    MetadataRow row;
    row.id = std::string(trim(fields[0]));
    row.label.continent = std::string(trim(fields[1]));
    row.label.country = std::string(trim(fields[2]));
    if (fields.size() == 4 && !trim(fields[3]).empty()) row.label.state = std::string(trim(fields[3]));
    if (row.id.empty() || row.label.continent.empty() || row.label.country.empty()) {
      throw Error(ErrorKind::MalformedMetadata,
                  "id, continent and country must be non-empty at line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorKind::MalformedMetadata, "metadata table has no header");
  return rows;
}

JoinResult join_metadata(std::vector<SequenceRecord> records, std::span<const MetadataRow> metadata) {
  std::unordered_map<std::string_view, const LabelHierarchy*> by_id;
  by_id.reserve(metadata.size());
  for (const auto& row : metadata) {
    if (!by_id.emplace(row.id, &row.label).second) {
      throw Error(ErrorKind::DuplicateMetadataKey, "metadata id '" + row.id + "' appears more than once");
    }
  }
  JoinResult result;
  for (auto& record : records) {
    const auto it = by_id.find(record.id);
    if (it == by_id.end()) {
      ++result.dropped;
      continue;
    }
    record.residues.resize(strip_stop(record.residues).size());
    result.labeled.push_back(LabeledSequence{std::move(record), *it->second});
  }
  if (result.labeled.empty()) {
    throw Error(ErrorKind::EmptyJoin, "no sequence id matched the metadata table");
  }
  return result;
}

SplitIndices split_indices(std::span<const int> labels, const SplitSpec& spec) {
  const std::size_t n = labels.size();
  if (n == 0) throw Error(ErrorKind::EmptyCorpus, "cannot split an empty data set");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "train fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));

  std::vector<char> in_train(n, 0);
  if (!spec.stratified) {
    auto perm = random_permutation(n, spec.seed);
    for (std::size_t i = 0; i < n_train; ++i) in_train[perm[i]] = 1;
  } else {
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);

    struct Quota {
      int label;
      std::size_t take;
      double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (const auto& [label, idx] : members) {
      if (idx.size() < 2) {
        throw Error(ErrorKind::ClassTooSmall,
                    "class " + std::to_string(label) + " has a single member; stratified split needs at least 2");
      }
      const double exact = spec.train_fraction * static_cast<double>(idx.size());
      const auto floor = static_cast<std::size_t>(std::floor(exact));
      quotas.push_back({label, floor, exact - static_cast<double>(floor)});
      assigned += floor;
    }
    // Largest remainder; ties go to the smaller class label.
    std::vector<std::size_t> order(quotas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
    for (std::size_t i = 0; assigned < n_train && i < order.size(); ++i, ++assigned) ++quotas[order[i]].take;

    for (const auto& quota : quotas) {
      auto idx = members[quota.label];
      RngStream rng(spec.seed, static_cast<std::uint64_t>(static_cast<std::uint32_t>(quota.label)) + 1);
      shuffle(idx, rng);
      for (std::size_t i = 0; i < quota.take; ++i) in_train[idx[i]] = 1;
    }
  }

  SplitIndices split;
  split.train.reserve(n_train);
  split.test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? split.train : split.test).push_back(i);
  return split;
}

TrainTestSplit split_train_test(std::span<const LabeledSequence> data, const SplitSpec& spec, ClassLevel level) {
  std::map<std::string, int> ids;
  for (const auto& item : data) ids.emplace(label_at(item.label, level), 0);
  int next = 0;
  for (auto& [name, id] : ids) id = next++;
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& item : data) labels.push_back(ids.at(label_at(item.label, level)));

  const auto split = split_indices(labels, spec);
  TrainTestSplit out;
  for (auto i : split.train) out.train.push_back(data[i]);
  for (auto i : split.test) out.test.push_back(data[i]);
  return out;
}

}  // namespace seqclf
