#include "seqclf/infogain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "seqclf/alphabet.hpp"
#include "seqclf/error.hpp"
#include "seqclf/features.hpp"
#include "seqclf/parallel.hpp"
#include "seqclf/random.hpp"

namespace seqclf {

double entropy(std::span<const double> probabilities) {
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw Error(ErrorKind::NotNormalized, "negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::NotNormalized, "probabilities sum to " + std::to_string(sum));
  }
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy_of_counts(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

IgResult information_gain(std::span<const LabeledSequence> sequences, ClassLevel level, unsigned threads) {
  if (sequences.empty()) throw Error(ErrorKind::EmptyCorpus, "no sequences for information gain");

  const auto length = strip_stop(sequences.front().record.residues).size();
  std::vector<std::string> ragged;
  for (const auto& s : sequences) {
    if (strip_stop(s.record.residues).size() != length) ragged.push_back(s.record.id);
  }
  if (!ragged.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < ragged.size() && i < 10; ++i) ids += (i ? ", " : "") + ragged[i];
    if (ragged.size() > 10) ids += ", ...";
    throw Error(ErrorKind::RaggedLengths, std::to_string(ragged.size()) + " sequence(s) differ from length " +
                                              std::to_string(length) + " of '" + sequences.front().record.id +
                                              "': " + ids);
  }

  const auto table = ClassTable::from_corpus(sequences, level);
  if (table.size() < 2) throw Error(ErrorKind::SingleClass, "information gain needs at least two classes");
  const auto labels = table.encode(sequences, level);
  const auto classes = static_cast<Eigen::Index>(table.size());

  std::vector<std::int64_t> class_counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++class_counts[static_cast<std::size_t>(y)];
  const double h_class = entropy_of_counts(class_counts);
  const double n = static_cast<double>(sequences.size());

  IgResult result;
  result.class_names = table.names();
  result.table.sequence_length = length;
  result.table.class_entropy = h_class;
  result.table.ig_bits.assign(length, 0.0);
  result.histograms.resize(length);

  parallel_for(length, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::int64_t> row(static_cast<std::size_t>(classes));
    for (std::size_t p = begin; p < end; ++p) {
      auto& dist = result.histograms[p];
      dist.position = p;
      dist.counts.setZero(kAlphabetSize, classes);
      for (std::size_t i = 0; i < sequences.size(); ++i) {
        const int symbol = residue_index(sequences[i].record.residues[p]);
        if (symbol < 0) {
          throw Error(ErrorKind::InvalidResidue, "record '" + sequences[i].record.id + "' position " +
                                                     std::to_string(p + 1));
        }
        ++dist.counts(symbol, labels[i]);
      }
      dist.total = static_cast<std::int64_t>(sequences.size());

      double conditional = 0.0;
      for (int s = 0; s < kAlphabetSize; ++s) {
        std::int64_t symbol_total = 0;
        for (Eigen::Index c = 0; c < classes; ++c) {
          row[static_cast<std::size_t>(c)] = dist.counts(s, c);
          symbol_total += dist.counts(s, c);
        }
        if (symbol_total == 0) continue;
        conditional += static_cast<double>(symbol_total) / n * entropy_of_counts(row);
      }
      result.table.ig_bits[p] = std::clamp(h_class - conditional, 0.0, h_class);
    }
  });
  return result;
}

std::vector<LabeledSequence> subsample(std::span<const LabeledSequence> data, std::size_t size, std::uint64_t seed) {
  if (size == 0 || size >= data.size()) return {data.begin(), data.end()};
  auto perm = random_permutation(data.size(), seed);
  perm.resize(size);
  std::sort(perm.begin(), perm.end());
  std::vector<LabeledSequence> out;
  out.reserve(size);
  for (auto i : perm) out.push_back(data[i]);
  return out;
}

void export_ig(std::ostream& out, const IgTable& table) {
  out << "position,information_gain\n";
  for (std::size_t p = 0; p < table.ig_bits.size(); ++p) {
    out << (p + 1) << ',' << nlohmann::json(table.ig_bits[p]).dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing information gain table");
}

void export_ig(const std::string& path, const IgTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
  export_ig(out, table);
}

IgTable parse_ig_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "position,information_gain") {
    throw Error(ErrorKind::MalformedFile, "missing 'position,information_gain' header");
  }
  IgTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::MalformedFile, "bad IG row '" + line + "'");
    const auto position = std::stoull(line.substr(0, comma));
    if (position != table.ig_bits.size() + 1) throw Error(ErrorKind::MalformedFile, "positions must be 1, 2, ...");
    table.ig_bits.push_back(std::stod(line.substr(comma + 1)));
  }
  table.sequence_length = table.ig_bits.size();
  return table;
}

std::string ig_histograms_json(const IgResult& result) {
  nlohmann::json j;
  j["class_names"] = result.class_names;
  j["class_entropy_bits"] = result.table.class_entropy;
  auto& positions = j["positions"] = nlohmann::json::array();
  for (std::size_t p = 0; p < result.histograms.size(); ++p) {
    const auto& dist = result.histograms[p];
    nlohmann::json entry;
    entry["position"] = p + 1;
    entry["information_gain"] = result.table.ig_bits[p];
    nlohmann::json symbols = nlohmann::json::object();
    for (int s = 0; s < kAlphabetSize; ++s) {
      if (dist.counts.row(s).sum() == 0) continue;
      std::vector<std::int64_t> per_class(dist.counts.row(s).begin(), dist.counts.row(s).end());
      symbols[std::string(1, kAlphabet[static_cast<std::size_t>(s)])] = per_class;
    }
    entry["symbol_class_counts"] = std::move(symbols);
    positions.push_back(std::move(entry));
  }
  return j.dump();
}

}  // namespace seqclf
