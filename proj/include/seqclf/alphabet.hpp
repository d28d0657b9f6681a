#pragma once

#include <array>
#include <string_view>

namespace seqclf {

/// The 21 amino-acid symbols in canonical order. Position in this string is
/// the symbol's index everywhere (k-mer coding, one-hot blocks, histograms).
inline constexpr std::string_view kAlphabet = "ACDEFGHIKLMNPQRSTVWXY";
inline constexpr int kAlphabetSize = 21;
inline constexpr char kStopSymbol = '*';

namespace detail {
constexpr std::array<signed char, 256> make_residue_table() {
  std::array<signed char, 256> table{};
  table.fill(-1);
  for (int i = 0; i < kAlphabetSize; ++i) table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<signed char>(i);
  return table;
}
inline constexpr auto kResidueTable = make_residue_table();
}  // namespace detail

/// Index of `c` in the alphabet, or -1.
constexpr int residue_index(char c) noexcept {
  return detail::kResidueTable[static_cast<unsigned char>(c)];
}

constexpr bool is_residue(char c) noexcept { return residue_index(c) >= 0; }

}  // namespace seqclf
