#pragma once

// Randomized external string sorting. Strings are cut into L-bit pieces, each
// piece is replaced by a short hashed name, the name sequences are sorted,
// and the order is then repaired using ranks of the mismatching pieces
// between neighbours. All indices in this API are 0-based.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/pager.hpp"

namespace tidx {

/// 2 * max(1, ceil(log2 k)).
unsigned name_bits_for(std::size_t k);

/// Piece length in bits suggested by the I/O analysis: log_m(n) * log2(K),
/// with n = N/B pages and m = M/B, rounded up to whole bytes and clamped to
/// at least 8 bytes.
std::size_t recommended_piece_bits(std::uint64_t total_bytes, std::size_t mem_budget,
                                   std::size_t page_size, std::size_t k);

class PieceNamer {
 public:
  /// Hash-based names of name_bits_for(k) bits.
  static PieceNamer seeded(std::size_t k, std::uint64_t seed);
  /// Fixed piece -> name table; names must fit in name_bits.
  static PieceNamer table(unsigned name_bits, std::map<std::string, std::uint64_t> names);

  unsigned name_bits() const { return bits_; }
  bool is_table() const { return !table_.empty(); }
  std::uint64_t name(std::string_view piece) const;

 private:
  unsigned bits_ = 0;
  std::uint64_t seed_ = 0;
  std::map<std::string, std::uint64_t, std::less<>> table_;
};

struct CString {
  std::vector<std::uint64_t> names;
  std::size_t source = 0;
};

std::vector<CString> make_cstrings(const std::vector<std::string>& s, std::size_t piece_bits,
                                   const PieceNamer& namer);

struct MarkedSort {
  std::vector<CString> sorted;
  /// lcp[x] = names shared by sorted[x] and sorted[x+1].
  std::vector<std::size_t> lcp;
  /// Marked name positions of each sorted c-string (at most two, ascending).
  std::vector<std::vector<std::size_t>> marks;
};

/// Sorts by name sequence (shorter prefix first, stable). With a scratch
/// store the sort runs through the external merge sorter.
MarkedSort sort_and_mark(std::vector<CString> c, PagedStore* scratch = nullptr);

/// Marked piece -> dense 1-based rank.
using RankTable = std::map<std::string, std::uint32_t>;

/// Throws ErrorKind::kCollision if two unequal marked pieces at the same
/// piece position share a name.
RankTable rank_marked(const std::vector<std::string>& s, const MarkedSort& m,
                      std::size_t piece_bits);

/// Table columns in sorted-c-string order, zero padded to the longest
/// c-string. Filled only when requested.
struct ResolveTrace {
  std::vector<std::vector<std::uint32_t>> after_rightward;
  std::vector<std::vector<std::uint32_t>> after_leftward;
  std::vector<std::vector<std::uint32_t>> sorted_columns;
  std::vector<std::size_t> sorted_sources;
};

std::vector<std::size_t> resolve_and_sort(const std::vector<std::string>& s, const MarkedSort& m,
                                          const RankTable& ranks, std::size_t piece_bits,
                                          PagedStore* scratch = nullptr,
                                          ResolveTrace* trace = nullptr);

struct SortConfig {
  std::size_t piece_bits = 128;
  std::uint64_t seed = 1;
  unsigned max_retries = 32;
  PagedStore* scratch = nullptr;
};

struct SortOutcome {
  std::vector<std::size_t> order;
  unsigned attempts = 0;
  unsigned rank_collisions = 0;
  unsigned verify_failures = 0;
};

/// Lexicographic order of s, ties by index. Each attempt uses a fresh seed;
/// an attempt is rejected when rank_marked detects a collision or when the
/// final adjacent-pair check finds an inversion.
SortOutcome sort_strings_detailed(const std::vector<std::string>& s, const SortConfig& cfg = {});
std::vector<std::size_t> sort_strings(const std::vector<std::string>& s, const SortConfig& cfg = {});

/// Single attempt with a given namer (used with injected tables); throws
/// kCollision on a detected collision or failed verification.
std::vector<std::size_t> sort_strings_once(const std::vector<std::string>& s, std::size_t piece_bits,
                                           const PieceNamer& namer, PagedStore* scratch = nullptr);

}  // namespace tidx
