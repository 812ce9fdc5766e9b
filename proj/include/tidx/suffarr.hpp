#pragma once

// Suffix arrays with 1-based offsets. The implicit terminator sorts above
// every byte, so a suffix that is a proper prefix of another sorts after it.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/pager.hpp"

namespace tidx {

using SuffixArray = std::vector<std::uint64_t>;
using LcpArray = std::vector<std::uint64_t>;

/// Throws kInvalidArgument if t contains 0x00.
void check_text(std::string_view t);

/// 0-based suffix order of an integer string over [0, sigma) by prefix
/// doubling. end_high puts the end-of-string above every symbol, otherwise
/// below.
std::vector<std::uint32_t> sort_suffixes(const std::vector<std::uint32_t>& s, std::uint32_t sigma,
                                         bool end_high);
/// lcp[k] = common prefix of suffixes sa[k] and sa[k+1] (0-based sa).
std::vector<std::uint32_t> kasai_lcp(const std::vector<std::uint32_t>& s,
                                     const std::vector<std::uint32_t>& sa);

SuffixArray build_sa_internal(std::string_view t);
LcpArray build_lcp(std::string_view t, const SuffixArray& sa);

/// Ascending 1-based positions where p occurs.
std::vector<std::uint64_t> sa_search(std::string_view t, const SuffixArray& sa, std::string_view p);

struct StageReport {
  std::size_t stage = 0;
  std::size_t merged_suffixes = 0;
  IoStats io;
};

struct IncrementalReport {
  std::vector<StageReport> stages;
};

/// Builds the array in ceil(n/m) stages, keeping the running array on
/// `store` (which must be empty). Memory needed: 9m bytes for the text
/// block, the in-memory array and the counters, plus two pages of buffer.
SuffixArray build_sa_incremental(std::string_view t, std::size_t m, PagedStore& store,
                                 IncrementalReport* report = nullptr);

// Collections of texts. A suffix is (text id, 1-based offset); ties between
// identical suffixes of different texts go to the lower text id.
struct SuffixRef {
  std::uint32_t text = 0;
  std::uint64_t offset = 0;
  friend bool operator==(const SuffixRef&, const SuffixRef&) = default;
};

struct CollectionSa {
  std::vector<SuffixRef> sa;
  std::vector<std::uint64_t> lcp;  // in characters, size sa.size() - 1
};

CollectionSa build_collection_sa(const std::vector<std::string>& texts);

void save_sa(const std::string& path, const SuffixArray& sa);
SuffixArray load_sa(const std::string& path);

}  // namespace tidx
