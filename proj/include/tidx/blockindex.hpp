#pragma once

// Block-addressing inverted index. The collection is cut into blocks of about
// block_size bytes (a block always ends at a token end), each term's posting
// list records the 1-based ids of the blocks it occurs in, and the blocks are
// kept Huffword-compressed on pages. A query reads only its candidate blocks
// and searches them without decompressing.
//
// File layout (one paged file): pages 0..h-1 hold a u64 length and the
// header blob, the block payloads follow, each starting on a fresh page.
//   header: "BIX1" page_size(4) block_size(4)
//           model: len(8) HWM1
//           vocabulary (LEB128 fields): count, per term: len bytes freq posting offset posting bytes
//           postings: len(8) gap-coded block ids
//           blocks: count, per block: page pages dt bytes source offset source bytes

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/huffword.hpp"
#include "tidx/pager.hpp"

namespace tidx {

struct BlockConfig {
  std::size_t block_size = 4096;
  std::size_t page_size = 4096;
  std::size_t mem_budget = std::size_t{1} << 20;
};

struct BlockEntry {
  PageId first_page = 0;  // relative to the first payload page
  std::size_t page_count = 0;
  std::size_t dt_bytes = 0;
  std::uint64_t source_offset = 0;
  std::uint64_t source_bytes = 0;
};

struct BlockBuildReport {
  std::size_t runs = 0;  // sorted runs of (term, block) pairs spilled
  IoStats sort_io;
  IoStats index_io;
};

class BlockIndex {
 public:
  /// Texts are indexed as one collection; offsets are into their
  /// concatenation. No block straddles two texts.
  static BlockIndex build(const std::vector<std::string_view>& texts, const std::string& path,
                          const BlockConfig& cfg = {}, BlockBuildReport* report = nullptr);
  /// Page size is read from the file header.
  static BlockIndex open(const std::string& path, std::size_t mem_budget = std::size_t{1} << 20);

  /// Ascending 0-based offsets of the token w in the collection.
  std::vector<std::uint64_t> query_word(std::string_view w);
  /// Words (not separators) starting with p, each with its offsets.
  std::map<std::string, std::vector<std::uint64_t>> query_prefix(std::string_view p);

  /// 1-based ids of the blocks containing the term; empty if absent.
  std::vector<std::uint64_t> postings(std::string_view term) const;
  std::size_t block_size() const { return block_size_; }
  std::size_t block_count() const { return blocks_.size(); }
  const BlockEntry& block(std::size_t id) const { return blocks_.at(id - 1); }
  /// Absolute page ids holding block `id` (1-based).
  std::vector<PageId> block_pages(std::size_t id) const;
  std::size_t header_pages() const { return header_pages_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const HuffwordModel& model() const { return *model_; }
  bool empty() const { return !model_.has_value(); }

  std::string decode_block(std::size_t id);
  std::string decode_all();

  IoStats io() const { return store_.io_stats(); }
  void reset_stats() { store_.reset_stats(); }

 private:
  explicit BlockIndex(PagedStore store) : store_(std::move(store)) {}
  void load_header(ByteSpan blob);
  Bytes read_block(std::size_t id);
  /// Source offsets of the codewords starting at the given DT offsets.
  std::vector<std::uint64_t> map_offsets(std::size_t id, ByteSpan dt, const std::vector<std::size_t>& at) const;

  PagedStore store_;
  std::size_t block_size_ = 0;
  std::size_t header_pages_ = 0;
  std::optional<HuffwordModel> model_;
  std::vector<std::string> terms_;  // ascending
  std::vector<std::uint64_t> freq_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> posting_span_;  // offset, bytes
  Bytes postings_;
  std::vector<BlockEntry> blocks_;
};

struct CorpusStats {
  std::uint64_t n_tokens = 0;  // word tokens
  std::uint64_t vocab_size = 0;
  double heaps_beta = 0;
  double zipf_theta = 0;
  double heaps_residual = 0;  // RMS of the log-log fit
  double zipf_residual = 0;
  std::size_t heaps_points = 0;
  std::size_t zipf_points = 0;
};

/// Needs more than 100 word tokens and 2 distinct words.
CorpusStats corpus_stats(const std::vector<std::string_view>& texts);

}  // namespace tidx
