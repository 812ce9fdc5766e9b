#pragma once

// Paged String B-tree over the suffixes of a text collection. Nodes hold
// only suffix references and skip-coded bit lcps; routing uses a two-phase
// scan that reads a single suffix per node.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/bitkey.hpp"
#include "tidx/pager.hpp"
#include "tidx/suffarr.hpp"

namespace tidx {

enum class NodeKind : std::uint8_t { kLeaf = 1, kInternal = 2 };

/// Decoded node page. Offsets in `sp` are 1-based (0-based on disk).
///
/// lcp[i] is the bit lcp of sp[i] and sp[i+1]. Internal nodes hold the
/// leftmost and rightmost key of each child, so sp.size() == 2 *
/// children.size(). Leaves additionally carry next_lcp, the bit lcp of their
/// last key with the first key of the right sibling (0 without one).
struct NodePage {
  NodeKind kind = NodeKind::kLeaf;
  std::vector<SuffixRef> sp;
  std::vector<std::uint64_t> lcp;
  std::uint64_t next_lcp = 0;
  std::vector<PageId> children;
  PageId left = kNoPage;
  PageId right = kNoPage;

  friend bool operator==(const NodePage&, const NodePage&) = default;
};

/// Throws kOutOfRange if the encoding does not fit in page_size.
Bytes encode_node(const NodePage& node, std::size_t page_size);
/// Throws kCorrupt on malformed pages, including negative lcp prefix sums.
NodePage decode_node(ByteSpan page);

/// Largest b whose worst-case leaf (2b keys) and internal node (b children)
/// encodings fit in a page.
std::size_t auto_branching(std::size_t page_size);

struct LocateResult {
  std::size_t r = 0;       // keys in [begin, end) smaller than P
  std::uint64_t ell = 0;   // bit lcp of P with the candidate key
  std::size_t candidate = 0;
  bool fetched = false;    // whether a suffix was read from `texts`
};

/// Two-phase search of P among sp[begin, end) (end = 0 means sp.size()).
/// Keys having P as a prefix count as not smaller than P. `hint` is a
/// number of leading bits of P known to match every key in the range.
LocateResult node_locate(const std::vector<SuffixRef>& sp, const std::vector<std::uint64_t>& lcp,
                         const PatternBits& p, std::uint64_t hint, TextSource& texts,
                         std::size_t begin = 0, std::size_t end = 0);

/// Bit lcp of P with sp[j], derived from a locate result without text access.
std::uint64_t lcp_with_pattern(const std::vector<std::uint64_t>& lcp, const LocateResult& res,
                               std::size_t j);

/// Texts laid out on consecutive pages of their own store.
class TextStore : public TextSource {
 public:
  struct Entry {
    PageId first_page = 0;
    std::uint64_t length = 0;
    bool live = true;
  };

  explicit TextStore(PagedStore store) : store_(std::move(store)) {}

  std::uint32_t add(std::string_view text);
  void remove(std::uint32_t id);
  std::uint64_t length(std::uint32_t text) const override;
  std::string read(std::uint32_t text, std::uint64_t from, std::uint64_t count) override;

  const std::vector<Entry>& entries() const { return entries_; }
  void set_entries(std::vector<Entry> e) { entries_ = std::move(e); }
  PagedStore& store() { return store_; }

 private:
  PagedStore store_;
  std::vector<Entry> entries_;
};

struct SbtConfig {
  std::size_t page_size = 4096;
  std::size_t mem_budget = std::size_t{1} << 20;
  std::size_t b = 0;  // 0 = auto_branching(page_size)
};

/// Tree files: <prefix>.nodes, <prefix>.texts and <prefix>.meta.
class StringBTree {
 public:
  static StringBTree build(const std::vector<std::string>& texts, const std::string& prefix,
                           const SbtConfig& cfg = {});
  static StringBTree open(const std::string& prefix, std::size_t mem_budget);

  /// Ascending (text id, 1-based offset) occurrences of p.
  std::vector<SuffixRef> search(std::string_view p);

  /// Adds a text and returns its id; ids are never reused.
  std::uint32_t insert_text(std::string_view text);
  void delete_text(std::uint32_t id);

  /// Left-to-right leaf scan.
  std::vector<SuffixRef> leaf_scan();
  NodePage read_node(PageId id);

  /// Checks every page invariant against the in-memory texts. Returns
  /// an empty string when the tree is valid.
  std::string validate();

  std::size_t branching() const { return b_; }
  std::size_t height() const { return height_; }
  std::uint64_t key_count() const { return keys_; }
  std::size_t leaf_count() const { return leaves_; }
  std::size_t text_count() const { return texts_.size(); }
  PageId root() const { return root_; }

  IoStats node_io() const { return nodes_.io_stats(); }
  IoStats text_io() { return texts_store_.store().io_stats(); }
  void reset_stats();
  PagedStore& node_store() { return nodes_; }
  TextStore& text_store() { return texts_store_; }

 private:
  StringBTree(PagedStore nodes, TextStore texts, std::string prefix, std::size_t b);

  const std::vector<std::string>& memory_texts();
  void rebuild(const std::vector<SuffixRef>& keys, const std::vector<std::uint64_t>& lcp);
  void leaf_stream(std::vector<SuffixRef>& keys, std::vector<std::uint64_t>& lcp);
  void save_meta();

  PagedStore nodes_;
  TextStore texts_store_;
  std::string prefix_;
  std::size_t b_ = 0;
  std::size_t height_ = 0;
  std::uint64_t keys_ = 0;
  std::size_t leaves_ = 0;
  PageId root_ = kNoPage;
  PageId first_leaf_ = kNoPage;
  std::vector<std::string> texts_;
  bool texts_loaded_ = false;
};

}  // namespace tidx
