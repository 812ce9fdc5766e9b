#include "tidx/sbtree.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "tidx/varint.hpp"

namespace tidx {
namespace {

constexpr std::size_t kRefBytes = 5;
constexpr std::size_t kHeaderBytes = 5;  // kind, count, skip stream length
constexpr std::size_t kMaxSkipBytes = 5;
constexpr std::uint64_t kMaxOffset = (std::uint64_t{1} << 24);
constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

std::uint64_t range_min(const std::vector<std::uint64_t>& lcp, std::size_t from, std::size_t to) {
  std::uint64_t m = kInf;
  for (std::size_t i = from; i < to; ++i) m = std::min(m, lcp[i]);
  return m;
}

}  // namespace

Bytes encode_node(const NodePage& node, std::size_t page_size) {
  auto count = node.sp.size();
  require(count >= 1 && count <= 0xFFFF, ErrorKind::kInvalidArgument, "node key count out of range");
  require(node.lcp.size() == count - 1, ErrorKind::kInvalidArgument, "node lcp count mismatch");
  bool leaf = node.kind == NodeKind::kLeaf;
  require(leaf || node.children.size() * 2 == count, ErrorKind::kInvalidArgument,
          "internal node needs two keys per child");

  Bytes skips;
  std::uint64_t prev = 0;
  auto add_skip = [&](std::uint64_t v) {
    append_cb(skips, zigzag(static_cast<std::int64_t>(v) - static_cast<std::int64_t>(prev)));
    prev = v;
  };
  for (auto v : node.lcp) add_skip(v);
  if (leaf) add_skip(node.next_lcp);

  Bytes out;
  out.push_back(static_cast<std::uint8_t>(node.kind));
  put_le(out, count, 2);
  put_le(out, skips.size(), 2);
  for (const auto& r : node.sp) {
    require(r.text <= 0xFFFF && r.offset >= 1 && r.offset <= kMaxOffset, ErrorKind::kOutOfRange,
            "suffix reference does not fit in 5 bytes");
    put_le(out, r.text, 2);
    put_le(out, r.offset - 1, 3);
  }
  out.insert(out.end(), skips.begin(), skips.end());
  if (leaf) {
    put_le(out, node.left, 4);
    put_le(out, node.right, 4);
  } else {
    for (auto c : node.children) put_le(out, c, 4);
  }
  if (out.size() > page_size) fail(ErrorKind::kOutOfRange, "node does not fit in a page; lower b");
  return out;
}

NodePage decode_node(ByteSpan page) {
  ByteReader r(page);
  NodePage node;
  auto kind = r.le(1);
  if (kind != 1 && kind != 2) fail(ErrorKind::kCorrupt, "bad node kind");
  node.kind = static_cast<NodeKind>(kind);
  auto count = static_cast<std::size_t>(r.le(2));
  auto skip_len = static_cast<std::size_t>(r.le(2));
  if (count == 0) fail(ErrorKind::kCorrupt, "empty node");
  bool leaf = node.kind == NodeKind::kLeaf;
  if (!leaf && count % 2 != 0) fail(ErrorKind::kCorrupt, "odd key count in internal node");
  node.sp.resize(count);
  for (auto& ref : node.sp) {
    ref.text = static_cast<std::uint32_t>(r.le(2));
    ref.offset = r.le(3) + 1;
  }
  auto skips = r.take(skip_len);
  std::size_t want = leaf ? count : count - 1;
  std::int64_t acc = 0;
  std::size_t pos = 0;
  std::vector<std::uint64_t> lcps;
  for (std::size_t i = 0; i < want; ++i) {
    auto [v, next] = decode_cb(skips, pos);
    pos = next;
    acc += unzigzag(v);
    if (acc < 0) fail(ErrorKind::kCorrupt, "skip stream gives a negative lcp");
    lcps.push_back(static_cast<std::uint64_t>(acc));
  }
  if (pos != skips.size()) fail(ErrorKind::kCorrupt, "trailing bytes in skip stream");
  if (leaf) {
    node.next_lcp = lcps.back();
    lcps.pop_back();
    node.left = static_cast<PageId>(r.le(4));
    node.right = static_cast<PageId>(r.le(4));
  } else {
    node.children.resize(count / 2);
    for (auto& c : node.children) c = static_cast<PageId>(r.le(4));
  }
  node.lcp = std::move(lcps);
  return node;
}

std::size_t auto_branching(std::size_t page_size) {
  // Leaf with 2b keys: header + 2b refs + 2b skips + two sibling ids.
  std::size_t leaf_b = page_size > kHeaderBytes + 8
                           ? (page_size - kHeaderBytes - 8) / (2 * (kRefBytes + kMaxSkipBytes))
                           : 0;
  // Internal node with b children: header + 2b refs + (2b - 1) skips + b ids.
  std::size_t node_b = (page_size + kMaxSkipBytes - kHeaderBytes) / (2 * kRefBytes + 2 * kMaxSkipBytes + 4);
  auto b = std::min(leaf_b, node_b);
  require(b >= 2, ErrorKind::kInvalidArgument, "page too small for a String B-tree node");
  return b;
}

LocateResult node_locate(const std::vector<SuffixRef>& sp, const std::vector<std::uint64_t>& lcp,
                         const PatternBits& p, std::uint64_t hint, TextSource& texts,
                         std::size_t begin, std::size_t end) {
  if (end == 0) end = sp.size();
  require(begin < end && end <= sp.size() && lcp.size() + 1 >= sp.size(), ErrorKind::kInvalidArgument,
          "bad node range");
  // Phase 1: blind scan. At depth m key x has bit 0 and the key after the
  // drop has bit 1, so the pattern bit there picks the side.
  std::size_t x = begin;
  std::uint64_t m = kInf;
  for (std::size_t j = begin + 1; j < end; ++j) {
    m = std::min(m, lcp[j - 1]);
    if (p.bit(m) == 1) {
      x = j;
      m = kInf;
    }
  }

  LocateResult res;
  res.candidate = x;
  auto plen = p.bit_length();
  if (hint >= plen) {
    res.ell = plen;
  } else {
    res.ell = pattern_bit_lcp(p, sp[x], hint / kSymbolBits, texts);
    res.fetched = true;
  }

  // Phase 2: everything sharing more than ell bits with the candidate lies
  // on the same side of P.
  bool left = res.ell >= plen || p.bit(res.ell) == 0;
  if (left) {
    std::size_t y = x;
    while (y > begin && lcp[y - 1] >= res.ell) --y;
    res.r = y - begin;
  } else {
    std::size_t z = x;
    while (z + 1 < end && lcp[z] >= res.ell) ++z;
    res.r = z + 1 - begin;
  }
  return res;
}

std::uint64_t lcp_with_pattern(const std::vector<std::uint64_t>& lcp, const LocateResult& res,
                               std::size_t j) {
  auto x = res.candidate;
  if (j == x) return res.ell;
  auto lo = std::min(j, x), hi = std::max(j, x);
  return std::min(res.ell, range_min(lcp, lo, hi));
}

// ---------------------------------------------------------------------------

std::uint32_t TextStore::add(std::string_view text) {
  require(entries_.size() < 0xFFFF, ErrorKind::kOutOfRange, "too many texts");
  require(text.size() <= kMaxOffset, ErrorKind::kOutOfRange, "text longer than 16 MiB");
  Entry e;
  e.first_page = static_cast<PageId>(store_.page_count());
  e.length = text.size();
  auto page = store_.page_size();
  for (std::size_t pos = 0; pos < text.size(); pos += page)
    store_.append_page(as_bytes(text.substr(pos, page)));
  entries_.push_back(e);
  return static_cast<std::uint32_t>(entries_.size() - 1);
}

void TextStore::remove(std::uint32_t id) {
  require(id < entries_.size() && entries_[id].live, ErrorKind::kInvalidArgument, "unknown text id");
  entries_[id].live = false;
}

std::uint64_t TextStore::length(std::uint32_t text) const {
  require(text < entries_.size(), ErrorKind::kInvalidArgument, "unknown text id");
  return entries_[text].length;
}

std::string TextStore::read(std::uint32_t text, std::uint64_t from, std::uint64_t count) {
  auto len = length(text);
  if (from >= len || count == 0) return {};
  auto to = std::min(len, from + count);
  auto page = store_.page_size();
  std::string out;
  out.reserve(to - from);
  for (auto pg = from / page; pg * page < to; ++pg) {
    auto bytes = store_.read_page(static_cast<PageId>(entries_[text].first_page + pg));
    auto lo = std::max(from, pg * page) - pg * page;
    auto hi = std::min(to, (pg + 1) * page) - pg * page;
    out.append(reinterpret_cast<const char*>(bytes.data()) + lo, hi - lo);
  }
  return out;
}

// ---------------------------------------------------------------------------

StringBTree::StringBTree(PagedStore nodes, TextStore texts, std::string prefix, std::size_t b)
    : nodes_(std::move(nodes)), texts_store_(std::move(texts)), prefix_(std::move(prefix)), b_(b) {}

StringBTree StringBTree::build(const std::vector<std::string>& texts, const std::string& prefix,
                               const SbtConfig& cfg) {
  auto b = cfg.b == 0 ? auto_branching(cfg.page_size) : cfg.b;
  require(b >= 2, ErrorKind::kInvalidArgument, "branching factor must be at least 2");
  StringBTree tree(PagedStore::create(cfg.page_size, cfg.mem_budget, prefix + ".nodes"),
                   TextStore(PagedStore::create(cfg.page_size, cfg.mem_budget, prefix + ".texts")),
                   prefix, b);
  for (const auto& t : texts) {
    check_text(t);
    tree.texts_store_.add(t);
  }
  tree.texts_ = texts;
  tree.texts_loaded_ = true;

  auto cs = build_collection_sa(texts);
  std::vector<std::uint64_t> bits(cs.lcp.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = bit_lcp_from_chars(texts, cs.sa[i], cs.sa[i + 1], cs.lcp[i]);
  tree.rebuild(cs.sa, bits);
  tree.save_meta();
  return tree;
}

void StringBTree::rebuild(const std::vector<SuffixRef>& keys, const std::vector<std::uint64_t>& lcp) {
  nodes_.truncate(0);
  keys_ = keys.size();
  if (keys.empty()) {
    root_ = first_leaf_ = kNoPage;
    height_ = 0;
    leaves_ = 0;
    return;
  }
  auto page = nodes_.page_size();

  struct Child {
    PageId id;
    std::size_t first, last;  // key index range, inclusive
  };
  auto split = [](std::size_t total, std::size_t cap) {
    std::size_t groups = (total + cap - 1) / cap;
    std::vector<std::size_t> sizes(groups, total / groups);
    for (std::size_t i = 0; i < total % groups; ++i) ++sizes[i];
    return sizes;
  };

  std::vector<Child> level;
  auto leaf_sizes = split(keys.size(), 2 * b_);
  leaves_ = leaf_sizes.size();
  std::size_t s = 0;
  for (std::size_t i = 0; i < leaf_sizes.size(); ++i) {
    auto e = s + leaf_sizes[i];
    NodePage leaf;
    leaf.kind = NodeKind::kLeaf;
    leaf.sp.assign(keys.begin() + static_cast<std::ptrdiff_t>(s), keys.begin() + static_cast<std::ptrdiff_t>(e));
    leaf.lcp.assign(lcp.begin() + static_cast<std::ptrdiff_t>(s), lcp.begin() + static_cast<std::ptrdiff_t>(e - 1));
    leaf.next_lcp = i + 1 < leaf_sizes.size() ? lcp[e - 1] : 0;
    leaf.left = i > 0 ? static_cast<PageId>(i - 1) : kNoPage;
    leaf.right = i + 1 < leaf_sizes.size() ? static_cast<PageId>(i + 1) : kNoPage;
    auto id = nodes_.append_page(encode_node(leaf, page));
    level.push_back({id, s, e - 1});
    s = e;
  }
  first_leaf_ = level.front().id;
  height_ = 1;

  while (level.size() > 1) {
    std::vector<Child> up;
    std::size_t c = 0;
    for (auto n : split(level.size(), b_)) {
      NodePage node;
      node.kind = NodeKind::kInternal;
      for (std::size_t k = c; k < c + n; ++k) {
        const auto& ch = level[k];
        if (k > c) node.lcp.push_back(lcp[level[k - 1].last]);
        node.sp.push_back(keys[ch.first]);
        node.sp.push_back(keys[ch.last]);
        node.lcp.push_back(range_min(lcp, ch.first, ch.last));
        node.children.push_back(ch.id);
      }
      auto id = nodes_.append_page(encode_node(node, page));
      up.push_back({id, level[c].first, level[c + n - 1].last});
      c += n;
    }
    level = std::move(up);
    ++height_;
  }
  root_ = level.front().id;
}

void StringBTree::save_meta() {
  nlohmann::json meta;
  meta["page_size"] = nodes_.page_size();
  meta["b"] = b_;
  meta["height"] = height_;
  meta["keys"] = keys_;
  meta["leaves"] = leaves_;
  meta["root"] = root_;
  meta["first_leaf"] = first_leaf_;
  auto& texts = meta["texts"] = nlohmann::json::array();
  for (const auto& e : texts_store_.entries())
    texts.push_back({{"first_page", e.first_page}, {"length", e.length}, {"live", e.live}});
  std::ofstream out(prefix_ + ".meta");
  out << meta.dump(1) << "\n";
  if (!out) fail(ErrorKind::kIo, "cannot write " + prefix_ + ".meta");
}

StringBTree StringBTree::open(const std::string& prefix, std::size_t mem_budget) {
  std::ifstream in(prefix + ".meta");
  if (!in) fail(ErrorKind::kIo, "cannot open " + prefix + ".meta");
  nlohmann::json meta;
  try {
    in >> meta;
    std::size_t page = meta.at("page_size");
    StringBTree tree(PagedStore::open(page, mem_budget, prefix + ".nodes"),
                     TextStore(PagedStore::open(page, mem_budget, prefix + ".texts")), prefix,
                     meta.at("b").get<std::size_t>());
    tree.height_ = meta.at("height");
    tree.keys_ = meta.at("keys");
    tree.leaves_ = meta.at("leaves");
    tree.root_ = meta.at("root");
    tree.first_leaf_ = meta.at("first_leaf");
    std::vector<TextStore::Entry> entries;
    for (const auto& t : meta.at("texts"))
      entries.push_back({t.at("first_page").get<PageId>(), t.at("length").get<std::uint64_t>(),
                         t.at("live").get<bool>()});
    tree.texts_store_.set_entries(std::move(entries));
    return tree;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kCorrupt, std::string("bad tree metadata: ") + e.what());
  }
}

NodePage StringBTree::read_node(PageId id) { return decode_node(nodes_.read_page(id)); }

std::vector<SuffixRef> StringBTree::search(std::string_view p) {
  require(!p.empty(), ErrorKind::kInvalidArgument, "empty pattern");
  std::vector<SuffixRef> out;
  if (root_ == kNoPage) return out;
  PatternBits bits(p);
  auto plen = bits.bit_length();
  PageId id = root_;
  std::uint64_t hint = 0;
  for (;;) {
    auto node = read_node(id);
    auto res = node_locate(node.sp, node.lcp, bits, hint, texts_store_);
    if (node.kind == NodeKind::kInternal) {
      if (res.r == node.sp.size()) return out;
      auto c = res.r / 2;
      hint = std::min(lcp_with_pattern(node.lcp, res, 2 * c), lcp_with_pattern(node.lcp, res, 2 * c + 1));
      id = node.children[c];
      continue;
    }
    if (res.r == node.sp.size() || lcp_with_pattern(node.lcp, res, res.r) < plen) return out;
    // Collect rightward while the stored lcps say the prefix P is shared.
    std::size_t i = res.r;
    out.push_back(node.sp[i]);
    for (;;) {
      if (i + 1 < node.sp.size()) {
        if (node.lcp[i] < plen) break;
        out.push_back(node.sp[++i]);
      } else {
        if (node.right == kNoPage || node.next_lcp < plen) break;
        node = read_node(node.right);
        i = 0;
        out.push_back(node.sp[0]);
      }
    }
    break;
  }
  std::sort(out.begin(), out.end(), [](const SuffixRef& a, const SuffixRef& b) {
    return a.text != b.text ? a.text < b.text : a.offset < b.offset;
  });
  return out;
}

void StringBTree::leaf_stream(std::vector<SuffixRef>& keys, std::vector<std::uint64_t>& lcp) {
  keys.clear();
  lcp.clear();
  for (PageId id = first_leaf_; id != kNoPage;) {
    auto node = read_node(id);
    keys.insert(keys.end(), node.sp.begin(), node.sp.end());
    lcp.insert(lcp.end(), node.lcp.begin(), node.lcp.end());
    if (node.right != kNoPage) lcp.push_back(node.next_lcp);
    id = node.right;
  }
}

std::vector<SuffixRef> StringBTree::leaf_scan() {
  std::vector<SuffixRef> keys;
  std::vector<std::uint64_t> lcp;
  leaf_stream(keys, lcp);
  return keys;
}

const std::vector<std::string>& StringBTree::memory_texts() {
  if (!texts_loaded_) {
    texts_.clear();
    const auto& entries = texts_store_.entries();
    for (std::uint32_t id = 0; id < entries.size(); ++id)
      texts_.push_back(entries[id].live ? texts_store_.read(id, 0, entries[id].length) : std::string());
    texts_loaded_ = true;
  }
  return texts_;
}

std::uint32_t StringBTree::insert_text(std::string_view text) {
  require(!text.empty(), ErrorKind::kInvalidArgument, "empty text");
  check_text(text);
  memory_texts();
  auto id = texts_store_.add(text);
  texts_.emplace_back(text);

  auto cs = build_collection_sa({std::string(text)});
  for (auto& r : cs.sa) r.text = id;

  std::vector<SuffixRef> old_keys;
  std::vector<std::uint64_t> old_lcp;
  leaf_stream(old_keys, old_lcp);

  // Merge; lcps of neighbours from the same input are already known.
  std::vector<SuffixRef> keys;
  std::vector<std::uint64_t> lcp;
  keys.reserve(old_keys.size() + cs.sa.size());
  std::size_t i = 0, j = 0;
  int last_src = -1;
  while (i < old_keys.size() || j < cs.sa.size()) {
    bool take_old;
    if (i == old_keys.size()) take_old = false;
    else if (j == cs.sa.size()) take_old = true;
    else take_old = compare_keys(texts_, old_keys[i], cs.sa[j], nullptr) < 0;
    auto next = take_old ? old_keys[i] : cs.sa[j];
    int src = take_old ? 0 : 1;
    if (!keys.empty()) {
      if (src == last_src) {
        lcp.push_back(src == 0 ? old_lcp[i - 1]
                               : bit_lcp_from_chars(texts_, cs.sa[j - 1], cs.sa[j], cs.lcp[j - 1]));
      } else {
        std::uint64_t bl = 0;
        compare_keys(texts_, keys.back(), next, &bl);
        lcp.push_back(bl);
      }
    }
    keys.push_back(next);
    last_src = src;
    if (take_old) ++i;
    else ++j;
  }
  rebuild(keys, lcp);
  save_meta();
  return id;
}

void StringBTree::delete_text(std::uint32_t id) {
  texts_store_.remove(id);
  if (texts_loaded_) texts_[id].clear();

  std::vector<SuffixRef> old_keys;
  std::vector<std::uint64_t> old_lcp;
  leaf_stream(old_keys, old_lcp);
  std::vector<SuffixRef> keys;
  std::vector<std::uint64_t> lcp;
  std::uint64_t run = kInf;
  for (std::size_t k = 0; k < old_keys.size(); ++k) {
    if (k > 0) run = std::min(run, old_lcp[k - 1]);
    if (old_keys[k].text == id) continue;
    if (!keys.empty()) lcp.push_back(run);
    keys.push_back(old_keys[k]);
    run = kInf;
  }
  rebuild(keys, lcp);
  save_meta();
}

void StringBTree::reset_stats() {
  nodes_.reset_stats();
  texts_store_.store().reset_stats();
}

std::string StringBTree::validate() {
  const auto& texts = memory_texts();
  if (root_ == kNoPage) return keys_ == 0 ? "" : "missing root";
  struct Item {
    PageId id;
    std::size_t depth;
  };
  std::vector<Item> stack{{root_, 1}};
  std::size_t leaves_seen = 0;
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    auto node = read_node(id);
    auto where = " (page " + std::to_string(id) + ")";
    if (!(decode_node(encode_node(node, nodes_.page_size())) == node)) return "skip round trip failed" + where;
    for (std::size_t i = 0; i + 1 < node.sp.size(); ++i) {
      std::uint64_t bl = 0;
      if (compare_keys(texts, node.sp[i], node.sp[i + 1], &bl) >= 0) return "keys not increasing" + where;
      if (node.kind == NodeKind::kLeaf && bl != node.lcp[i]) return "leaf lcp mismatch" + where;
      if (node.kind == NodeKind::kInternal && bl != node.lcp[i]) return "internal lcp mismatch" + where;
    }
    if (node.kind == NodeKind::kLeaf) {
      ++leaves_seen;
      if (depth != height_) return "leaf at wrong depth" + where;
      if (node.sp.size() > 2 * b_) return "leaf overfull" + where;
      if (node.right != kNoPage) {
        auto right = read_node(node.right);
        std::uint64_t bl = 0;
        compare_keys(texts, node.sp.back(), right.sp.front(), &bl);
        if (bl != node.next_lcp) return "next_lcp mismatch" + where;
      } else if (node.next_lcp != 0) {
        return "next_lcp on last leaf" + where;
      }
      continue;
    }
    auto n = node.children.size();
    if (n > b_) return "internal node overfull" + where;
    if (id == root_ ? n < 2 : 2 * n < b_) return "internal node underfull" + where;
    for (std::size_t c = 0; c < n; ++c) {
      auto child = read_node(node.children[c]);
      if (!(child.sp.front() == node.sp[2 * c]) || !(child.sp.back() == node.sp[2 * c + 1]))
        return "child bounds mismatch" + where;
      stack.push_back({node.children[c], depth + 1});
    }
  }
  if (leaves_seen != leaves_) return "leaf count mismatch";
  if (leaf_scan().size() != keys_) return "leaf scan length mismatch";
  return "";
}

}  // namespace tidx
