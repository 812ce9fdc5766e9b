#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tidx/bitkey.hpp"
#include "tidx/sbtree.hpp"
#include "tidx/supra.hpp"
#include "test_util.hpp"

using namespace tidx;
using tidx::testing::TempDir;

namespace {

// Counts reads and remembers the last suffix touched.
class CountingTexts : public TextSource {
 public:
  explicit CountingTexts(const std::vector<std::string>& t) : inner_(t) {}
  std::uint64_t length(std::uint32_t text) const override { return inner_.length(text); }
  std::string read(std::uint32_t text, std::uint64_t from, std::uint64_t count) override {
    ++reads;
    return inner_.read(text, from, count);
  }
  int reads = 0;

 private:
  MemoryTexts inner_;
};

// Key < P: first differing character is smaller in the key; a key that ends
// first is larger (terminator above bytes); P-prefixed keys are not smaller.
bool key_less(std::string_view suffix, std::string_view p) {
  auto n = std::min(suffix.size(), p.size());
  for (std::size_t i = 0; i < n; ++i)
    if (suffix[i] != p[i]) return static_cast<std::uint8_t>(suffix[i]) < static_cast<std::uint8_t>(p[i]);
  return false;
}

std::string_view suffix(const std::vector<std::string>& t, SuffixRef r) {
  return std::string_view(t[r.text]).substr(r.offset - 1);
}

std::uint64_t true_pattern_lcp(const std::vector<std::string>& t, SuffixRef r, const PatternBits& p) {
  std::uint64_t k = 0;
  while (k < p.bit_length() && key_bit(t, r, k) == p.bit(k)) ++k;
  return k;
}

std::vector<std::uint64_t> bit_lcps(const std::vector<std::string>& t, const std::vector<SuffixRef>& sp) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
    std::uint64_t bl = 0;
    EXPECT_LT(compare_keys(t, sp[i], sp[i + 1], &bl), 0);
    out.push_back(bl);
  }
  return out;
}

std::vector<SuffixRef> oracle_search(const std::vector<std::string>& texts, std::string_view p,
                                     const std::vector<bool>& live = {}) {
  std::vector<SuffixRef> out;
  for (std::uint32_t i = 0; i < texts.size(); ++i) {
    if (!live.empty() && !live[i]) continue;
    for (auto pos : tidx::testing::naive_find(texts[i], p)) out.push_back({i, pos});
  }
  return out;
}

}  // namespace

TEST(BitKey, PatternBits) {
  PatternBits p("a");  // 'a' = 0x61 = 0 0110 0001 as 9 bits
  std::string bits;
  for (int k = 0; k < 9; ++k) bits += static_cast<char>('0' + p.bit(k));
  EXPECT_EQ(bits, "001100001");
  EXPECT_EQ(p.bit(9), 0u);
  EXPECT_EQ(p.bit_length(), 9u);
}

TEST(BitKey, CompareAndLcp) {
  std::vector<std::string> t{"abc", "abd", "ab"};
  std::uint64_t bl = 0;
  EXPECT_LT(compare_keys(t, {0, 1}, {1, 1}, &bl), 0);
  // 'c' = 0x63, 'd' = 0x64 differ at bit 6 of the 9-bit symbol.
  EXPECT_EQ(bl, 18u + 6);
  // "ab" ends where "abc" continues: terminator (511) sorts high.
  EXPECT_GT(compare_keys(t, {2, 1}, {0, 1}, &bl), 0);
  EXPECT_EQ(bl, 18u + clz_width(511 ^ 0x63, 9));
  // Same suffix content in different texts: decided by the text id.
  std::vector<std::string> u{"xab", "ab"};
  EXPECT_LT(compare_keys(u, {0, 2}, {1, 1}, &bl), 0);
  EXPECT_EQ(bl, 27u + clz_width(0 ^ 1, 16));
  EXPECT_EQ(bit_lcp_from_chars(u, {0, 2}, {1, 1}, 2), bl);
  EXPECT_EQ(key_bit(u, {1, 1}, 27 + 15), 1u);
}

TEST(BitKey, PatternLcpFetchesOnce) {
  std::vector<std::string> t{"abcabd"};
  CountingTexts src(t);
  PatternBits p("abd");
  EXPECT_EQ(pattern_bit_lcp(p, {0, 4}, 0, src), 27u);
  EXPECT_EQ(pattern_bit_lcp(p, {0, 1}, 1, src), 18u + 6);
  EXPECT_EQ(src.reads, 2);
  EXPECT_EQ(pattern_bit_lcp(p, {0, 1}, 3, src), 27u);
  EXPECT_EQ(src.reads, 2);
}

TEST(SbtNode, EncodeDecodeRoundTrip) {
  NodePage leaf;
  leaf.kind = NodeKind::kLeaf;
  leaf.sp = {{0, 1}, {3, 70000}, {65535, 16777216}};
  leaf.lcp = {40, 12};
  leaf.next_lcp = 9;
  leaf.left = 4;
  leaf.right = kNoPage;
  auto page = encode_node(leaf, 128);
  EXPECT_EQ(page.size() <= 128, true);
  EXPECT_EQ(page[0], 1);
  EXPECT_EQ(get_le(page, 1, 2), 3u);
  EXPECT_EQ(decode_node(page), leaf);

  NodePage in;
  in.kind = NodeKind::kInternal;
  in.sp = {{0, 1}, {0, 2}, {1, 5}, {1, 9}};
  in.lcp = {100, 3, 50};
  in.children = {7, 8};
  EXPECT_EQ(decode_node(encode_node(in, 64)), in);
}

TEST(SbtNode, RejectsBadPages) {
  Bytes junk(64, 0);
  EXPECT_THROW(decode_node(junk), Error);
  junk[0] = 9;
  EXPECT_THROW(decode_node(junk), Error);
  NodePage big;
  for (std::uint64_t i = 1; i <= 40; ++i) big.sp.push_back({0, i});
  big.lcp.assign(39, 5);
  EXPECT_THROW(encode_node(big, 64), Error);
}

TEST(SbtNode, AutoBranching) {
  EXPECT_EQ(auto_branching(4096), 170u);
  EXPECT_GE(auto_branching(64), 2u);
  for (std::size_t page : {64u, 128u, 512u, 4096u}) {
    auto b = auto_branching(page);
    NodePage leaf;
    for (std::uint64_t i = 1; i <= 2 * b; ++i) leaf.sp.push_back({65535, 16777216 - i});
    leaf.lcp.assign(2 * b - 1, 0);
    for (std::size_t i = 0; i < leaf.lcp.size(); ++i) leaf.lcp[i] = i % 2 ? 0 : (std::uint64_t{1} << 28);
    leaf.next_lcp = std::uint64_t{1} << 28;
    leaf.left = leaf.right = 1;
    EXPECT_NO_THROW(encode_node(leaf, page)) << page;
  }
}

TEST(SbtNode, LocateMatchesOracleWithOneFetch) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 2000; ++round) {
    std::vector<std::string> t{tidx::testing::random_text(rng, 5 + rng() % 60, 1 + rng() % 3),
                               tidx::testing::random_text(rng, 1 + rng() % 20, 1 + rng() % 3)};
    auto all = build_collection_sa(t).sa;
    // A random increasing subset as the node contents.
    std::vector<SuffixRef> sp;
    for (auto& r : all)
      if (rng() % 3 == 0) sp.push_back(r);
    if (sp.empty()) sp.push_back(all[0]);
    auto lcp = bit_lcps(t, sp);
    auto p = tidx::testing::random_text(rng, 1 + rng() % 5, 3);
    PatternBits bits(p);
    CountingTexts src(t);
    auto res = node_locate(sp, lcp, bits, 0, src);
    std::size_t want = 0;
    for (auto& r : sp) want += key_less(suffix(t, r), p);
    ASSERT_EQ(res.r, want) << p;
    ASSERT_LE(src.reads, 1);
    for (std::size_t j = 0; j < sp.size(); ++j)
      ASSERT_EQ(lcp_with_pattern(lcp, res, j), true_pattern_lcp(t, sp[j], bits));
  }
}

TEST(SbtNode, LocateWithHintSkipsFetch) {
  std::vector<std::string> t{"abababbc"};
  auto all = build_collection_sa(t).sa;
  auto lcp = bit_lcps(t, all);
  PatternBits p("ab");
  CountingTexts src(t);
  auto res = node_locate(all, lcp, p, 18, src, 0, 3);
  EXPECT_EQ(src.reads, 0);
  EXPECT_EQ(res.r, 0u);
  auto full = node_locate(all, lcp, p, 0, src);
  EXPECT_EQ(full.r, 0u);
  EXPECT_EQ(src.reads, 1);
  // "abc" sits after the three ab... suffixes that start "aba"/"abb".
  EXPECT_EQ(node_locate(all, lcp, PatternBits("abc"), 0, src).r, 3u);
}

TEST(Supra, RankMatchesOracle) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> t{tidx::testing::random_text(rng, 50 + rng() % 400, 2 + rng() % 3)};
    auto sp = build_collection_sa(t).sa;
    auto lcp = bit_lcps(t, sp);
    SupraIndex sx(sp, lcp);
    EXPECT_EQ(SupraIndex::sub_array_size(sp.size()) * (sx.groups() - 1) < sp.size(), true);
    for (int q = 0; q < 10; ++q) {
      auto p = tidx::testing::random_text(rng, 1 + rng() % 6, 4);
      CountingTexts src(t);
      std::size_t want = 0;
      for (auto& r : sp) want += key_less(suffix(t, r), p);
      ASSERT_EQ(sx.rank(PatternBits(p), src), want);
      ASSERT_LE(src.reads, 2);
    }
  }
}

TEST(Supra, SubArraySize) {
  EXPECT_EQ(SupraIndex::sub_array_size(2), 4u);
  EXPECT_EQ(SupraIndex::sub_array_size(1024), 100u);
  EXPECT_EQ(SupraIndex::sub_array_size(1000), 100u);
}

TEST(StringBTree, SmallText) {
  TempDir dir;
  auto tree = StringBTree::build({"abababbc"}, dir.file("t"), {64, 1024, 0});
  auto hits = tree.search("ab");
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].offset, 1u);
  EXPECT_EQ(hits[1].offset, 3u);
  EXPECT_EQ(hits[2].offset, 5u);
  EXPECT_TRUE(tree.search("baa").empty());
  EXPECT_EQ(tree.validate(), "");
  std::vector<std::uint64_t> scan;
  for (auto& r : tree.leaf_scan()) scan.push_back(r.offset);
  EXPECT_EQ(scan, (std::vector<std::uint64_t>{1, 3, 5, 2, 4, 6, 7, 8}));
}

TEST(StringBTree, RandomAgainstOracleSmallPages) {
  TempDir dir;
  std::mt19937_64 rng(21);
  for (int round = 0; round < 60; ++round) {
    std::vector<std::string> texts;
    auto k = 1 + rng() % 4;
    for (std::size_t i = 0; i < k; ++i) texts.push_back(tidx::testing::random_text(rng, 1 + rng() % 300, 1 + rng() % 4));
    auto tree = StringBTree::build(texts, dir.file("t" + std::to_string(round)), {64 + 64 * (rng() % 3), 4096, 0});
    ASSERT_EQ(tree.validate(), "");
    for (int q = 0; q < 20; ++q) {
      auto p = tidx::testing::random_text(rng, 1 + rng() % 5, 4);
      ASSERT_EQ(tree.search(p), oracle_search(texts, p)) << p;
    }
  }
}

TEST(StringBTree, ReopenFromDisk) {
  TempDir dir;
  std::vector<std::string> texts{"mississippi", "missing"};
  {
    auto tree = StringBTree::build(texts, dir.file("t"), {64, 1024, 2});
    EXPECT_GE(tree.height(), 2u);
  }
  auto tree = StringBTree::open(dir.file("t"), 1024);
  EXPECT_EQ(tree.search("issi"), oracle_search(texts, "issi"));
  EXPECT_EQ(tree.search("miss"), oracle_search(texts, "miss"));
  EXPECT_EQ(tree.validate(), "");
  EXPECT_THROW(StringBTree::open(dir.file("nope"), 1024), Error);
}

TEST(StringBTree, InsertAndDelete) {
  TempDir dir;
  std::mt19937_64 rng(31);
  std::vector<std::string> texts{tidx::testing::random_text(rng, 200, 3)};
  std::vector<bool> live{true};
  auto tree = StringBTree::build(texts, dir.file("t"), {128, 4096, 0});
  for (int step = 0; step < 12; ++step) {
    if (step % 3 == 2) {
      std::uint32_t victim = static_cast<std::uint32_t>(rng() % texts.size());
      if (live[victim]) {
        tree.delete_text(victim);
        live[victim] = false;
      }
    } else {
      texts.push_back(tidx::testing::random_text(rng, 1 + rng() % 150, 3));
      live.push_back(true);
      EXPECT_EQ(tree.insert_text(texts.back()), texts.size() - 1);
    }
    ASSERT_EQ(tree.validate(), "") << "step " << step;
    for (int q = 0; q < 10; ++q) {
      auto p = tidx::testing::random_text(rng, 1 + rng() % 4, 3);
      ASSERT_EQ(tree.search(p), oracle_search(texts, p, live)) << p;
    }
  }
  // The tree survives a reopen after updates.
  auto again = StringBTree::open(dir.file("t"), 4096);
  EXPECT_EQ(again.search("ab"), oracle_search(texts, "ab", live));
}

TEST(StringBTree, PageReadsWithinBound) {
  TempDir dir;
  std::mt19937_64 rng(41);
  std::vector<std::string> texts{tidx::testing::random_text(rng, 60000, 4)};
  auto tree = StringBTree::build(texts, dir.file("t"), {4096, 1 << 20, 0});
  for (int q = 0; q < 50; ++q) {
    auto p = tidx::testing::random_text(rng, 1 + rng() % 10, 4);
    tree.reset_stats();
    auto hits = tree.search(p);
    auto reads = tree.node_io().page_reads + tree.text_io().page_reads;
    auto bound = 4 * ((p.size() + 4095) / 4096 + (5 * hits.size() + 4095) / 4096 + tree.height() + 1);
    EXPECT_LE(reads, bound);
  }
}

TEST(StringBTree, Errors) {
  TempDir dir;
  EXPECT_THROW(StringBTree::build({std::string("a\0b", 3)}, dir.file("x"), {}), Error);
  auto tree = StringBTree::build({"abc"}, dir.file("y"), {64, 1024, 0});
  EXPECT_THROW(tree.search(""), Error);
  EXPECT_THROW(tree.delete_text(5), Error);
  EXPECT_THROW(tree.insert_text(""), Error);
}
