#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "tidx/suffarr.hpp"
#include "test_util.hpp"

using namespace tidx;
using tidx::testing::TempDir;

namespace {

// Terminator above every byte: a suffix that prefixes another sorts after it.
SuffixArray naive_sa(const std::string& t) {
  SuffixArray sa(t.size());
  std::iota(sa.begin(), sa.end(), 1);
  std::sort(sa.begin(), sa.end(), [&](std::uint64_t a, std::uint64_t b) {
    auto x = std::string_view(t).substr(a - 1), y = std::string_view(t).substr(b - 1);
    auto n = std::min(x.size(), y.size());
    auto c = x.substr(0, n).compare(y.substr(0, n));
    if (c != 0) return c < 0;
    return x.size() > y.size();
  });
  return sa;
}

}  // namespace

TEST(SuffixArray, SmallText) {
  std::string t = "abababbc";
  auto sa = build_sa_internal(t);
  EXPECT_EQ(sa, (SuffixArray{1, 3, 5, 2, 4, 6, 7, 8}));
  EXPECT_EQ(sa_search(t, sa, "ab"), (std::vector<std::uint64_t>{1, 3, 5}));
  EXPECT_TRUE(sa_search(t, sa, "baa").empty());
  EXPECT_EQ(build_lcp(t, sa), (LcpArray{4, 2, 0, 3, 1, 1, 0}));
}

TEST(SuffixArray, RepeatedLetter) {
  auto sa = build_sa_internal("aaaa");
  EXPECT_EQ(sa, (SuffixArray{1, 2, 3, 4}));
  EXPECT_EQ(build_lcp("aaaa", sa), (LcpArray{3, 2, 1}));
}

TEST(SuffixArray, RejectsBadInput) {
  EXPECT_THROW(build_sa_internal(std::string("a\0b", 3)), Error);
  EXPECT_THROW(build_sa_internal(""), Error);
  auto sa = build_sa_internal("abc");
  EXPECT_THROW(sa_search("abc", sa, ""), Error);
  EXPECT_TRUE(sa_search("abc", sa, "abcd").empty());
}

TEST(SuffixArray, RandomAgainstNaive) {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 300; ++round) {
    auto sigma = std::vector<int>{1, 2, 4, 26}[round % 4];
    auto t = tidx::testing::random_text(rng, 1 + rng() % 300, sigma);
    auto sa = build_sa_internal(t);
    ASSERT_EQ(sa, naive_sa(t)) << t;
    auto lcp = build_lcp(t, sa);
    for (std::size_t k = 0; k + 1 < sa.size(); ++k) {
      auto a = std::string_view(t).substr(sa[k] - 1), b = std::string_view(t).substr(sa[k + 1] - 1);
      std::size_t l = 0;
      while (l < a.size() && l < b.size() && a[l] == b[l]) ++l;
      ASSERT_EQ(lcp[k], l);
    }
    for (int q = 0; q < 5; ++q) {
      auto p = tidx::testing::random_text(rng, 1 + rng() % 4, sigma);
      ASSERT_EQ(sa_search(t, sa, p), tidx::testing::naive_find(t, p));
    }
  }
}

TEST(SuffixArray, IncrementalMatchesInternal) {
  TempDir dir;
  std::mt19937_64 rng(4);
  for (int round = 0; round < 40; ++round) {
    auto t = tidx::testing::random_text(rng, 1 + rng() % 2000, 1 + round % 4);
    std::size_t m = 1 + rng() % 300;
    m = std::min(m, t.size());
    auto store = PagedStore::create(64, 9 * m + 128 + rng() % 512, dir.file("s" + std::to_string(round)));
    IncrementalReport rep;
    ASSERT_EQ(build_sa_incremental(t, m, store, &rep), build_sa_internal(t));
    EXPECT_EQ(rep.stages.size(), (t.size() + m - 1) / m);
  }
}

TEST(SuffixArray, IncrementalSeeksPerStage) {
  TempDir dir;
  std::string t(4096, 'a');
  for (std::size_t m : {64u, 256u}) {
    auto store = PagedStore::create(4096, 1 << 20, dir.file("a" + std::to_string(m)));
    IncrementalReport rep;
    ASSERT_EQ(build_sa_incremental(t, m, store, &rep), build_sa_internal(t));
    for (const auto& s : rep.stages) EXPECT_LE(s.io.seeks, 4u) << "stage " << s.stage;
  }
}

// With a small budget the merge alternates between reading the old array and
// writing the new one; every buffer refill and every flush is one seek.
TEST(SuffixArray, IncrementalSeeksAtMinimumBudget) {
  TempDir dir;
  std::string t(4096, 'a');
  const std::size_t page = 4096, per_page = page / 5;
  for (std::size_t m : {64u, 256u}) {
    for (std::size_t extra : {2u, 4u, 8u}) {
      auto budget = 9 * m + extra * page;
      auto store = PagedStore::create(page, budget, dir.file("a" + std::to_string(m) + "_" + std::to_string(extra)));
      IncrementalReport rep;
      ASSERT_EQ(build_sa_incremental(t, m, store, &rep), build_sa_internal(t));
      auto batch = std::max<std::size_t>(1, (budget - 9 * m) / page / 2);
      for (const auto& s : rep.stages) {
        auto old_pages = ((s.stage - 1) * m + per_page - 1) / per_page;
        auto new_pages = (std::min(s.stage * m, t.size()) + per_page - 1) / per_page;
        EXPECT_LE(s.io.seeks, (old_pages + batch - 1) / batch + (new_pages + batch - 1) / batch) << "stage " << s.stage;
      }
    }
  }
}

TEST(SuffixArray, IncrementalPreconditions) {
  TempDir dir;
  auto store = PagedStore::create(64, 256, dir.file("s"));
  EXPECT_THROW(build_sa_incremental("abcdef", 100, store), Error);
  EXPECT_THROW(build_sa_incremental("abcdef", 0, store), Error);
  store.append_page({});
  EXPECT_THROW(build_sa_incremental("abcdef", 2, store), Error);
}

TEST(SuffixArray, Collection) {
  std::vector<std::string> texts{"abab", "bab", "ab"};
  auto c = build_collection_sa(texts);
  ASSERT_EQ(c.sa.size(), 9u);
  // Oracle: sort (text, offset) by suffix with terminator above bytes and
  // ties between equal suffixes by text id.
  std::vector<SuffixRef> want;
  for (std::uint32_t i = 0; i < texts.size(); ++i)
    for (std::uint64_t o = 1; o <= texts[i].size(); ++o) want.push_back({i, o});
  std::stable_sort(want.begin(), want.end(), [&](const SuffixRef& a, const SuffixRef& b) {
    auto x = std::string_view(texts[a.text]).substr(a.offset - 1);
    auto y = std::string_view(texts[b.text]).substr(b.offset - 1);
    auto n = std::min(x.size(), y.size());
    auto cmp = x.substr(0, n).compare(y.substr(0, n));
    if (cmp != 0) return cmp < 0;
    if (x.size() != y.size()) return x.size() > y.size();
    return a.text < b.text;
  });
  EXPECT_EQ(c.sa, want);
  for (std::size_t k = 0; k + 1 < c.sa.size(); ++k) {
    auto x = std::string_view(texts[c.sa[k].text]).substr(c.sa[k].offset - 1);
    auto y = std::string_view(texts[c.sa[k + 1].text]).substr(c.sa[k + 1].offset - 1);
    std::size_t l = 0;
    while (l < x.size() && l < y.size() && x[l] == y[l]) ++l;
    EXPECT_EQ(c.lcp[k], l);
  }
}

TEST(SuffixArray, SaveLoad) {
  TempDir dir;
  auto sa = build_sa_internal("mississippi");
  save_sa(dir.file("x.sa"), sa);
  EXPECT_EQ(load_sa(dir.file("x.sa")), sa);
  auto raw = read_file(dir.file("x.sa"));
  EXPECT_EQ(std::string(raw.begin(), raw.begin() + 4), "SA01");
  EXPECT_EQ(raw.size(), 4u + 8 + 5 * 11);
  raw.pop_back();
  write_file(dir.file("bad.sa"), raw);
  EXPECT_THROW(load_sa(dir.file("bad.sa")), Error);
}
