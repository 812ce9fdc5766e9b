#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "tidx/huffword.hpp"
#include "test_util.hpp"

using namespace tidx;

namespace {

// Cost of an optimal 128-ary code: the sum of all merged weights.
std::uint64_t optimal_cost(std::vector<std::uint64_t> w) {
  if (w.size() <= 1) return std::accumulate(w.begin(), w.end(), std::uint64_t{0});
  while ((w.size() - 1) % 127 != 0) w.push_back(0);
  std::multiset<std::uint64_t> q(w.begin(), w.end());
  std::uint64_t cost = 0;
  while (q.size() > 1) {
    std::uint64_t sum = 0;
    for (int k = 0; k < 128; ++k) {
      sum += *q.begin();
      q.erase(q.begin());
    }
    cost += sum;
    q.insert(sum);
  }
  return cost;
}

Vocabulary zipf_vocab(std::size_t n) {
  Vocabulary v;
  for (std::size_t i = 0; i < n; ++i) {
    v.terms.push_back("w" + std::to_string(100000 + i));
    v.freq.push_back(1 + 1000000 / (i + 1));
  }
  return v;
}

}  // namespace

TEST(Huffword, Tokenize) {
  auto t = tokenize("Hi, you2  there.");
  std::vector<std::string_view> want{"Hi", ", ", "you2", "  ", "there", "."};
  EXPECT_EQ(t, want);
  EXPECT_TRUE(is_word("you2"));
  EXPECT_FALSE(is_word(", "));
  EXPECT_TRUE(tokenize("").empty());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto s = tidx::testing::random_corpus(rng, 200, 30);
    std::string back;
    auto toks = tokenize(s);
    for (std::size_t k = 0; k < toks.size(); ++k) {
      back += toks[k];
      if (k > 0) EXPECT_NE(is_word(toks[k]), is_word(toks[k - 1]));
    }
    EXPECT_EQ(back, s);
  }
}

TEST(Huffword, SmallVocabularyGetsOneByteCodes) {
  auto m = HuffwordModel::build(build_vocab(tokenize("to be or not to be")));
  EXPECT_EQ(m.size(), 5u);
  for (std::size_t i = 0; i < m.size(); ++i) {
    ASSERT_EQ(m.codeword(i).size(), 1u);
    EXPECT_TRUE(m.codeword(i)[0] & 0x80);
  }
}

TEST(Huffword, CodeIsTaggedPrefixFreeAndOptimal) {
  for (std::size_t n : {129u, 300u, 5000u, 20000u}) {
    auto v = zipf_vocab(n);
    auto m = HuffwordModel::build(v);
    ASSERT_EQ(m.size(), n);
    std::set<Bytes> codes;
    std::uint64_t cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cw = m.codeword(i);
      ASSERT_TRUE(cw[0] & 0x80);
      for (std::size_t k = 1; k < cw.size(); ++k) ASSERT_FALSE(cw[k] & 0x80);
      if (i > 0) ASSERT_LE(m.codeword(i - 1).size(), cw.size());
      codes.insert(cw);
      auto idx = std::lower_bound(v.terms.begin(), v.terms.end(), m.term(i)) - v.terms.begin();
      cost += v.freq[idx] * cw.size();
    }
    ASSERT_EQ(codes.size(), n);
    // Prefix-free: no codeword is a prefix of its successor in byte order.
    for (auto it = codes.begin(); std::next(it) != codes.end(); ++it) {
      const auto& a = *it;
      const auto& b = *std::next(it);
      ASSERT_FALSE(a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin()));
    }
    EXPECT_EQ(cost, optimal_cost(v.freq)) << n;
  }
}

TEST(Huffword, EncodeDecodeRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 30; ++i) {
    auto s = tidx::testing::random_corpus(rng, 1 + rng() % 3000, 1 + rng() % 400);
    auto toks = tokenize(s);
    auto m = HuffwordModel::build(build_vocab(toks));
    auto dt = m.encode(toks);
    EXPECT_EQ(m.decode(dt), s);
    auto back = HuffwordModel::deserialize(m.serialize());
    EXPECT_EQ(back.decode(dt), s);
  }
}

TEST(Huffword, CompressedFindMatchesTokenScan) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20; ++round) {
    auto s = tidx::testing::random_corpus(rng, 5000, 300);
    auto toks = tokenize(s);
    auto m = HuffwordModel::build(build_vocab(toks));
    auto dt = m.encode(toks);
    // DT offset of each token.
    std::vector<std::size_t> dt_at;
    std::size_t pos = 0;
    for (auto t : toks) {
      dt_at.push_back(pos);
      pos += m.codeword(*m.find(t)).size();
    }
    for (int q = 0; q < 20; ++q) {
      auto w = toks[rng() % toks.size()];
      std::vector<std::size_t> want;
      for (std::size_t k = 0; k < toks.size(); ++k)
        if (toks[k] == w) want.push_back(dt_at[k]);
      ASSERT_EQ(compressed_find(dt, m.codeword(*m.find(w))), want);
    }
  }
}

TEST(Huffword, Errors) {
  EXPECT_THROW(HuffwordModel::build(Vocabulary{}), Error);
  auto m = HuffwordModel::build(build_vocab(tokenize("a b")));
  std::vector<std::string_view> missing{"zzz"};
  EXPECT_THROW(m.encode(missing), Error);
  EXPECT_THROW(m.decode(Bytes{0x01}), Error);
  EXPECT_THROW(m.decode(Bytes{0xFF}), Error);
  auto bytes = m.serialize();
  bytes[0] = 'X';
  EXPECT_THROW(HuffwordModel::deserialize(bytes), Error);
  bytes = m.serialize();
  bytes.push_back(0);
  EXPECT_THROW(HuffwordModel::deserialize(bytes), Error);
  EXPECT_TRUE(compressed_find(Bytes{0x80}, Bytes{}).empty());
}
