#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "tidx/entropy.hpp"
#include "tidx/fmindex.hpp"
#include "test_util.hpp"

using namespace tidx;

namespace {

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

// Rotations of t# sorted with # lowest; returns L.
std::string naive_bwt(const std::string& t) {
  std::string s = t + '\0';
  std::vector<std::size_t> rot(s.size());
  std::iota(rot.begin(), rot.end(), 0);
  std::sort(rot.begin(), rot.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      auto x = static_cast<unsigned char>(s[(a + k) % s.size()]), y = static_cast<unsigned char>(s[(b + k) % s.size()]);
      if (x != y) return x < y;
    }
    return false;
  });
  std::string l;
  for (auto r : rot) l += s[(r + s.size() - 1) % s.size()];
  return l;
}

}  // namespace

TEST(Entropy, MoveToFront) {
  EXPECT_EQ(mtf_encode(to_bytes("aaab")), (Bytes{97, 0, 0, 98}));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto s = to_bytes(tidx::testing::random_text(rng, rng() % 500, 1 + rng() % 8));
    EXPECT_EQ(mtf_decode(mtf_encode(s)), s);
  }
}

TEST(Entropy, ZeroRuns) {
  Bytes in{5, 0, 0, 0, 7, 0};
  EXPECT_EQ(zero_run_encode(in), (Bytes{5, 0, 2, 7, 0, 0}));
  Bytes many(600, 0);
  EXPECT_EQ(zero_run_encode(many).size(), 6u);
  EXPECT_EQ(zero_run_decode(zero_run_encode(many)), many);
  EXPECT_THROW(zero_run_decode(Bytes{0}), Error);
}

TEST(Entropy, CanonicalHuffman) {
  std::array<std::uint64_t, 256> freq{};
  freq['a'] = 50;
  freq['b'] = 25;
  freq['c'] = 25;
  auto h = CanonicalHuffman::from_frequencies(freq);
  EXPECT_EQ(h.lengths()['a'], 1u);
  EXPECT_EQ(h.lengths()['b'], 2u);
  auto msg = to_bytes("abcaacb");
  auto bits = h.encode(msg);
  EXPECT_EQ(bits.size(), 2u);  // 11 bits
  EXPECT_EQ(h.decode(bits, msg.size()), msg);
  auto again = CanonicalHuffman::from_lengths(h.lengths());
  EXPECT_EQ(again.decode(bits, msg.size()), msg);

  std::array<std::uint8_t, 256> bad{};
  bad['a'] = 1;
  bad['b'] = 2;
  EXPECT_THROW(CanonicalHuffman::from_lengths(bad), Error);

  std::array<std::uint64_t, 256> one{};
  one['z'] = 9;
  auto single = CanonicalHuffman::from_frequencies(one);
  EXPECT_EQ(single.decode(single.encode(to_bytes("zzz")), 3), to_bytes("zzz"));
}

TEST(Entropy, SkewedFrequenciesStayUnderMaxLength) {
  std::array<std::uint64_t, 256> freq{};
  std::uint64_t f = 1;
  for (int i = 0; i < 60; ++i, f = std::min<std::uint64_t>(f * 2, std::uint64_t{1} << 60)) freq[i + 1] = f;
  auto h = CanonicalHuffman::from_frequencies(freq);
  for (auto l : h.lengths()) EXPECT_LE(l, CanonicalHuffman::kMaxLength);
  Bytes msg;
  for (int i = 1; i <= 60; ++i) msg.push_back(static_cast<std::uint8_t>(i));
  EXPECT_EQ(h.decode(h.encode(msg), msg.size()), msg);
}

TEST(Bwt, Mississippi) {
  EXPECT_EQ(bwt_forward("mississippi"), std::string("ipssm\0pissii", 12));
  EXPECT_EQ(bwt_inverse(std::string("ipssm\0pissii", 12)), "mississippi");
  EXPECT_THROW(bwt_inverse("abc"), Error);
}

TEST(Bwt, RandomAgainstNaive) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    auto t = tidx::testing::random_text(rng, 1 + rng() % 200, 1 + rng() % 4);
    auto l = bwt_forward(t);
    ASSERT_EQ(l, naive_bwt(t));
    ASSERT_EQ(bwt_inverse(l), t);
  }
}

TEST(FMIndex, Mississippi) {
  auto fm = FMIndex::build("mississippi", {FmMode::kFat, 4, 4});
  EXPECT_EQ(fm.rows(), 12u);
  EXPECT_EQ(fm.terminator_row(), 6u);
  EXPECT_EQ(fm.bwt(), std::string("ipssm\0pissii", 12));
  auto r = fm.get_rows("si");
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(*r, (std::pair<std::uint64_t, std::uint64_t>{9, 10}));
  EXPECT_EQ(fm.count("ssi"), 2u);
  EXPECT_EQ(fm.count("x"), 0u);
  EXPECT_FALSE(fm.get_rows("spi").has_value());
  EXPECT_EQ(fm.locate(3), 8u);
  EXPECT_EQ(fm.locate(1), 12u);
  EXPECT_EQ(fm.locate_all("si"), (std::vector<std::uint64_t>{4, 7}));
  EXPECT_EQ(fm.locate_all("issi"), (std::vector<std::uint64_t>{2, 5}));
}

TEST(FMIndex, OccAndLf) {
  auto fm = FMIndex::build("abracadabra", {FmMode::kFat, 3, 2});
  auto l = fm.bwt();
  for (int sym : {1 + 'a', 1 + 'b', 1 + 'r'})
    for (std::uint64_t k = 0; k <= fm.rows(); ++k)
      ASSERT_EQ(fm.occ(sym, k), static_cast<std::uint64_t>(
                                    std::count(l.begin(), l.begin() + k, static_cast<char>(sym - 1))));
  // Walking LF from the terminator row spells the text backwards.
  std::string back;
  std::uint64_t row = 1;
  for (std::uint64_t i = 0; i < fm.text_length(); ++i) {
    back += static_cast<char>(fm.symbol_at(row) - 1);
    row = fm.lf(row);
  }
  std::reverse(back.begin(), back.end());
  EXPECT_EQ(back, "abracadabra");
}

TEST(FMIndex, RandomAgainstNaive) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 150; ++round) {
    int sigma = std::vector<int>{1, 2, 4, 26}[round % 4];
    auto t = tidx::testing::random_text(rng, 1 + rng() % 1500, sigma);
    FmConfig cfg{FmMode::kFat, static_cast<std::uint32_t>(1 + rng() % 40), static_cast<std::uint32_t>(1 + rng() % 300)};
    auto fm = FMIndex::build(t, cfg);
    for (int q = 0; q < 15; ++q) {
      auto p = tidx::testing::random_text(rng, 1 + rng() % 5, sigma);
      auto want = tidx::testing::naive_find(t, p);
      ASSERT_EQ(fm.count(p), want.size());
      ASSERT_EQ(fm.locate_all(p), want) << p;
    }
  }
}

TEST(FMIndex, LocateStepsBoundedBySampleRate) {
  std::mt19937_64 rng(4);
  auto t = tidx::testing::random_text(rng, 5000, 4);
  auto fm = FMIndex::build(t, {FmMode::kFat, 16, 64});
  for (std::uint64_t row = 1; row <= fm.rows(); row += 7) {
    std::uint64_t steps = 0;
    fm.locate(row, &steps);
    ASSERT_LT(steps, 16u);
  }
}

TEST(FMIndex, BinaryBytes) {
  std::string t("a\0b\0a\0b", 7);
  auto fm = FMIndex::build_bytes(t, {FmMode::kFat, 2, 2});
  EXPECT_EQ(fm.locate_all(std::string("\0b", 2)), (std::vector<std::uint64_t>{2, 6}));
  EXPECT_THROW(FMIndex::build(t), Error);
}

TEST(FMIndex, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  for (auto mode : {FmMode::kTiny, FmMode::kFat}) {
    auto t = tidx::testing::random_text(rng, 3000, 5);
    auto fm = FMIndex::build(t, {mode, 8, 100});
    auto bytes = fm.serialize();
    auto back = FMIndex::deserialize(bytes);
    EXPECT_EQ(back.bwt(), fm.bwt());
    EXPECT_EQ(back.mode(), mode);
    for (int q = 0; q < 30; ++q) {
      auto p = tidx::testing::random_text(rng, 1 + rng() % 4, 5);
      ASSERT_EQ(back.count(p), tidx::testing::naive_find(t, p).size());
      if (mode == FmMode::kFat) ASSERT_EQ(back.locate_all(p), tidx::testing::naive_find(t, p));
    }
    bytes.push_back(0);
    EXPECT_THROW(FMIndex::deserialize(bytes), Error);
    bytes.resize(bytes.size() / 2);
    EXPECT_THROW(FMIndex::deserialize(bytes), Error);
  }
}

TEST(FMIndex, TinyIsSmallAndCannotLocate) {
  std::mt19937_64 rng(6);
  auto t = tidx::testing::random_corpus(rng, 20000, 500);
  auto tiny = FMIndex::build(t, {FmMode::kTiny, 32, 256});
  EXPECT_LT(tiny.serialize().size(), t.size());
  EXPECT_THROW(tiny.locate(1), Error);
  EXPECT_THROW(tiny.locate_all("a"), Error);
  EXPECT_THROW(tiny.get_rows(""), Error);
}
