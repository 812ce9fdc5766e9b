#include "tidx/bitkey.hpp"

#include <algorithm>
#include <bit>

namespace tidx {
namespace {

// Symbol at char position k of a suffix of `len` chars, or -1 past the
// terminator.
std::int32_t symbol_at(std::string_view suffix, std::uint64_t k) {
  if (k < suffix.size()) return static_cast<std::uint8_t>(suffix[k]);
  if (k == suffix.size()) return kTerminatorSymbol;
  return -1;
}

std::string_view suffix_of(const std::vector<std::string>& texts, SuffixRef r) {
  const auto& t = texts.at(r.text);
  require(r.offset >= 1 && r.offset <= t.size(), ErrorKind::kOutOfRange, "suffix offset out of range");
  return std::string_view(t).substr(r.offset - 1);
}

}  // namespace

unsigned clz_width(std::uint32_t x, unsigned width) {
  return width - static_cast<unsigned>(std::bit_width(x));
}

unsigned PatternBits::bit(std::uint64_t k) const {
  if (k >= bit_length()) return 0;
  auto sym = static_cast<std::uint8_t>(p_[k / kSymbolBits]);
  return (sym >> (kSymbolBits - 1 - k % kSymbolBits)) & 1u;
}

std::string MemoryTexts::read(std::uint32_t text, std::uint64_t from, std::uint64_t count) {
  const auto& t = texts_.at(text);
  if (from >= t.size()) return {};
  return t.substr(from, count);
}

std::uint64_t pattern_bit_lcp(const PatternBits& p, SuffixRef ref, std::uint64_t from_char,
                              TextSource& texts) {
  auto pb = p.bytes();
  if (from_char >= pb.size()) return p.bit_length();
  auto chunk = texts.read(ref.text, ref.offset - 1 + from_char, pb.size() - from_char);
  for (std::uint64_t c = from_char; c < pb.size(); ++c) {
    std::uint32_t ps = static_cast<std::uint8_t>(pb[c]);
    auto i = c - from_char;
    std::uint32_t ks = i < chunk.size() ? static_cast<std::uint8_t>(chunk[i]) : kTerminatorSymbol;
    if (ks != ps) return kSymbolBits * c + clz_width(ks ^ ps, kSymbolBits);
  }
  return p.bit_length();
}

int compare_keys(const std::vector<std::string>& texts, SuffixRef a, SuffixRef b,
                 std::uint64_t* bit_lcp) {
  auto sa = suffix_of(texts, a);
  auto sb = suffix_of(texts, b);
  auto [ia, ib] = std::mismatch(sa.begin(), sa.end(), sb.begin(), sb.end());
  auto k = static_cast<std::uint64_t>(ia - sa.begin());
  std::int32_t x = symbol_at(sa, k), y = symbol_at(sb, k);
  if (x == y) {
    // Both terminated: the text ids decide.
    if (bit_lcp) {
      *bit_lcp = a.text == b.text
                     ? kSymbolBits * (k + 1) + kTextIdBits
                     : kSymbolBits * (k + 1) + clz_width(a.text ^ b.text, kTextIdBits);
    }
    return a.text < b.text ? -1 : (a.text > b.text ? 1 : 0);
  }
  if (bit_lcp) *bit_lcp = kSymbolBits * k + clz_width(static_cast<std::uint32_t>(x ^ y), kSymbolBits);
  return x < y ? -1 : 1;
}

std::uint64_t bit_lcp_from_chars(const std::vector<std::string>& texts, SuffixRef a, SuffixRef b,
                                 std::uint64_t char_lcp) {
  auto sa = suffix_of(texts, a);
  auto sb = suffix_of(texts, b);
  std::int32_t x = symbol_at(sa, char_lcp), y = symbol_at(sb, char_lcp);
  require(x >= 0 && y >= 0, ErrorKind::kInvalidArgument, "lcp longer than suffix");
  if (x == y) {
    require(x == static_cast<std::int32_t>(kTerminatorSymbol) && a.text != b.text,
            ErrorKind::kInvalidArgument, "char lcp is not maximal");
    return kSymbolBits * (char_lcp + 1) + clz_width(a.text ^ b.text, kTextIdBits);
  }
  return kSymbolBits * char_lcp + clz_width(static_cast<std::uint32_t>(x ^ y), kSymbolBits);
}

unsigned key_bit(const std::vector<std::string>& texts, SuffixRef ref, std::uint64_t k) {
  auto s = suffix_of(texts, ref);
  auto c = k / kSymbolBits;
  if (c <= s.size()) {
    auto sym = static_cast<std::uint32_t>(symbol_at(s, c));
    return (sym >> (kSymbolBits - 1 - k % kSymbolBits)) & 1u;
  }
  auto j = k - kSymbolBits * (s.size() + 1);
  require(j < kTextIdBits, ErrorKind::kOutOfRange, "bit past end of key");
  return (ref.text >> (kTextIdBits - 1 - j)) & 1u;
}

}  // namespace tidx
