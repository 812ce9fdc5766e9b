#pragma once

// Binary view of suffixes for the String B-tree. Each character is a 9-bit
// symbol (byte c -> c, terminator -> 511), most significant bit first, and
// the terminator is followed by the 16-bit text id. Keys of distinct
// suffixes are therefore distinct and none is a prefix of another.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/suffarr.hpp"

namespace tidx {

inline constexpr std::uint32_t kTerminatorSymbol = 511;
inline constexpr unsigned kSymbolBits = 9;
inline constexpr unsigned kTextIdBits = 16;

/// Leading zeros of x viewed as a `width`-bit number.
unsigned clz_width(std::uint32_t x, unsigned width);

/// A search pattern; bits past its 9p real bits read as 0.
class PatternBits {
 public:
  explicit PatternBits(std::string_view p) : p_(p) {}
  std::uint64_t bit_length() const { return kSymbolBits * p_.size(); }
  unsigned bit(std::uint64_t k) const;
  std::string_view bytes() const { return p_; }

 private:
  std::string_view p_;
};

/// Random access to the indexed texts, either in memory or paged.
class TextSource {
 public:
  virtual ~TextSource() = default;
  virtual std::uint64_t length(std::uint32_t text) const = 0;
  /// Bytes [from, from + count) of the text, clipped at its end.
  virtual std::string read(std::uint32_t text, std::uint64_t from, std::uint64_t count) = 0;
};

class MemoryTexts : public TextSource {
 public:
  explicit MemoryTexts(const std::vector<std::string>& texts) : texts_(texts) {}
  std::uint64_t length(std::uint32_t text) const override { return texts_.at(text).size(); }
  std::string read(std::uint32_t text, std::uint64_t from, std::uint64_t count) override;

 private:
  const std::vector<std::string>& texts_;
};

/// Bit lcp of P (capped at its bit length) with the suffix `ref` (1-based
/// offset), examining characters from `from_char` on. The caller
/// guarantees the first 9 * from_char bits agree. Fetches p - from_char
/// characters from `texts`.
std::uint64_t pattern_bit_lcp(const PatternBits& p, SuffixRef ref, std::uint64_t from_char,
                              TextSource& texts);

/// Key order of two suffixes of in-memory texts; *bit_lcp gets their bit lcp.
int compare_keys(const std::vector<std::string>& texts, SuffixRef a, SuffixRef b,
                 std::uint64_t* bit_lcp);

/// Bit lcp of two suffixes known to share exactly `char_lcp` characters.
std::uint64_t bit_lcp_from_chars(const std::vector<std::string>& texts, SuffixRef a, SuffixRef b,
                                 std::uint64_t char_lcp);

/// Bit k of the key of `ref` (for tests and validation).
unsigned key_bit(const std::vector<std::string>& texts, SuffixRef ref, std::uint64_t k);

}  // namespace tidx
