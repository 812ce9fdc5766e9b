#pragma once

// Byte coders used to store BWT output: move-to-front, zero-run coding and
// a canonical byte Huffman code.

#include <array>
#include <cstddef>
#include <cstdint>

#include "tidx/bytes.hpp"

namespace tidx {

Bytes mtf_encode(ByteSpan in);
Bytes mtf_decode(ByteSpan in);

/// A run of k zeros (1 <= k <= 256) becomes the pair 0, k-1; other bytes
/// are copied.
Bytes zero_run_encode(ByteSpan in);
Bytes zero_run_decode(ByteSpan in);

class CanonicalHuffman {
 public:
  static constexpr unsigned kMaxLength = 24;

  static CanonicalHuffman from_frequencies(const std::array<std::uint64_t, 256>& freq);
  /// Throws kCorrupt unless the lengths form a complete or single-symbol code.
  static CanonicalHuffman from_lengths(const std::array<std::uint8_t, 256>& lengths);

  const std::array<std::uint8_t, 256>& lengths() const { return len_; }

  /// Bit-packed, most significant bit first, zero padded to a byte.
  Bytes encode(ByteSpan symbols) const;
  Bytes decode(ByteSpan bits, std::size_t count) const;

 private:
  void assign_codes();

  std::array<std::uint8_t, 256> len_{};
  std::array<std::uint32_t, 256> code_{};
  std::array<std::uint32_t, kMaxLength + 1> first_code_{};
  std::array<std::uint32_t, kMaxLength + 1> first_index_{};
  std::array<std::uint32_t, kMaxLength + 1> count_{};
  std::array<std::uint8_t, 256> sorted_{};
};

}  // namespace tidx
