#pragma once

// Continuation-bit code: the value is split into 7-bit groups, most
// significant group first; the first byte of a codeword has its top bit set
// and every following byte has it clear. Codeword starts can therefore be
// found from any position by looking for a set top bit.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tidx/bytes.hpp"

namespace tidx {

inline constexpr std::uint64_t kCbLimit = std::uint64_t{1} << 56;

struct CbDecoded {
  std::uint64_t value;
  std::size_t next;
};

/// Number of bytes encode_cb(x) produces: max(1, ceil(bitlen(x) / 7)).
std::size_t cb_length(std::uint64_t x);

Bytes encode_cb(std::uint64_t x);
void append_cb(Bytes& out, std::uint64_t x);

/// Decodes the codeword starting at `offset`. Throws kCorrupt if the byte at
/// offset is untagged or the codeword is cut off by the end of the buffer.
CbDecoded decode_cb(ByteSpan buffer, std::size_t offset);

/// First value absolute, later values as differences from the predecessor.
/// Input must be strictly increasing and >= 1.
Bytes encode_gaps(const std::vector<std::uint64_t>& values);
std::vector<std::uint64_t> decode_gaps(ByteSpan bytes);

// Signed deltas (e.g. Skip values between LCPs) go through zigzag first.
inline std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
inline std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

}  // namespace tidx
