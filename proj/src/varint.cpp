#include "tidx/varint.hpp"

#include <bit>
#include <string>

namespace tidx {

std::size_t cb_length(std::uint64_t x) {
  auto bits = static_cast<std::size_t>(std::bit_width(x));
  return bits == 0 ? 1 : (bits + 6) / 7;
}

void append_cb(Bytes& out, std::uint64_t x) {
  if (x >= kCbLimit) fail(ErrorKind::kOutOfRange, "continuation-bit value exceeds 2^56");
  auto len = cb_length(x);
  for (std::size_t g = len; g-- > 0;) {
    auto group = static_cast<std::uint8_t>((x >> (7 * g)) & 0x7F);
    out.push_back(g + 1 == len ? static_cast<std::uint8_t>(group | 0x80) : group);
  }
}

Bytes encode_cb(std::uint64_t x) {
  Bytes out;
  append_cb(out, x);
  return out;
}

CbDecoded decode_cb(ByteSpan buffer, std::size_t offset) {
  if (offset >= buffer.size()) fail(ErrorKind::kCorrupt, "codeword offset past end of buffer");
  if ((buffer[offset] & 0x80) == 0)
    fail(ErrorKind::kCorrupt, "untagged byte at codeword start " + std::to_string(offset));
  std::uint64_t v = buffer[offset] & 0x7F;
  std::size_t pos = offset + 1;
  std::size_t groups = 1;
  while (pos < buffer.size() && (buffer[pos] & 0x80) == 0) {
    if (++groups > 8) fail(ErrorKind::kCorrupt, "codeword longer than 8 groups");
    v = (v << 7) | buffer[pos];
    ++pos;
  }
  return {v, pos};
}

Bytes encode_gaps(const std::vector<std::uint64_t>& values) {
  Bytes out;
  std::uint64_t prev = 0;
  for (auto v : values) {
    if (v <= prev) fail(ErrorKind::kInvalidArgument, "gap list must be strictly increasing and >= 1");
    append_cb(out, v - prev);
    prev = v;
  }
  return out;
}

std::vector<std::uint64_t> decode_gaps(ByteSpan bytes) {
  std::vector<std::uint64_t> out;
  std::uint64_t acc = 0;
  for (std::size_t pos = 0; pos < bytes.size();) {
    auto [gap, next] = decode_cb(bytes, pos);
    acc += gap;
    out.push_back(acc);
    pos = next;
  }
  return out;
}

}  // namespace tidx
