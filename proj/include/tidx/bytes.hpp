#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/error.hpp"

namespace tidx {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

inline ByteSpan as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string_view as_chars(ByteSpan b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

// Little-endian fixed-width integer output.
inline void put_le(Bytes& out, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_le(ByteSpan in, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{in[pos + i]} << (8 * i);
  return v;
}

// LEB128 for header fields: self-delimiting even when raw bytes follow.
inline void put_uleb(Bytes& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

/// Sequential reader over a byte buffer; every accessor bounds-checks and
/// throws kCorrupt on overrun, which is what deserializers want.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::uint64_t le(int width) {
    need(width);
    auto v = get_le(data_, pos_, width);
    pos_ += width;
    return v;
  }

  std::uint64_t uleb() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      need(1);
      auto b = data_[pos_++];
      v |= std::uint64_t{b & 0x7Fu} << shift;
      if ((b & 0x80) == 0) return v;
    }
    fail(ErrorKind::kCorrupt, "varint longer than 64 bits");
  }

  ByteSpan take(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void expect_magic(std::string_view magic) {
    auto got = take(magic.size());
    if (as_chars(got) != magic) fail(ErrorKind::kCorrupt, "bad magic, expected " + std::string(magic));
  }

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) {
    if (p > data_.size()) fail(ErrorKind::kCorrupt, "seek past end of buffer");
    pos_ = p;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  ByteSpan data() const { return data_; }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) fail(ErrorKind::kCorrupt, "truncated input");
  }

  ByteSpan data_;
  std::size_t pos_ = 0;
};

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteSpan data);

}  // namespace tidx
