#include "tidx/entropy.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <vector>

namespace tidx {

Bytes mtf_encode(ByteSpan in) {
  std::array<std::uint8_t, 256> table;
  std::iota(table.begin(), table.end(), 0);
  Bytes out;
  out.reserve(in.size());
  for (auto c : in) {
    auto it = std::find(table.begin(), table.end(), c);
    auto idx = static_cast<std::uint8_t>(it - table.begin());
    out.push_back(idx);
    std::rotate(table.begin(), it, it + 1);
  }
  return out;
}

Bytes mtf_decode(ByteSpan in) {
  std::array<std::uint8_t, 256> table;
  std::iota(table.begin(), table.end(), 0);
  Bytes out;
  out.reserve(in.size());
  for (auto idx : in) {
    auto c = table[idx];
    out.push_back(c);
    std::rotate(table.begin(), table.begin() + idx, table.begin() + idx + 1);
  }
  return out;
}

Bytes zero_run_encode(ByteSpan in) {
  Bytes out;
  for (std::size_t i = 0; i < in.size();) {
    if (in[i] != 0) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t k = 0;
    while (i < in.size() && in[i] == 0 && k < 256) {
      ++i;
      ++k;
    }
    out.push_back(0);
    out.push_back(static_cast<std::uint8_t>(k - 1));
  }
  return out;
}

Bytes zero_run_decode(ByteSpan in) {
  Bytes out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != 0) {
      out.push_back(in[i]);
      continue;
    }
    if (i + 1 >= in.size()) fail(ErrorKind::kCorrupt, "zero run without a count");
    out.insert(out.end(), std::size_t{in[++i]} + 1, 0);
  }
  return out;
}

CanonicalHuffman CanonicalHuffman::from_frequencies(const std::array<std::uint64_t, 256>& freq) {
  CanonicalHuffman h;
  std::vector<std::uint64_t> f(freq.begin(), freq.end());
  std::size_t used = 0;
  for (auto v : f) used += v > 0;
  if (used == 0) {
    h.assign_codes();
    return h;
  }
  if (used == 1) {
    for (int s = 0; s < 256; ++s)
      if (f[s] > 0) h.len_[s] = 1;
    h.assign_codes();
    return h;
  }
  for (;;) {
    // Nodes 0..255 are symbols; parents are appended. Ties go to the lower id.
    struct Item {
      std::uint64_t w;
      std::size_t id;
      bool operator>(const Item& o) const { return w != o.w ? w > o.w : id > o.id; }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    std::vector<std::size_t> parent(256, 0);
    for (std::size_t s = 0; s < 256; ++s)
      if (f[s] > 0) pq.push({f[s], s});
    while (pq.size() > 1) {
      auto a = pq.top();
      pq.pop();
      auto b = pq.top();
      pq.pop();
      auto id = parent.size();
      parent.push_back(0);
      parent[a.id] = id;
      parent[b.id] = id;
      pq.push({a.w + b.w, id});
    }
    auto root = pq.top().id;
    std::vector<unsigned> depth(parent.size(), 0);
    for (auto id = parent.size(); id-- > 0;)
      if (id != root && (id >= 256 || f[id] > 0)) depth[id] = depth[parent[id]] + 1;
    unsigned max_len = 0;
    for (int s = 0; s < 256; ++s) {
      h.len_[s] = static_cast<std::uint8_t>(f[s] > 0 ? depth[s] : 0);
      max_len = std::max<unsigned>(max_len, h.len_[s]);
    }
    if (max_len <= kMaxLength) break;
    for (auto& v : f)
      if (v > 0) v = (v + 1) / 2;
  }
  h.assign_codes();
  return h;
}

CanonicalHuffman CanonicalHuffman::from_lengths(const std::array<std::uint8_t, 256>& lengths) {
  CanonicalHuffman h;
  h.len_ = lengths;
  std::size_t used = 0;
  std::uint64_t kraft = 0;  // in units of 2^-kMaxLength
  for (auto l : lengths) {
    if (l > kMaxLength) fail(ErrorKind::kCorrupt, "Huffman code length too large");
    if (l > 0) {
      ++used;
      kraft += std::uint64_t{1} << (kMaxLength - l);
    }
  }
  bool single = used == 1 && kraft == (std::uint64_t{1} << (kMaxLength - 1));
  if (used > 0 && !single && kraft != (std::uint64_t{1} << kMaxLength))
    fail(ErrorKind::kCorrupt, "Huffman lengths do not form a complete code");
  h.assign_codes();
  return h;
}

void CanonicalHuffman::assign_codes() {
  count_.fill(0);
  for (auto l : len_)
    if (l > 0) ++count_[l];
  std::uint32_t code = 0, index = 0;
  for (unsigned l = 1; l <= kMaxLength; ++l) {
    first_code_[l] = code;
    first_index_[l] = index;
    code = (code + count_[l]) << 1;
    index += count_[l];
  }
  std::array<std::uint32_t, kMaxLength + 1> next = first_code_;
  std::array<std::uint32_t, kMaxLength + 1> slot = first_index_;
  for (unsigned l = 1; l <= kMaxLength; ++l)
    for (int s = 0; s < 256; ++s)
      if (len_[s] == l) {
        code_[s] = next[l]++;
        sorted_[slot[l]++] = static_cast<std::uint8_t>(s);
      }
}

Bytes CanonicalHuffman::encode(ByteSpan symbols) const {
  Bytes out;
  std::uint64_t acc = 0;
  unsigned bits = 0;
  for (auto s : symbols) {
    auto l = len_[s];
    if (l == 0) fail(ErrorKind::kInvalidArgument, "symbol has no Huffman code");
    acc = (acc << l) | code_[s];
    bits += l;
    while (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>(acc >> bits));
    }
  }
  if (bits > 0) out.push_back(static_cast<std::uint8_t>(acc << (8 - bits)));
  return out;
}

Bytes CanonicalHuffman::decode(ByteSpan bits, std::size_t count) const {
  Bytes out;
  out.reserve(count);
  std::size_t pos = 0;
  auto total = bits.size() * 8;
  while (out.size() < count) {
    std::uint32_t code = 0;
    unsigned l = 0;
    for (;;) {
      if (pos >= total) fail(ErrorKind::kCorrupt, "Huffman stream ended early");
      code = (code << 1) | ((bits[pos / 8] >> (7 - pos % 8)) & 1u);
      ++pos;
      if (++l > kMaxLength) fail(ErrorKind::kCorrupt, "invalid Huffman codeword");
      if (count_[l] > 0 && code >= first_code_[l] && code - first_code_[l] < count_[l]) {
        out.push_back(sorted_[first_index_[l] + (code - first_code_[l])]);
        break;
      }
    }
  }
  return out;
}

}  // namespace tidx
