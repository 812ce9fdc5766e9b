#include "tidx/huffword.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "tidx/varint.hpp"

namespace tidx {
namespace {

constexpr unsigned kFanOut = 128;
constexpr unsigned kMaxDigits = 8;

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

std::vector<std::string_view> tokenize(std::string_view t) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < t.size()) {
    bool word = is_alnum(t[i]);
    auto j = i + 1;
    while (j < t.size() && is_alnum(t[j]) == word) ++j;
    out.push_back(t.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_word(std::string_view token) { return !token.empty() && is_alnum(token.front()); }

Vocabulary build_vocab(const std::vector<std::string_view>& tokens) {
  std::map<std::string_view, std::uint64_t> counts;
  for (auto t : tokens) ++counts[t];
  Vocabulary v;
  for (auto& [term, f] : counts) {
    v.terms.emplace_back(term);
    v.freq.push_back(f);
  }
  return v;
}

HuffwordModel HuffwordModel::build(const Vocabulary& vocab) {
  auto n = vocab.terms.size();
  require(n > 0, ErrorKind::kInvalidArgument, "empty vocabulary");
  require(vocab.freq.size() == n, ErrorKind::kInvalidArgument, "vocabulary frequency count mismatch");
  std::vector<std::pair<std::size_t, std::string>> items;
  if (n == 1) {
    items.emplace_back(1, vocab.terms[0]);
    return from_lengths(std::move(items));
  }
  // Dummy leaves of weight 0 make every merge take exactly 128 nodes.
  std::size_t dummies = (kFanOut - 1 - (n - 1) % (kFanOut - 1)) % (kFanOut - 1);
  struct Item {
    std::uint64_t w;
    std::size_t seq;
    bool operator>(const Item& o) const { return w != o.w ? w > o.w : seq > o.seq; }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::vector<std::size_t> parent(dummies + n, 0);
  for (std::size_t i = 0; i < dummies; ++i) pq.push({0, i});
  for (std::size_t i = 0; i < n; ++i) pq.push({vocab.freq[i], dummies + i});
  while (pq.size() > 1) {
    auto id = parent.size();
    parent.push_back(0);
    std::uint64_t w = 0;
    for (unsigned k = 0; k < kFanOut && !pq.empty(); ++k) {
      auto it = pq.top();
      pq.pop();
      parent[it.seq] = id;
      w += it.w;
    }
    pq.push({w, id});
  }
  auto root = pq.top().seq;
  std::vector<std::size_t> depth(parent.size(), 0);
  for (auto id = parent.size(); id-- > 0;)
    if (id != root) depth[id] = depth[parent[id]] + 1;
  for (std::size_t i = 0; i < n; ++i) items.emplace_back(depth[dummies + i], vocab.terms[i]);
  return from_lengths(std::move(items));
}

HuffwordModel HuffwordModel::from_lengths(std::vector<std::pair<std::size_t, std::string>> items) {
  std::sort(items.begin(), items.end());
  HuffwordModel m;
  std::uint64_t code = 0;
  std::size_t prev = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    auto len = items[k].first;
    if (len < 1 || len > kMaxDigits) fail(ErrorKind::kCorrupt, "codeword length out of range");
    if (k > 0) {
      if (items[k].second == items[k - 1].second) fail(ErrorKind::kCorrupt, "duplicate term");
      code += 1;
      for (auto l = prev; l < len; ++l) code *= kFanOut;
    }
    std::uint64_t limit = 1;
    for (std::size_t l = 0; l < len; ++l) limit *= kFanOut;
    if (code >= limit) fail(ErrorKind::kCorrupt, "codeword lengths violate the Kraft inequality");
    Bytes cw(len);
    auto c = code;
    for (auto i = len; i-- > 0;) {
      cw[i] = static_cast<std::uint8_t>(c % kFanOut);
      c /= kFanOut;
    }
    cw[0] |= 0x80;
    m.by_term_.emplace(items[k].second, m.terms_.size());
    m.by_code_.emplace(std::string(as_chars(cw)), m.terms_.size());
    m.terms_.push_back(std::move(items[k].second));
    m.codes_.push_back(std::move(cw));
    prev = len;
  }
  return m;
}

std::optional<std::size_t> HuffwordModel::find(std::string_view term) const {
  auto it = by_term_.find(std::string(term));
  if (it == by_term_.end()) return std::nullopt;
  return it->second;
}

Bytes HuffwordModel::encode(const std::vector<std::string_view>& tokens) const {
  Bytes out;
  for (auto t : tokens) {
    auto i = find(t);
    if (!i) fail(ErrorKind::kInvalidArgument, "token not in the model: " + std::string(t));
    out.insert(out.end(), codes_[*i].begin(), codes_[*i].end());
  }
  return out;
}

std::pair<std::size_t, std::size_t> HuffwordModel::decode_one(ByteSpan dt, std::size_t offset) const {
  if (offset >= dt.size() || (dt[offset] & 0x80) == 0) fail(ErrorKind::kCorrupt, "no codeword start at offset");
  auto end = offset + 1;
  while (end < dt.size() && (dt[end] & 0x80) == 0) ++end;
  auto it = by_code_.find(std::string(as_chars(dt.subspan(offset, end - offset))));
  if (it == by_code_.end()) fail(ErrorKind::kCorrupt, "unknown codeword");
  return {it->second, end};
}

std::string HuffwordModel::decode(ByteSpan dt) const {
  std::string out;
  for (std::size_t pos = 0; pos < dt.size();) {
    auto [i, next] = decode_one(dt, pos);
    out += terms_[i];
    pos = next;
  }
  return out;
}

Bytes HuffwordModel::serialize() const {
  Bytes out{'H', 'W', 'M', '1'};
  put_uleb(out, terms_.size());
  for (const auto& c : codes_) out.push_back(static_cast<std::uint8_t>(c.size()));
  for (const auto& t : terms_) {
    put_uleb(out, t.size());
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

HuffwordModel HuffwordModel::read(ByteReader& r) {
  r.expect_magic("HWM1");
  auto count = r.uleb();
  if (count == 0 || count > r.remaining()) fail(ErrorKind::kCorrupt, "bad term count");
  auto lens = r.take(count);
  std::vector<std::pair<std::size_t, std::string>> items;
  items.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto len = r.uleb();
    items.emplace_back(lens[i], std::string(as_chars(r.take(len))));
    if (i > 0 && !(items[i - 1] < items[i])) fail(ErrorKind::kCorrupt, "model terms out of order");
  }
  return from_lengths(std::move(items));
}

HuffwordModel HuffwordModel::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  auto m = read(r);
  if (r.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes after model");
  return m;
}

std::vector<std::size_t> compressed_find(ByteSpan dt, ByteSpan cw) {
  std::vector<std::size_t> out;
  if (cw.empty()) return out;
  auto hay = as_chars(dt);
  auto needle = as_chars(cw);
  // cw starts with a tagged byte, so a match starts at a codeword boundary
  // and, the code being prefix-free, is that whole codeword.
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1))
    out.push_back(pos);
  return out;
}

}  // namespace tidx
