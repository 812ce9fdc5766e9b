#include "tidx/strsort.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>

#include "tidx/extsort.hpp"

namespace tidx {
namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t piece_bytes(std::size_t piece_bits) {
  if (piece_bits == 0 || piece_bits % 8 != 0)
    fail(ErrorKind::kInvalidArgument, "piece length must be a positive multiple of 8 bits");
  return piece_bits / 8;
}

std::string_view piece_of(const std::string& s, std::size_t pos, std::size_t pb) {
  return std::string_view(s).substr(pos * pb, pb);
}

void put_be(std::string& out, std::uint64_t v, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint64_t get_be(std::string_view in, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | static_cast<std::uint8_t>(in[pos + i]);
  return v;
}

bool order_is_sorted(const std::vector<std::string>& s, const std::vector<std::size_t>& order) {
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = s[order[i - 1]];
    const auto& b = s[order[i]];
    int c = a.compare(b);
    if (c > 0 || (c == 0 && order[i - 1] > order[i])) return false;
  }
  return true;
}

}  // namespace

unsigned name_bits_for(std::size_t k) {
  unsigned lg = k <= 1 ? 0 : static_cast<unsigned>(std::bit_width(k - 1));
  return 2 * std::max(1u, lg);
}

std::size_t recommended_piece_bits(std::uint64_t total_bytes, std::size_t mem_budget,
                                   std::size_t page_size, std::size_t k) {
  double n = std::max(1.0, std::ceil(static_cast<double>(total_bytes) / static_cast<double>(page_size)));
  double m = std::max(2.0, static_cast<double>(mem_budget / page_size));
  double log_m_n = std::max(1.0, std::log(n) / std::log(m));
  double lg_k = std::max(1.0, std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(k, 2)))));
  auto bytes = static_cast<std::size_t>(std::ceil(log_m_n * lg_k));
  return std::max<std::size_t>(8, bytes) * 8;
}

PieceNamer PieceNamer::seeded(std::size_t k, std::uint64_t seed) {
  PieceNamer n;
  n.bits_ = name_bits_for(k);
  n.seed_ = seed;
  return n;
}

PieceNamer PieceNamer::table(unsigned name_bits, std::map<std::string, std::uint64_t> names) {
  require(name_bits >= 1 && name_bits <= 64, ErrorKind::kInvalidArgument, "name width out of range");
  require(!names.empty(), ErrorKind::kInvalidArgument, "empty name table");
  PieceNamer n;
  n.bits_ = name_bits;
  for (auto& [piece, name] : names) {
    require(name_bits == 64 || name < (std::uint64_t{1} << name_bits), ErrorKind::kInvalidArgument,
            "table name wider than name_bits");
    n.table_.emplace(piece, name);
  }
  return n;
}

std::uint64_t PieceNamer::name(std::string_view piece) const {
  if (!table_.empty()) {
    auto it = table_.find(piece);
    if (it == table_.end()) fail(ErrorKind::kInvalidArgument, "piece missing from name table");
    return it->second;
  }
  // The bit length goes into the hash so a short tail piece never matches a
  // full piece it happens to be a prefix of.
  std::uint64_t h = mix64(seed_ ^ mix64(piece.size() * 8));
  for (std::size_t i = 0; i < piece.size(); i += 8) {
    std::uint64_t chunk = 0;
    for (std::size_t j = i; j < std::min(piece.size(), i + 8); ++j)
      chunk |= std::uint64_t{static_cast<std::uint8_t>(piece[j])} << (8 * (j - i));
    h = mix64(h ^ chunk);
  }
  return h >> (64 - bits_);
}

std::vector<CString> make_cstrings(const std::vector<std::string>& s, std::size_t piece_bits,
                                   const PieceNamer& namer) {
  require(!s.empty(), ErrorKind::kInvalidArgument, "empty string set");
  auto pb = piece_bytes(piece_bits);
  std::vector<CString> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i].source = i;
    auto pieces = (s[i].size() + pb - 1) / pb;
    out[i].names.reserve(pieces);
    for (std::size_t p = 0; p < pieces; ++p) out[i].names.push_back(namer.name(piece_of(s[i], p, pb)));
  }
  return out;
}

MarkedSort sort_and_mark(std::vector<CString> c, PagedStore* scratch) {
  MarkedSort m;
  if (scratch == nullptr) {
    std::stable_sort(c.begin(), c.end(),
                     [](const CString& a, const CString& b) { return a.names < b.names; });
    m.sorted = std::move(c);
  } else {
    // Names are written big-endian so byte order equals numeric order.
    ExternalSorter sorter(*scratch, [](std::string_view a, std::string_view b) {
      return a.substr(4) < b.substr(4);
    });
    std::string rec;
    for (const auto& cs : c) {
      rec.clear();
      for (int i = 0; i < 4; ++i) rec.push_back(static_cast<char>(cs.source >> (8 * i)));
      for (auto n : cs.names) put_be(rec, n, 8);
      sorter.add(rec);
    }
    c.clear();
    sorter.finish([&](std::string_view r) {
      CString cs;
      for (int i = 0; i < 4; ++i) cs.source |= std::size_t{static_cast<std::uint8_t>(r[i])} << (8 * i);
      for (std::size_t p = 4; p < r.size(); p += 8) cs.names.push_back(get_be(r, p, 8));
      m.sorted.push_back(std::move(cs));
    });
  }

  auto k = m.sorted.size();
  m.marks.assign(k, {});
  m.lcp.assign(k > 0 ? k - 1 : 0, 0);
  auto mark = [&](std::size_t x, std::size_t pos) {
    auto& v = m.marks[x];
    if (pos < m.sorted[x].names.size() && std::find(v.begin(), v.end(), pos) == v.end()) {
      v.push_back(pos);
      std::sort(v.begin(), v.end());
    }
  };
  for (std::size_t x = 0; x + 1 < k; ++x) {
    const auto& a = m.sorted[x].names;
    const auto& b = m.sorted[x + 1].names;
    auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
    auto l = static_cast<std::size_t>(ia - a.begin());
    m.lcp[x] = l;
    mark(x, l);
    mark(x + 1, l);
  }
  return m;
}

RankTable rank_marked(const std::vector<std::string>& s, const MarkedSort& m, std::size_t piece_bits) {
  auto pb = piece_bytes(piece_bits);
  std::map<std::pair<std::size_t, std::uint64_t>, std::string_view> seen;
  std::vector<std::string_view> pieces;
  for (std::size_t x = 0; x < m.sorted.size(); ++x) {
    const auto& cs = m.sorted[x];
    for (auto pos : m.marks[x]) {
      auto piece = piece_of(s[cs.source], pos, pb);
      auto [it, fresh] = seen.emplace(std::make_pair(pos, cs.names[pos]), piece);
      if (!fresh && it->second != piece)
        fail(ErrorKind::kCollision, "two distinct marked pieces share a name");
      pieces.push_back(piece);
    }
  }
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
  RankTable ranks;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    ranks.emplace(std::string(pieces[i]), static_cast<std::uint32_t>(i + 1));
  return ranks;
}

std::vector<std::size_t> resolve_and_sort(const std::vector<std::string>& s, const MarkedSort& m,
                                          const RankTable& ranks, std::size_t piece_bits,
                                          PagedStore* scratch, ResolveTrace* trace) {
  auto pb = piece_bytes(piece_bits);
  auto k = m.sorted.size();
  using Column = std::vector<std::uint32_t>;

  // Only the first max(lcp_{x-1}, lcp_x) + 1 entries of a column can be
  // nonzero; the rest is the logical zero padding.
  std::vector<Column> t(k);
  std::vector<std::vector<bool>> marked(k);
  for (std::size_t x = 0; x < k; ++x) {
    std::size_t len = 0;
    if (x > 0) len = std::max(len, m.lcp[x - 1] + 1);
    if (x + 1 < k) len = std::max(len, m.lcp[x] + 1);
    t[x].assign(len, 0);
    marked[x].assign(len, false);
    for (auto pos : m.marks[x]) {
      auto it = ranks.find(std::string(piece_of(s[m.sorted[x].source], pos, pb)));
      if (it == ranks.end()) fail(ErrorKind::kInvalidArgument, "marked piece missing from rank table");
      t[x][pos] = it->second;
      marked[x][pos] = true;
    }
  }

  std::size_t width = 0;
  for (const auto& cs : m.sorted) width = std::max(width, cs.names.size());
  auto padded = [&](const Column& c) {
    Column out(std::max(width, c.size()), 0);
    std::copy(c.begin(), c.end(), out.begin());
    return out;
  };

  for (std::size_t x = 1; x < k; ++x)
    for (std::size_t j = 0; j < m.lcp[x - 1]; ++j)
      if (!marked[x][j]) t[x][j] = t[x - 1][j];
  if (trace) {
    trace->after_rightward.clear();
    for (const auto& c : t) trace->after_rightward.push_back(padded(c));
  }
  for (std::size_t x = k - 1; x-- > 0;)
    for (std::size_t j = 0; j < m.lcp[x]; ++j) t[x][j] = t[x + 1][j];
  if (trace) {
    trace->after_leftward.clear();
    for (const auto& c : t) trace->after_leftward.push_back(padded(c));
  }

  for (auto& c : t)
    while (!c.empty() && c.back() == 0) c.pop_back();

  std::vector<std::size_t> order;
  order.reserve(k);
  std::vector<std::size_t> col_order;
  if (scratch == nullptr) {
    col_order.resize(k);
    for (std::size_t x = 0; x < k; ++x) col_order[x] = x;
    std::sort(col_order.begin(), col_order.end(), [&](std::size_t a, std::size_t b) {
      if (t[a] != t[b]) return t[a] < t[b];
      return m.sorted[a].source < m.sorted[b].source;
    });
  } else {
    // Record: source (4B big-endian) | column index (4B) | entries (4B big-endian).
    ExternalSorter sorter(*scratch, [](std::string_view a, std::string_view b) {
      auto ea = a.substr(8), eb = b.substr(8);
      if (ea != eb) return ea < eb;
      return a.substr(0, 4) < b.substr(0, 4);
    });
    std::string rec;
    for (std::size_t x = 0; x < k; ++x) {
      rec.clear();
      put_be(rec, m.sorted[x].source, 4);
      put_be(rec, x, 4);
      for (auto v : t[x]) put_be(rec, v, 4);
      sorter.add(rec);
    }
    sorter.finish([&](std::string_view r) { col_order.push_back(get_be(r, 4, 4)); });
  }
  for (auto x : col_order) order.push_back(m.sorted[x].source);

  if (trace) {
    trace->sorted_columns.clear();
    for (auto x : col_order) trace->sorted_columns.push_back(padded(t[x]));
    trace->sorted_sources = order;
  }
  return order;
}

std::vector<std::size_t> sort_strings_once(const std::vector<std::string>& s, std::size_t piece_bits,
                                           const PieceNamer& namer, PagedStore* scratch) {
  auto marked = sort_and_mark(make_cstrings(s, piece_bits, namer), scratch);
  auto ranks = rank_marked(s, marked, piece_bits);
  auto order = resolve_and_sort(s, marked, ranks, piece_bits, scratch);
  if (!order_is_sorted(s, order)) fail(ErrorKind::kCollision, "name collision left the output unsorted");
  return order;
}

SortOutcome sort_strings_detailed(const std::vector<std::string>& s, const SortConfig& cfg) {
  require(!s.empty(), ErrorKind::kInvalidArgument, "empty string set");
  piece_bytes(cfg.piece_bits);
  SortOutcome out;
  for (unsigned attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    ++out.attempts;
    auto namer = PieceNamer::seeded(s.size(), mix64(cfg.seed + attempt * 0x632be59bd9b4e019ULL));
    auto marked = sort_and_mark(make_cstrings(s, cfg.piece_bits, namer), cfg.scratch);
    RankTable ranks;
    try {
      ranks = rank_marked(s, marked, cfg.piece_bits);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kCollision) throw;
      ++out.rank_collisions;
      continue;
    }
    auto order = resolve_and_sort(s, marked, ranks, cfg.piece_bits, cfg.scratch);
    if (!order_is_sorted(s, order)) {
      ++out.verify_failures;
      continue;
    }
    out.order = std::move(order);
    return out;
  }
  fail(ErrorKind::kCollision, "string sort retries exhausted");
}

std::vector<std::size_t> sort_strings(const std::vector<std::string>& s, const SortConfig& cfg) {
  return sort_strings_detailed(s, cfg).order;
}

}  // namespace tidx
