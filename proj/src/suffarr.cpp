#include "tidx/suffarr.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace tidx {
namespace {

constexpr std::size_t kEntryBytes = 5;

// Suffix order with the terminator above every byte: on a shared prefix the
// shorter suffix is the larger one.
bool suffix_less(std::string_view t, std::size_t i, std::size_t j) {
  std::size_t li = t.size() - i, lj = t.size() - j;
  int c = std::memcmp(t.data() + i, t.data() + j, std::min(li, lj));
  if (c != 0) return c < 0;
  return li > lj;
}

// Compares the suffix at i with p over |p| characters: <0, 0 (p is a
// prefix of the suffix) or >0.
int compare_prefix(std::string_view t, std::size_t i, std::string_view p) {
  std::size_t li = t.size() - i;
  int c = std::memcmp(t.data() + i, p.data(), std::min(li, p.size()));
  if (c != 0) return c;
  return li >= p.size() ? 0 : 1;
}

void counting_sort(const std::vector<std::uint32_t>& in, std::vector<std::uint32_t>& out,
                   const std::vector<std::uint32_t>& key, std::size_t range,
                   std::vector<std::uint32_t>& count) {
  count.assign(range + 1, 0);
  for (auto i : in) ++count[key[i] + 1];
  for (std::size_t k = 1; k <= range; ++k) count[k] += count[k - 1];
  for (auto i : in) out[count[key[i]]++] = i;
}

}  // namespace

void check_text(std::string_view t) {
  if (t.find('\0') != std::string_view::npos)
    fail(ErrorKind::kInvalidArgument, "text contains the reserved byte 0x00");
}

std::vector<std::uint32_t> sort_suffixes(const std::vector<std::uint32_t>& s, std::uint32_t sigma,
                                         bool end_high) {
  auto n = s.size();
  std::vector<std::uint32_t> sa(n), tmp(n), rank(n), key2(n), count;
  if (n == 0) return sa;
  require(n < 0xFFFFFFF0u, ErrorKind::kOutOfRange, "text too long");
  // Ranks live in [1, max_rank]; the end marker takes 0 or max_rank + 1.
  std::uint32_t max_rank = sigma;
  for (std::size_t i = 0; i < n; ++i) {
    require(s[i] < sigma, ErrorKind::kInvalidArgument, "symbol outside alphabet");
    rank[i] = s[i] + 1;
  }
  std::iota(tmp.begin(), tmp.end(), 0u);
  for (std::size_t h = 1;; h <<= 1) {
    std::uint32_t end_key = end_high ? max_rank + 1 : 0;
    for (std::size_t i = 0; i < n; ++i) key2[i] = i + h < n ? rank[i + h] : end_key;
    std::iota(tmp.begin(), tmp.end(), 0u);
    counting_sort(tmp, sa, key2, max_rank + 2, count);
    counting_sort(sa, tmp, rank, max_rank + 2, count);
    sa.swap(tmp);
    tmp[sa[0]] = 1;
    for (std::size_t k = 1; k < n; ++k) {
      auto a = sa[k - 1], b = sa[k];
      tmp[b] = tmp[a] + ((rank[a] != rank[b] || key2[a] != key2[b]) ? 1 : 0);
    }
    max_rank = tmp[sa[n - 1]];
    rank.swap(tmp);
    if (max_rank == n) break;
  }
  return sa;
}

std::vector<std::uint32_t> kasai_lcp(const std::vector<std::uint32_t>& s,
                                     const std::vector<std::uint32_t>& sa) {
  auto n = s.size();
  require(sa.size() == n, ErrorKind::kInvalidArgument, "suffix array does not match text");
  std::vector<std::uint32_t> lcp(n > 0 ? n - 1 : 0), rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[sa[k]] = static_cast<std::uint32_t>(k);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rank[i] + 1 == n) {
      h = 0;
      continue;
    }
    std::size_t j = sa[rank[i] + 1];
    while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
    lcp[rank[i]] = static_cast<std::uint32_t>(h);
    if (h > 0) --h;
  }
  return lcp;
}

SuffixArray build_sa_internal(std::string_view t) {
  require(!t.empty(), ErrorKind::kInvalidArgument, "empty text");
  check_text(t);
  std::vector<std::uint32_t> s(t.begin(), t.end());
  for (auto& c : s) c &= 0xFF;
  auto sa = sort_suffixes(s, 256, true);
  SuffixArray out(sa.size());
  for (std::size_t k = 0; k < sa.size(); ++k) out[k] = sa[k] + 1;
  return out;
}

LcpArray build_lcp(std::string_view t, const SuffixArray& sa) {
  require(sa.size() == t.size(), ErrorKind::kInvalidArgument, "suffix array does not match text");
  std::vector<std::uint32_t> s(t.size()), sa0(sa.size());
  for (std::size_t i = 0; i < t.size(); ++i) s[i] = static_cast<std::uint8_t>(t[i]);
  std::vector<bool> seen(t.size(), false);
  for (std::size_t k = 0; k < sa.size(); ++k) {
    require(sa[k] >= 1 && sa[k] <= t.size() && !seen[sa[k] - 1], ErrorKind::kInvalidArgument,
            "suffix array is not a permutation");
    seen[sa[k] - 1] = true;
    sa0[k] = static_cast<std::uint32_t>(sa[k] - 1);
  }
  auto lcp = kasai_lcp(s, sa0);
  return LcpArray(lcp.begin(), lcp.end());
}

std::vector<std::uint64_t> sa_search(std::string_view t, const SuffixArray& sa, std::string_view p) {
  require(!p.empty(), ErrorKind::kInvalidArgument, "empty pattern");
  auto it = std::partition_point(sa.begin(), sa.end(), [&](std::uint64_t pos) {
    return compare_prefix(t, pos - 1, p) < 0;
  });
  std::vector<std::uint64_t> out;
  for (; it != sa.end() && compare_prefix(t, *it - 1, p) == 0; ++it) out.push_back(*it);
  std::sort(out.begin(), out.end());
  return out;
}

SuffixArray build_sa_incremental(std::string_view t, std::size_t m, PagedStore& store,
                                 IncrementalReport* report) {
  require(!t.empty(), ErrorKind::kInvalidArgument, "empty text");
  check_text(t);
  require(m >= 1 && m <= t.size(), ErrorKind::kOutOfRange, "stage size out of range");
  require(store.page_count() == 0, ErrorKind::kInvalidArgument, "incremental build needs an empty store");
  auto n = t.size();
  auto page = store.page_size();
  auto per_page = page / kEntryBytes;
  require(9 * m + 2 * page <= store.mem_budget(), ErrorKind::kOutOfRange,
          "memory budget too small for the stage size");
  std::size_t batch = std::max<std::size_t>(1, (store.mem_budget() - 9 * m) / page / 2);

  // Two regions of the store hold the running array alternately.
  auto region_pages = (n + per_page - 1) / per_page;
  Bytes zero(page, 0);
  for (std::size_t i = 0; i < 2 * region_pages; ++i) store.append_page(zero);
  std::size_t cur = 0;
  std::size_t ext_size = 0;

  if (report) report->stages.clear();
  std::vector<std::uint32_t> sa_int, count;
  for (std::size_t a = 0, stage = 1; a < n; a += m, ++stage) {
    auto before = store.io_stats();
    auto e = std::min(n, a + m);
    sa_int.resize(e - a);
    std::iota(sa_int.begin(), sa_int.end(), static_cast<std::uint32_t>(a));
    std::sort(sa_int.begin(), sa_int.end(),
              [&](std::uint32_t i, std::uint32_t j) { return suffix_less(t, i, j); });

    // count[j]: earlier suffixes falling between sa_int[j-1] and sa_int[j].
    count.assign(sa_int.size() + 1, 0);
    for (std::size_t i = 0; i < a; ++i) {
      auto p = std::partition_point(sa_int.begin(), sa_int.end(),
                                    [&](std::uint32_t j) { return suffix_less(t, j, i); });
      ++count[static_cast<std::size_t>(p - sa_int.begin())];
    }

    auto in_base = static_cast<PageId>(cur * region_pages);
    auto out_base = static_cast<PageId>((1 - cur) * region_pages);
    std::size_t in_page = 0, in_pos = 0, in_avail = 0;
    std::vector<std::uint64_t> in_buf;
    auto ext_pages = (ext_size + per_page - 1) / per_page;
    auto next_ext = [&]() -> std::uint64_t {
      if (in_pos == in_avail) {
        in_buf.clear();
        auto end_page = std::min(ext_pages, in_page + batch);
        for (; in_page < end_page; ++in_page) {
          auto bytes = store.read_page(static_cast<PageId>(in_base + in_page));
          for (std::size_t k = 0; k < per_page; ++k) in_buf.push_back(get_le(bytes, k * kEntryBytes, kEntryBytes));
        }
        in_pos = 0;
        in_avail = in_buf.size();
      }
      return in_buf[in_pos++];
    };

    std::vector<std::uint64_t> out_buf;
    std::size_t out_page = 0;
    auto flush = [&](bool final) {
      std::size_t full = out_buf.size() / per_page;
      if (final && out_buf.size() % per_page != 0) ++full;
      Bytes bytes;
      for (std::size_t pg = 0; pg < full; ++pg) {
        bytes.clear();
        for (std::size_t k = pg * per_page; k < std::min(out_buf.size(), (pg + 1) * per_page); ++k)
          put_le(bytes, out_buf[k], kEntryBytes);
        store.write_page(static_cast<PageId>(out_base + out_page++), bytes);
      }
      out_buf.erase(out_buf.begin(),
                    out_buf.begin() + static_cast<std::ptrdiff_t>(std::min(out_buf.size(), full * per_page)));
    };
    auto emit = [&](std::uint64_t v) {
      out_buf.push_back(v);
      if (out_buf.size() == batch * per_page) flush(false);
    };

    for (std::size_t j = 0; j <= sa_int.size(); ++j) {
      for (std::uint32_t c = 0; c < count[j]; ++c) emit(next_ext());
      if (j < sa_int.size()) emit(sa_int[j]);
    }
    flush(true);
    ext_size = e;
    cur = 1 - cur;
    if (report) report->stages.push_back({stage, e - a, store.io_stats() - before});
  }

  SuffixArray out;
  out.reserve(n);
  auto base = static_cast<PageId>(cur * region_pages);
  for (std::size_t pg = 0; pg < region_pages; ++pg) {
    auto bytes = store.read_page(static_cast<PageId>(base + pg));
    for (std::size_t k = 0; k < per_page && out.size() < n; ++k)
      out.push_back(get_le(bytes, k * kEntryBytes, kEntryBytes) + 1);
  }
  return out;
}

CollectionSa build_collection_sa(const std::vector<std::string>& texts) {
  require(texts.size() <= 0xFFFF, ErrorKind::kOutOfRange, "too many texts");
  std::vector<std::uint32_t> s;
  std::vector<std::uint32_t> text_of;
  std::vector<std::uint64_t> start;
  for (std::size_t id = 0; id < texts.size(); ++id) {
    check_text(texts[id]);
    start.push_back(s.size());
    for (unsigned char c : texts[id]) {
      s.push_back(c);
      text_of.push_back(static_cast<std::uint32_t>(id));
    }
    // Unique separators above every byte, increasing with the text id.
    s.push_back(static_cast<std::uint32_t>(256 + id));
    text_of.push_back(static_cast<std::uint32_t>(id));
  }
  auto sigma = static_cast<std::uint32_t>(256 + texts.size());
  auto sa = sort_suffixes(s, sigma, true);
  auto lcp = kasai_lcp(s, sa);

  CollectionSa out;
  std::uint64_t run_min = 0;
  bool have_prev = false;
  for (std::size_t k = 0; k < sa.size(); ++k) {
    auto pos = sa[k];
    if (s[pos] >= 256) {
      if (k < lcp.size()) run_min = std::min<std::uint64_t>(run_min, lcp[k]);
      continue;
    }
    auto id = text_of[pos];
    out.sa.push_back({id, pos - start[id] + 1});
    if (have_prev) out.lcp.push_back(run_min);
    have_prev = true;
    run_min = k < lcp.size() ? lcp[k] : 0;
  }
  return out;
}

void save_sa(const std::string& path, const SuffixArray& sa) {
  Bytes out;
  out.insert(out.end(), {'S', 'A', '0', '1'});
  put_le(out, sa.size(), 8);
  for (auto v : sa) {
    require(v < (std::uint64_t{1} << 40), ErrorKind::kOutOfRange, "offset exceeds 5 bytes");
    put_le(out, v, kEntryBytes);
  }
  write_file(path, out);
}

SuffixArray load_sa(const std::string& path) {
  auto bytes = read_file(path);
  ByteReader r(bytes);
  r.expect_magic("SA01");
  auto n = r.le(8);
  if (n > r.remaining() / kEntryBytes) fail(ErrorKind::kCorrupt, "suffix array file truncated");
  SuffixArray sa(n);
  for (auto& v : sa) v = r.le(kEntryBytes);
  if (r.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes in suffix array file");
  return sa;
}

}  // namespace tidx
