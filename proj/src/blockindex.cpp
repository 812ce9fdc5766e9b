#include "tidx/blockindex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "tidx/extsort.hpp"
#include "tidx/varint.hpp"

namespace tidx {
namespace {

constexpr std::size_t kHeaderPrefix = 4 + 4;  // magic, page size

void put_be32(std::string& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint32_t get_be32(std::string_view s, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<std::uint8_t>(s[pos + i]);
  return v;
}

struct Cut {
  std::uint64_t source_offset;
  std::vector<std::string_view> tokens;
};

std::vector<Cut> cut_blocks(const std::vector<std::string_view>& texts, std::size_t block_size) {
  std::vector<Cut> out;
  std::uint64_t base = 0;
  for (auto t : texts) {
    std::uint64_t start = 0, pos = 0;
    for (auto tok : tokenize(t)) {
      if (out.empty() || pos == start) out.push_back({base + pos, {}});
      out.back().tokens.push_back(tok);
      pos += tok.size();
      if (pos - start >= block_size) start = pos;
    }
    base += t.size();
  }
  return out;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (slope * x[i] + icpt);
    ss += e * e;
  }
  return {slope, std::sqrt(ss / n)};
}

}  // namespace

BlockIndex BlockIndex::build(const std::vector<std::string_view>& texts, const std::string& path,
                             const BlockConfig& cfg, BlockBuildReport* report) {
  require(cfg.block_size >= 64, ErrorKind::kInvalidArgument, "block size must be >= 64");
  auto cuts = cut_blocks(texts, cfg.block_size);
  require(cuts.size() < 0xFFFFFFFFu, ErrorKind::kInvalidArgument, "too many blocks");

  std::vector<std::string_view> all;
  for (const auto& c : cuts) all.insert(all.end(), c.tokens.begin(), c.tokens.end());
  auto vocab = build_vocab(all);
  std::unordered_map<std::string_view, std::uint32_t> term_id;
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) term_id.emplace(vocab.terms[i], static_cast<std::uint32_t>(i));

  // (term, block) pairs, big-endian so byte order is numeric order.
  std::vector<std::vector<std::uint64_t>> lists(vocab.terms.size());
  std::size_t runs = 0;
  IoStats sort_io;
  {
    auto scratch_path = path + ".sort";
    auto scratch = PagedStore::create(cfg.page_size, cfg.mem_budget, scratch_path);
    ExternalSorter sorter(scratch, [](std::string_view a, std::string_view b) { return a < b; });
    for (std::size_t b = 0; b < cuts.size(); ++b) {
      std::set<std::uint32_t> seen;
      for (auto tok : cuts[b].tokens) seen.insert(term_id.at(tok));
      for (auto id : seen) {
        std::string rec;
        put_be32(rec, id);
        put_be32(rec, static_cast<std::uint32_t>(b + 1));
        sorter.add(rec);
      }
    }
    sorter.finish([&](std::string_view rec) { lists[get_be32(rec, 0)].push_back(get_be32(rec, 4)); });
    runs = sorter.runs_written();
    sort_io = scratch.io_stats();
    std::remove(scratch_path.c_str());
  }

  std::optional<HuffwordModel> model;
  if (!vocab.terms.empty()) model = HuffwordModel::build(vocab);

  Bytes head{'B', 'I', 'X', '1'};
  put_le(head, cfg.page_size, 4);
  put_le(head, cfg.block_size, 4);
  Bytes msec = model ? model->serialize() : Bytes{};
  put_le(head, msec.size(), 8);
  head.insert(head.end(), msec.begin(), msec.end());

  Bytes postings;
  put_uleb(head, vocab.terms.size());
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
    const auto& t = vocab.terms[i];
    put_uleb(head, t.size());
    head.insert(head.end(), t.begin(), t.end());
    put_uleb(head, vocab.freq[i]);
    auto g = encode_gaps(lists[i]);
    put_uleb(head, postings.size());
    put_uleb(head, g.size());
    postings.insert(postings.end(), g.begin(), g.end());
  }
  put_le(head, postings.size(), 8);
  head.insert(head.end(), postings.begin(), postings.end());

  std::vector<Bytes> payloads;
  put_uleb(head, cuts.size());
  PageId rel = 0;
  for (const auto& c : cuts) {
    auto dt = model->encode(c.tokens);
    std::uint64_t src = 0;
    for (auto tok : c.tokens) src += tok.size();
    auto pages = (dt.size() + cfg.page_size - 1) / cfg.page_size;
    put_uleb(head, rel);
    put_uleb(head, pages);
    put_uleb(head, dt.size());
    put_uleb(head, c.source_offset);
    put_uleb(head, src);
    rel += static_cast<PageId>(pages);
    payloads.push_back(std::move(dt));
  }

  Bytes blob;
  put_le(blob, head.size(), 8);
  blob.insert(blob.end(), head.begin(), head.end());
  auto store = PagedStore::create(cfg.page_size, cfg.mem_budget, path);
  for (std::size_t off = 0; off < blob.size(); off += cfg.page_size)
    store.append_page(ByteSpan(blob).subspan(off, std::min(cfg.page_size, blob.size() - off)));
  for (const auto& dt : payloads)
    for (std::size_t off = 0; off < dt.size(); off += cfg.page_size)
      store.append_page(ByteSpan(dt).subspan(off, std::min(cfg.page_size, dt.size() - off)));
  if (report) {
    report->runs = runs;
    report->sort_io = sort_io;
    report->index_io = store.io_stats();
  }
  BlockIndex idx(std::move(store));
  idx.load_header(ByteSpan(blob).subspan(8));
  idx.header_pages_ = (blob.size() + cfg.page_size - 1) / cfg.page_size;
  idx.reset_stats();
  return idx;
}

BlockIndex BlockIndex::open(const std::string& path, std::size_t mem_budget) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  std::uint8_t pre[8 + kHeaderPrefix];
  if (!in.read(reinterpret_cast<char*>(pre), sizeof pre)) fail(ErrorKind::kCorrupt, "block index truncated");
  ByteReader pr(ByteSpan(pre, sizeof pre));
  auto len = pr.le(8);
  pr.expect_magic("BIX1");
  auto page_size = pr.le(4);
  if (page_size < PagedStore::kMinPageSize) fail(ErrorKind::kCorrupt, "bad page size in block index");

  BlockIndex idx(PagedStore::open(page_size, mem_budget, path));
  auto pages = (len + 8 + page_size - 1) / page_size;
  if (pages > idx.store_.page_count()) fail(ErrorKind::kCorrupt, "block index header truncated");
  Bytes blob;
  for (std::size_t p = 0; p < pages; ++p) {
    auto page = idx.store_.read_page(static_cast<PageId>(p));
    blob.insert(blob.end(), page.begin(), page.end());
  }
  idx.load_header(ByteSpan(blob).subspan(8, len));
  idx.header_pages_ = pages;
  for (std::size_t b = 1; b <= idx.blocks_.size(); ++b) {
    const auto& e = idx.block(b);
    if (pages + e.first_page + e.page_count > idx.store_.page_count())
      fail(ErrorKind::kCorrupt, "block payload past end of file");
  }
  idx.reset_stats();
  return idx;
}

void BlockIndex::load_header(ByteSpan blob) {
  ByteReader r(blob);
  r.expect_magic("BIX1");
  r.le(4);
  block_size_ = r.le(4);
  auto mlen = r.le(8);
  if (mlen > 0) model_ = HuffwordModel::deserialize(r.take(mlen));
  auto terms = r.uleb();
  if (terms > r.remaining()) fail(ErrorKind::kCorrupt, "bad vocabulary size");
  for (std::uint64_t i = 0; i < terms; ++i) {
    auto len = r.uleb();
    terms_.emplace_back(as_chars(r.take(len)));
    if (i > 0 && !(terms_[i - 1] < terms_[i])) fail(ErrorKind::kCorrupt, "vocabulary out of order");
    freq_.push_back(r.uleb());
    auto off = r.uleb();
    posting_span_.emplace_back(off, r.uleb());
  }
  auto plen = r.le(8);
  auto pb = r.take(plen);
  postings_.assign(pb.begin(), pb.end());
  for (auto [off, len] : posting_span_)
    if (off + len > postings_.size()) fail(ErrorKind::kCorrupt, "posting list out of range");
  auto count = r.uleb();
  if (count > r.remaining()) fail(ErrorKind::kCorrupt, "bad block count");
  for (std::uint64_t i = 0; i < count; ++i) {
    BlockEntry e;
    e.first_page = static_cast<PageId>(r.uleb());
    e.page_count = r.uleb();
    e.dt_bytes = r.uleb();
    e.source_offset = r.uleb();
    e.source_bytes = r.uleb();
    if (e.dt_bytes > e.page_count * store_.page_size()) fail(ErrorKind::kCorrupt, "block larger than its pages");
    blocks_.push_back(e);
  }
  if (r.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes in block index header");
  if (!terms_.empty() && (!model_ || model_->size() != terms_.size()))
    fail(ErrorKind::kCorrupt, "model does not match vocabulary");
}

std::vector<std::uint64_t> BlockIndex::postings(std::string_view term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return {};
  auto [off, len] = posting_span_[static_cast<std::size_t>(it - terms_.begin())];
  return decode_gaps(ByteSpan(postings_).subspan(off, len));
}

std::vector<PageId> BlockIndex::block_pages(std::size_t id) const {
  const auto& e = block(id);
  std::vector<PageId> out;
  for (std::size_t p = 0; p < e.page_count; ++p) out.push_back(static_cast<PageId>(header_pages_ + e.first_page + p));
  return out;
}

Bytes BlockIndex::read_block(std::size_t id) {
  Bytes dt;
  for (auto p : block_pages(id)) {
    auto page = store_.read_page(p);
    dt.insert(dt.end(), page.begin(), page.end());
  }
  dt.resize(block(id).dt_bytes);
  return dt;
}

std::vector<std::uint64_t> BlockIndex::map_offsets(std::size_t id, ByteSpan dt,
                                                   const std::vector<std::size_t>& at) const {
  std::vector<std::uint64_t> out;
  auto src = block(id).source_offset;
  std::size_t pos = 0, k = 0;
  while (k < at.size()) {
    if (pos == at[k]) {
      out.push_back(src);
      ++k;
    }
    if (pos >= dt.size()) fail(ErrorKind::kCorrupt, "match offset not on a codeword boundary");
    auto [term, next] = model_->decode_one(dt, pos);
    src += model_->term(term).size();
    pos = next;
  }
  return out;
}

std::vector<std::uint64_t> BlockIndex::query_word(std::string_view w) {
  std::vector<std::uint64_t> out;
  auto blocks = postings(w);
  if (blocks.empty()) return out;
  const auto& cw = model_->codeword(*model_->find(w));
  for (auto b : blocks) {
    auto dt = read_block(b);
    auto hits = map_offsets(b, dt, compressed_find(dt, cw));
    out.insert(out.end(), hits.begin(), hits.end());
  }
  return out;
}

std::map<std::string, std::vector<std::uint64_t>> BlockIndex::query_prefix(std::string_view p) {
  require(!p.empty(), ErrorKind::kInvalidArgument, "empty prefix");
  std::map<std::string, std::vector<std::uint64_t>> out;
  std::unordered_map<std::size_t, std::string> wanted;  // model index -> term
  std::set<std::uint64_t> candidates;
  for (auto it = std::lower_bound(terms_.begin(), terms_.end(), p);
       it != terms_.end() && std::string_view(*it).substr(0, p.size()) == p; ++it) {
    if (!is_word(*it)) continue;
    wanted.emplace(*model_->find(*it), *it);
    out.emplace(*it, std::vector<std::uint64_t>{});
    for (auto b : postings(*it)) candidates.insert(b);
  }
  for (auto b : candidates) {
    auto dt = read_block(b);
    auto src = block(b).source_offset;
    for (std::size_t pos = 0; pos < dt.size();) {
      auto [term, next] = model_->decode_one(dt, pos);
      if (auto w = wanted.find(term); w != wanted.end()) out[w->second].push_back(src);
      src += model_->term(term).size();
      pos = next;
    }
  }
  return out;
}

std::string BlockIndex::decode_block(std::size_t id) {
  if (!model_) return {};
  return model_->decode(read_block(id));
}

std::string BlockIndex::decode_all() {
  std::string out;
  for (std::size_t b = 1; b <= blocks_.size(); ++b) out += decode_block(b);
  return out;
}

CorpusStats corpus_stats(const std::vector<std::string_view>& texts) {
  std::vector<std::string_view> words;
  for (auto t : texts)
    for (auto tok : tokenize(t))
      if (is_word(tok)) words.push_back(tok);
  auto n = words.size();
  require(n > 100, ErrorKind::kInvalidArgument, "corpus too small: need more than 100 word tokens");

  CorpusStats st;
  st.n_tokens = n;
  std::unordered_map<std::string_view, std::uint64_t> freq;
  std::vector<double> hx, hy;
  // Prefix lengths grow by a factor 1.25 from max(100, n/256), ending at n.
  std::uint64_t next = std::max<std::uint64_t>(100, n / 256);
  for (std::uint64_t i = 0; i < n; ++i) {
    ++freq[words[i]];
    if (i + 1 == next || i + 1 == n) {
      hx.push_back(std::log(static_cast<double>(i + 1)));
      hy.push_back(std::log(static_cast<double>(freq.size())));
      next = std::max(next + 1, static_cast<std::uint64_t>(std::ceil(static_cast<double>(next) * 1.25)));
    }
  }
  st.vocab_size = freq.size();
  if (st.vocab_size < 2) fail(ErrorKind::kInvalidArgument, "fit error: vocabulary has a single word");
  std::tie(st.heaps_beta, st.heaps_residual) = fit_line(hx, hy);
  st.heaps_points = hx.size();

  std::vector<std::uint64_t> f;
  for (auto& [w, c] : freq) f.push_back(c);
  std::sort(f.rbegin(), f.rend());
  auto top = std::max<std::size_t>(2, f.size() / 2);
  std::vector<double> zx, zy;
  for (std::size_t r = 0; r < top; ++r) {
    zx.push_back(std::log(static_cast<double>(r + 1)));
    zy.push_back(std::log(static_cast<double>(f[r])));
  }
  auto [slope, res] = fit_line(zx, zy);
  st.zipf_theta = -slope;
  st.zipf_residual = res;
  st.zipf_points = zx.size();
  return st;
}

}  // namespace tidx
