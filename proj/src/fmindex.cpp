#include "tidx/fmindex.hpp"

#include <algorithm>

#include "tidx/entropy.hpp"
#include "tidx/suffarr.hpp"
#include "tidx/varint.hpp"

namespace tidx {
namespace {

std::vector<std::uint32_t> byte_suffix_order(std::string_view t) {
  std::vector<std::uint32_t> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) s[i] = static_cast<std::uint8_t>(t[i]);
  return sort_suffixes(s, 256, false);
}

int sym_of(char c) { return static_cast<std::uint8_t>(c) + 1; }

}  // namespace

std::string bwt_forward(std::string_view t) {
  check_text(t);
  return FMIndex::build(t, {FmMode::kTiny, 32, 256}).bwt();
}

std::string bwt_inverse(std::string_view l) {
  auto rows = l.size();
  require(std::count(l.begin(), l.end(), '\0') == 1, ErrorKind::kInvalidArgument,
          "BWT string needs exactly one terminator");
  // With a single 0x00 the terminator is the only symbol mapped to 0.
  std::array<std::uint64_t, kFmSymbols + 1> c{};
  std::vector<std::uint32_t> rank(rows);
  std::array<std::uint32_t, 256> seen{};
  for (std::size_t i = 0; i < rows; ++i) {
    auto b = static_cast<std::uint8_t>(l[i]);
    rank[i] = ++seen[b];
  }
  c[0] = 0;
  c[1] = 1;
  for (int b = 1; b < 256; ++b) c[b + 1] = c[b] + seen[b];
  std::string t(rows - 1, '\0');
  std::size_t row = 0;  // 0-based row 0 is the rotation starting with #
  for (std::size_t k = rows - 1; k-- > 0;) {
    auto b = static_cast<std::uint8_t>(l[row]);
    t[k] = static_cast<char>(b);
    row = c[b] + rank[row] - 1;
  }
  return t;
}

FMIndex FMIndex::build(std::string_view t, const FmConfig& cfg) {
  check_text(t);
  return build_bytes(t, cfg);
}

FMIndex FMIndex::build_bytes(std::string_view t, const FmConfig& cfg) {
  return from_sa(t, byte_suffix_order(t), cfg);
}

FMIndex FMIndex::from_sa(std::string_view t, const std::vector<std::uint32_t>& sa, const FmConfig& cfg) {
  require(cfg.sample_rate >= 1, ErrorKind::kInvalidArgument, "sample rate must be >= 1");
  require(cfg.bucket_size >= 1, ErrorKind::kInvalidArgument, "bucket size must be >= 1");
  FMIndex fm;
  fm.mode_ = cfg.mode;
  fm.s_ = cfg.sample_rate;
  fm.bucket_ = cfg.bucket_size;
  fm.n_ = t.size();
  auto rows = fm.n_ + 1;
  fm.l_.assign(rows, '\0');

  auto place = [&](std::uint64_t row, std::uint64_t pos) {
    if (pos == 1) {
      fm.term_row_ = row;
    } else {
      fm.l_[row - 1] = t[pos - 2];
    }
    if (fm.mode_ == FmMode::kFat && (pos % fm.s_ == 0 || pos == 1)) {
      fm.marked_rows_.push_back(row);
      fm.marked_pos_.push_back(pos);
    }
  };
  place(1, fm.n_ + 1);
  for (std::size_t k = 0; k < sa.size(); ++k) place(k + 2, sa[k] + 1);

  std::array<std::uint64_t, 256> freq{};
  for (auto ch : t) ++freq[static_cast<std::uint8_t>(ch)];
  fm.c_[0] = 0;
  fm.c_[1] = 1;
  for (int b = 0; b < 256; ++b) fm.c_[b + 2] = fm.c_[b + 1] + freq[b];
  fm.build_checkpoints();
  return fm;
}

void FMIndex::build_checkpoints() {
  auto rows = n_ + 1;
  auto buckets = rows / bucket_ + 1;
  checkpoints_.assign(buckets * 256, 0);
  std::array<std::uint32_t, 256> acc{};
  for (std::uint64_t row = 1; row <= rows; ++row) {
    if (row != term_row_) ++acc[static_cast<std::uint8_t>(l_[row - 1])];
    if (row % bucket_ == 0) std::copy(acc.begin(), acc.end(), checkpoints_.begin() + (row / bucket_) * 256);
  }
}

int FMIndex::symbol_at(std::uint64_t row) const {
  require(row >= 1 && row <= rows(), ErrorKind::kOutOfRange, "row out of range");
  return row == term_row_ ? kFmTerminator : sym_of(l_[row - 1]);
}

std::uint64_t FMIndex::occ(int symbol, std::uint64_t k) const {
  require(k <= rows(), ErrorKind::kOutOfRange, "occ prefix out of range");
  require(symbol >= 0 && symbol < kFmSymbols, ErrorKind::kInvalidArgument, "bad symbol");
  if (symbol == kFmTerminator) return k >= term_row_ ? 1 : 0;
  auto b = static_cast<std::uint8_t>(symbol - 1);
  auto bucket = k / bucket_;
  std::uint64_t count = checkpoints_[bucket * 256 + b];
  for (auto row = bucket * bucket_ + 1; row <= k; ++row)
    if (static_cast<std::uint8_t>(l_[row - 1]) == b && row != term_row_) ++count;
  return count;
}

std::uint64_t FMIndex::lf(std::uint64_t row) const {
  auto sym = symbol_at(row);
  return c_[sym] + occ(sym, row);
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> FMIndex::get_rows(std::string_view p) const {
  require(!p.empty(), ErrorKind::kInvalidArgument, "empty pattern");
  auto i = p.size();
  auto c = sym_of(p[i - 1]);
  std::uint64_t first = c_[c] + 1;
  std::uint64_t last = c_[c + 1];
  while (first <= last && i >= 2) {
    c = sym_of(p[i - 2]);
    first = c_[c] + occ(c, first - 1) + 1;
    last = c_[c] + occ(c, last);
    --i;
  }
  if (last < first) return std::nullopt;
  return std::make_pair(first, last);
}

std::uint64_t FMIndex::count(std::string_view p) const {
  auto r = get_rows(p);
  return r ? r->second - r->first + 1 : 0;
}

std::uint64_t FMIndex::locate(std::uint64_t row, std::uint64_t* steps) const {
  if (mode_ != FmMode::kFat) fail(ErrorKind::kUnsupported, "locate needs a fat index");
  require(row >= 1 && row <= rows(), ErrorKind::kOutOfRange, "row out of range");
  std::uint64_t v = 0;
  for (;;) {
    auto it = std::lower_bound(marked_rows_.begin(), marked_rows_.end(), row);
    if (it != marked_rows_.end() && *it == row) {
      if (steps) *steps = v;
      return marked_pos_[static_cast<std::size_t>(it - marked_rows_.begin())] + v;
    }
    row = lf(row);
    ++v;
  }
}

std::vector<std::uint64_t> FMIndex::locate_all(std::string_view p) const {
  std::vector<std::uint64_t> out;
  if (auto r = get_rows(p))
    for (auto row = r->first; row <= r->second; ++row) out.push_back(locate(row));
  std::sort(out.begin(), out.end());
  return out;
}

std::string FMIndex::bwt() const {
  std::string out = l_;
  out[term_row_ - 1] = '\0';
  return out;
}

Bytes FMIndex::serialize() const {
  // Marked pairs are kept sorted by row; the build produced them by row.
  Bytes out{'F', 'M', 'I', '1'};
  out.push_back(static_cast<std::uint8_t>(mode_));
  put_le(out, s_, 4);
  put_le(out, bucket_, 4);
  put_le(out, n_, 8);
  put_le(out, term_row_, 8);
  for (int b = 0; b < 256; ++b) put_uleb(out, c_[b + 2] - c_[b + 1]);

  auto rows = n_ + 1;
  std::vector<Bytes> coded;
  std::array<std::uint64_t, 256> freq{};
  for (std::uint64_t start = 0; start < rows; start += bucket_) {
    auto len = std::min<std::uint64_t>(bucket_, rows - start);
    auto syms = zero_run_encode(mtf_encode(as_bytes(std::string_view(l_).substr(start, len))));
    for (auto v : syms) ++freq[v];
    coded.push_back(std::move(syms));
  }
  auto huff = CanonicalHuffman::from_frequencies(freq);
  out.insert(out.end(), huff.lengths().begin(), huff.lengths().end());
  std::vector<Bytes> packed;
  for (const auto& syms : coded) packed.push_back(huff.encode(syms));
  put_le(out, coded.size(), 8);
  for (std::size_t i = 0; i < coded.size(); ++i) {
    put_uleb(out, packed[i].size());
    put_uleb(out, coded[i].size());
  }
  for (const auto& p : packed) out.insert(out.end(), p.begin(), p.end());

  put_le(out, marked_rows_.size(), 8);
  for (std::size_t i = 0; i < marked_rows_.size(); ++i) {
    put_le(out, marked_rows_[i], 5);
    put_le(out, marked_pos_[i], 5);
  }
  return out;
}

FMIndex FMIndex::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  auto fm = read(r);
  if (r.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes in FM index");
  return fm;
}

FMIndex FMIndex::read(ByteReader& r) {
  r.expect_magic("FMI1");
  FMIndex fm;
  auto mode = r.le(1);
  if (mode > 1) fail(ErrorKind::kCorrupt, "bad FM mode");
  fm.mode_ = static_cast<FmMode>(mode);
  fm.s_ = static_cast<std::uint32_t>(r.le(4));
  fm.bucket_ = static_cast<std::uint32_t>(r.le(4));
  fm.n_ = r.le(8);
  fm.term_row_ = r.le(8);
  if (fm.s_ == 0 || fm.bucket_ == 0) fail(ErrorKind::kCorrupt, "bad FM parameters");
  if (fm.term_row_ < 1 || fm.term_row_ > fm.n_ + 1) fail(ErrorKind::kCorrupt, "bad terminator row");

  fm.c_[0] = 0;
  fm.c_[1] = 1;
  for (int b = 0; b < 256; ++b) fm.c_[b + 2] = fm.c_[b + 1] + r.uleb();
  if (fm.c_[kFmSymbols] != fm.n_ + 1) fail(ErrorKind::kCorrupt, "symbol counts do not match length");

  std::array<std::uint8_t, 256> lengths;
  auto lb = r.take(256);
  std::copy(lb.begin(), lb.end(), lengths.begin());
  auto huff = CanonicalHuffman::from_lengths(lengths);
  auto buckets = r.le(8);
  auto rows = fm.n_ + 1;
  if (buckets != (rows + fm.bucket_ - 1) / fm.bucket_) fail(ErrorKind::kCorrupt, "bad bucket count");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> dir(buckets);
  for (auto& d : dir) {
    d.first = r.uleb();
    d.second = r.uleb();
  }
  fm.l_.clear();
  fm.l_.reserve(rows);
  for (std::uint64_t i = 0; i < buckets; ++i) {
    auto syms = huff.decode(r.take(dir[i].first), dir[i].second);
    auto bucket = mtf_decode(zero_run_decode(syms));
    auto want = std::min<std::uint64_t>(fm.bucket_, rows - i * fm.bucket_);
    if (bucket.size() != want) fail(ErrorKind::kCorrupt, "bucket decodes to the wrong length");
    fm.l_.append(as_chars(bucket));
  }

  auto marked = r.le(8);
  if (marked > r.remaining() / 10) fail(ErrorKind::kCorrupt, "marked table truncated");
  for (std::uint64_t i = 0; i < marked; ++i) {
    fm.marked_rows_.push_back(r.le(5));
    fm.marked_pos_.push_back(r.le(5));
  }
  fm.build_checkpoints();
  return fm;
}

}  // namespace tidx
