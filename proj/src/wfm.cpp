#include "tidx/wfm.hpp"

#include <algorithm>

#include "tidx/varint.hpp"

namespace tidx {

WfmIndex WfmIndex::build(std::string_view t, const WfmConfig& cfg) {
  require(cfg.align_every >= 1, ErrorKind::kInvalidArgument, "alignment interval must be >= 1");
  WfmIndex idx;
  idx.align_every_ = cfg.align_every;
  auto tokens = tokenize(t);
  if (tokens.empty()) return idx;
  idx.model_ = HuffwordModel::build(build_vocab(tokens));

  Bytes dt;
  std::uint64_t src = 0;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k % cfg.align_every == 0) {
      idx.align_dt_.push_back(dt.size());
      idx.align_src_.push_back(src);
    }
    const auto& cw = idx.model_->codeword(*idx.model_->find(tokens[k]));
    dt.insert(dt.end(), cw.begin(), cw.end());
    src += tokens[k].size();
  }
  idx.fm_ = FMIndex::build_bytes(as_chars(dt), {FmMode::kFat, cfg.sample_rate, cfg.bucket_size});
  idx.index_words();
  return idx;
}

void WfmIndex::index_words() {
  words_.clear();
  for (std::size_t i = 0; i < model_->size(); ++i)
    if (is_word(model_->term(i))) words_.push_back(model_->term(i));
  std::sort(words_.begin(), words_.end());
}

std::uint64_t WfmIndex::word_count(std::string_view w) const {
  if (!model_) return 0;
  auto i = model_->find(w);
  if (!i) return 0;
  return fm_->count(as_chars(model_->codeword(*i)));
}

std::uint64_t WfmIndex::source_offset(std::uint64_t row) const {
  auto o = fm_->locate(row) - 1;  // 0-based DT offset of the match
  auto it = std::upper_bound(align_dt_.begin(), align_dt_.end(), o);
  auto s = static_cast<std::size_t>(it - align_dt_.begin()) - 1;
  auto from = align_dt_[s];

  // DT[from, o) read backwards through LF from the matching row.
  Bytes piece(o - from);
  auto r = row;
  for (auto k = piece.size(); k-- > 0;) {
    piece[k] = static_cast<std::uint8_t>(fm_->symbol_at(r) - 1);
    r = fm_->lf(r);
  }
  std::uint64_t src = align_src_[s];
  std::size_t pos = 0;
  while (pos < piece.size()) {
    auto [term, next] = model_->decode_one(piece, pos);
    src += model_->term(term).size();
    pos = next;
  }
  return src;
}

std::vector<std::uint64_t> WfmIndex::word_locate(std::string_view w) const {
  std::vector<std::uint64_t> out;
  if (!model_) return out;
  auto i = model_->find(w);
  if (!i) return out;
  if (auto rows = fm_->get_rows(as_chars(model_->codeword(*i)))) {
    // The codeword's first byte is tagged, so every match is aligned.
    for (auto row = rows->first; row <= rows->second; ++row) out.push_back(source_offset(row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::vector<std::uint64_t>> WfmIndex::prefix_word_search(std::string_view p) const {
  require(!p.empty(), ErrorKind::kInvalidArgument, "empty prefix");
  std::map<std::string, std::vector<std::uint64_t>> out;
  for (auto it = std::lower_bound(words_.begin(), words_.end(), p);
       it != words_.end() && std::string_view(*it).substr(0, p.size()) == p; ++it)
    out.emplace(*it, word_locate(*it));
  return out;
}

Bytes WfmIndex::serialize() const {
  Bytes out{'W', 'F', 'M', '1'};
  out.push_back(model_ ? 1 : 0);
  put_le(out, align_every_, 4);
  if (!model_) return out;
  auto section = [&](const Bytes& b) {
    put_le(out, b.size(), 8);
    out.insert(out.end(), b.begin(), b.end());
  };
  section(model_->serialize());
  section(fm_->serialize());
  Bytes aln{'A', 'L', 'N', '1'};
  put_le(aln, align_dt_.size(), 8);
  for (std::size_t i = 0; i < align_dt_.size(); ++i) {
    put_uleb(aln, align_dt_[i]);
    put_uleb(aln, align_src_[i]);
  }
  section(aln);
  return out;
}

WfmIndex WfmIndex::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  auto idx = read(r);
  if (r.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes in WFM bundle");
  return idx;
}

WfmIndex WfmIndex::read(ByteReader& r) {
  r.expect_magic("WFM1");
  WfmIndex idx;
  auto has_model = r.le(1);
  idx.align_every_ = static_cast<std::uint32_t>(r.le(4));
  if (has_model == 0) return idx;
  auto section = [&]() { return r.take(r.le(8)); };
  idx.model_ = HuffwordModel::deserialize(section());
  idx.fm_ = FMIndex::deserialize(section());
  ByteReader a(section());
  a.expect_magic("ALN1");
  auto n = a.le(8);
  for (std::uint64_t i = 0; i < n; ++i) {
    idx.align_dt_.push_back(a.uleb());
    idx.align_src_.push_back(a.uleb());
  }
  if (idx.align_dt_.empty() || idx.align_dt_.front() != 0) fail(ErrorKind::kCorrupt, "bad alignment table");
  if (a.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes in alignment table");
  idx.index_words();
  return idx;
}

}  // namespace tidx
