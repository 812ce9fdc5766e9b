#pragma once

// Word-based index: the text is Huffword-compressed into DT and a fat
// FM-index is built over the bytes of DT. A word query becomes a substring
// query for its codeword. Source offsets are recovered from sampled
// (DT offset, source offset) pairs by extracting DT backwards with LF.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/fmindex.hpp"
#include "tidx/huffword.hpp"

namespace tidx {

struct WfmConfig {
  std::uint32_t sample_rate = 32;
  std::uint32_t bucket_size = 256;
  std::uint32_t align_every = 64;  // codewords between alignment samples
};

class WfmIndex {
 public:
  static WfmIndex build(std::string_view t, const WfmConfig& cfg = {});

  std::uint64_t word_count(std::string_view w) const;
  /// Ascending 0-based source offsets of the token w.
  std::vector<std::uint64_t> word_locate(std::string_view w) const;
  /// Words (not separators) starting with p, each with its offsets.
  std::map<std::string, std::vector<std::uint64_t>> prefix_word_search(std::string_view p) const;

  bool empty() const { return !model_.has_value(); }
  const HuffwordModel& model() const { return *model_; }
  const FMIndex& fm() const { return *fm_; }

  Bytes serialize() const;
  static WfmIndex deserialize(ByteSpan bytes);
  static WfmIndex read(ByteReader& r);

 private:
  WfmIndex() = default;
  std::uint64_t source_offset(std::uint64_t row) const;
  void index_words();

  std::optional<HuffwordModel> model_;
  std::optional<FMIndex> fm_;
  std::uint32_t align_every_ = 64;
  std::vector<std::uint64_t> align_dt_;
  std::vector<std::uint64_t> align_src_;
  std::vector<std::string> words_;  // ascending, word tokens only
};

}  // namespace tidx
