#pragma once

// Word-level Huffman code with fan-out 128. Every codeword is a sequence of
// 7-bit digits packed one per byte; the first byte carries the tag bit 0x80
// and the others do not, so codeword starts are visible in the compressed
// stream and byte-level search finds only whole codewords.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tidx/bytes.hpp"

namespace tidx {

/// Maximal runs of ASCII letters and digits are words; the runs between
/// them are separator tokens. Concatenating the tokens gives t back.
std::vector<std::string_view> tokenize(std::string_view t);
bool is_word(std::string_view token);

struct Vocabulary {
  std::vector<std::string> terms;  // ascending
  std::vector<std::uint64_t> freq;
};

Vocabulary build_vocab(const std::vector<std::string_view>& tokens);

class HuffwordModel {
 public:
  /// Throws kInvalidArgument on an empty vocabulary.
  static HuffwordModel build(const Vocabulary& vocab);

  std::size_t size() const { return terms_.size(); }
  /// Terms in canonical order (code length, then term).
  const std::string& term(std::size_t i) const { return terms_[i]; }
  const Bytes& codeword(std::size_t i) const { return codes_[i]; }
  std::optional<std::size_t> find(std::string_view term) const;

  /// Throws kInvalidArgument on a token missing from the model.
  Bytes encode(const std::vector<std::string_view>& tokens) const;
  std::string decode(ByteSpan dt) const;
  /// Term index of the codeword at `offset` and the offset after it.
  std::pair<std::size_t, std::size_t> decode_one(ByteSpan dt, std::size_t offset) const;

  Bytes serialize() const;
  static HuffwordModel deserialize(ByteSpan bytes);
  /// Like deserialize, but reads from r and leaves it after the model.
  static HuffwordModel read(ByteReader& r);

 private:
  static HuffwordModel from_lengths(std::vector<std::pair<std::size_t, std::string>> items);

  std::vector<std::string> terms_;
  std::vector<Bytes> codes_;
  std::unordered_map<std::string, std::size_t> by_term_;
  std::unordered_map<std::string, std::size_t> by_code_;
};

/// Offsets of every occurrence of cw in dt.
std::vector<std::size_t> compressed_find(ByteSpan dt, ByteSpan cw);

}  // namespace tidx
