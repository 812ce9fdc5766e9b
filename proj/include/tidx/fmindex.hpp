#pragma once

// Burrows-Wheeler transform and FM-index. Rows are 1-based; the terminator
// sorts below every byte, so row 1 is the rotation starting with it.
// Internally symbol 0 is the terminator and byte b is symbol b + 1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tidx/bytes.hpp"

namespace tidx {

inline constexpr int kFmTerminator = 0;
inline constexpr int kFmSymbols = 257;

/// Last column of the sorted rotations of t#, with # written as 0x00.
std::string bwt_forward(std::string_view t);
/// Inverse; l must contain exactly one 0x00.
std::string bwt_inverse(std::string_view l);

enum class FmMode : std::uint8_t { kTiny = 0, kFat = 1 };

struct FmConfig {
  FmMode mode = FmMode::kFat;
  std::uint32_t sample_rate = 32;
  std::uint32_t bucket_size = 256;
};

class FMIndex {
 public:
  /// Text must not contain 0x00.
  static FMIndex build(std::string_view t, const FmConfig& cfg = {});
  /// Any bytes allowed (the terminator is kept out of band).
  static FMIndex build_bytes(std::string_view t, const FmConfig& cfg = {});

  std::uint64_t text_length() const { return n_; }
  std::uint64_t rows() const { return n_ + 1; }
  FmMode mode() const { return mode_; }
  std::uint32_t sample_rate() const { return s_; }
  std::uint32_t bucket_size() const { return bucket_; }
  std::uint64_t terminator_row() const { return term_row_; }
  const std::array<std::uint64_t, kFmSymbols + 1>& counts() const { return c_; }

  /// Symbol of L at a row.
  int symbol_at(std::uint64_t row) const;
  /// Occurrences of `symbol` in L[1..k], 0 <= k <= rows().
  std::uint64_t occ(int symbol, std::uint64_t k) const;
  std::uint64_t lf(std::uint64_t row) const;

  std::optional<std::pair<std::uint64_t, std::uint64_t>> get_rows(std::string_view p) const;
  std::uint64_t count(std::string_view p) const;
  /// Text position (1-based; the terminator row gives n + 1). Fat mode only.
  std::uint64_t locate(std::uint64_t row, std::uint64_t* steps = nullptr) const;
  /// Ascending positions of p.
  std::vector<std::uint64_t> locate_all(std::string_view p) const;

  /// L with the terminator as 0x00.
  std::string bwt() const;

  Bytes serialize() const;
  static FMIndex deserialize(ByteSpan bytes);
  /// Reads one index from r and leaves r after it.
  static FMIndex read(ByteReader& r);

 private:
  FMIndex() = default;
  static FMIndex from_sa(std::string_view t, const std::vector<std::uint32_t>& sa, const FmConfig& cfg);
  void build_checkpoints();

  FmMode mode_ = FmMode::kFat;
  std::uint32_t s_ = 32;
  std::uint32_t bucket_ = 256;
  std::uint64_t n_ = 0;
  std::uint64_t term_row_ = 0;
  std::string l_;  // row i at l_[i-1]; the terminator row holds a placeholder
  std::array<std::uint64_t, kFmSymbols + 1> c_{};
  std::vector<std::uint32_t> checkpoints_;  // per bucket boundary, 256 byte counts
  std::vector<std::uint64_t> marked_rows_;
  std::vector<std::uint64_t> marked_pos_;
};

}  // namespace tidx
