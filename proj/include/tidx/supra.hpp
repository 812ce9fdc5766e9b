#pragma once

// Sampled routing over a long SP array: the array is cut into sub-arrays of
// max(4, ceil(log2(|SP|)^2)) keys and the rightmost key of each sub-array goes
// into an in-memory Patricia tree. A blind descent plus one string
// comparison picks the sub-array; node_locate then runs inside it only.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "tidx/bitkey.hpp"

namespace tidx {

class SupraIndex {
 public:
  SupraIndex(const std::vector<SuffixRef>& sp, const std::vector<std::uint64_t>& lcp);

  static std::size_t sub_array_size(std::size_t n);

  std::size_t groups() const { return bounds_.size(); }
  /// [begin, end) of sub-array g in the original array.
  std::pair<std::size_t, std::size_t> group_range(std::size_t g) const;

  /// Sub-array holding the position of P.
  std::size_t locate(const PatternBits& p, TextSource& texts) const;
  /// Keys of the whole array smaller than P.
  std::size_t rank(const PatternBits& p, TextSource& texts) const;

 private:
  struct Node {
    std::uint64_t bit = 0;
    std::size_t leaf = 0;
    std::unique_ptr<Node> child[2];
  };

  std::unique_ptr<Node> build(std::size_t lo, std::size_t hi) const;

  const std::vector<SuffixRef>& sp_;
  const std::vector<std::uint64_t>& lcp_;
  std::vector<std::size_t> bounds_;  // end of each sub-array
  std::vector<SuffixRef> samples_;
  std::vector<std::uint64_t> sample_lcp_;
  std::unique_ptr<Node> root_;
};

}  // namespace tidx
