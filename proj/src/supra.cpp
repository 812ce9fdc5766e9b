#include "tidx/supra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tidx/sbtree.hpp"

namespace tidx {

std::size_t SupraIndex::sub_array_size(std::size_t n) {
  if (n < 2) return 4;
  double l = std::log2(static_cast<double>(n));
  auto s = static_cast<std::size_t>(std::ceil(l * l - 1e-9));
  return std::max<std::size_t>(4, s);
}

SupraIndex::SupraIndex(const std::vector<SuffixRef>& sp, const std::vector<std::uint64_t>& lcp)
    : sp_(sp), lcp_(lcp) {
  require(sp.size() >= 2 && lcp.size() + 1 == sp.size(), ErrorKind::kInvalidArgument,
          "supra index needs at least two keys");
  auto size = sub_array_size(sp.size());
  for (std::size_t e = size; e < sp.size() + size; e += size) bounds_.push_back(std::min(e, sp.size()));
  for (std::size_t g = 0; g < bounds_.size(); ++g) {
    samples_.push_back(sp[bounds_[g] - 1]);
    if (g > 0) {
      auto lo = bounds_[g - 1] - 1, hi = bounds_[g] - 1;
      sample_lcp_.push_back(*std::min_element(lcp.begin() + static_cast<std::ptrdiff_t>(lo),
                                              lcp.begin() + static_cast<std::ptrdiff_t>(hi)));
    }
  }
  root_ = build(0, samples_.size() - 1);
}

std::pair<std::size_t, std::size_t> SupraIndex::group_range(std::size_t g) const {
  return {g == 0 ? 0 : bounds_[g - 1], bounds_[g]};
}

std::unique_ptr<SupraIndex::Node> SupraIndex::build(std::size_t lo, std::size_t hi) const {
  auto node = std::make_unique<Node>();
  if (lo == hi) {
    node->leaf = lo;
    return node;
  }
  auto it = std::min_element(sample_lcp_.begin() + static_cast<std::ptrdiff_t>(lo),
                             sample_lcp_.begin() + static_cast<std::ptrdiff_t>(hi));
  auto split = static_cast<std::size_t>(it - sample_lcp_.begin());
  node->bit = *it;
  node->child[0] = build(lo, split);
  node->child[1] = build(split + 1, hi);
  return node;
}

std::size_t SupraIndex::locate(const PatternBits& p, TextSource& texts) const {
  const Node* n = root_.get();
  while (n->child[0]) n = n->child[p.bit(n->bit)].get();
  auto x = n->leaf;
  auto ell = pattern_bit_lcp(p, samples_[x], 0, texts);
  std::size_t q;
  if (ell >= p.bit_length() || p.bit(ell) == 0) {
    auto y = x;
    while (y > 0 && sample_lcp_[y - 1] >= ell) --y;
    q = y;
  } else {
    auto z = x;
    while (z + 1 < samples_.size() && sample_lcp_[z] >= ell) ++z;
    q = z + 1;
  }
  return std::min(q, samples_.size() - 1);
}

std::size_t SupraIndex::rank(const PatternBits& p, TextSource& texts) const {
  auto g = locate(p, texts);
  auto [begin, end] = group_range(g);
  return begin + node_locate(sp_, lcp_, p, 0, texts, begin, end).r;
}

}  // namespace tidx
