#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace tidx::testing {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    path_ = base / ("tidx_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string random_text(std::mt19937_64& rng, std::size_t n, int sigma, char base = 'a') {
  std::uniform_int_distribution<int> d(0, sigma - 1);
  std::string s(n, ' ');
  for (auto& c : s) c = static_cast<char>(base + d(rng));
  return s;
}

/// Random bytes in [1, 255] (no 0x00).
inline std::string random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(1, 255);
  std::string s(n, ' ');
  for (auto& c : s) c = static_cast<char>(d(rng));
  return s;
}

/// Text made of words from a small vocabulary separated by varied runs.
inline std::string random_corpus(std::mt19937_64& rng, std::size_t words, std::size_t vocab) {
  static const char* seps[] = {" ", " ", " ", ", ", ". ", "\n", " - ", "  "};
  std::vector<std::string> lex;
  std::uniform_int_distribution<int> len(1, 7), letter(0, 25), digit(0, 9), kind(0, 9);
  for (std::size_t i = 0; i < vocab; ++i) {
    std::string w;
    auto l = len(rng);
    for (int k = 0; k < l; ++k)
      w += kind(rng) == 0 ? static_cast<char>('0' + digit(rng)) : static_cast<char>('a' + letter(rng));
    if (kind(rng) == 0 && w[0] >= 'a') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    lex.push_back(w);
  }
  // Skewed word choice so some words repeat a lot.
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<std::size_t> sep(0, std::size(seps) - 1);
  std::string out;
  if (kind(rng) < 3) out += seps[sep(rng)];
  for (std::size_t i = 0; i < words; ++i) {
    auto r = static_cast<std::size_t>(std::pow(u(rng), 2.0) * static_cast<double>(vocab));
    out += lex[std::min(r, vocab - 1)];
    if (i + 1 < words || kind(rng) < 5) out += seps[sep(rng)];
  }
  return out;
}

/// Brute-force occurrences (1-based) of p in t.
inline std::vector<std::uint64_t> naive_find(std::string_view t, std::string_view p) {
  std::vector<std::uint64_t> out;
  if (p.empty() || p.size() > t.size()) return out;
  for (auto pos = t.find(p); pos != std::string_view::npos; pos = t.find(p, pos + 1)) out.push_back(pos + 1);
  return out;
}

/// 0-based offsets of the token w, by scanning the token stream.
template <class Tokenize>
std::vector<std::uint64_t> token_scan(std::string_view t, std::string_view w, Tokenize tokenize) {
  std::vector<std::uint64_t> out;
  std::uint64_t pos = 0;
  for (auto tok : tokenize(t)) {
    if (tok == w) out.push_back(pos);
    pos += tok.size();
  }
  return out;
}

}  // namespace tidx::testing
