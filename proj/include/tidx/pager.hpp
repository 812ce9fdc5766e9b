#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "tidx/bytes.hpp"

namespace tidx {

using PageId = std::uint32_t;
inline constexpr PageId kNoPage = 0xFFFFFFFFu;

/// Logical page-access counters.
///
/// An access is a seek when its page id is not the previous id + 1 (the
/// first access after creation or reset is always a seek). Each seek opens a
/// new maximal contiguous run, so bulk_runs == seeks; both are reported so a
/// caller can classify runs as bulk or random with any threshold it likes,
/// using max_run_len and the run count.
struct IoStats {
  std::uint64_t page_reads = 0;
  std::uint64_t page_writes = 0;
  std::uint64_t seeks = 0;
  std::uint64_t bulk_runs = 0;
  std::uint64_t max_run_len = 0;

  std::uint64_t accesses() const { return page_reads + page_writes; }

  friend bool operator==(const IoStats&, const IoStats&) = default;
};

IoStats operator-(const IoStats& after, const IoStats& before);

/// Fixed-size page storage over a plain file (raw concatenation of pages, no
/// header). Single owner; not thread-safe.
class PagedStore {
 public:
  static constexpr std::size_t kMinPageSize = 64;

  /// Creates (or truncates) the backing file.
  static PagedStore create(std::size_t page_size, std::size_t mem_budget, const std::string& path);
  /// Opens an existing backing file; its size must be a multiple of page_size.
  static PagedStore open(std::size_t page_size, std::size_t mem_budget, const std::string& path);

  PagedStore(PagedStore&& other) noexcept;
  PagedStore& operator=(PagedStore&& other) noexcept;
  PagedStore(const PagedStore&) = delete;
  PagedStore& operator=(const PagedStore&) = delete;
  ~PagedStore();

  std::size_t page_size() const { return page_size_; }
  std::size_t mem_budget() const { return mem_budget_; }
  std::size_t page_count() const { return page_count_; }
  const std::string& path() const { return path_; }

  Bytes read_page(PageId id);
  void read_page(PageId id, std::span<std::uint8_t> out);
  /// Payloads shorter than a page are zero-padded.
  void write_page(PageId id, ByteSpan bytes);
  PageId append_page(ByteSpan bytes);

  /// Drops pages >= count. Not an I/O in the accounting model.
  void truncate(std::size_t count);

  IoStats io_stats() const { return stats_; }
  void reset_stats();

 private:
  PagedStore(int fd, std::size_t page_size, std::size_t mem_budget, std::string path,
             std::size_t page_count);

  void touch(PageId id);

  int fd_ = -1;
  std::size_t page_size_ = 0;
  std::size_t mem_budget_ = 0;
  std::string path_;
  std::size_t page_count_ = 0;
  std::optional<PageId> last_accessed_;
  std::uint64_t run_len_ = 0;
  IoStats stats_;
};

}  // namespace tidx
