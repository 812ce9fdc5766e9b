#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tidx/pager.hpp"

namespace tidx {

/// A sorted run of length-prefixed records laid out on consecutive pages.
struct RunExtent {
  PageId first_page = 0;
  std::size_t page_count = 0;
  std::size_t record_count = 0;
};

/// Appends length-prefixed records to a store, packing them into pages.
class RunWriter {
 public:
  explicit RunWriter(PagedStore& store);
  void add(std::string_view record);
  RunExtent finish();

 private:
  void flush_page();

  PagedStore& store_;
  Bytes page_;
  RunExtent extent_;
  bool started_ = false;
};

/// Streams records back out of a run, one page in memory at a time.
class RunReader {
 public:
  RunReader(PagedStore& store, RunExtent extent);
  bool next(std::string& record);

 private:
  void read_bytes(std::uint8_t* dst, std::size_t n);

  PagedStore& store_;
  RunExtent extent_;
  std::size_t page_index_ = 0;
  Bytes page_;
  std::size_t pos_ = 0;
  std::size_t remaining_ = 0;
};

/// Multiway merge sort over a paged scratch store.
///
/// Records are buffered until the store's memory budget is used up, then
/// sorted and spilled as a run. When everything fits in the budget no page is
/// touched at all. The merge fan-in is M/B - 1 (at least 2); more runs than
/// that are merged in several passes. Stable: equal records keep their
/// insertion order.
class ExternalSorter {
 public:
  using Less = std::function<bool(std::string_view, std::string_view)>;
  using Sink = std::function<void(std::string_view)>;

  ExternalSorter(PagedStore& scratch, Less less);

  void add(std::string_view record);
  void finish(const Sink& sink);

  std::size_t runs_written() const { return runs_written_; }

 private:
  void spill();
  RunExtent merge_runs(std::vector<RunExtent> runs, const Sink* sink);

  PagedStore& store_;
  Less less_;
  std::vector<std::string> buffer_;
  std::size_t buffered_bytes_ = 0;
  std::vector<RunExtent> runs_;
  std::size_t runs_written_ = 0;
};

}  // namespace tidx
