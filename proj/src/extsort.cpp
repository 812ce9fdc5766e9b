#include "tidx/extsort.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <queue>

namespace tidx {

RunWriter::RunWriter(PagedStore& store) : store_(store) {
  page_.reserve(store.page_size());
}

void RunWriter::add(std::string_view record) {
  std::uint8_t len[4];
  for (int i = 0; i < 4; ++i) len[i] = static_cast<std::uint8_t>(record.size() >> (8 * i));
  auto push = [&](const std::uint8_t* src, std::size_t n) {
    while (n > 0) {
      auto room = store_.page_size() - page_.size();
      auto k = std::min(room, n);
      page_.insert(page_.end(), src, src + k);
      src += k;
      n -= k;
      if (page_.size() == store_.page_size()) flush_page();
    }
  };
  push(len, 4);
  push(reinterpret_cast<const std::uint8_t*>(record.data()), record.size());
  ++extent_.record_count;
}

void RunWriter::flush_page() {
  auto id = store_.append_page(page_);
  if (!started_) {
    extent_.first_page = id;
    started_ = true;
  }
  ++extent_.page_count;
  page_.clear();
}

RunExtent RunWriter::finish() {
  if (!page_.empty()) flush_page();
  return extent_;
}

RunReader::RunReader(PagedStore& store, RunExtent extent)
    : store_(store), extent_(extent), remaining_(extent.record_count) {}

void RunReader::read_bytes(std::uint8_t* dst, std::size_t n) {
  while (n > 0) {
    if (pos_ == page_.size()) {
      if (page_index_ >= extent_.page_count) fail(ErrorKind::kCorrupt, "run ended early");
      page_ = store_.read_page(static_cast<PageId>(extent_.first_page + page_index_));
      ++page_index_;
      pos_ = 0;
    }
    auto k = std::min(n, page_.size() - pos_);
    std::memcpy(dst, page_.data() + pos_, k);
    pos_ += k;
    dst += k;
    n -= k;
  }
}

bool RunReader::next(std::string& record) {
  if (remaining_ == 0) return false;
  std::uint8_t len[4];
  read_bytes(len, 4);
  std::size_t n = 0;
  for (int i = 0; i < 4; ++i) n |= std::size_t{len[i]} << (8 * i);
  record.resize(n);
  read_bytes(reinterpret_cast<std::uint8_t*>(record.data()), n);
  --remaining_;
  return true;
}

ExternalSorter::ExternalSorter(PagedStore& scratch, Less less)
    : store_(scratch), less_(std::move(less)) {}

void ExternalSorter::add(std::string_view record) {
  buffer_.emplace_back(record);
  buffered_bytes_ += record.size() + 4;
  if (buffered_bytes_ > store_.mem_budget()) spill();
}

void ExternalSorter::spill() {
  std::stable_sort(buffer_.begin(), buffer_.end(), less_);
  RunWriter w(store_);
  for (const auto& r : buffer_) w.add(r);
  runs_.push_back(w.finish());
  ++runs_written_;
  buffer_.clear();
  buffered_bytes_ = 0;
}

RunExtent ExternalSorter::merge_runs(std::vector<RunExtent> runs, const Sink* sink) {
  std::vector<std::unique_ptr<RunReader>> readers;
  std::vector<std::string> heads(runs.size());
  for (auto& r : runs) readers.push_back(std::make_unique<RunReader>(store_, r));

  // Min-heap on (record, run index); the run index makes the merge stable.
  auto greater = [&](std::size_t a, std::size_t b) {
    if (less_(heads[b], heads[a])) return true;
    if (less_(heads[a], heads[b])) return false;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> heap(greater);
  for (std::size_t i = 0; i < readers.size(); ++i)
    if (readers[i]->next(heads[i])) heap.push(i);

  std::unique_ptr<RunWriter> out;
  if (sink == nullptr) out = std::make_unique<RunWriter>(store_);
  while (!heap.empty()) {
    auto i = heap.top();
    heap.pop();
    if (sink) (*sink)(heads[i]);
    else out->add(heads[i]);
    if (readers[i]->next(heads[i])) heap.push(i);
  }
  if (out) {
    ++runs_written_;
    return out->finish();
  }
  return {};
}

void ExternalSorter::finish(const Sink& sink) {
  if (runs_.empty()) {
    std::stable_sort(buffer_.begin(), buffer_.end(), less_);
    for (const auto& r : buffer_) sink(r);
    buffer_.clear();
    buffered_bytes_ = 0;
    return;
  }
  if (!buffer_.empty()) spill();

  std::size_t fan_in = std::max<std::size_t>(2, store_.mem_budget() / store_.page_size() - 1);
  auto runs = std::move(runs_);
  runs_.clear();
  while (runs.size() > fan_in) {
    std::vector<RunExtent> next;
    for (std::size_t i = 0; i < runs.size(); i += fan_in) {
      auto end = std::min(runs.size(), i + fan_in);
      std::vector<RunExtent> group(runs.begin() + static_cast<std::ptrdiff_t>(i),
                                   runs.begin() + static_cast<std::ptrdiff_t>(end));
      next.push_back(group.size() == 1 ? group.front() : merge_runs(std::move(group), nullptr));
    }
    runs = std::move(next);
  }
  merge_runs(std::move(runs), &sink);
}

}  // namespace tidx
