#include "tidx/pager.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <utility>
#include <vector>

namespace tidx {

namespace {

std::string errno_text(const std::string& what, const std::string& path) {
  return what + " '" + path + "': " + std::strerror(errno);
}

void check_geometry(std::size_t page_size, std::size_t mem_budget) {
  if (page_size < PagedStore::kMinPageSize)
    fail(ErrorKind::kInvalidArgument, "page size must be at least 64 bytes");
  if (mem_budget < page_size)
    fail(ErrorKind::kInvalidArgument, "memory budget must hold at least one page");
}

}  // namespace

IoStats operator-(const IoStats& after, const IoStats& before) {
  IoStats d;
  d.page_reads = after.page_reads - before.page_reads;
  d.page_writes = after.page_writes - before.page_writes;
  d.seeks = after.seeks - before.seeks;
  d.bulk_runs = after.bulk_runs - before.bulk_runs;
  d.max_run_len = after.max_run_len;
  return d;
}

PagedStore::PagedStore(int fd, std::size_t page_size, std::size_t mem_budget, std::string path,
                       std::size_t page_count)
    : fd_(fd),
      page_size_(page_size),
      mem_budget_(mem_budget),
      path_(std::move(path)),
      page_count_(page_count) {}

PagedStore PagedStore::create(std::size_t page_size, std::size_t mem_budget,
                              const std::string& path) {
  check_geometry(page_size, mem_budget);
  int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) fail(ErrorKind::kIo, errno_text("cannot create store", path));
  return PagedStore(fd, page_size, mem_budget, path, 0);
}

PagedStore PagedStore::open(std::size_t page_size, std::size_t mem_budget,
                            const std::string& path) {
  check_geometry(page_size, mem_budget);
  int fd = ::open(path.c_str(), O_RDWR);
  if (fd < 0) fail(ErrorKind::kIo, errno_text("cannot open store", path));
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    fail(ErrorKind::kIo, errno_text("cannot stat store", path));
  }
  auto size = static_cast<std::size_t>(st.st_size);
  if (size % page_size != 0) {
    ::close(fd);
    fail(ErrorKind::kCorrupt, "store size is not a multiple of the page size: " + path);
  }
  return PagedStore(fd, page_size, mem_budget, path, size / page_size);
}

PagedStore::PagedStore(PagedStore&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      page_size_(other.page_size_),
      mem_budget_(other.mem_budget_),
      path_(std::move(other.path_)),
      page_count_(other.page_count_),
      last_accessed_(other.last_accessed_),
      run_len_(other.run_len_),
      stats_(other.stats_) {}

PagedStore& PagedStore::operator=(PagedStore&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    page_size_ = other.page_size_;
    mem_budget_ = other.mem_budget_;
    path_ = std::move(other.path_);
    page_count_ = other.page_count_;
    last_accessed_ = other.last_accessed_;
    run_len_ = other.run_len_;
    stats_ = other.stats_;
  }
  return *this;
}

PagedStore::~PagedStore() {
  if (fd_ >= 0) ::close(fd_);
}

void PagedStore::touch(PageId id) {
  if (!last_accessed_ || id != *last_accessed_ + 1) {
    ++stats_.seeks;
    ++stats_.bulk_runs;
    run_len_ = 0;
  }
  ++run_len_;
  stats_.max_run_len = std::max(stats_.max_run_len, run_len_);
  last_accessed_ = id;
}

Bytes PagedStore::read_page(PageId id) {
  Bytes out(page_size_);
  read_page(id, out);
  return out;
}

void PagedStore::read_page(PageId id, std::span<std::uint8_t> out) {
  if (id >= page_count_) fail(ErrorKind::kOutOfRange, "read of page " + std::to_string(id) + " beyond store end");
  if (out.size() < page_size_) fail(ErrorKind::kInvalidArgument, "page buffer too small");
  auto off = static_cast<off_t>(id) * static_cast<off_t>(page_size_);
  std::size_t done = 0;
  while (done < page_size_) {
    auto n = ::pread(fd_, out.data() + done, page_size_ - done, off + static_cast<off_t>(done));
    if (n < 0) fail(ErrorKind::kIo, errno_text("read failed", path_));
    if (n == 0) fail(ErrorKind::kCorrupt, "short read from store " + path_);
    done += static_cast<std::size_t>(n);
  }
  ++stats_.page_reads;
  touch(id);
}

void PagedStore::write_page(PageId id, ByteSpan bytes) {
  if (id >= page_count_) fail(ErrorKind::kOutOfRange, "write of page " + std::to_string(id) + " beyond store end");
  if (bytes.size() > page_size_) fail(ErrorKind::kInvalidArgument, "payload larger than a page");
  std::vector<std::uint8_t> page(page_size_, 0);
  std::copy(bytes.begin(), bytes.end(), page.begin());
  auto off = static_cast<off_t>(id) * static_cast<off_t>(page_size_);
  std::size_t done = 0;
  while (done < page_size_) {
    auto n = ::pwrite(fd_, page.data() + done, page_size_ - done, off + static_cast<off_t>(done));
    if (n < 0) fail(ErrorKind::kIo, errno_text("write failed", path_));
    done += static_cast<std::size_t>(n);
  }
  ++stats_.page_writes;
  touch(id);
}

PageId PagedStore::append_page(ByteSpan bytes) {
  if (bytes.size() > page_size_) fail(ErrorKind::kInvalidArgument, "payload larger than a page");
  if (page_count_ >= kNoPage) fail(ErrorKind::kOutOfRange, "store is full");
  auto id = static_cast<PageId>(page_count_);
  ++page_count_;
  write_page(id, bytes);
  return id;
}

void PagedStore::truncate(std::size_t count) {
  if (count > page_count_) fail(ErrorKind::kInvalidArgument, "truncate cannot grow a store");
  if (::ftruncate(fd_, static_cast<off_t>(count * page_size_)) != 0)
    fail(ErrorKind::kIo, errno_text("truncate failed", path_));
  page_count_ = count;
  if (last_accessed_ && *last_accessed_ >= count) last_accessed_.reset();
}

void PagedStore::reset_stats() {
  stats_ = IoStats{};
  last_accessed_.reset();
  run_len_ = 0;
}

}  // namespace tidx
