// tidx: build and query the text indexes from the command line.
//
// Exit codes: 0 ok, 2 usage, 3 bad or missing input, 4 internal failure.
// Build statistics go to stdout as key=value lines; query results go to
// stdout one per line, query statistics to stderr.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tidx/blockindex.hpp"
#include "tidx/fmindex.hpp"
#include "tidx/huffword.hpp"
#include "tidx/pager.hpp"
#include "tidx/sbtree.hpp"
#include "tidx/strsort.hpp"
#include "tidx/suffarr.hpp"
#include "tidx/wfm.hpp"

namespace {

using namespace tidx;

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t page_size = 4096;
  std::size_t mem_budget = std::size_t{1} << 20;
  bool tiny = false;
  bool fat = false;
  std::uint32_t sample_rate = 32;
  std::size_t piece_bits = 0;
  std::uint64_t seed = 1;
  std::size_t block_size = 4096;
  std::size_t stage = 0;
  std::string pattern, word, prefix, out, index, model, dt;
  bool count = false, locate = false;
  std::vector<std::string> inputs;
};

void validate(const Options& o) {
  if (o.page_size < PagedStore::kMinPageSize) throw UsageError("--page-size must be >= 64");
  if (o.mem_budget < 2 * o.page_size) throw UsageError("--mem-budget must be at least two pages");
  if (o.sample_rate < 1) throw UsageError("--sample-rate must be >= 1");
  if (o.block_size < 64) throw UsageError("--block-size must be >= 64");
  if (o.piece_bits % 8 != 0) throw UsageError("--L must be a multiple of 8");
  if (o.tiny && o.fat) throw UsageError("--tiny and --fat are exclusive");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string nonempty_input(const std::string& path) {
  auto t = slurp(path);
  if (t.empty()) fail(ErrorKind::kInvalidArgument, "empty input: " + path);
  return t;
}

void need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void print_io(std::ostream& os, const std::string& prefix, const IoStats& s) {
  os << prefix << "page_reads=" << s.page_reads << '\n'
     << prefix << "page_writes=" << s.page_writes << '\n'
     << prefix << "seeks=" << s.seeks << '\n'
     << prefix << "bulk_runs=" << s.bulk_runs << '\n'
     << prefix << "max_run_len=" << s.max_run_len << '\n';
}

IoStats& operator+=(IoStats& a, const IoStats& b) {
  a.page_reads += b.page_reads;
  a.page_writes += b.page_writes;
  a.seeks += b.seeks;
  a.bulk_runs += b.bulk_runs;
  a.max_run_len = std::max(a.max_run_len, b.max_run_len);
  return a;
}

// Index blobs are written through the pager; the tail of the last page is
// zero padding.
IoStats save_paged(const std::string& path, const Bytes& blob, const Options& o) {
  auto store = PagedStore::create(o.page_size, o.mem_budget, path);
  for (std::size_t off = 0; off < blob.size(); off += o.page_size)
    store.append_page(ByteSpan(blob).subspan(off, std::min(o.page_size, blob.size() - off)));
  return store.io_stats();
}

Bytes load_paged(const std::string& path, const Options& o, IoStats& io) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::kIo, "missing index: " + path);
  auto store = PagedStore::open(o.page_size, o.mem_budget, path);
  Bytes blob;
  for (std::size_t p = 0; p < store.page_count(); ++p) {
    auto page = store.read_page(static_cast<PageId>(p));
    blob.insert(blob.end(), page.begin(), page.end());
  }
  io = store.io_stats();
  return blob;
}

void expect_padding(const ByteReader& r) {
  auto rest = r.data().subspan(r.pos());
  for (auto b : rest)
    if (b != 0) fail(ErrorKind::kCorrupt, "trailing bytes after index");
}

void print_offsets(const std::vector<std::uint64_t>& v, std::uint64_t shift) {
  for (auto x : v) std::cout << x + shift << '\n';
}

void print_words(const std::map<std::string, std::vector<std::uint64_t>>& m) {
  for (const auto& [w, offs] : m)
    for (auto x : offs) std::cout << w << ' ' << x + 1 << '\n';
}

// --- commands -------------------------------------------------------------

void build_sa(const Options& o) {
  need(o.out, "--out");
  auto t = nonempty_input(o.inputs.at(0));
  check_text(t);
  auto m = o.stage;
  if (m == 0) {
    if (o.mem_budget < 2 * o.page_size + 9) throw UsageError("--mem-budget too small for a stage");
    m = (o.mem_budget - 2 * o.page_size) / 9;
  }
  m = std::min(m, t.size());
  if (9 * m + 2 * o.page_size > o.mem_budget) throw UsageError("--m too large for --mem-budget");
  auto work = o.out + ".work";
  IncrementalReport rep;
  SuffixArray sa;
  {
    auto store = PagedStore::create(o.page_size, o.mem_budget, work);
    sa = build_sa_incremental(t, m, store, &rep);
  }
  std::remove(work.c_str());
  save_sa(o.out, sa);
  IoStats total;
  std::uint64_t max_seeks = 0;
  for (const auto& s : rep.stages) {
    total += s.io;
    max_seeks = std::max(max_seeks, s.io.seeks);
  }
  std::cout << "n=" << t.size() << "\nm=" << m << "\nstages=" << rep.stages.size()
            << "\nmax_stage_seeks=" << max_seeks << '\n';
  print_io(std::cout, "", total);
}

void query_sa(const Options& o) {
  need(o.index, "--index");
  need(o.pattern, "--pattern");
  auto t = slurp(o.inputs.at(0));
  auto sa = load_sa(o.index);
  if (sa.size() != t.size()) fail(ErrorKind::kCorrupt, "suffix array does not match the text");
  auto hits = sa_search(t, sa, o.pattern);
  print_offsets(hits, 0);
  std::cerr << "occ=" << hits.size() << '\n';
}

void build_sbt(const Options& o) {
  need(o.out, "--out");
  std::vector<std::string> texts;
  for (const auto& p : o.inputs) texts.push_back(nonempty_input(p));
  SbtConfig cfg{o.page_size, o.mem_budget, 0};
  auto tree = StringBTree::build(texts, o.out, cfg);
  std::cout << "texts=" << tree.text_count() << "\nkeys=" << tree.key_count() << "\nbranching=" << tree.branching()
            << "\nheight=" << tree.height() << "\nleaves=" << tree.leaf_count() << '\n';
  print_io(std::cout, "node_", tree.node_io());
  print_io(std::cout, "text_", tree.text_io());
}

void query_sbt(const Options& o) {
  need(o.index, "--index");
  need(o.pattern, "--pattern");
  if (!std::filesystem::exists(o.index + ".meta")) fail(ErrorKind::kIo, "missing index: " + o.index);
  auto tree = StringBTree::open(o.index, o.mem_budget);
  tree.reset_stats();
  auto hits = tree.search(o.pattern);
  for (const auto& h : hits) std::cout << h.text << ' ' << h.offset << '\n';
  std::cerr << "occ=" << hits.size() << '\n';
  print_io(std::cerr, "node_", tree.node_io());
  print_io(std::cerr, "text_", tree.text_io());
}

void build_fm(const Options& o) {
  need(o.out, "--out");
  auto t = nonempty_input(o.inputs.at(0));
  FmConfig cfg{o.tiny ? FmMode::kTiny : FmMode::kFat, o.sample_rate, 256};
  auto fm = FMIndex::build(t, cfg);
  auto blob = fm.serialize();
  auto io = save_paged(o.out, blob, o);
  std::cout << "n=" << t.size() << "\nmode=" << (o.tiny ? "tiny" : "fat") << "\nindex_bytes=" << blob.size() << '\n';
  print_io(std::cout, "", io);
}

void query_fm(const Options& o) {
  need(o.index, "--index");
  need(o.pattern, "--pattern");
  IoStats io;
  auto blob = load_paged(o.index, o, io);
  ByteReader r(blob);
  auto fm = FMIndex::read(r);
  expect_padding(r);
  if (o.count || (!o.locate && fm.mode() == FmMode::kTiny)) {
    std::cout << fm.count(o.pattern) << '\n';
  } else {
    if (fm.mode() != FmMode::kFat) fail(ErrorKind::kUnsupported, "--locate needs an index built with --fat");
    print_offsets(fm.locate_all(o.pattern), 0);
  }
  print_io(std::cerr, "", io);
}

void build_wfm(const Options& o) {
  need(o.out, "--out");
  auto t = nonempty_input(o.inputs.at(0));
  auto w = WfmIndex::build(t, {o.sample_rate, 256, 64});
  auto blob = w.serialize();
  auto io = save_paged(o.out, blob, o);
  std::cout << "n=" << t.size() << "\nterms=" << (w.empty() ? 0 : w.model().size())
            << "\ndt_bytes=" << (w.empty() ? 0 : w.fm().text_length()) << "\nindex_bytes=" << blob.size() << '\n';
  print_io(std::cout, "", io);
}

void query_wfm(const Options& o) {
  need(o.index, "--index");
  if (o.word.empty() == o.prefix.empty()) throw UsageError("exactly one of --word and --prefix is required");
  IoStats io;
  auto blob = load_paged(o.index, o, io);
  ByteReader r(blob);
  auto w = WfmIndex::read(r);
  expect_padding(r);
  if (!o.word.empty())
    print_offsets(w.word_locate(o.word), 1);
  else
    print_words(w.prefix_word_search(o.prefix));
  print_io(std::cerr, "", io);
}

void build_block(const Options& o) {
  need(o.out, "--out");
  std::vector<std::string> texts;
  for (const auto& p : o.inputs) texts.push_back(nonempty_input(p));
  std::vector<std::string_view> views(texts.begin(), texts.end());
  BlockBuildReport rep;
  auto idx = BlockIndex::build(views, o.out, {o.block_size, o.page_size, o.mem_budget}, &rep);
  std::cout << "blocks=" << idx.block_count() << "\nterms=" << idx.terms().size() << "\nruns=" << rep.runs << '\n';
  print_io(std::cout, "sort_", rep.sort_io);
  print_io(std::cout, "", rep.index_io);
}

void query_block(const Options& o) {
  need(o.index, "--index");
  if (o.word.empty() == o.prefix.empty()) throw UsageError("exactly one of --word and --prefix is required");
  if (!std::filesystem::exists(o.index)) fail(ErrorKind::kIo, "missing index: " + o.index);
  auto idx = BlockIndex::open(o.index, o.mem_budget);
  if (!o.word.empty())
    print_offsets(idx.query_word(o.word), 1);
  else
    print_words(idx.query_prefix(o.prefix));
  print_io(std::cerr, "", idx.io());
}

std::vector<std::string> read_string_set(const std::string& path) {
  auto raw = slurp(path);
  ByteReader r(as_bytes(raw));
  auto k = r.le(4);
  if (k > r.remaining() / 4) fail(ErrorKind::kCorrupt, "string count exceeds file size");
  std::vector<std::string> s;
  for (std::uint64_t i = 0; i < k; ++i) s.emplace_back(as_chars(r.take(r.le(4))));
  if (r.remaining() != 0) fail(ErrorKind::kCorrupt, "trailing bytes in string set");
  return s;
}

void sort_strings_cmd(const Options& o) {
  auto s = read_string_set(o.inputs.at(0));
  std::uint64_t total = 0;
  for (const auto& x : s) total += x.size();
  auto bits = o.piece_bits ? o.piece_bits : recommended_piece_bits(total, o.mem_budget, o.page_size, s.size());
  auto scratch_path = (o.out.empty() ? o.inputs.at(0) : o.out) + ".scratch";
  SortOutcome res;
  IoStats io;
  {
    auto scratch = PagedStore::create(o.page_size, o.mem_budget, scratch_path);
    SortConfig cfg{bits, o.seed, 32, &scratch};
    res = sort_strings_detailed(s, cfg);
    io = scratch.io_stats();
  }
  std::remove(scratch_path.c_str());
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) fail(ErrorKind::kIo, "cannot write " + o.out);
    os = &file;
  }
  for (auto i : res.order) *os << i + 1 << '\n';
  std::cerr << "strings=" << s.size() << "\npiece_bits=" << bits << "\nattempts=" << res.attempts
            << "\nrank_collisions=" << res.rank_collisions << "\nverify_failures=" << res.verify_failures << '\n';
  print_io(std::cerr, "", io);
}

void stats_cmd(const Options& o) {
  std::vector<std::string> texts;
  for (const auto& p : o.inputs) texts.push_back(slurp(p));
  std::vector<std::string_view> views(texts.begin(), texts.end());
  auto st = corpus_stats(views);
  std::cout << "n_tokens=" << st.n_tokens << "\nvocab_size=" << st.vocab_size << "\nheaps_beta=" << st.heaps_beta
            << "\nheaps_residual=" << st.heaps_residual << "\nheaps_points=" << st.heaps_points
            << "\nzipf_theta=" << st.zipf_theta << "\nzipf_residual=" << st.zipf_residual
            << "\nzipf_points=" << st.zipf_points << '\n';
}

void hw_encode(const Options& o) {
  need(o.out, "--out");
  auto t = nonempty_input(o.inputs.at(0));
  auto tokens = tokenize(t);
  auto model = HuffwordModel::build(build_vocab(tokens));
  auto dt = model.encode(tokens);
  auto mb = model.serialize();
  write_file(o.out + ".hwm", mb);
  write_file(o.out + ".dt", dt);
  std::cout << "n=" << t.size() << "\nterms=" << model.size() << "\nmodel_bytes=" << mb.size()
            << "\ndt_bytes=" << dt.size() << '\n';
}

void hw_decode(const Options& o) {
  need(o.model, "--model");
  need(o.dt, "--dt");
  auto model = HuffwordModel::deserialize(read_file(o.model));
  auto text = model.decode(read_file(o.dt));
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, as_bytes(text));
  }
}

void hw_find(const Options& o) {
  need(o.model, "--model");
  need(o.dt, "--dt");
  need(o.word, "--word");
  auto model = HuffwordModel::deserialize(read_file(o.model));
  auto dt = read_file(o.dt);
  auto i = model.find(o.word);
  if (!i) return;
  auto hits = compressed_find(dt, model.codeword(*i));
  // Map DT offsets to 1-based source offsets.
  std::uint64_t src = 0;
  std::size_t pos = 0, k = 0;
  while (k < hits.size() && pos < dt.size()) {
    if (pos == hits[k]) {
      std::cout << src + 1 << '\n';
      ++k;
    }
    auto [term, next] = model.decode_one(dt, pos);
    src += model.term(term).size();
    pos = next;
  }
  std::cerr << "occ=" << hits.size() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disk-conscious text indexes: suffix arrays, String B-trees, FM-indexes, word indexes"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--page-size", o.page_size, "Page size in bytes")->capture_default_str();
    c->add_option("--mem-budget", o.mem_budget, "Memory budget in bytes")->capture_default_str();
  };
  struct Cmd {
    const char* name;
    const char* help;
    void (*run)(const Options&);
  };
  const Cmd cmds[] = {
      {"build-sa", "Build a suffix array incrementally (SA01 file)", build_sa},
      {"query-sa", "Search a text through its suffix array", query_sa},
      {"build-sbt", "Build a String B-tree over one or more texts", build_sbt},
      {"query-sbt", "Search a String B-tree", query_sbt},
      {"build-fm", "Build an FM-index", build_fm},
      {"query-fm", "Count or locate a pattern in an FM-index", query_fm},
      {"build-wfm", "Build a word-based FM-index", build_wfm},
      {"query-wfm", "Word or prefix query on a word-based FM-index", query_wfm},
      {"build-block", "Build a block-addressing inverted index", build_block},
      {"query-block", "Word or prefix query on a block index", query_block},
      {"sort-strings", "Sort a string-set file; prints the 1-based permutation", sort_strings_cmd},
      {"stats", "Heaps and Zipf fits of a corpus", stats_cmd},
      {"huffword-encode", "Compress a text into <out>.hwm and <out>.dt", hw_encode},
      {"huffword-decode", "Decompress a Huffword DT file", hw_decode},
      {"huffword-find", "Find a word in a Huffword DT file without decompressing", hw_find},
  };
  std::vector<std::pair<CLI::App*, void (*)(const Options&)>> subs;
  for (const auto& c : cmds) {
    auto* s = app.add_subcommand(c.name, c.help);
    common(s);
    std::string n = c.name;
    bool takes_input = n.rfind("build-", 0) == 0 || n == "query-sa" || n == "sort-strings" || n == "stats" ||
                       n == "huffword-encode";
    if (takes_input) {
      auto* in = s->add_option("input", o.inputs, "Input file(s)")->required()->check(CLI::ExistingFile);
      if (n != "build-sbt" && n != "build-block" && n != "stats") in->expected(1);
    }
    if (n.rfind("build-", 0) == 0 || n == "sort-strings" || n.rfind("huffword-", 0) == 0)
      s->add_option("--out", o.out, "Output path");
    if (n.rfind("query-", 0) == 0) s->add_option("--index", o.index, "Index path");
    if (n == "query-sa" || n == "query-sbt" || n == "query-fm")
      s->add_option("--pattern", o.pattern, "Pattern");
    if (n == "query-wfm" || n == "query-block" || n == "huffword-find") s->add_option("--word", o.word, "Word");
    if (n == "query-wfm" || n == "query-block") s->add_option("--prefix", o.prefix, "Word prefix");
    if (n == "build-fm") {
      s->add_flag("--tiny", o.tiny, "No locate samples");
      s->add_flag("--fat", o.fat, "Sampled positions for locate (default)");
    }
    if (n == "build-fm" || n == "build-wfm")
      s->add_option("--sample-rate", o.sample_rate, "Text positions between locate samples")->capture_default_str();
    if (n == "query-fm") {
      s->add_flag("--count", o.count, "Print the occurrence count");
      s->add_flag("--locate", o.locate, "Print the 1-based positions (default for fat indexes)");
    }
    if (n == "build-sa") s->add_option("--m", o.stage, "Stage length in bytes (default: fit the budget)");
    if (n == "sort-strings") {
      s->add_option("--L", o.piece_bits, "Piece length in bits (default: from the I/O analysis)");
      s->add_option("--seed", o.seed, "Hash seed")->capture_default_str();
    }
    if (n == "build-block") s->add_option("--block-size", o.block_size, "Block size in bytes")->capture_default_str();
    if (n == "huffword-decode" || n == "huffword-find") {
      s->add_option("--model", o.model, "Model file (.hwm)");
      s->add_option("--dt", o.dt, "Compressed text (.dt)");
    }
    subs.emplace_back(s, c.run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto rc = app.exit(e);
    if (rc == 0) return 0;
    if (dynamic_cast<const CLI::ValidationError*>(&e) && std::string(e.what()).find("File does not exist") != std::string::npos)
      return kExitInput;
    return kExitUsage;
  }

  try {
    validate(o);
    for (auto [s, run] : subs)
      if (s->parsed()) run(o);
    std::cout.flush();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kUnsupported:
        return kExitUsage;
      case ErrorKind::kInvalidArgument:
      case ErrorKind::kCorrupt:
      case ErrorKind::kIo:
        return kExitInput;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
