// Command-line front end: ingest, stats, chunk, embed, index, query,
// evaluate and grid. Outputs go to files; stdout carries human summaries and
// diagnostics go to stderr.
//
// Exit codes: 0 success, 1 runtime or partial failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "tablerag/chunker.hpp"
#include "tablerag/docmodel.hpp"
#include "tablerag/embed.hpp"
#include "tablerag/embedding_cache.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/eval.hpp"
#include "tablerag/index.hpp"
#include "tablerag/ingest.hpp"
#include "tablerag/remote_provider.hpp"
#include "tablerag/report.hpp"

namespace fs = std::filesystem;
using namespace tablerag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file and renames, so readers never see a
// half-written output.
void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Advisory lock held for the life of the process on <dir>/.tablerag.lock.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) {
    fs::create_directories(dir);
    const auto path = dir / ".tablerag.lock";
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error("output directory " + dir.string() + " is in use by another tablerag process");
    }
  }
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

fs::path lock_dir_for_file(const fs::path& file) {
  return file.has_parent_path() ? file.parent_path() : fs::path(".");
}

// ---- providers ------------------------------------------------------------

struct ProviderSet {
  std::vector<std::unique_ptr<EmbeddingProvider>> owned;
  std::vector<EmbeddingProvider*> raw() const {
    std::vector<EmbeddingProvider*> out;
    for (const auto& p : owned) out.push_back(p.get());
    return out;
  }
};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// "hash[:dim]" or "remote:<model>[:dim]". Remote models listed among the
// reference models may omit the dim; short names match after the last '/'.
std::unique_ptr<EmbeddingProvider> make_provider(const std::string& spec,
                                                 const std::string& embed_url) {
  if (spec == "hash" || spec.starts_with("hash:")) {
    std::size_t dim = kDefaultHashDim;
    if (spec.size() > 4) {
      const auto d = spec.substr(5);
      if (!all_digits(d)) throw UsageError("bad hash provider dim in '" + spec + "'");
      dim = std::stoul(d);
    }
    if (dim < 8) throw UsageError("hash provider dim must be >= 8");
    return std::make_unique<HashEmbeddingProvider>(dim);
  }
  if (spec.starts_with("remote:")) {
    std::string model = spec.substr(7);
    std::size_t dim = 0;
    if (const auto colon = model.rfind(':'); colon != std::string::npos &&
                                             all_digits(std::string_view(model).substr(colon + 1))) {
      dim = std::stoul(model.substr(colon + 1));
      model.resize(colon);
    }
    if (model.empty()) throw UsageError("remote provider needs a model name");
    if (dim == 0) {
      for (const auto& m : reference_models()) {
        const auto slash = m.name.rfind('/');
        const auto short_name = slash == std::string::npos ? m.name : m.name.substr(slash + 1);
        if (m.name == model || short_name == model) {
          model = m.name;
          dim = m.dim;
        }
      }
    }
    if (dim == 0) throw UsageError("unknown model '" + model + "': give its dim as remote:<model>:<dim>");
    RemoteOptions opts;
    opts.base_url = embed_url;
    return std::make_unique<RemoteEmbeddingProvider>(ProviderDescriptor{model, dim, ProviderKind::remote},
                                                     opts);
  }
  throw UsageError("provider must be hash[:dim] or remote:<model>[:dim], got '" + spec + "'");
}

// ---- corpus ---------------------------------------------------------------

std::vector<Document> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json" &&
        e.path().filename() != "ingest_summary.json") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw EmptyCorpus("no normalized JSON documents in " + dir.string());
  std::vector<Document> docs;
  for (const auto& f : files) {
    try {
      docs.push_back(load_normalized(read_file(f)));
    } catch (const Error& e) {
      throw Error(f.string() + ": " + e.what());
    }
  }
  return docs;
}

std::size_t count_sentences(const Paragraph& p) { return split_sentences(p.text).size(); }

// ---- shared option blocks -------------------------------------------------

struct ReprFlags {
  std::string chunk_level = "row";
  std::string separator = "pipe";
  bool repeat_header = false;
  bool include_text = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--chunk-level", chunk_level, "row or table")
        ->check(CLI::IsMember({"row", "table"}))
        ->capture_default_str();
    cmd.add_option("--separator", separator, "pipe or space")
        ->check(CLI::IsMember({"pipe", "space"}))
        ->capture_default_str();
    cmd.add_flag("--repeat-header,!--no-repeat-header", repeat_header,
                 "prefix each cell with its column header");
    cmd.add_flag("--include-text,!--no-include-text", include_text,
                 "add paragraph sentences to the corpus");
  }

  ReprConfig config() const {
    return {*parse_chunk_level(chunk_level), *parse_separator(separator), repeat_header,
            include_text};
  }
};

struct CacheFile {
  std::string path;
  EmbeddingCache cache;

  EmbeddingCache* open() {
    if (path.empty()) return nullptr;
    if (fs::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      cache.load(in);
    }
    return &cache;
  }
  void save() const {
    if (path.empty()) return;
    std::ostringstream out;
    cache.save(out);
    write_file(path, out.str());
  }
};

VectorIndex load_index(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return VectorIndex::load(in);
}

void save_index(const VectorIndex& index, const fs::path& path) {
  std::ostringstream out;
  index.save(out);
  write_file(path, out.str());
}

std::string format_pct(std::optional<double> v) {
  if (!v) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

// ---- commands ---------------------------------------------------------------

int cmd_ingest(const std::vector<std::string>& inputs, const fs::path& out_dir, bool keep_going) {
  DirectoryLock lock(out_dir);
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".docx") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      throw UsageError("input not found: " + in);
    }
  }
  if (files.empty()) throw UsageError("no input documents");

  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  std::set<std::string> seen_ids;
  std::size_t failures = 0, tables = 0, captioned = 0;
  for (const auto& f : files) {
    nlohmann::ordered_json entry;
    entry["file"] = f.string();
    try {
      const std::string doc_id = f.stem().string();
      Document doc;
      if (f.extension() == ".json") {
        doc = load_normalized(read_file(f));
      } else {
        const std::string bytes = read_file(f);
        doc = parse_docx(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()),
                         doc_id);
      }
      if (auto v = validate_document(doc); !v.empty()) {
        throw InvalidDocument(v.front().rule + ": " + v.front().detail);
      }
      std::size_t n_tables = 0, n_paragraphs = 0, n_captions = 0;
      for (const auto& b : doc.blocks) {
        if (const auto* t = std::get_if<TableBlock>(&b)) {
          ++n_tables;
          n_captions += t->table.caption.has_value();
        } else if (std::holds_alternative<Paragraph>(b)) {
          ++n_paragraphs;
        }
      }
      const fs::path out = out_dir / (doc.doc_id + ".json");
      if (!seen_ids.insert(doc.doc_id).second) {
        throw Error("duplicate document id " + doc.doc_id);
      }
      write_file(out, save_normalized(doc));
      tables += n_tables;
      captioned += n_captions;
      entry["doc_id"] = doc.doc_id;
      entry["tables"] = n_tables;
      entry["paragraphs"] = n_paragraphs;
      entry["captioned_tables"] = n_captions;
      entry["ok"] = true;
      std::cout << "ok    " << f.string() << ": " << n_tables << " tables (" << n_captions
                << " captioned), " << n_paragraphs << " paragraphs\n";
    } catch (const std::exception& e) {
      ++failures;
      entry["ok"] = false;
      entry["error"] = e.what();
      std::cout << "FAIL  " << f.string() << ": " << e.what() << "\n";
      if (!keep_going) {
        summary.push_back(std::move(entry));
        write_file(out_dir / "ingest_summary.json",
                   nlohmann::ordered_json{{"files", summary}}.dump(2) + "\n");
        return kExitFailure;
      }
    }
    summary.push_back(std::move(entry));
  }
  const double hit_rate = tables == 0 ? 0.0 : 100.0 * static_cast<double>(captioned) / tables;
  nlohmann::ordered_json root;
  root["files"] = std::move(summary);
  root["documents_written"] = files.size() - failures;
  root["failures"] = failures;
  root["tables"] = tables;
  root["caption_hit_rate"] = hit_rate;
  write_file(out_dir / "ingest_summary.json", root.dump(2) + "\n");
  std::cout << (files.size() - failures) << " document(s) written, " << failures
            << " failure(s); caption hit-rate " << format_pct(hit_rate) << "% of " << tables
            << " tables\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_stats(const fs::path& corpus, const std::string& json_out) {
  const auto docs = load_corpus(corpus);
  const auto stats = corpus_stats(docs, count_sentences);
  nlohmann::ordered_json j;
  j["documents"] = stats.num_documents;
  j["tables"] = stats.num_tables;
  j["paragraphs"] = stats.num_paragraphs;
  j["sentences"] = stats.num_sentences;
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const auto& [rows, n] : stats.row_count_histogram) hist.push_back({{"rows", rows}, {"tables", n}});
  j["row_count_histogram"] = std::move(hist);

  std::cout << "documents   " << stats.num_documents << "\n"
            << "tables      " << stats.num_tables << "\n"
            << "paragraphs  " << stats.num_paragraphs << "\n"
            << "sentences   " << stats.num_sentences << "\n"
            << "body rows -> tables\n";
  for (const auto& [rows, n] : stats.row_count_histogram) {
    std::cout << "  " << rows << " -> " << n << "\n";
  }
  if (!json_out.empty()) {
    write_file(json_out, j.dump(2) + "\n");
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_chunk(const fs::path& corpus, const fs::path& out, const ReprConfig& cfg) {
  DirectoryLock lock(lock_dir_for_file(out));
  const auto docs = load_corpus(corpus);
  const auto chunks = build_corpus(docs, cfg);
  write_file(out, chunks_to_jsonl(chunks));
  std::map<ChunkKind, std::size_t> by_kind;
  for (const auto& c : chunks) ++by_kind[c.provenance.kind];
  std::cout << chunks.size() << " chunks for " << to_string(cfg) << ":";
  for (const auto& [k, n] : by_kind) std::cout << " " << to_string(k) << "=" << n;
  std::cout << "\n";
  return kExitOk;
}

std::vector<std::string> chunk_texts(const std::vector<Chunk>& chunks) {
  std::vector<std::string> texts;
  for (const auto& c : chunks) texts.push_back(c.text);
  return texts;
}

int cmd_embed(const fs::path& chunks_path, EmbeddingProvider& provider, CacheFile& cache) {
  DirectoryLock lock(lock_dir_for_file(cache.path));
  const auto chunks = load_chunks_jsonl(read_file(chunks_path));
  auto* c = cache.open();
  const auto before = c->size();
  embed_batch(chunk_texts(chunks), provider, c);
  cache.save();
  std::cout << chunks.size() << " texts embedded with " << provider.descriptor().name << "; "
            << c->size() - before << " new cache entries (" << c->size() << " total)\n";
  return kExitOk;
}

int cmd_index(const fs::path& chunks_path, const fs::path& out, EmbeddingProvider& provider,
              CacheFile& cache) {
  DirectoryLock lock(lock_dir_for_file(out));
  const auto chunks = load_chunks_jsonl(read_file(chunks_path));
  const auto index = build_index(chunks, provider, cache.open());
  save_index(index, out);
  cache.save();
  std::cout << "indexed " << index.size() << " chunks (dim " << index.dim() << ") with "
            << provider.descriptor().name << " -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_query(const fs::path& index_path, EmbeddingProvider& provider, const std::string& text,
              std::size_t k) {
  const auto index = load_index(index_path);
  if (index.dim() != provider.descriptor().dim) {
    throw DimensionMismatch(index.dim(), provider.descriptor().dim);
  }
  const auto q = embed_batch(std::vector<std::string>{text}, provider);
  for (const auto& h : index.topk(q[0], k)) {
    std::string snippet = index.text(index.position(h.chunk_id));
    std::replace(snippet.begin(), snippet.end(), '\n', ' ');
    if (snippet.size() > 100) snippet = snippet.substr(0, 97) + "...";
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", h.score);
    std::cout << h.rank << "\t" << score << "\t" << h.chunk_id << "\t" << snippet << "\n";
  }
  return kExitOk;
}

void print_report_line(const RunReport& r) {
  std::cout << to_string(r.config) << "  " << r.provider.name << "  ";
  if (r.failed) {
    std::cout << "FAILED: " << r.error << "\n";
    return;
  }
  std::cout << "top-" << r.k << " " << format_pct(r.overall_accuracy);
  for (auto t : kAllQTypes) {
    std::cout << "  " << to_string(t) << "=" << format_pct(r.per_type_accuracy.at(t));
  }
  std::cout << "\n";
}

int cmd_evaluate(const fs::path& index_path, const fs::path& qa_path, EmbeddingProvider& provider,
                 std::size_t k, const ReprConfig& cfg, const fs::path& out_dir, CacheFile& cache) {
  DirectoryLock lock(out_dir);
  const auto index = load_index(index_path);
  const auto qa = load_qa(read_file(qa_path));
  EvalOptions eo;
  eo.k = k;
  eo.config = cfg;
  eo.cache = cache.open();
  const std::vector<RunReport> reports = {evaluate_run(qa, index, provider, eo)};
  write_file(out_dir / "report.csv", emit_report(reports, ReportFormat::csv));
  write_file(out_dir / "run.json", reports_to_json(reports));
  cache.save();
  print_report_line(reports[0]);
  return kExitOk;
}

// "row,pipe" style selector: any of row/table, pipe/space, repeat/norepeat,
// text/notext, comma separated; each axis at most once.
std::vector<ReprConfig> parse_config_selector(const std::string& selector) {
  std::optional<ChunkLevel> level;
  std::optional<Separator> sep;
  std::optional<bool> repeat, text;
  std::stringstream ss(selector);
  std::string item;
  const auto set_once = [&](auto& slot, auto value, const std::string& word) {
    if (slot) throw UsageError("--configs names the same axis twice at '" + word + "'");
    slot = value;
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (auto l = parse_chunk_level(item)) set_once(level, *l, item);
    else if (auto s = parse_separator(item)) set_once(sep, *s, item);
    else if (item == "repeat" || item == "norepeat") set_once(repeat, item == "repeat", item);
    else if (item == "text" || item == "notext") set_once(text, item == "text", item);
    else throw UsageError("unknown --configs value '" + item + "'");
  }
  return filter_grid(level, sep, repeat, text);
}

int cmd_grid(const fs::path& corpus, const fs::path& qa_path, ProviderSet& providers, std::size_t k,
             const std::vector<ReprConfig>& configs, bool parallel, const fs::path& out_dir,
             CacheFile& cache) {
  DirectoryLock lock(out_dir);
  const auto docs = load_corpus(corpus);
  const auto qa = load_qa(read_file(qa_path));
  GridOptions go;
  go.k = k;
  go.configs = configs;
  go.cache = cache.open();
  go.parallel = parallel;
  const auto raw = providers.raw();
  const auto reports = run_grid(docs, qa, raw, go);
  write_file(out_dir / "report.csv", emit_report(reports, ReportFormat::csv));
  write_file(out_dir / "figure3_data.json", emit_report(reports, ReportFormat::grouped_bar_data));
  write_file(out_dir / "runs.json", reports_to_json(reports));
  cache.save();

  const RunReport* best = nullptr;
  std::size_t failed = 0;
  for (const auto& r : reports) {
    print_report_line(r);
    if (r.failed) {
      ++failed;
      continue;
    }
    if (best == nullptr || r.overall_accuracy > best->overall_accuracy) best = &r;
  }
  std::cout << reports.size() << " cells, " << failed << " failed\n";
  if (best != nullptr) {
    std::cout << "best: " << to_string(best->config) << " with " << best->provider.name
              << " at top-" << best->k << " accuracy " << format_pct(best->overall_accuracy)
              << "%\n";
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("tablerag");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Table-aware retrieval: ingest documents, build chunk corpora and indices, "
               "and benchmark top-k retrieval over the representation grid."};
  app.set_config("--config", "", "read options from a TOML/INI file; command-line flags win");
  app.require_subcommand(1);
  std::string embed_url = embed_url_from_env();
  app.add_option("--embed-url", embed_url, std::string("embedding service base URL (default $") +
                                               kEmbedUrlEnv + " or " + kDefaultEmbedUrl + ")");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse .docx / normalized JSON into normalized JSON");
  std::vector<std::string> ingest_inputs;
  std::string ingest_out;
  bool keep_going = false;
  ingest->add_option("inputs", ingest_inputs, "files or directories (searched for *.docx)")->required();
  ingest->add_option("-o,--out", ingest_out, "output directory")->required();
  ingest->add_flag("--keep-going", keep_going, "continue past files that fail to parse");

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics and row-count histogram");
  std::string stats_corpus, stats_json;
  stats->add_option("corpus", stats_corpus, "directory of normalized JSON")->required()->check(CLI::ExistingDirectory);
  stats->add_option("--json", stats_json, "write the JSON statistics here instead of stdout");

  // chunk
  auto* chunk = app.add_subcommand("chunk", "build the chunk corpus for one configuration");
  std::string chunk_corpus, chunk_out;
  ReprFlags chunk_repr;
  chunk->add_option("corpus", chunk_corpus)->required()->check(CLI::ExistingDirectory);
  chunk->add_option("-o,--out", chunk_out, "chunks JSONL file")->required();
  chunk_repr.add_to(*chunk);

  // embed
  auto* embed = app.add_subcommand("embed", "embed a chunk file into the embedding cache");
  std::string embed_chunks, embed_provider = "hash";
  CacheFile embed_cache;
  embed->add_option("chunks", embed_chunks)->required()->check(CLI::ExistingFile);
  embed->add_option("--provider", embed_provider, "hash[:dim] or remote:<model>[:dim]")->capture_default_str();
  embed->add_option("--cache", embed_cache.path, "embedding cache file")->required();

  // index
  auto* index = app.add_subcommand("index", "embed a chunk file and save a vector index");
  std::string index_chunks, index_out, index_provider = "hash";
  CacheFile index_cache;
  index->add_option("chunks", index_chunks)->required()->check(CLI::ExistingFile);
  index->add_option("-o,--out", index_out, "index file")->required();
  index->add_option("--provider", index_provider)->capture_default_str();
  index->add_option("--cache", index_cache.path, "embedding cache file");

  // query
  auto* query = app.add_subcommand("query", "top-k search of an index");
  std::string query_index, query_provider = "hash", query_text;
  std::size_t query_k = kDefaultTopK;
  query->add_option("index", query_index)->required()->check(CLI::ExistingFile);
  query->add_option("text", query_text, "question text")->required();
  query->add_option("--provider", query_provider)->capture_default_str();
  query->add_option("-k,--k", query_k)->check(CLI::PositiveNumber)->capture_default_str();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "top-k accuracy of one index on a QA set");
  std::string eval_index, eval_qa, eval_out, eval_provider = "hash";
  std::size_t eval_k = kDefaultTopK;
  ReprFlags eval_repr;
  CacheFile eval_cache;
  evaluate->add_option("index", eval_index)->required()->check(CLI::ExistingFile);
  evaluate->add_option("qa", eval_qa)->required()->check(CLI::ExistingFile);
  evaluate->add_option("-o,--out", eval_out, "output directory")->required();
  evaluate->add_option("--provider", eval_provider)->capture_default_str();
  evaluate->add_option("-k,--k", eval_k)->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_option("--cache", eval_cache.path, "embedding cache file");
  eval_repr.add_to(*evaluate);  // recorded in the report only

  // grid
  auto* grid = app.add_subcommand("grid", "run the representation grid for one or more providers");
  std::string grid_corpus, grid_qa, grid_out, grid_configs;
  std::vector<std::string> grid_providers;
  std::size_t grid_k = kDefaultTopK;
  bool grid_parallel = false;
  CacheFile grid_cache;
  std::optional<std::string> grid_level, grid_sep;
  std::optional<bool> grid_repeat, grid_text;
  grid->add_option("corpus", grid_corpus)->required()->check(CLI::ExistingDirectory);
  grid->add_option("qa", grid_qa)->required()->check(CLI::ExistingFile);
  grid->add_option("-o,--out", grid_out, "output directory")->required();
  grid->add_option("--provider", grid_providers, "repeatable; default hash");
  grid->add_option("-k,--k", grid_k)->check(CLI::PositiveNumber)->capture_default_str();
  auto* configs_opt = grid->add_option("--configs", grid_configs,
                                       "subset selector, e.g. row,pipe or table,space,text");
  auto* level_opt = grid->add_option("--chunk-level", grid_level)->check(CLI::IsMember({"row", "table"}));
  auto* sep_opt = grid->add_option("--separator", grid_sep)->check(CLI::IsMember({"pipe", "space"}));
  auto* repeat_opt = grid->add_flag("--repeat-header,!--no-repeat-header", grid_repeat);
  auto* text_opt = grid->add_flag("--include-text,!--no-include-text", grid_text);
  for (auto* o : {level_opt, sep_opt, repeat_opt, text_opt}) configs_opt->excludes(o);
  grid->add_flag("--parallel", grid_parallel, "run providers of a config concurrently");
  grid->add_option("--cache", grid_cache.path, "embedding cache file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*ingest) return cmd_ingest(ingest_inputs, ingest_out, keep_going);
    if (*stats) return cmd_stats(stats_corpus, stats_json);
    if (*chunk) return cmd_chunk(chunk_corpus, chunk_out, chunk_repr.config());
    if (*embed) {
      auto p = make_provider(embed_provider, embed_url);
      return cmd_embed(embed_chunks, *p, embed_cache);
    }
    if (*index) {
      auto p = make_provider(index_provider, embed_url);
      return cmd_index(index_chunks, index_out, *p, index_cache);
    }
    if (*query) {
      auto p = make_provider(query_provider, embed_url);
      return cmd_query(query_index, *p, query_text, query_k);
    }
    if (*evaluate) {
      auto p = make_provider(eval_provider, embed_url);
      return cmd_evaluate(eval_index, eval_qa, *p, eval_k, eval_repr.config(), eval_out, eval_cache);
    }
    if (*grid) {
      ProviderSet providers;
      if (grid_providers.empty()) grid_providers.push_back("hash");
      for (const auto& spec : grid_providers) providers.owned.push_back(make_provider(spec, embed_url));
      std::vector<ReprConfig> configs;
      if (!grid_configs.empty()) {
        configs = parse_config_selector(grid_configs);
      } else {
        std::optional<ChunkLevel> level;
        std::optional<Separator> sep;
        if (grid_level) level = parse_chunk_level(*grid_level);
        if (grid_sep) sep = parse_separator(*grid_sep);
        configs = filter_grid(level, sep, grid_repeat, grid_text);
      }
      return cmd_grid(grid_corpus, grid_qa, providers, grid_k, configs, grid_parallel, grid_out,
                      grid_cache);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
