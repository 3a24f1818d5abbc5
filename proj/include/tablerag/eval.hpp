#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tablerag/chunker.hpp"
#include "tablerag/embed.hpp"
#include "tablerag/index.hpp"

namespace tablerag {

class EmbeddingCache;

// Question categories: single-cell extraction, multiple rows/columns,
// aggregation, inference.
enum class QType { E, M, A, I };

inline constexpr QType kAllQTypes[] = {QType::E, QType::M, QType::A, QType::I};

std::string_view to_string(QType t);
std::optional<QType> parse_qtype(std::string_view s);

struct QAItem {
  std::string qid;
  std::string question;
  std::vector<std::string> gold_table_ids;
  QType qtype = QType::E;
  friend bool operator==(const QAItem&, const QAItem&) = default;
};

// One JSON object per line: {"qid","question","gold_table_ids","qtype"}.
// Blank lines are skipped. Throws SchemaViolation (naming the line) or
// DuplicateQid.
std::vector<QAItem> load_qa(std::string_view jsonl_text);

struct HitJudgement {
  bool hit = false;
  std::optional<std::size_t> first_rank;
  friend bool operator==(const HitJudgement&, const HitJudgement&) = default;
};

using ProvenanceLookup = std::function<const Provenance*(const std::string& chunk_id)>;

// A retrieval is correct when any returned chunk is a row, table, header or
// caption of a gold table. first_rank is the best such rank. Throws
// UnknownChunkId when the lookup does not know a hit.
HitJudgement judge_hit(std::span<const SearchHit> hits, const ProvenanceLookup& lookup,
                       std::span<const std::string> gold_table_ids);
HitJudgement judge_hit(std::span<const SearchHit> hits,
                       const std::unordered_map<std::string, Provenance>& provenance,
                       std::span<const std::string> gold_table_ids);
HitJudgement judge_hit(std::span<const SearchHit> hits, const VectorIndex& index,
                       std::span<const std::string> gold_table_ids);

struct QuestionOutcome {
  std::string qid;
  QType qtype = QType::E;
  bool hit = false;
  std::optional<std::size_t> first_rank;
  friend bool operator==(const QuestionOutcome&, const QuestionOutcome&) = default;
};

inline constexpr std::size_t kDefaultTopK = 5;

struct RunReport {
  ReprConfig config;
  ProviderDescriptor provider;
  std::size_t k = kDefaultTopK;
  double overall_accuracy = 0.0;  // percent
  // Percent per type; nullopt when the QA set has no question of that type.
  std::map<QType, std::optional<double>> per_type_accuracy;
  std::vector<QuestionOutcome> per_question;
  bool failed = false;
  std::string error;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct EvalOptions {
  std::size_t k = kDefaultTopK;
  ReprConfig config;  // recorded in the report
  EmbeddingCache* cache = nullptr;
  // Worker threads for the search phase; 0 picks hardware concurrency.
  std::size_t threads = 0;
};

// Embeds every question, searches the index and aggregates accuracies.
// Throws GoldTableMissing before any work if a gold id is absent from the
// index; provider errors are rethrown with the first question id prepended.
RunReport evaluate_run(std::span<const QAItem> qa, const VectorIndex& index,
                       EmbeddingProvider& provider, const EvalOptions& options);

// Embeds a chunk corpus into a fresh index.
VectorIndex build_index(std::span<const Chunk> chunks, EmbeddingProvider& provider,
                        EmbeddingCache* cache = nullptr);

struct GridOptions {
  std::size_t k = kDefaultTopK;
  // Cells to run; empty means the full 16-config grid.
  std::vector<ReprConfig> configs;
  EmbeddingCache* cache = nullptr;
  // Run (config, provider) cells on separate threads.
  bool parallel = false;
  std::size_t eval_threads = 0;
};

// One report per (config, provider) in config order, providers varying
// fastest. A cell that throws is reported with failed = true and the error
// text instead of aborting the grid.
std::vector<RunReport> run_grid(std::span<const Document> docs, std::span<const QAItem> qa,
                                std::span<EmbeddingProvider* const> providers,
                                const GridOptions& options);

// Subset of the grid whose cells match every given filter value.
std::vector<ReprConfig> filter_grid(std::optional<ChunkLevel> level,
                                    std::optional<Separator> separator,
                                    std::optional<bool> repeat_header,
                                    std::optional<bool> include_text);

}  // namespace tablerag
