#include "tablerag/eval.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <future>
#include <set>
#include <thread>
#include <unordered_set>

#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

bool is_table_kind(ChunkKind k) {
  return k == ChunkKind::row || k == ChunkKind::table || k == ChunkKind::header ||
         k == ChunkKind::caption;
}

double percent(std::size_t hits, std::size_t total) {
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested != 0 ? requested : std::thread::hardware_concurrency();
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(jobs, 1));
}

}  // namespace

std::string_view to_string(QType t) {
  switch (t) {
    case QType::E: return "E";
    case QType::M: return "M";
    case QType::A: return "A";
    case QType::I: return "I";
  }
  return "E";
}

std::optional<QType> parse_qtype(std::string_view s) {
  for (auto t : kAllQTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::vector<QAItem> load_qa(std::string_view text) {
  std::vector<QAItem> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaViolation(where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw SchemaViolation(where + ": expected object");
    for (const auto& item : j.items()) {
      const auto& k = item.key();
      if (k != "qid" && k != "question" && k != "gold_table_ids" && k != "qtype") {
        throw SchemaViolation(where + ": unknown key " + k);
      }
    }
    QAItem q;
    if (!j.contains("qid") || !j["qid"].is_string() || j["qid"].get<std::string>().empty()) {
      throw SchemaViolation(where + ": qid must be a non-empty string");
    }
    q.qid = j["qid"].get<std::string>();
    if (!j.contains("question") || !j["question"].is_string()) {
      throw SchemaViolation(where + ": question must be a string");
    }
    q.question = j["question"].get<std::string>();
    if (!j.contains("gold_table_ids") || !j["gold_table_ids"].is_array() ||
        j["gold_table_ids"].empty()) {
      throw SchemaViolation(where + ": gold_table_ids must be a non-empty array");
    }
    for (const auto& g : j["gold_table_ids"]) {
      if (!g.is_string()) throw SchemaViolation(where + ": gold_table_ids entries must be strings");
      q.gold_table_ids.push_back(g.get<std::string>());
    }
    const auto qtype = j.contains("qtype") && j["qtype"].is_string()
                           ? parse_qtype(j["qtype"].get<std::string>())
                           : std::nullopt;
    if (!qtype) throw SchemaViolation(where + ": qtype must be one of E, M, A, I");
    q.qtype = *qtype;
    if (!seen.insert(q.qid).second) {
      throw DuplicateQid(where + ": duplicate qid " + q.qid);
    }
    out.push_back(std::move(q));
  }
  return out;
}

HitJudgement judge_hit(std::span<const SearchHit> hits, const ProvenanceLookup& lookup,
                       std::span<const std::string> gold_table_ids) {
  HitJudgement result;
  for (const auto& h : hits) {
    const Provenance* p = lookup(h.chunk_id);
    if (p == nullptr) throw UnknownChunkId("unknown chunk id " + h.chunk_id);
    if (!is_table_kind(p->kind) || !p->table_id) continue;
    if (std::find(gold_table_ids.begin(), gold_table_ids.end(), *p->table_id) ==
        gold_table_ids.end()) {
      continue;
    }
    result.hit = true;
    if (!result.first_rank || h.rank < *result.first_rank) result.first_rank = h.rank;
  }
  return result;
}

HitJudgement judge_hit(std::span<const SearchHit> hits,
                       const std::unordered_map<std::string, Provenance>& provenance,
                       std::span<const std::string> gold_table_ids) {
  return judge_hit(
      hits,
      [&](const std::string& id) -> const Provenance* {
        const auto it = provenance.find(id);
        return it == provenance.end() ? nullptr : &it->second;
      },
      gold_table_ids);
}

HitJudgement judge_hit(std::span<const SearchHit> hits, const VectorIndex& index,
                       std::span<const std::string> gold_table_ids) {
  return judge_hit(
      hits, [&](const std::string& id) { return index.find(id); }, gold_table_ids);
}

VectorIndex build_index(std::span<const Chunk> chunks, EmbeddingProvider& provider,
                        EmbeddingCache* cache) {
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(c.text);
  const auto vectors = embed_batch(texts, provider, cache);
  VectorIndex index(provider.descriptor().dim);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    index.add(chunks[i].chunk_id, vectors[i], chunks[i].provenance, chunks[i].text);
  }
  return index;
}

RunReport evaluate_run(std::span<const QAItem> qa, const VectorIndex& index,
                       EmbeddingProvider& provider, const EvalOptions& options) {
  if (qa.empty()) throw InvalidArgument("evaluate_run needs at least one question");
  if (options.k == 0) throw InvalidArgument("k must be >= 1");
  for (const auto& q : qa) {
    for (const auto& g : q.gold_table_ids) {
      if (!index.has_table(g)) throw GoldTableMissing(q.qid, g);
    }
  }

  std::vector<std::string> questions;
  questions.reserve(qa.size());
  for (const auto& q : qa) questions.push_back(q.question);
  std::vector<EmbeddingVector> query_vectors;
  try {
    query_vectors = embed_batch(questions, provider, options.cache);
  } catch (const EmptyText& e) {
    throw InvalidArgument("question " + qa[e.index()].qid + " has empty text");
  } catch (const Error& e) {
    throw Error("embedding questions (first qid " + qa.front().qid + "): " + e.what());
  }

  std::vector<QuestionOutcome> outcomes(qa.size());
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto hits = index.topk(query_vectors[i], options.k);
      const auto j = judge_hit(hits, index, qa[i].gold_table_ids);
      outcomes[i] = {qa[i].qid, qa[i].qtype, j.hit, j.first_rank};
    }
  };
  const std::size_t workers = worker_count(options.threads, qa.size());
  if (workers == 1) {
    work(0, qa.size());
  } else {
    std::vector<std::future<void>> jobs;
    const std::size_t per = (qa.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < qa.size(); begin += per) {
      jobs.push_back(std::async(std::launch::async, work, begin,
                                std::min(qa.size(), begin + per)));
    }
    for (auto& j : jobs) j.get();
  }

  RunReport report;
  report.config = options.config;
  report.provider = provider.descriptor();
  report.k = options.k;
  std::map<QType, std::pair<std::size_t, std::size_t>> by_type;  // hits, total
  std::size_t hits = 0;
  for (const auto& o : outcomes) {
    auto& [h, total] = by_type[o.qtype];
    ++total;
    if (o.hit) {
      ++h;
      ++hits;
    }
  }
  report.overall_accuracy = percent(hits, outcomes.size());
  for (auto t : kAllQTypes) {
    const auto it = by_type.find(t);
    report.per_type_accuracy[t] =
        it == by_type.end() ? std::nullopt
                            : std::optional<double>(percent(it->second.first, it->second.second));
  }
  report.per_question = std::move(outcomes);
  return report;
}

std::vector<RunReport> run_grid(std::span<const Document> docs, std::span<const QAItem> qa,
                                std::span<EmbeddingProvider* const> providers,
                                const GridOptions& options) {
  if (providers.empty()) throw InvalidArgument("run_grid needs at least one provider");
  std::vector<ReprConfig> configs = options.configs;
  if (configs.empty()) {
    const auto grid = full_grid();
    configs.assign(grid.begin(), grid.end());
  }

  std::vector<RunReport> reports(configs.size() * providers.size());
  const auto run_cell = [&](const ReprConfig& cfg, const std::vector<Chunk>* chunks,
                            const std::string* corpus_error, EmbeddingProvider& provider) {
    RunReport r;
    r.config = cfg;
    r.provider = provider.descriptor();
    r.k = options.k;
    try {
      if (corpus_error != nullptr) throw Error(*corpus_error);
      const VectorIndex index = build_index(*chunks, provider, options.cache);
      EvalOptions eval;
      eval.k = options.k;
      eval.config = cfg;
      eval.cache = options.cache;
      eval.threads = options.eval_threads;
      r = evaluate_run(qa, index, provider, eval);
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
      spdlog::error("grid cell {} / {} failed: {}", to_string(cfg), r.provider.name, e.what());
    }
    return r;
  };

  for (std::size_t c = 0; c < configs.size(); ++c) {
    // One corpus per config, shared by every provider.
    std::vector<Chunk> chunks;
    std::optional<std::string> corpus_error;
    try {
      chunks = build_corpus(docs, configs[c]);
    } catch (const std::exception& e) {
      corpus_error = e.what();
    }
    const std::string* err = corpus_error ? &*corpus_error : nullptr;
    if (options.parallel && providers.size() > 1) {
      std::vector<std::future<RunReport>> cells;
      for (auto* p : providers) {
        cells.push_back(std::async(std::launch::async, run_cell, std::cref(configs[c]),
                                   &chunks, err, std::ref(*p)));
      }
      for (std::size_t p = 0; p < cells.size(); ++p) {
        reports[c * providers.size() + p] = cells[p].get();
      }
    } else {
      for (std::size_t p = 0; p < providers.size(); ++p) {
        reports[c * providers.size() + p] = run_cell(configs[c], &chunks, err, *providers[p]);
      }
    }
  }
  return reports;
}

std::vector<ReprConfig> filter_grid(std::optional<ChunkLevel> level,
                                    std::optional<Separator> separator,
                                    std::optional<bool> repeat_header,
                                    std::optional<bool> include_text) {
  std::vector<ReprConfig> out;
  for (const auto& cfg : full_grid()) {
    if (level && cfg.chunk_level != *level) continue;
    if (separator && cfg.separator != *separator) continue;
    if (repeat_header && cfg.repeat_header != *repeat_header) continue;
    if (include_text && cfg.include_text != *include_text) continue;
    out.push_back(cfg);
  }
  return out;
}

}  // namespace tablerag
