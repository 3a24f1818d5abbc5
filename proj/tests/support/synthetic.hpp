#pragma once

// Seeded random generators for documents, QA sets and vectors, plus
// independent brute-force oracles. Test code only: nothing here calls into
// the index or evaluation paths it is used to check.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tablerag/chunker.hpp"
#include "tablerag/docmodel.hpp"
#include "tablerag/eval.hpp"

namespace tablerag::testkit {

struct RandomDocOptions {
  std::size_t max_tables = 4;
  std::size_t max_rows = 8;
  std::size_t max_cols = 5;
  std::size_t max_paragraphs = 4;
  std::size_t max_sentences = 4;
  double caption_probability = 0.5;
};

std::string random_word(std::mt19937_64& rng);
std::string random_sentence(std::mt19937_64& rng);

// Valid document with random headings, paragraphs and tables. Every cell
// holds at least one alphanumeric word and never contains " | ".
Document random_document(std::mt19937_64& rng, const std::string& doc_id,
                         const RandomDocOptions& options = {});

// Number of sentences the splitter yields for the paragraphs of `doc`.
std::size_t paragraph_sentence_count(const Document& doc);

// Corpus with `tables` tables spread over documents with interspersed
// prose, and `questions` questions whose text overlaps one gold table's
// cells. Question types cycle E, M, A, I.
struct QaFixture {
  std::vector<Document> docs;
  std::vector<QAItem> qa;
};
QaFixture make_qa_fixture(std::uint64_t seed, std::size_t tables = 10,
                          std::size_t questions = 20);

std::vector<std::vector<float>> random_unit_vectors(std::mt19937_64& rng, std::size_t n,
                                                    std::size_t dim);

// ---- oracles -------------------------------------------------------------

struct OracleHit {
  std::string id;
  double score;
};

// Scores every entry by direct summation, sorts the full list by
// (score desc, id asc) and returns the first k.
std::vector<OracleHit> oracle_topk(const std::vector<std::vector<float>>& vectors,
                                   const std::vector<std::string>& ids,
                                   const std::vector<float>& query, std::size_t k);

// Independent re-implementation of the documented hash embedding: token
// bucket counts (not normalized).
std::vector<double> oracle_hash_counts(const std::string& text, std::size_t dim);

// Top-k accuracy (percent) over a chunk corpus, computed from raw bucket
// counts with cosine = dot / (|a| |b|) and the hit rule applied by scanning
// provenance. Returns per-question hit flags through `hits` when non-null.
double oracle_accuracy(const std::vector<Chunk>& chunks, const std::vector<QAItem>& qa,
                       std::size_t dim, std::size_t k, std::vector<bool>* hits = nullptr);

}  // namespace tablerag::testkit
