#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tablerag {

struct Heading {
  int level = 1;
  std::string text;
  friend bool operator==(const Heading&, const Heading&) = default;
};

struct Paragraph {
  std::string text;
  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

// A table as parsed from the source. The first source row is the header;
// `rows` holds body rows only.
struct TableData {
  std::string table_id;
  std::optional<std::string> caption;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Enclosing heading texts, outermost first. Derived, not serialized.
  std::vector<std::string> section_path;
  friend bool operator==(const TableData&, const TableData&) = default;
};

struct TableBlock {
  TableData table;
  friend bool operator==(const TableBlock&, const TableBlock&) = default;
};

using Block = std::variant<Heading, Paragraph, TableBlock>;

struct Document {
  std::string doc_id;
  std::string title;
  std::vector<Block> blocks;
  friend bool operator==(const Document&, const Document&) = default;
};

struct Violation {
  // Index into Document::blocks; empty for document-level problems.
  std::optional<std::size_t> block_index;
  std::string rule;
  std::string detail;
  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_document(const Document& doc);

// Document rules plus corpus-wide table_id uniqueness. Violations found by the
// per-document pass are prefixed with the doc_id in `detail`.
std::vector<Violation> validate_corpus(std::span<const Document> docs);

// Recomputes TableData::section_path for every table from the most recent
// heading at each level preceding it.
void assign_section_paths(Document& doc);

// Collapses runs of whitespace (ASCII and U+00A0) to one space and trims.
std::string normalize_whitespace(std::string_view text);

struct CorpusStats {
  std::size_t num_documents = 0;
  std::size_t num_tables = 0;
  std::size_t num_paragraphs = 0;
  std::size_t num_sentences = 0;
  // body-row count -> number of tables with that many body rows
  std::map<std::size_t, std::size_t> row_count_histogram;
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

using SentenceCounter = std::function<std::size_t(const Paragraph&)>;

CorpusStats corpus_stats(std::span<const Document> docs,
                         const SentenceCounter& sentence_counter);

template <class Fn>
void for_each_table(const Document& doc, Fn&& fn) {
  for (const auto& block : doc.blocks) {
    if (const auto* t = std::get_if<TableBlock>(&block)) fn(t->table);
  }
}

}  // namespace tablerag
