#include "tablerag/docmodel.hpp"

#include <set>
#include <unordered_map>

namespace tablerag {

namespace {

bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

void check_table(const TableData& table, std::size_t block_index,
                 std::vector<Violation>& out) {
  if (table.table_id.empty()) {
    out.push_back({block_index, "table_id_empty", "table has no id"});
  }
  if (table.header.empty()) {
    out.push_back({block_index, "header_empty",
                   "table " + table.table_id + " has no header cells"});
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      out.push_back({block_index, "ragged_row",
                     "table " + table.table_id + " row " + std::to_string(r) +
                         " has " + std::to_string(table.rows[r].size()) +
                         " cells, header has " +
                         std::to_string(table.header.size())});
    }
  }
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    bool space = is_space_byte(c);
    // U+00A0 NO-BREAK SPACE is encoded as C2 A0.
    if (c == 0xC2 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      space = true;
      ++i;
    }
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<Violation> validate_document(const Document& doc) {
  std::vector<Violation> out;
  if (doc.doc_id.empty()) {
    out.push_back({std::nullopt, "doc_id_empty", "document has no id"});
  }
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
    const auto& block = doc.blocks[i];
    if (const auto* h = std::get_if<Heading>(&block)) {
      if (h->level < 1) {
        out.push_back({i, "heading_level",
                       "heading level " + std::to_string(h->level) + " < 1"});
      }
    } else if (const auto* t = std::get_if<TableBlock>(&block)) {
      check_table(t->table, i, out);
      if (!t->table.table_id.empty()) {
        auto [it, inserted] = seen.emplace(t->table.table_id, i);
        if (!inserted) {
          out.push_back({i, "duplicate_table_id",
                         "table id " + t->table.table_id +
                             " already used by block " +
                             std::to_string(it->second)});
        }
      }
    }
  }
  return out;
}

std::vector<Violation> validate_corpus(std::span<const Document> docs) {
  std::vector<Violation> out;
  std::unordered_map<std::string, std::string> owner;
  std::set<std::string> doc_ids;
  for (const auto& doc : docs) {
    for (auto v : validate_document(doc)) {
      v.detail = doc.doc_id + ": " + v.detail;
      out.push_back(std::move(v));
    }
    if (!doc.doc_id.empty() && !doc_ids.insert(doc.doc_id).second) {
      out.push_back({std::nullopt, "duplicate_doc_id",
                     "document id " + doc.doc_id + " used twice"});
    }
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
      const auto* t = std::get_if<TableBlock>(&doc.blocks[i]);
      if (t == nullptr || t->table.table_id.empty()) continue;
      auto [it, inserted] = owner.emplace(t->table.table_id, doc.doc_id);
      // Duplicates inside one document are already reported above.
      if (!inserted && it->second != doc.doc_id) {
        out.push_back({i, "duplicate_table_id",
                       doc.doc_id + ": table id " + t->table.table_id +
                           " already used in document " + it->second});
      }
    }
  }
  return out;
}

void assign_section_paths(Document& doc) {
  // (level, text) of the currently open headings, outermost first.
  std::vector<std::pair<int, std::string>> open;
  for (auto& block : doc.blocks) {
    if (const auto* h = std::get_if<Heading>(&block)) {
      while (!open.empty() && open.back().first >= h->level) open.pop_back();
      open.emplace_back(h->level, h->text);
    } else if (auto* t = std::get_if<TableBlock>(&block)) {
      t->table.section_path.clear();
      for (const auto& [level, text] : open) t->table.section_path.push_back(text);
    }
  }
}

CorpusStats corpus_stats(std::span<const Document> docs,
                         const SentenceCounter& sentence_counter) {
  CorpusStats stats;
  stats.num_documents = docs.size();
  for (const auto& doc : docs) {
    for (const auto& block : doc.blocks) {
      if (const auto* p = std::get_if<Paragraph>(&block)) {
        ++stats.num_paragraphs;
        stats.num_sentences += sentence_counter(*p);
      } else if (const auto* t = std::get_if<TableBlock>(&block)) {
        ++stats.num_tables;
        ++stats.row_count_histogram[t->table.rows.size()];
      }
    }
  }
  return stats;
}

}  // namespace tablerag
