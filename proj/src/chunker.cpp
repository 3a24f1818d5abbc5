#include <json.hpp>

#include <algorithm>
#include <cctype>

#include "tablerag/chunker.hpp"
#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

std::string join_cells(const std::vector<std::string>& cells, Separator sep) {
  std::string out;
  const auto glue = separator_text(sep);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += glue;
    out += cells[i];
  }
  return out;
}

bool row_has_content(const std::vector<std::string>& cells) {
  return std::any_of(cells.begin(), cells.end(),
                     [](const std::string& c) { return has_content(c); });
}

bool table_has_content(const TableData& t) {
  return (t.caption && has_content(*t.caption)) || row_has_content(t.header) ||
         std::any_of(t.rows.begin(), t.rows.end(), row_has_content);
}

Chunk table_chunk(const TableData& t, const std::string& doc_id, ChunkKind kind,
                  std::size_t index, std::string text) {
  Chunk c;
  c.chunk_id = t.table_id + "/" + std::string(to_string(kind)) + "/" +
               std::to_string(index);
  c.text = std::move(text);
  c.provenance.doc_id = doc_id;
  c.provenance.table_id = t.table_id;
  if (kind == ChunkKind::row) c.provenance.row_index = index;
  c.provenance.kind = kind;
  return c;
}

void emit_table(const TableData& t, const std::string& doc_id,
                const ReprConfig& cfg, std::vector<Chunk>& out) {
  if (t.caption && has_content(*t.caption)) {
    out.push_back(table_chunk(t, doc_id, ChunkKind::caption, 0, *t.caption));
  }
  if (cfg.chunk_level == ChunkLevel::table) {
    if (table_has_content(t)) {
      out.push_back(
          table_chunk(t, doc_id, ChunkKind::table, 0, serialize_table(t, cfg)));
    }
    return;
  }
  if (row_has_content(t.header)) {
    out.push_back(table_chunk(t, doc_id, ChunkKind::header, 0,
                              serialize_header(t, cfg.separator)));
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!row_has_content(t.rows[r])) continue;
    out.push_back(
        table_chunk(t, doc_id, ChunkKind::row, r, serialize_row(t, r, cfg)));
  }
}

}  // namespace

std::array<ReprConfig, kGridSize> full_grid() {
  std::array<ReprConfig, kGridSize> grid{};
  std::size_t i = 0;
  for (auto level : {ChunkLevel::table, ChunkLevel::row}) {
    for (auto sep : {Separator::pipe, Separator::space}) {
      for (bool repeat : {false, true}) {
        for (bool text : {false, true}) grid[i++] = {level, sep, repeat, text};
      }
    }
  }
  return grid;
}

std::string_view to_string(ChunkLevel level) {
  return level == ChunkLevel::table ? "table" : "row";
}

std::string_view to_string(Separator sep) {
  return sep == Separator::pipe ? "pipe" : "space";
}

std::string to_string(const ReprConfig& cfg) {
  std::string out(to_string(cfg.chunk_level));
  out += '/';
  out += to_string(cfg.separator);
  out += cfg.repeat_header ? "/repeat" : "/norepeat";
  out += cfg.include_text ? "/text" : "/notext";
  return out;
}

std::optional<ChunkLevel> parse_chunk_level(std::string_view s) {
  if (s == "table") return ChunkLevel::table;
  if (s == "row") return ChunkLevel::row;
  return std::nullopt;
}

std::optional<Separator> parse_separator(std::string_view s) {
  if (s == "pipe") return Separator::pipe;
  if (s == "space") return Separator::space;
  return std::nullopt;
}

std::string_view separator_text(Separator sep) {
  return sep == Separator::pipe ? " | " : " ";
}

std::string_view to_string(ChunkKind kind) {
  switch (kind) {
    case ChunkKind::row: return "row";
    case ChunkKind::table: return "table";
    case ChunkKind::header: return "header";
    case ChunkKind::caption: return "caption";
    case ChunkKind::sentence: return "sentence";
  }
  return "sentence";
}

std::optional<ChunkKind> parse_chunk_kind(std::string_view s) {
  for (auto k : {ChunkKind::row, ChunkKind::table, ChunkKind::header,
                 ChunkKind::caption, ChunkKind::sentence}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool has_content(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c >= 0x80;
  });
}

std::string render_cell(std::string_view header, std::string_view value,
                        bool repeat_header) {
  // A blank header (e.g. a padded column) has nothing to repeat.
  if (!repeat_header || header.empty()) return std::string(value);
  std::string out(header);
  out += ": ";
  out += value;
  return out;
}

std::string serialize_row(const TableData& table, std::size_t row_index,
                          const ReprConfig& cfg) {
  if (row_index >= table.rows.size()) {
    throw IndexOutOfRange("row " + std::to_string(row_index) + " of table " +
                          table.table_id + " (" +
                          std::to_string(table.rows.size()) + " body rows)");
  }
  const auto& row = table.rows[row_index];
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    const std::string_view header =
        c < table.header.size() ? std::string_view(table.header[c]) : "";
    cells.push_back(render_cell(header, row[c], cfg.repeat_header));
  }
  return join_cells(cells, cfg.separator);
}

std::string serialize_header(const TableData& table, Separator sep) {
  return join_cells(table.header, sep);
}

std::string serialize_table(const TableData& table, const ReprConfig& cfg) {
  std::string out;
  if (table.caption) {
    out += *table.caption;
    out += '\n';
  }
  out += serialize_header(table, cfg.separator);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += '\n';
    out += serialize_row(table, r, cfg);
  }
  return out;
}

std::vector<Chunk> build_corpus(std::span<const Document> docs,
                                const ReprConfig& cfg) {
  if (auto violations = validate_corpus(docs); !violations.empty()) {
    throw InvalidDocument(violations.front().rule + ": " +
                          violations.front().detail + " (" +
                          std::to_string(violations.size()) + " violation(s))");
  }
  std::vector<Chunk> out;
  for (const auto& doc : docs) {
    std::size_t sentence_no = 0;
    for (const auto& block : doc.blocks) {
      if (const auto* t = std::get_if<TableBlock>(&block)) {
        emit_table(t->table, doc.doc_id, cfg, out);
      } else if (const auto* p = std::get_if<Paragraph>(&block)) {
        if (!cfg.include_text) continue;
        for (auto& sentence : split_sentences(p->text)) {
          if (!has_content(sentence)) continue;
          Chunk c;
          c.chunk_id = doc.doc_id + "/sentence/" + std::to_string(sentence_no++);
          c.text = std::move(sentence);
          c.provenance.doc_id = doc.doc_id;
          c.provenance.kind = ChunkKind::sentence;
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

std::string chunks_to_jsonl(std::span<const Chunk> chunks) {
  std::string out;
  for (const auto& c : chunks) {
    nlohmann::ordered_json j;
    j["chunk_id"] = c.chunk_id;
    j["text"] = c.text;
    j["doc_id"] = c.provenance.doc_id;
    j["table_id"] = c.provenance.table_id ? nlohmann::ordered_json(*c.provenance.table_id)
                                          : nlohmann::ordered_json(nullptr);
    j["row_index"] = c.provenance.row_index
                         ? nlohmann::ordered_json(*c.provenance.row_index)
                         : nlohmann::ordered_json(nullptr);
    j["kind"] = to_string(c.provenance.kind);
    out += j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<Chunk> load_chunks_jsonl(std::string_view text) {
  std::vector<Chunk> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      Chunk c;
      c.chunk_id = j.at("chunk_id").get<std::string>();
      c.text = j.at("text").get<std::string>();
      c.provenance.doc_id = j.at("doc_id").get<std::string>();
      if (!j.at("table_id").is_null()) c.provenance.table_id = j["table_id"].get<std::string>();
      if (!j.at("row_index").is_null()) c.provenance.row_index = j["row_index"].get<std::size_t>();
      const auto kind = parse_chunk_kind(j.at("kind").get<std::string>());
      if (!kind) throw SchemaViolation(where + ": unknown chunk kind");
      c.provenance.kind = *kind;
      if (c.text.empty()) throw SchemaViolation(where + ": empty chunk text");
      if (c.provenance.table_id.has_value() == (c.provenance.kind == ChunkKind::sentence) ||
          c.provenance.row_index.has_value() != (c.provenance.kind == ChunkKind::row)) {
        throw SchemaViolation(where + ": provenance fields do not match kind");
      }
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaViolation(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tablerag
