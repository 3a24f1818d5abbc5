#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablerag/docmodel.hpp"

namespace tablerag {

// One body-level element of a source document, in source order.
struct RawElement {
  enum class Kind { paragraph, table };

  Kind kind = Kind::paragraph;
  std::string text;                             // paragraph text
  std::vector<std::vector<std::string>> cells;  // table grid, merges expanded
  std::optional<std::string> style_name;
  std::size_t source_index = 0;
};

// Caption for the table at `table_index`: the preceding paragraph's text when
// its trimmed text starts with "table" (any case) and it is not heading-styled. Throws IndexOutOfRange if
// `table_index` is out of bounds or does not name a table.
std::optional<std::string> detect_caption(std::span<const RawElement> elements,
                                          std::size_t table_index);

// Heading level for a paragraph style name of the form "Heading<N>" or
// "heading <N>"; nullopt for anything else.
std::optional<int> heading_level(std::string_view style_name);

// Turns raw elements into a Document: empty paragraphs dropped, heading
// styles mapped to Heading blocks, captions detected and consumed, the first
// grid row taken as header. Table ids are "<doc_id>/t<N>", N counting from 1.
Document assemble_document(std::string doc_id, std::string title,
                           std::vector<RawElement> elements);

// Body-level paragraphs and tables of an OOXML archive, in order. Header and
// footer parts are never opened.
struct DocxContent {
  std::string title;
  std::vector<RawElement> elements;
};
DocxContent read_docx(std::span<const std::uint8_t> archive);

Document parse_docx(std::span<const std::uint8_t> archive, std::string doc_id);

// Normalized JSON document format.
Document load_normalized(std::string_view json_text);
std::string save_normalized(const Document& doc);

}  // namespace tablerag
