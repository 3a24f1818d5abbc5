#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablerag/docmodel.hpp"

namespace tablerag {

enum class ChunkLevel { table, row };
enum class Separator { pipe, space };

// One cell of the representation grid.
struct ReprConfig {
  ChunkLevel chunk_level = ChunkLevel::row;
  Separator separator = Separator::pipe;
  bool repeat_header = false;
  bool include_text = false;
  friend bool operator==(const ReprConfig&, const ReprConfig&) = default;
};

inline constexpr std::size_t kGridSize = 16;

// All 16 configurations. Order: chunk_level (table, row) is the most
// significant digit, then separator (pipe, space), then repeat_header
// (false, true), then include_text (false, true).
std::array<ReprConfig, kGridSize> full_grid();

std::string_view to_string(ChunkLevel level);
std::string_view to_string(Separator sep);
// "row/pipe/repeat/text", with "norepeat"/"notext" for false flags.
std::string to_string(const ReprConfig& cfg);

std::optional<ChunkLevel> parse_chunk_level(std::string_view s);
std::optional<Separator> parse_separator(std::string_view s);

// " | " for pipe, " " for space.
std::string_view separator_text(Separator sep);

enum class ChunkKind { row, table, header, caption, sentence };

std::string_view to_string(ChunkKind kind);
std::optional<ChunkKind> parse_chunk_kind(std::string_view s);

struct Provenance {
  std::string doc_id;
  std::optional<std::string> table_id;   // set iff kind != sentence
  std::optional<std::size_t> row_index;  // set iff kind == row
  ChunkKind kind = ChunkKind::sentence;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Chunk {
  std::string chunk_id;
  std::string text;
  Provenance provenance;
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Rule-based sentence segmentation for technical prose. Splits after
// [.?!] (plus trailing closing quotes/brackets) when followed by whitespace
// and an uppercase letter, a digit, or a mixed-case identifier such as
// "eNB". A period does not split after a known
// abbreviation ("e.g.", "Fig.", "No.", ...), except that "etc." ends a
// sentence before a capitalized word. Sentences are trimmed;
// whitespace-only input yields no sentences.
std::vector<std::string> split_sentences(std::string_view text);

// "<header>: <value>" when repeat_header and the header is non-empty, else
// "<value>".
std::string render_cell(std::string_view header, std::string_view value,
                        bool repeat_header);

// Throws IndexOutOfRange when row_index is not a body row.
std::string serialize_row(const TableData& table, std::size_t row_index,
                          const ReprConfig& cfg);

// Caption line (if any), header line, then one line per body row.
std::string serialize_table(const TableData& table, const ReprConfig& cfg);

// Header cells joined by the separator; never carries repeated headers.
std::string serialize_header(const TableData& table, Separator sep);

// True when the text contains at least one token character (ASCII
// alphanumeric or a non-ASCII byte). Units without one are not emitted.
bool has_content(std::string_view text);

// Chunk corpus for one configuration, in document order. Per table:
//   row level   -> caption?, header, one chunk per body row
//   table level -> caption?, whole table
// plus one chunk per paragraph sentence when cfg.include_text.
// Throws InvalidDocument if the corpus fails validation.
std::vector<Chunk> build_corpus(std::span<const Document> docs,
                                const ReprConfig& cfg);

// JSON Lines chunk corpus file.
std::string chunks_to_jsonl(std::span<const Chunk> chunks);
std::vector<Chunk> load_chunks_jsonl(std::string_view text);

}  // namespace tablerag
