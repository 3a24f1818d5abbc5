#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "tablerag/detail/zip_reader.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/ingest.hpp"

namespace tablerag {

namespace {

using boost::property_tree::ptree;
using Grid = std::vector<std::vector<std::string>>;

std::string_view local_name(std::string_view key) {
  const auto colon = key.find(':');
  return colon == std::string_view::npos ? key : key.substr(colon + 1);
}

bool is_meta_key(std::string_view key) {
  return key == "<xmlattr>" || key == "<xmlcomment>" || key == "<xmltext>";
}

ptree parse_xml(const std::string& text, const std::string& member) {
  std::istringstream in(text);
  ptree tree;
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw MalformedXml(member + ": " + e.message() + " (line " +
                       std::to_string(e.line()) + ")");
  }
  return tree;
}

const ptree* child(const ptree& node, std::string_view name) {
  for (const auto& [key, sub] : node) {
    if (!is_meta_key(key) && local_name(key) == name) return &sub;
  }
  return nullptr;
}

std::optional<std::string> attr(const ptree& node, std::string_view name) {
  const auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  for (const auto& [key, value] : *attrs) {
    if (local_name(key) == name) return value.data();
  }
  return std::nullopt;
}

int int_attr(const ptree* node, std::string_view name, int fallback) {
  if (node == nullptr) return fallback;
  const auto v = attr(*node, name);
  if (!v) return fallback;
  try {
    return std::stoi(*v);
  } catch (const std::exception&) {
    return fallback;
  }
}

// Run-level content that never contributes visible body text.
bool skipped_in_text(std::string_view name) {
  static constexpr std::string_view kSkip[] = {
      "pPr",          "rPr",          "drawing",          "pict",
      "object",       "del",          "delText",          "instrText",
      "fldChar",      "footnoteReference", "endnoteReference",
      "commentReference", "AlternateContent", "txbxContent", "moveFrom"};
  return std::find(std::begin(kSkip), std::end(kSkip), name) != std::end(kSkip);
}

void collect_text(const ptree& node, std::string& out) {
  for (const auto& [key, sub] : node) {
    if (is_meta_key(key)) continue;
    const auto name = local_name(key);
    if (name == "t") {
      out += sub.data();
    } else if (name == "tab" || name == "br" || name == "cr") {
      out += ' ';
    } else if (name == "noBreakHyphen") {
      out += '-';
    } else if (!skipped_in_text(name)) {
      collect_text(sub, out);
    }
  }
}

std::string paragraph_text(const ptree& p) {
  std::string raw;
  collect_text(p, raw);
  return normalize_whitespace(raw);
}

void append_word(std::string& out, const std::string& word) {
  if (word.empty()) return;
  if (!out.empty()) out += ' ';
  out += word;
}

std::string cell_text(const ptree& container);

// Nested tables are flattened into the containing cell: cell texts in
// row-major order joined by single spaces.
std::string flatten_table(const ptree& tbl) {
  std::string out;
  for (const auto& [key, tr] : tbl) {
    if (is_meta_key(key) || local_name(key) != "tr") continue;
    for (const auto& [ckey, tc] : tr) {
      if (!is_meta_key(ckey) && local_name(ckey) == "tc") {
        append_word(out, cell_text(tc));
      }
    }
  }
  return out;
}

std::string cell_text(const ptree& container) {
  std::string out;
  for (const auto& [key, sub] : container) {
    if (is_meta_key(key)) continue;
    const auto name = local_name(key);
    if (name == "p") {
      append_word(out, paragraph_text(sub));
    } else if (name == "tbl") {
      append_word(out, flatten_table(sub));
    } else if (name == "sdt" || name == "customXml") {
      if (const ptree* content = child(sub, "sdtContent")) {
        append_word(out, cell_text(*content));
      } else {
        append_word(out, cell_text(sub));
      }
    }
  }
  return normalize_whitespace(out);
}

// Expands horizontal spans (gridSpan) and vertical merges (vMerge) by
// repeating the merged value into every covered grid position.
Grid table_grid(const ptree& tbl) {
  Grid grid;
  for (const auto& [key, tr] : tbl) {
    if (is_meta_key(key) || local_name(key) != "tr") continue;
    std::vector<std::string> row;
    const ptree* tr_pr = child(tr, "trPr");
    const int before = tr_pr ? int_attr(child(*tr_pr, "gridBefore"), "val", 0) : 0;
    const int after = tr_pr ? int_attr(child(*tr_pr, "gridAfter"), "val", 0) : 0;
    row.insert(row.end(), static_cast<std::size_t>(std::max(before, 0)), "");

    for (const auto& [ckey, tc] : tr) {
      if (is_meta_key(ckey) || local_name(ckey) != "tc") continue;
      const ptree* tc_pr = child(tc, "tcPr");
      const int span =
          std::max(1, tc_pr ? int_attr(child(*tc_pr, "gridSpan"), "val", 1) : 1);
      std::string text = cell_text(tc);
      if (const ptree* vmerge = tc_pr ? child(*tc_pr, "vMerge") : nullptr) {
        const auto val = attr(*vmerge, "val");
        const bool continues = !val || *val == "continue";
        const std::size_t col = row.size();
        if (continues && !grid.empty() && col < grid.back().size()) {
          text = grid.back()[col];
        }
      }
      row.insert(row.end(), static_cast<std::size_t>(span), text);
    }
    row.insert(row.end(), static_cast<std::size_t>(std::max(after, 0)), "");
    grid.push_back(std::move(row));
  }
  return grid;
}

std::unordered_map<std::string, std::string> style_names(
    const detail::ZipReader& zip, const std::string& member) {
  std::unordered_map<std::string, std::string> names;
  const auto xml = zip.read(member);
  if (!xml) return names;
  const ptree tree = parse_xml(*xml, member);
  const ptree* styles = child(tree, "styles");
  if (styles == nullptr) return names;
  for (const auto& [key, style] : *styles) {
    if (is_meta_key(key) || local_name(key) != "style") continue;
    const auto id = attr(style, "styleId");
    const ptree* name = child(style, "name");
    if (id && name != nullptr) {
      if (auto val = attr(*name, "val")) names.emplace(*id, *val);
    }
  }
  return names;
}

class BodyWalker {
 public:
  explicit BodyWalker(const std::unordered_map<std::string, std::string>& styles)
      : styles_(styles) {}

  void walk(const ptree& container) {
    for (const auto& [key, sub] : container) {
      if (is_meta_key(key)) continue;
      const auto name = local_name(key);
      if (name == "p") {
        add_paragraph(sub);
      } else if (name == "tbl") {
        RawElement e;
        e.kind = RawElement::Kind::table;
        e.cells = table_grid(sub);
        e.source_index = next_index_++;
        elements_.push_back(std::move(e));
      } else if (name == "sdt") {
        if (const ptree* content = child(sub, "sdtContent")) walk(*content);
      } else if (name == "customXml") {
        walk(sub);
      }
    }
  }

  std::vector<RawElement> take() { return std::move(elements_); }

 private:
  void add_paragraph(const ptree& p) {
    RawElement e;
    e.kind = RawElement::Kind::paragraph;
    e.text = paragraph_text(p);
    if (const ptree* ppr = child(p, "pPr")) {
      if (const ptree* pstyle = child(*ppr, "pStyle")) {
        if (auto id = attr(*pstyle, "val")) {
          const auto it = styles_.find(*id);
          e.style_name = it == styles_.end() ? *id : it->second;
        }
      }
    }
    e.source_index = next_index_++;
    elements_.push_back(std::move(e));
  }

  const std::unordered_map<std::string, std::string>& styles_;
  std::vector<RawElement> elements_;
  std::size_t next_index_ = 0;
};

std::string main_part_name(const detail::ZipReader& zip) {
  if (const auto rels = zip.read("_rels/.rels")) {
    const ptree tree = parse_xml(*rels, "_rels/.rels");
    if (const ptree* root = child(tree, "Relationships")) {
      for (const auto& [key, rel] : *root) {
        if (is_meta_key(key) || local_name(key) != "Relationship") continue;
        const auto type = attr(rel, "Type");
        const auto target = attr(rel, "Target");
        if (type && target && type->ends_with("/officeDocument")) {
          std::string name = *target;
          if (name.starts_with('/')) name.erase(0, 1);
          return name;
        }
      }
    }
  }
  return "word/document.xml";
}

std::string core_title(const detail::ZipReader& zip) {
  const auto xml = zip.read("docProps/core.xml");
  if (!xml) return {};
  const ptree tree = parse_xml(*xml, "docProps/core.xml");
  const ptree* props = child(tree, "coreProperties");
  if (props == nullptr) return {};
  const ptree* title = child(*props, "title");
  return title ? normalize_whitespace(title->data()) : std::string{};
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<int> heading_level(std::string_view style_name) {
  const std::string lower = lowercase(style_name);
  constexpr std::string_view kPrefix = "heading";
  if (!lower.starts_with(kPrefix)) return std::nullopt;
  std::string_view rest = std::string_view(lower).substr(kPrefix.size());
  if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (rest.empty() || rest.size() > 2) return std::nullopt;
  if (!std::all_of(rest.begin(), rest.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  const int level = std::stoi(std::string(rest));
  return level >= 1 ? std::optional<int>(level) : std::nullopt;
}

std::optional<std::string> detect_caption(std::span<const RawElement> elements,
                                          std::size_t table_index) {
  if (table_index >= elements.size()) {
    throw IndexOutOfRange("element index " + std::to_string(table_index) +
                          " out of range (size " +
                          std::to_string(elements.size()) + ")");
  }
  if (elements[table_index].kind != RawElement::Kind::table) {
    throw IndexOutOfRange("element " + std::to_string(table_index) +
                          " is not a table");
  }
  if (table_index == 0) return std::nullopt;
  const RawElement& prev = elements[table_index - 1];
  if (prev.kind != RawElement::Kind::paragraph) return std::nullopt;
  // A heading that happens to start with "Table" titles a section, not the table.
  if (prev.style_name && heading_level(*prev.style_name)) return std::nullopt;
  const std::string text = normalize_whitespace(prev.text);
  if (!lowercase(std::string_view(text).substr(0, 5)).starts_with("table")) {
    return std::nullopt;
  }
  return text;
}

Document assemble_document(std::string doc_id, std::string title,
                           std::vector<RawElement> elements) {
  std::erase_if(elements, [](RawElement& e) {
    if (e.kind != RawElement::Kind::paragraph) return false;
    e.text = normalize_whitespace(e.text);
    return e.text.empty();
  });

  std::vector<bool> consumed(elements.size(), false);
  std::vector<std::optional<std::string>> captions(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].kind != RawElement::Kind::table) continue;
    captions[i] = detect_caption(elements, i);
    if (captions[i]) consumed[i - 1] = true;
  }

  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.title = std::move(title);
  std::size_t table_no = 0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    RawElement& e = elements[i];
    if (e.kind == RawElement::Kind::paragraph) {
      if (consumed[i]) continue;
      if (e.style_name) {
        if (auto level = heading_level(*e.style_name)) {
          doc.blocks.emplace_back(Heading{*level, std::move(e.text)});
          continue;
        }
      }
      doc.blocks.emplace_back(Paragraph{std::move(e.text)});
      continue;
    }
    if (e.cells.empty()) continue;
    std::size_t width = 1;
    for (const auto& row : e.cells) width = std::max(width, row.size());
    TableData table;
    table.table_id = doc.doc_id + "/t" + std::to_string(++table_no);
    table.caption = std::move(captions[i]);
    for (auto& row : e.cells) {
      for (auto& cell : row) cell = normalize_whitespace(cell);
      row.resize(width);
    }
    table.header = std::move(e.cells.front());
    table.rows.assign(std::make_move_iterator(e.cells.begin() + 1),
                      std::make_move_iterator(e.cells.end()));
    doc.blocks.emplace_back(TableBlock{std::move(table)});
  }
  assign_section_paths(doc);
  return doc;
}

DocxContent read_docx(std::span<const std::uint8_t> archive) {
  const detail::ZipReader zip(archive);
  const std::string main_part = main_part_name(zip);
  const auto xml = zip.read(main_part);
  if (!xml) throw MissingDocumentPart("archive has no member " + main_part);

  const auto slash = main_part.rfind('/');
  const std::string dir =
      slash == std::string::npos ? std::string{} : main_part.substr(0, slash + 1);
  const auto styles = style_names(zip, dir + "styles.xml");

  const ptree tree = parse_xml(*xml, main_part);
  const ptree* document = child(tree, "document");
  const ptree* body = document ? child(*document, "body") : nullptr;
  if (body == nullptr) {
    throw MalformedXml(main_part + ": no document/body element");
  }
  BodyWalker walker(styles);
  walker.walk(*body);
  return DocxContent{core_title(zip), walker.take()};
}

Document parse_docx(std::span<const std::uint8_t> archive, std::string doc_id) {
  DocxContent content = read_docx(archive);
  return assemble_document(std::move(doc_id), std::move(content.title),
                           std::move(content.elements));
}

}  // namespace tablerag
