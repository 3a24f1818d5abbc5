#include <json.hpp>

#include <set>

#include "tablerag/errors.hpp"
#include "tablerag/ingest.hpp"

namespace tablerag {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw SchemaViolation(path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) schema_error(path, "expected object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      schema_error(path + "." + item.key(), "unknown key");
    }
  }
  for (auto key : allowed) {
    if (!obj.contains(std::string(key))) {
      schema_error(path + "." + std::string(key), "missing key");
    }
  }
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_string()) schema_error(path + "." + key, "expected string");
  return v.get<std::string>();
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      schema_error(path + "[" + std::to_string(i) + "]", "expected string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

Block parse_block(const json& b, const std::string& path) {
  if (!b.is_object()) schema_error(path, "expected object");
  if (!b.contains("kind") || !b["kind"].is_string()) {
    schema_error(path + ".kind", "missing or non-string kind");
  }
  const auto kind = b["kind"].get<std::string>();
  if (kind == "heading") {
    expect_keys(b, path, {"kind", "level", "text"});
    if (!b["level"].is_number_integer()) {
      schema_error(path + ".level", "expected integer");
    }
    return Heading{b["level"].get<int>(), get_string(b, "text", path)};
  }
  if (kind == "paragraph") {
    expect_keys(b, path, {"kind", "text"});
    return Paragraph{get_string(b, "text", path)};
  }
  if (kind == "table") {
    expect_keys(b, path, {"kind", "table_id", "caption", "header", "rows"});
    TableData t;
    t.table_id = get_string(b, "table_id", path);
    const json& caption = b["caption"];
    if (caption.is_string()) {
      t.caption = caption.get<std::string>();
    } else if (!caption.is_null()) {
      schema_error(path + ".caption", "expected string or null");
    }
    t.header = get_string_list(b["header"], path + ".header");
    const json& rows = b["rows"];
    if (!rows.is_array()) schema_error(path + ".rows", "expected array");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      t.rows.push_back(
          get_string_list(rows[r], path + ".rows[" + std::to_string(r) + "]"));
    }
    return TableBlock{std::move(t)};
  }
  schema_error(path + ".kind", "unknown block kind \"" + kind + "\"");
}

}  // namespace

Document load_normalized(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("$: invalid JSON: ") + e.what());
  }
  expect_keys(root, "$", {"doc_id", "title", "blocks"});
  Document doc;
  doc.doc_id = get_string(root, "doc_id", "$");
  doc.title = get_string(root, "title", "$");
  const json& blocks = root["blocks"];
  if (!blocks.is_array()) schema_error("$.blocks", "expected array");
  doc.blocks.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    doc.blocks.push_back(parse_block(blocks[i], "blocks[" + std::to_string(i) + "]"));
  }
  assign_section_paths(doc);
  return doc;
}

std::string save_normalized(const Document& doc) {
  ordered_json root;
  root["doc_id"] = doc.doc_id;
  root["title"] = doc.title;
  ordered_json blocks = ordered_json::array();
  for (const auto& block : doc.blocks) {
    ordered_json b;
    if (const auto* h = std::get_if<Heading>(&block)) {
      b["kind"] = "heading";
      b["level"] = h->level;
      b["text"] = h->text;
    } else if (const auto* p = std::get_if<Paragraph>(&block)) {
      b["kind"] = "paragraph";
      b["text"] = p->text;
    } else {
      const TableData& t = std::get<TableBlock>(block).table;
      b["kind"] = "table";
      b["table_id"] = t.table_id;
      b["caption"] = t.caption ? ordered_json(*t.caption) : ordered_json(nullptr);
      b["header"] = t.header;
      b["rows"] = t.rows;
    }
    blocks.push_back(std::move(b));
  }
  root["blocks"] = std::move(blocks);
  return root.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace tablerag
