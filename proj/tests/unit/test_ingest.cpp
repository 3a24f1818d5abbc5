#include <gtest/gtest.h>

#include <random>

#include "docx_builder.hpp"
#include "synthetic.hpp"
#include "tablerag/detail/zip_reader.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/ingest.hpp"

using namespace tablerag;
using namespace tablerag::testkit;

namespace {

std::vector<TableData> tables_of(const Document& doc) {
  std::vector<TableData> out;
  for_each_table(doc, [&](const TableData& t) { out.push_back(t); });
  return out;
}

RawElement para(std::string text, std::optional<std::string> style = std::nullopt) {
  RawElement e;
  e.kind = RawElement::Kind::paragraph;
  e.text = std::move(text);
  e.style_name = std::move(style);
  return e;
}

RawElement tbl(std::vector<std::vector<std::string>> cells) {
  RawElement e;
  e.kind = RawElement::Kind::table;
  e.cells = std::move(cells);
  return e;
}

}  // namespace

TEST(ZipReader, StoredAndDeflatedMembers) {
  for (bool deflate : {false, true}) {
    const auto bytes = write_zip({{"a.txt", "hello"}, {"dir/b.xml", std::string(5000, 'x')}}, deflate);
    const detail::ZipReader zip(bytes);
    EXPECT_TRUE(zip.contains("a.txt"));
    EXPECT_FALSE(zip.contains("missing"));
    EXPECT_EQ(zip.read("a.txt"), std::optional<std::string>("hello"));
    EXPECT_EQ(zip.read("dir/b.xml")->size(), 5000u);
    EXPECT_EQ(zip.read("nope"), std::nullopt);
    EXPECT_EQ(zip.names().size(), 2u);
  }
}

TEST(ZipReader, RejectsGarbageAndCorruption) {
  const std::vector<std::uint8_t> garbage = {'n', 'o', 't', ' ', 'z', 'i', 'p'};
  EXPECT_THROW(detail::ZipReader{garbage}, NotAZip);
  EXPECT_THROW(detail::ZipReader{std::span<const std::uint8_t>{}}, NotAZip);

  auto bytes = write_zip({{"a.txt", "hello world"}}, false);
  // Flip a payload byte: the CRC check must catch it.
  const auto pos = std::string(bytes.begin(), bytes.end()).find("hello world");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos] ^= 0x20;
  const detail::ZipReader zip(bytes);
  EXPECT_THROW(zip.read("a.txt"), NotAZip);
}

TEST(HeadingLevel, RecognisedForms) {
  EXPECT_EQ(heading_level("Heading1"), 1);
  EXPECT_EQ(heading_level("heading 2"), 2);
  EXPECT_EQ(heading_level("Heading 12"), 12);
  EXPECT_EQ(heading_level("Heading"), std::nullopt);
  EXPECT_EQ(heading_level("Heading 0"), std::nullopt);
  EXPECT_EQ(heading_level("TH"), std::nullopt);
  EXPECT_EQ(heading_level("Headingx"), std::nullopt);
}

TEST(DetectCaption, Rules) {
  const std::vector<RawElement> els = {
      tbl({{"A"}}),                          // 0: first element
      para("Table 1: Foo"), tbl({{"A"}}),    // 2: captioned
      para("  table x"), tbl({{"A"}}),       // 4: case-insensitive, trimmed
      para("See Table 2"), tbl({{"A"}}),     // 6: mid-sentence mention
      tbl({{"A"}}),                          // 7: after a table
      para("Table of things", "heading 1"), tbl({{"A"}}),  // 9: heading
      para("Tab"), tbl({{"A"}}),             // 11: too short
  };
  EXPECT_EQ(detect_caption(els, 0), std::nullopt);
  EXPECT_EQ(detect_caption(els, 2), std::optional<std::string>("Table 1: Foo"));
  EXPECT_EQ(detect_caption(els, 4), std::optional<std::string>("table x"));
  EXPECT_EQ(detect_caption(els, 6), std::nullopt);
  EXPECT_EQ(detect_caption(els, 7), std::nullopt);
  EXPECT_EQ(detect_caption(els, 9), std::nullopt);
  EXPECT_EQ(detect_caption(els, 11), std::nullopt);
  EXPECT_THROW(detect_caption(els, 1), IndexOutOfRange);
  EXPECT_THROW(detect_caption(els, els.size()), IndexOutOfRange);
}

TEST(AssembleDocument, BuildsBlocksAndIds) {
  std::vector<RawElement> els = {
      para("Intro", "heading 1"), para("   "), para("Body text here."),
      para("Table 1: Caption"), tbl({{"H1", "H2"}, {"a", "b"}, {"c"}}),
      tbl({{"X"}}),
  };
  const auto doc = assemble_document("d", "T", els);
  ASSERT_EQ(doc.blocks.size(), 4u);
  EXPECT_EQ(std::get<Heading>(doc.blocks[0]), (Heading{1, "Intro"}));
  EXPECT_EQ(std::get<Paragraph>(doc.blocks[1]).text, "Body text here.");
  const auto ts = tables_of(doc);
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].table_id, "d/t1");
  EXPECT_EQ(ts[0].caption, std::optional<std::string>("Table 1: Caption"));
  EXPECT_EQ(ts[0].rows[1], (std::vector<std::string>{"c", ""}));  // padded
  EXPECT_EQ(ts[0].section_path, (std::vector<std::string>{"Intro"}));
  EXPECT_EQ(ts[1].table_id, "d/t2");
  EXPECT_TRUE(ts[1].rows.empty());
  EXPECT_TRUE(validate_document(doc).empty());
}

TEST(ParseDocx, ParagraphsHeadingsTablesAndTitle) {
  DocxBuilder b;
  b.title("My Spec")
      .heading(1, "Scope")
      .paragraph("First   sentence.\tSecond one.")
      .heading(2, "Details")
      .paragraph("Table 4.1-1: Timers")
      .table({{"Timer", "Value"}, {"T300", "100 ms"}, {"T301", "200 ms"}});
  for (bool deflate : {false, true}) {
    const auto doc = parse_docx(b.build(deflate), "spec");
    EXPECT_EQ(doc.doc_id, "spec");
    EXPECT_EQ(doc.title, "My Spec");
    ASSERT_EQ(doc.blocks.size(), 4u);
    EXPECT_EQ(std::get<Paragraph>(doc.blocks[1]).text, "First sentence. Second one.");
    const auto ts = tables_of(doc);
    ASSERT_EQ(ts.size(), 1u);
    EXPECT_EQ(ts[0].header, (std::vector<std::string>{"Timer", "Value"}));
    EXPECT_EQ(ts[0].rows.size(), 2u);
    EXPECT_EQ(ts[0].caption, std::optional<std::string>("Table 4.1-1: Timers"));
    EXPECT_EQ(ts[0].section_path, (std::vector<std::string>{"Scope", "Details"}));
  }
}

TEST(ParseDocx, PageHeaderPartIsIgnored) {
  DocxBuilder b;
  b.paragraph("Body only.");
  const auto doc = parse_docx(b.build(), "d");
  const auto json = save_normalized(doc);
  EXPECT_EQ(json.find("PAGE HEADER TEXT"), std::string::npos);
}

TEST(ParseDocx, HorizontalAndVerticalMerges) {
  DocxBuilder b;
  b.raw("<w:tbl>"
        "<w:tr>" + cell_xml("A") + cell_xml("B") + cell_xml("C") + "</w:tr>"
        "<w:tr>" + cell_xml("wide", "<w:gridSpan w:val=\"2\"/>") + cell_xml("c1") + "</w:tr>"
        "<w:tr>" + cell_xml("tall", "<w:vMerge w:val=\"restart\"/>") + cell_xml("b2") + cell_xml("c2") + "</w:tr>"
        "<w:tr>" + cell_xml("", "<w:vMerge/>") + cell_xml("b3") + cell_xml("c3") + "</w:tr>"
        "<w:tr><w:trPr><w:gridBefore w:val=\"1\"/></w:trPr>" + cell_xml("b4") + cell_xml("c4") + "</w:tr>"
        "</w:tbl>");
  const auto ts = tables_of(parse_docx(b.build(), "m"));
  ASSERT_EQ(ts.size(), 1u);
  const auto& rows = ts[0].rows;
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"wide", "wide", "c1"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"tall", "b2", "c2"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"tall", "b3", "c3"}));
  EXPECT_EQ(rows[3], (std::vector<std::string>{"", "b4", "c4"}));
}

TEST(ParseDocx, NestedTableFlattenedIntoCell) {
  DocxBuilder b;
  b.raw("<w:tbl><w:tr>" + cell_xml("Outer") + cell_xml("Other") + "</w:tr><w:tr><w:tc>"
        "<w:p><w:r><w:t>before</w:t></w:r></w:p>"
        "<w:tbl><w:tr>" + cell_xml("n1") + cell_xml("n2") + "</w:tr><w:tr>" + cell_xml("n3") +
        cell_xml("n4") + "</w:tr></w:tbl>"
        "</w:tc>" + cell_xml("x") + "</w:tr></w:tbl>");
  const auto ts = tables_of(parse_docx(b.build(), "n"));
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].rows[0][0], "before n1 n2 n3 n4");
}

TEST(ParseDocx, ContentControlsAreWalked) {
  DocxBuilder b;
  b.raw("<w:sdt><w:sdtContent><w:p><w:r><w:t>Inside control.</w:t></w:r></w:p></w:sdtContent></w:sdt>");
  const auto doc = parse_docx(b.build(), "s");
  ASSERT_EQ(doc.blocks.size(), 1u);
  EXPECT_EQ(std::get<Paragraph>(doc.blocks[0]).text, "Inside control.");
}

TEST(ParseDocx, Errors) {
  const std::vector<std::uint8_t> not_zip = {1, 2, 3, 4, 5};
  EXPECT_THROW(parse_docx(not_zip, "x"), NotAZip);

  const auto no_document = write_zip({{"[Content_Types].xml", "<Types/>"}}, true);
  EXPECT_THROW(parse_docx(no_document, "x"), MissingDocumentPart);

  const auto broken = write_zip({{"word/document.xml", "<w:document><w:body><w:p>"}}, true);
  EXPECT_THROW(parse_docx(broken, "x"), MalformedXml);
}

TEST(NormalizedJson, RoundTripExample) {
  Document doc{"d1", "Title", {Heading{1, "H"}, Paragraph{"P."}}};
  TableData t;
  t.table_id = "d1/t1";
  t.caption = "Table 1: C";
  t.header = {"A", "B"};
  t.rows = {{"1", "2"}};
  doc.blocks.emplace_back(TableBlock{t});
  assign_section_paths(doc);
  const auto text = save_normalized(doc);
  EXPECT_EQ(load_normalized(text), doc);
  EXPECT_EQ(save_normalized(load_normalized(text)), text);
  EXPECT_NE(text.find("\"caption\": \"Table 1: C\""), std::string::npos);
}

TEST(NormalizedJson, RoundTripProperty) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto doc = random_document(rng, "r" + std::to_string(i));
    EXPECT_EQ(load_normalized(save_normalized(doc)), doc);
  }
}

TEST(NormalizedJson, SchemaViolations) {
  const auto expect_violation = [](const std::string& text, const std::string& path) {
    try {
      load_normalized(text);
      ADD_FAILURE() << "no error for " << text;
    } catch (const SchemaViolation& e) {
      EXPECT_NE(std::string(e.what()).find(path), std::string::npos) << e.what();
    }
  };
  expect_violation("not json", "$");
  expect_violation(R"({"doc_id":"d","blocks":[]})", "$.title");
  expect_violation(R"({"doc_id":"d","title":"","blocks":[],"extra":1})", "$.extra");
  expect_violation(R"({"doc_id":"d","title":"","blocks":[{"kind":"figure"}]})", "blocks[0].kind");
  expect_violation(R"({"doc_id":"d","title":"","blocks":[{"kind":"heading","level":"1","text":"x"}]})",
                   "blocks[0].level");
  expect_violation(
      R"({"doc_id":"d","title":"","blocks":[{"kind":"table","table_id":"t","caption":3,"header":[],"rows":[]}]})",
      "blocks[0].caption");
  expect_violation(
      R"({"doc_id":"d","title":"","blocks":[{"kind":"table","table_id":"t","caption":null,"header":["a"],"rows":[[1]]}]})",
      "blocks[0].rows[0][0]");
}
