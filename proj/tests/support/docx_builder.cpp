#include "docx_builder.hpp"

#include <zlib.h>

#include <stdexcept>

namespace tablerag::testkit {

namespace {

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string raw_deflate(const std::string& in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit2 failed");
  }
  std::string out(deflateBound(&zs, in.size()), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  if (deflate(&zs, Z_FINISH) != Z_STREAM_END) throw std::runtime_error("deflate failed");
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

constexpr const char* kContentTypes =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    R"(<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">)"
    R"(<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>)"
    R"(<Default Extension="xml" ContentType="application/xml"/>)"
    R"(<Override PartName="/word/document.xml" ContentType="application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml"/>)"
    R"(</Types>)";

constexpr const char* kRels =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    R"(<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">)"
    R"(<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="word/document.xml"/>)"
    R"(</Relationships>)";

constexpr const char* kStyles =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    R"(<w:styles xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main">)"
    R"(<w:style w:type="paragraph" w:styleId="Heading1"><w:name w:val="heading 1"/></w:style>)"
    R"(<w:style w:type="paragraph" w:styleId="Heading2"><w:name w:val="heading 2"/></w:style>)"
    R"(<w:style w:type="paragraph" w:styleId="Heading3"><w:name w:val="heading 3"/></w:style>)"
    R"(<w:style w:type="paragraph" w:styleId="TH"><w:name w:val="TH"/></w:style>)"
    R"(</w:styles>)";

// Deliberately present: ingestion must never read it.
constexpr const char* kHeaderPart =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    R"(<w:hdr xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main">)"
    R"(<w:p><w:r><w:t>PAGE HEADER TEXT</w:t></w:r></w:p></w:hdr>)";

}  // namespace

std::vector<std::uint8_t> write_zip(const std::vector<ZipMember>& members, bool deflate) {
  std::string out;
  std::string central;
  for (const auto& m : members) {
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(m.data.data()), static_cast<uInt>(m.data.size())));
    const std::string payload = deflate ? raw_deflate(m.data) : m.data;
    const std::uint16_t method = deflate ? 8 : 0;
    const auto offset = static_cast<std::uint32_t>(out.size());

    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0);
    put16(out, method);
    put16(out, 0);
    put16(out, 0);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put32(out, static_cast<std::uint32_t>(m.data.size()));
    put16(out, static_cast<std::uint16_t>(m.name.size()));
    put16(out, 0);
    out += m.name;
    out += payload;

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, method);
    put16(central, 0);
    put16(central, 0);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(payload.size()));
    put32(central, static_cast<std::uint32_t>(m.data.size()));
    put16(central, static_cast<std::uint16_t>(m.name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central += m.name;
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(members.size()));
  put16(out, static_cast<std::uint16_t>(members.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return {out.begin(), out.end()};
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string cell_xml(const std::string& text, const std::string& tc_pr) {
  std::string out = "<w:tc>";
  if (!tc_pr.empty()) out += "<w:tcPr>" + tc_pr + "</w:tcPr>";
  out += "<w:p><w:r><w:t xml:space=\"preserve\">" + xml_escape(text) + "</w:t></w:r></w:p></w:tc>";
  return out;
}

DocxBuilder& DocxBuilder::paragraph(const std::string& text, const std::string& style_id) {
  body_ += "<w:p>";
  if (!style_id.empty()) body_ += "<w:pPr><w:pStyle w:val=\"" + style_id + "\"/></w:pPr>";
  if (!text.empty()) {
    body_ += "<w:r><w:t xml:space=\"preserve\">" + xml_escape(text) + "</w:t></w:r>";
  }
  body_ += "</w:p>";
  return *this;
}

DocxBuilder& DocxBuilder::heading(int level, const std::string& text) {
  return paragraph(text, "Heading" + std::to_string(level));
}

DocxBuilder& DocxBuilder::table(const std::vector<std::vector<std::string>>& rows) {
  body_ += "<w:tbl><w:tblPr/>";
  for (const auto& row : rows) {
    body_ += "<w:tr>";
    for (const auto& cell : row) body_ += cell_xml(cell);
    body_ += "</w:tr>";
  }
  body_ += "</w:tbl>";
  return *this;
}

DocxBuilder& DocxBuilder::raw(const std::string& xml) {
  body_ += xml;
  return *this;
}

DocxBuilder& DocxBuilder::title(const std::string& t) {
  title_ = t;
  return *this;
}

std::string DocxBuilder::document_xml() const {
  return R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
         R"(<w:document xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main"><w:body>)" +
         body_ + "<w:sectPr/></w:body></w:document>";
}

std::vector<std::uint8_t> DocxBuilder::build(bool deflate) const {
  std::vector<ZipMember> members = {
      {"[Content_Types].xml", kContentTypes},
      {"_rels/.rels", kRels},
      {"word/document.xml", document_xml()},
      {"word/styles.xml", kStyles},
      {"word/header1.xml", kHeaderPart},
  };
  if (!title_.empty()) {
    members.push_back(
        {"docProps/core.xml",
         R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
         R"(<cp:coreProperties xmlns:cp="http://schemas.openxmlformats.org/package/2006/metadata/core-properties" xmlns:dc="http://purl.org/dc/elements/1.1/">)"
         "<dc:title>" + xml_escape(title_) + "</dc:title></cp:coreProperties>"});
  }
  return write_zip(members, deflate);
}

}  // namespace tablerag::testkit
