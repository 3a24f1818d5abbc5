#include "tablerag/report.hpp"

#include <json.hpp>

#include <cstdio>

#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

using nlohmann::ordered_json;

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string emit_csv(std::span<const RunReport> reports) {
  std::string out =
      "provider,chunk_level,separator,repeat_header,include_text,k,overall,"
      "acc_E,acc_M,acc_A,acc_I,failed\n";
  for (const auto& r : reports) {
    out += csv_field(r.provider.name);
    out += ',';
    out += to_string(r.config.chunk_level);
    out += ',';
    out += to_string(r.config.separator);
    out += r.config.repeat_header ? ",true" : ",false";
    out += r.config.include_text ? ",true" : ",false";
    out += ',' + std::to_string(r.k) + ',';
    if (!r.failed) out += one_decimal(r.overall_accuracy);
    for (auto t : {QType::E, QType::M, QType::A, QType::I}) {
      out += ',';
      const auto it = r.per_type_accuracy.find(t);
      if (!r.failed && it != r.per_type_accuracy.end() && it->second) {
        out += one_decimal(*it->second);
      }
    }
    out += r.failed ? ",true\n" : ",false\n";
  }
  return out;
}

std::string emit_grouped(std::span<const RunReport> reports) {
  constexpr std::pair<ChunkLevel, Separator> kPanels[] = {
      {ChunkLevel::table, Separator::pipe},
      {ChunkLevel::row, Separator::pipe},
      {ChunkLevel::table, Separator::space},
      {ChunkLevel::row, Separator::space}};
  constexpr std::pair<bool, bool> kGroups[] = {
      {false, false}, {false, true}, {true, false}, {true, true}};

  ordered_json panels = ordered_json::array();
  for (const auto& [level, sep] : kPanels) {
    ordered_json groups = ordered_json::array();
    for (const auto& [repeat, text] : kGroups) {
      ordered_json bars = ordered_json::array();
      for (const auto& r : reports) {
        const auto& c = r.config;
        if (c.chunk_level != level || c.separator != sep || c.repeat_header != repeat ||
            c.include_text != text) {
          continue;
        }
        ordered_json bar;
        bar["provider"] = r.provider.name;
        bar["accuracy"] = r.failed ? ordered_json(nullptr) : ordered_json(r.overall_accuracy);
        bars.push_back(std::move(bar));
      }
      if (bars.empty()) continue;
      ordered_json g;
      g["repeat_header"] = repeat;
      g["include_text"] = text;
      g["bars"] = std::move(bars);
      groups.push_back(std::move(g));
    }
    if (groups.empty()) continue;
    ordered_json p;
    p["chunk_level"] = to_string(level);
    p["separator"] = to_string(sep);
    p["groups"] = std::move(groups);
    panels.push_back(std::move(p));
  }
  ordered_json root;
  root["panels"] = std::move(panels);
  return root.dump(2) + "\n";
}

}  // namespace

std::string emit_report(std::span<const RunReport> reports, ReportFormat format) {
  if (reports.empty()) throw InvalidArgument("no reports to emit");
  return format == ReportFormat::csv ? emit_csv(reports) : emit_grouped(reports);
}

std::string reports_to_json(std::span<const RunReport> reports) {
  ordered_json all = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json j;
    j["provider"] = {{"name", r.provider.name},
                     {"dim", r.provider.dim},
                     {"kind", to_string(r.provider.kind)}};
    j["config"] = {{"chunk_level", to_string(r.config.chunk_level)},
                   {"separator", to_string(r.config.separator)},
                   {"repeat_header", r.config.repeat_header},
                   {"include_text", r.config.include_text}};
    j["k"] = r.k;
    j["failed"] = r.failed;
    if (r.failed) {
      j["error"] = r.error;
      all.push_back(std::move(j));
      continue;
    }
    j["overall_accuracy"] = r.overall_accuracy;
    ordered_json per_type = ordered_json::object();
    for (const auto& [t, acc] : r.per_type_accuracy) {
      per_type[std::string(to_string(t))] = acc ? ordered_json(*acc) : ordered_json(nullptr);
    }
    j["per_type_accuracy"] = std::move(per_type);
    ordered_json qs = ordered_json::array();
    for (const auto& q : r.per_question) {
      qs.push_back({{"qid", q.qid},
                    {"qtype", to_string(q.qtype)},
                    {"hit", q.hit},
                    {"first_rank", q.first_rank ? ordered_json(*q.first_rank)
                                                : ordered_json(nullptr)}});
    }
    j["per_question"] = std::move(qs);
    all.push_back(std::move(j));
  }
  return all.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace tablerag
