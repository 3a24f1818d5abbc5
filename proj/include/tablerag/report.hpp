#pragma once

#include <span>
#include <string>

#include "tablerag/eval.hpp"

namespace tablerag {

enum class ReportFormat {
  // provider,chunk_level,separator,repeat_header,include_text,k,overall,
  // acc_E,acc_M,acc_A,acc_I,failed -- accuracies to one decimal, empty when
  // undefined (failed cell or no questions of that type).
  csv,
  // {"panels":[{"chunk_level","separator","groups":[{"repeat_header",
  //   "include_text","bars":[{"provider","accuracy"}]}]}]}
  // Panels: table/pipe, row/pipe, table/space, row/space. Groups within a
  // panel: (no,no), (no,yes), (yes,no), (yes,yes) for (repeat_header,
  // include_text). Only cells present in `reports` appear.
  grouped_bar_data,
};

// Throws InvalidArgument for an empty report list.
std::string emit_report(std::span<const RunReport> reports, ReportFormat format);

// Full-precision JSON dump of every report including per-question outcomes.
std::string reports_to_json(std::span<const RunReport> reports);

}  // namespace tablerag
