#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "wwwstory/analysis.hpp"

namespace wwwstory {

/// Three significant figures in scientific notation ("2.59e+02"), or the
/// shortest round-trip form when `full_precision` is set.
std::string format_number(double value, bool full_precision = false);

/// Stable-keyed JSON report (schema "wwwstory.triad/1"). Numbers are always
/// emitted at full precision.
nlohmann::ordered_json triad_report_json(const TriadAnalysis& analysis);

/// Human-readable report laid out as count list, EE block, OE block, dominance.
std::string triad_report_markdown(const TriadAnalysis& analysis, bool full_precision = false);

}  // namespace wwwstory
