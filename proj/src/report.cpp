#include "wwwstory/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace wwwstory {

using nlohmann::ordered_json;

std::string format_number(double value, bool full_precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  if (full_precision) {
    // Shortest representation that round-trips.
    for (int digits = 1; digits <= 17; ++digits) {
      std::snprintf(buf, sizeof buf, "%.*g", digits, value);
      if (std::strtod(buf, nullptr) == value) break;
    }
  } else {
    std::snprintf(buf, sizeof buf, "%.2e", value);
  }
  return buf;
}

namespace {

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::satisfied:
      return "satisfied";
    case CheckStatus::violated:
      return "violated";
    case CheckStatus::not_applicable:
      return "not_applicable";
  }
  return "?";
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json bond_json(const std::optional<MeaningBond>& b) {
  if (!b) return nullptr;
  return {{"value", b->value}, {"classification", to_string(b->classification)}};
}

}  // namespace

ordered_json triad_report_json(const TriadAnalysis& a) {
  const auto& k = a.counts;
  ordered_json j;
  j["schema"] = "wwwstory.triad/1";

  std::set<std::string> stamps;
  for (const auto& o : k.provenance) {
    if (!o.observed_at.empty()) stamps.insert(o.observed_at);
  }
  j["provenance"] = {{"provider", k.provider_name}, {"source", to_string(k.source)}, {"observed_at", stamps}};
  j["labels"] = {{"a", k.labels.a}, {"b", k.labels.b}, {"c", k.labels.c}, {"ab", k.labels.ab}};
  j["counts"] = {{"n_W", optional_number(k.n_W)}, {"n_A", k.n_A},       {"n_B", k.n_B},
                 {"n_C", k.n_C},                  {"n_AB", k.n_AB},     {"n_A_B", k.n_A_B},
                 {"n_A_C", k.n_A_C},              {"n_B_C", k.n_B_C},   {"n_AB_C", k.n_AB_C},
                 {"n_A_B_C", k.n_A_B_C},          {"n_A_notB", k.n_A_notB}};
  ordered_json queries = ordered_json::array();
  for (const auto& o : k.provenance) queries.push_back({{"query", o.query}, {"count", o.count}});
  j["queries"] = queries;

  ordered_json checks = ordered_json::array();
  for (const auto& c : a.consistency.checks) {
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"status", status_name(c.status)}});
  }
  j["consistency"] = {{"all_satisfied", a.consistency.all_satisfied()}, {"checks", checks}};
  j["thresholds"] = {{"overextension_margin", a.overextension_margin},
                     {"neutral_band", a.neutral_band},
                     {"dominance_threshold", a.dominance_threshold}};

  if (a.ee) {
    j["ee"] = {{"p_c_given_ab", a.ee->p_c_given_ab}, {"p_c_given_a", a.ee->p_c_given_a},
               {"p_c_given_b", a.ee->p_c_given_b},   {"ee_ratio_vs_a", a.ee->ratio_vs_a},
               {"ee_ratio_vs_b", a.ee->ratio_vs_b},  {"ee_class", to_string(a.ee->classification)}};
  } else {
    j["ee"] = {{"undefined", a.ee_undefined_reason}, {"ee_class", "undefined"}};
  }

  if (a.oe) {
    j["oe"] = {{"p_c_a_then_b", a.oe->p_c_a_then_b},
               {"p_c_b_then_a", a.oe->p_c_b_then_a},
               {"oe_ratio_vs_a", a.oe->ratio_a_then_b_vs_a},
               {"oe_ratio_vs_b", a.oe->ratio_a_then_b_vs_b},
               {"oe_reversed_ratio_vs_a", a.oe->ratio_b_then_a_vs_a},
               {"oe_reversed_ratio_vs_b", a.oe->ratio_b_then_a_vs_b},
               {"oe_necessary_ab", a.oe->necessary_ab},
               {"oe_necessary_ba", a.oe->necessary_ba},
               {"oe_class", to_string(a.oe->class_a_then_b)},
               {"oe_reversed_class", to_string(a.oe->class_b_then_a)}};
  } else {
    j["oe"] = {{"undefined", a.oe_undefined_reason}, {"oe_class", "undefined"}};
  }

  if (a.dominance) {
    const auto& d = *a.dominance;
    j["dominance"] = {{"dominance_direct", d.direct},
                      {"dominance_factor1", d.factor1},
                      {"dominance_factor2", d.factor2},
                      {"dominance_decomposed", d.decomposed},
                      {"relative_discrepancy", d.relative_discrepancy},
                      {"factor1_via_bonds", optional_number(d.factor1_via_bonds)},
                      {"exact_agreement", d.exact_agreement ? ordered_json(*d.exact_agreement) : ordered_json(nullptr)},
                      {"ee_dominates", a.dominance_flag}};
  } else {
    j["dominance"] = {{"undefined", a.dominance_undefined_reason}};
  }

  j["bonds"] = {{"m_a_b", bond_json(a.bond_a_b)},
                {"m_c_ab", bond_json(a.bond_c_ab)},
                {"m_c_a_b", bond_json(a.bond_c_a_b)}};
  if (!a.bonds_undefined_reason.empty()) j["bonds"]["undefined"] = a.bonds_undefined_reason;
  return j;
}

std::string triad_report_markdown(const TriadAnalysis& a, bool full) {
  const auto& k = a.counts;
  const auto& L = k.labels;
  auto n = [full](double v) { return format_number(v, full); };
  std::ostringstream out;

  out << "# Triad: A = " << L.a << ", B = " << L.b << ", C = " << L.c << ", AB = \"" << L.ab << "\"\n\n";
  out << "Source: " << to_string(k.source) << " (" << k.provider_name << ")\n\n";

  out << "## Counts\n\n| count | value |\n|---|---|\n";
  out << "| n_W | " << (k.n_W ? n(*k.n_W) : std::string("unavailable")) << " |\n";
  const std::pair<const char*, double> rows[] = {
      {"n_A", k.n_A},     {"n_B", k.n_B},     {"n_C", k.n_C},       {"n_AB", k.n_AB},       {"n_A,B", k.n_A_B},
      {"n_A,C", k.n_A_C}, {"n_B,C", k.n_B_C}, {"n_AB,C", k.n_AB_C}, {"n_A,B,C", k.n_A_B_C}, {"n_A,notB", k.n_A_notB}};
  for (const auto& [name, value] : rows) out << "| " << name << " | " << n(value) << " |\n";

  out << "\n## Consistency\n\n";
  if (a.consistency.all_satisfied()) {
    out << "All count invariants satisfied.\n";
  } else {
    out << "| invariant | lhs | rhs |\n|---|---|---|\n";
    for (const auto& c : a.consistency.checks) {
      if (c.status == CheckStatus::violated) out << "| " << c.name << " | " << n(c.lhs) << " | " << n(c.rhs) << " |\n";
    }
  }

  out << "\n## Emergence (EE)\n\n";
  if (a.ee) {
    out << "| quantity | value |\n|---|---|\n";
    out << "| p(C|AB) | " << n(a.ee->p_c_given_ab) << " |\n";
    out << "| p(C|A) | " << n(a.ee->p_c_given_a) << " |\n";
    out << "| p(C|B) | " << n(a.ee->p_c_given_b) << " |\n";
    out << "| p(C|AB) / p(C|A) | " << n(a.ee->ratio_vs_a) << " |\n";
    out << "| p(C|AB) / p(C|B) | " << n(a.ee->ratio_vs_b) << " |\n";
    out << "| overextension | " << to_string(a.ee->classification) << " |\n";
  } else {
    out << "EE undefined: " << a.ee_undefined_reason << "\n";
  }

  out << "\n## Sequential (OE)\n\n";
  if (a.oe) {
    out << "| quantity | value |\n|---|---|\n";
    out << "| p(C|A then B) | " << n(a.oe->p_c_a_then_b) << " |\n";
    out << "| p(C|B then A) | " << n(a.oe->p_c_b_then_a) << " |\n";
    out << "| p(C|A then B) / p(C|A) | " << n(a.oe->ratio_a_then_b_vs_a) << " |\n";
    out << "| p(C|A then B) / p(C|B) | " << n(a.oe->ratio_a_then_b_vs_b) << " |\n";
    out << "| p(C|B then A) / p(C|A) | " << n(a.oe->ratio_b_then_a_vs_a) << " |\n";
    out << "| p(C|B then A) / p(C|B) | " << n(a.oe->ratio_b_then_a_vs_b) << " |\n";
    out << "| n_B / n_A | " << n(a.oe->necessary_ab) << " |\n";
    out << "| n_A / n_B | " << n(a.oe->necessary_ba) << " |\n";
    out << "| overextension (A then B) | " << to_string(a.oe->class_a_then_b) << " |\n";
    out << "| overextension (B then A) | " << to_string(a.oe->class_b_then_a) << " |\n";
  } else {
    out << "OE undefined: " << a.oe_undefined_reason << "\n";
  }

  out << "\n## Dominance p(C|AB) / p(C|A then B)\n\n";
  if (a.dominance) {
    const auto& d = *a.dominance;
    out << "| quantity | value |\n|---|---|\n";
    out << "| direct | " << n(d.direct) << " |\n";
    out << "| factor 1 (n_AB,C / n_AB)(n_A,B / n_A,B,C) | " << n(d.factor1) << " |\n";
    out << "| factor 2 (1 + n_A,notB / n_A,B) | " << n(d.factor2) << " |\n";
    out << "| factor 1 x factor 2 | " << n(d.decomposed) << " |\n";
    out << "| relative discrepancy | " << n(d.relative_discrepancy) << " |\n";
    if (d.factor1_via_bonds) out << "| M(C,AB) / M(C;A,B) | " << n(*d.factor1_via_bonds) << " |\n";
    out << "| EE dominates (>= " << n(a.dominance_threshold) << ") | " << (a.dominance_flag ? "yes" : "no") << " |\n";
  } else {
    out << "Dominance undefined: " << a.dominance_undefined_reason << "\n";
  }

  out << "\n## Meaning bonds\n\n";
  if (a.bond_a_b || a.bond_c_ab || a.bond_c_a_b) {
    out << "| bond | value | class |\n|---|---|---|\n";
    auto row = [&](const char* name, const std::optional<MeaningBond>& b) {
      if (b) out << "| " << name << " | " << n(b->value) << " | " << to_string(b->classification) << " |\n";
    };
    row("M(A,B)", a.bond_a_b);
    row("M(C,AB)", a.bond_c_ab);
    row("M(C;A,B)", a.bond_c_a_b);
  }
  if (!a.bonds_undefined_reason.empty()) out << "Bonds unavailable: " << a.bonds_undefined_reason << "\n";
  return out.str();
}

}  // namespace wwwstory
