#include "wwwstory/analysis.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>

#include "wwwstory/errors.hpp"

namespace wwwstory {

namespace {

bool overextends(double ratio, double margin) { return ratio > 1.0 + margin; }

void require_positive(double value, const char* name, MeasureErrorCode code, const char* what) {
  if (!(value > 0)) throw MeasureError(code, std::string(what) + " undefined: " + name + " = 0");
}

bool integral(double v) { return v >= 0 && v < 9.007199254740992e15 && std::floor(v) == v; }

}  // namespace

EEOverextension ee_overextension(const TriadCounts& k, double margin) {
  require_positive(k.n_AB, "n_AB", MeasureErrorCode::phrase_absent,
                   "EE analysis (the combination never occurs)");
  require_positive(k.n_A, "n_A", MeasureErrorCode::undefined_probability, "p(C|A)");
  require_positive(k.n_B, "n_B", MeasureErrorCode::undefined_probability, "p(C|B)");

  EEOverextension ee;
  ee.p_c_given_ab = conditional_probability(k.n_AB_C, k.n_AB).value;
  ee.p_c_given_a = conditional_probability(k.n_A_C, k.n_A).value;
  ee.p_c_given_b = conditional_probability(k.n_B_C, k.n_B).value;
  const double inf = std::numeric_limits<double>::infinity();
  ee.ratio_vs_a = ee.p_c_given_a > 0 ? ee.p_c_given_ab / ee.p_c_given_a : (ee.p_c_given_ab > 0 ? inf : 0.0);
  ee.ratio_vs_b = ee.p_c_given_b > 0 ? ee.p_c_given_ab / ee.p_c_given_b : (ee.p_c_given_ab > 0 ? inf : 0.0);
  ee.classification = classify_fallacy(overextends(ee.ratio_vs_a, margin), overextends(ee.ratio_vs_b, margin));
  return ee;
}

OESequential oe_sequential(const TriadCounts& k, double margin) {
  require_positive(k.n_A, "n_A", MeasureErrorCode::undefined_probability, "p(C|A then B)");
  require_positive(k.n_B, "n_B", MeasureErrorCode::undefined_probability, "p(C|B then A)");

  OESequential oe;
  oe.p_c_a_then_b = conditional_probability(k.n_A_B_C, k.n_A).value;
  oe.p_c_b_then_a = conditional_probability(k.n_A_B_C, k.n_B).value;
  oe.p_c_given_a = conditional_probability(k.n_A_C, k.n_A).value;
  oe.p_c_given_b = conditional_probability(k.n_B_C, k.n_B).value;

  auto ratio = [](double num, double den) {
    if (den > 0) return num / den;
    return num > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  oe.ratio_a_then_b_vs_a = ratio(oe.p_c_a_then_b, oe.p_c_given_a);
  oe.ratio_a_then_b_vs_b = ratio(oe.p_c_a_then_b, oe.p_c_given_b);
  oe.ratio_b_then_a_vs_a = ratio(oe.p_c_b_then_a, oe.p_c_given_a);
  oe.ratio_b_then_a_vs_b = ratio(oe.p_c_b_then_a, oe.p_c_given_b);
  oe.necessary_ab = k.n_B / k.n_A;
  oe.necessary_ba = k.n_A / k.n_B;
  oe.class_a_then_b =
      classify_fallacy(overextends(oe.ratio_a_then_b_vs_a, margin), overextends(oe.ratio_a_then_b_vs_b, margin));
  oe.class_b_then_a =
      classify_fallacy(overextends(oe.ratio_b_then_a_vs_a, margin), overextends(oe.ratio_b_then_a_vs_b, margin));
  return oe;
}

Dominance dominance(const TriadCounts& k) {
  require_positive(k.n_AB, "n_AB", MeasureErrorCode::undefined_ratio, "dominance ratio");
  require_positive(k.n_A_B_C, "n_A_B_C", MeasureErrorCode::undefined_ratio, "dominance ratio");
  require_positive(k.n_A_B, "n_A_B", MeasureErrorCode::undefined_ratio, "dominance ratio");

  Dominance d;
  d.direct = (k.n_AB_C / k.n_A_B_C) * (k.n_A / k.n_AB);
  d.factor1 = (k.n_AB_C / k.n_AB) * (k.n_A_B / k.n_A_B_C);
  d.factor2 = 1.0 + k.n_A_notB / k.n_A_B;
  d.decomposed = d.factor1 * d.factor2;
  d.relative_discrepancy = d.direct > 0 ? std::abs(d.direct - d.decomposed) / d.direct
                                        : (d.decomposed == 0 ? 0.0 : std::numeric_limits<double>::infinity());

  if (k.n_W && k.n_C > 0) {
    const auto bond_c_ab = meaning_bond(k.n_AB_C, k.n_AB, k.n_C, k.n_W);
    const auto bond_c_a_b = meaning_bond_joint(k.n_A_B_C, k.n_A_B, k.n_C, k.n_W);
    if (bond_c_a_b.value > 0) d.factor1_via_bonds = bond_c_ab.value / bond_c_a_b.value;
  }

  const double all[] = {k.n_A, k.n_AB, k.n_AB_C, k.n_A_B, k.n_A_B_C, k.n_A_notB};
  if (std::all_of(std::begin(all), std::end(all), integral)) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    auto i = [](double v) { return cpp_int(static_cast<long long>(v)); };
    const cpp_rational direct = cpp_rational(i(k.n_AB_C), i(k.n_A_B_C)) * cpp_rational(i(k.n_A), i(k.n_AB));
    const cpp_rational f1 = cpp_rational(i(k.n_AB_C), i(k.n_AB)) * cpp_rational(i(k.n_A_B), i(k.n_A_B_C));
    const cpp_rational f2 = cpp_rational(1) + cpp_rational(i(k.n_A_notB), i(k.n_A_B));
    d.exact_agreement = direct == f1 * f2;
  }
  return d;
}

TriadAnalysis analyze_counts(const TriadCounts& counts, const AnalysisOptions& options) {
  const bool exact = counts.source == CountSource::local_index;
  TriadAnalysis out;
  out.counts = counts;
  out.consistency = audit(counts, options.audit_tolerance);
  out.overextension_margin = options.overextension_margin.value_or(exact ? kExactOverextensionMargin : 0.0);
  out.neutral_band = options.neutral_band.value_or(exact ? kExactNeutralBand : kRecordedNeutralBand);
  out.dominance_threshold = options.dominance_threshold;

  auto undefined_only = [](const MeasureError& e) {
    return e.code() != MeasureErrorCode::inconsistent_counts && e.code() != MeasureErrorCode::nw_unavailable;
  };

  try {
    out.ee = ee_overextension(counts, out.overextension_margin);
  } catch (const MeasureError& e) {
    if (!undefined_only(e)) throw;
    out.ee_undefined_reason = e.what();
  }
  try {
    out.oe = oe_sequential(counts, out.overextension_margin);
  } catch (const MeasureError& e) {
    if (!undefined_only(e)) throw;
    out.oe_undefined_reason = e.what();
  }
  try {
    out.dominance = dominance(counts);
    out.dominance_flag = out.dominance->direct >= out.dominance_threshold;
  } catch (const MeasureError& e) {
    if (!undefined_only(e)) throw;
    out.dominance_undefined_reason = e.what();
  }

  if (!counts.n_W) {
    out.bonds_undefined_reason = "n_W unavailable for this count source";
  } else {
    auto attempt = [&](std::optional<MeaningBond>& slot, auto&& compute) {
      try {
        slot = compute();
      } catch (const MeasureError& e) {
        if (!undefined_only(e)) throw;
        if (!out.bonds_undefined_reason.empty()) out.bonds_undefined_reason += "; ";
        out.bonds_undefined_reason += e.what();
      }
    };
    const auto& k = counts;
    attempt(out.bond_a_b, [&] { return meaning_bond(k.n_A_B, k.n_A, k.n_B, k.n_W, out.neutral_band); });
    attempt(out.bond_c_ab, [&] { return meaning_bond(k.n_AB_C, k.n_AB, k.n_C, k.n_W, out.neutral_band); });
    attempt(out.bond_c_a_b, [&] { return meaning_bond_joint(k.n_A_B_C, k.n_A_B, k.n_C, k.n_W, out.neutral_band); });
  }
  return out;
}

TriadAnalysis analyze_triad(const CountProvider& provider, const std::string& a, const std::string& b,
                            const std::string& c, const std::vector<std::string>& phrase,
                            const AnalysisOptions& options) {
  return analyze_counts(get_triad_counts(provider, a, b, c, phrase), options);
}

}  // namespace wwwstory
