#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wwwstory/fallacy.hpp"
#include "wwwstory/measures.hpp"
#include "wwwstory/providers.hpp"

namespace wwwstory {

/// Margin for exact counts: a ratio overextends when it exceeds 1 + this.
inline constexpr double kExactOverextensionMargin = 1e-12;

struct AnalysisOptions {
  /// Overextension margin; defaults to kExactOverextensionMargin for local
  /// counts and 0 for recorded external counts.
  std::optional<double> overextension_margin;
  /// EE dominates OE when p(C|AB) / p(C|A then B) reaches this.
  double dominance_threshold = 10.0;
  /// Neutral band for meaning bonds; defaults to kExactNeutralBand for local
  /// counts and kRecordedNeutralBand for recorded ones.
  std::optional<double> neutral_band;
  /// Audit slack; see audit().
  std::optional<double> audit_tolerance;
};

/// Emergence diagnostics: p(C|AB) against p(C|A) and p(C|B).
struct EEOverextension {
  double p_c_given_ab = 0, p_c_given_a = 0, p_c_given_b = 0;
  double ratio_vs_a = 0;  // p(C|AB) / p(C|A) = (n_AB_C / n_A_C)(n_A / n_AB)
  double ratio_vs_b = 0;
  FallacyClass classification = FallacyClass::none;
};

/// Throws MeasureError(phrase_absent) when n_AB = 0.
EEOverextension ee_overextension(const TriadCounts& counts, double margin = kExactOverextensionMargin);

/// Sequential diagnostics. p(C|A then B) = n_A_B_C / n_A, and each order is
/// compared against both single-term conditionals.
struct OESequential {
  double p_c_a_then_b = 0, p_c_b_then_a = 0;
  double p_c_given_a = 0, p_c_given_b = 0;
  double ratio_a_then_b_vs_a = 0;  // p(C|A then B) / p(C|A)
  double ratio_a_then_b_vs_b = 0;  // p(C|A then B) / p(C|B)
  double ratio_b_then_a_vs_a = 0;
  double ratio_b_then_a_vs_b = 0;
  double necessary_ab = 0;  // n_B / n_A: must exceed 1 for A-then-B to beat p(C|B)
  double necessary_ba = 0;  // n_A / n_B
  FallacyClass class_a_then_b = FallacyClass::none;
  FallacyClass class_b_then_a = FallacyClass::none;
};

/// Throws MeasureError for zero n_A or n_B.
OESequential oe_sequential(const TriadCounts& counts, double margin = kExactOverextensionMargin);

/// p(C|AB) / p(C|A then B), computed directly and through the two-factor split
///   [ (n_AB_C / n_AB)(n_A_B / n_A_B_C) ] * [ 1 + n_A_notB / n_A_B ].
struct Dominance {
  double direct = 0;
  double factor1 = 0;
  double factor2 = 0;
  double decomposed = 0;
  double relative_discrepancy = 0;  // |direct - decomposed| / direct
  /// factor1 as M(C,AB) / M(C;A,B), when n_W is known.
  std::optional<double> factor1_via_bonds;
  /// For integral counts: whether direct == factor1 * factor2 as exact rationals.
  std::optional<bool> exact_agreement;
};

/// Throws MeasureError(undefined_ratio) naming the zero count.
Dominance dominance(const TriadCounts& counts);

struct TriadAnalysis {
  TriadCounts counts;
  ConsistencyReport consistency;
  double overextension_margin = 0;
  double neutral_band = 0;
  double dominance_threshold = 0;

  std::optional<EEOverextension> ee;
  std::string ee_undefined_reason;
  std::optional<OESequential> oe;
  std::string oe_undefined_reason;
  std::optional<Dominance> dominance;
  std::string dominance_undefined_reason;
  bool dominance_flag = false;  // dominance.direct >= dominance_threshold

  // Meaning bonds, present only when n_W is known and the bond is defined.
  std::optional<MeaningBond> bond_a_b;
  std::optional<MeaningBond> bond_c_ab;   // M(C, AB)
  std::optional<MeaningBond> bond_c_a_b;  // M(C; A, B)
  std::string bonds_undefined_reason;

  FallacyClass ee_class() const { return ee ? ee->classification : FallacyClass::none; }
  /// The sequential class with A asked first.
  FallacyClass oe_class() const { return oe ? oe->class_a_then_b : FallacyClass::none; }
};

/// Pure analysis of resolved counts. Zero denominators leave the affected
/// block empty with a reason; counts that contradict a probability (n_XY > n_Y)
/// raise MeasureError.
TriadAnalysis analyze_counts(const TriadCounts& counts, const AnalysisOptions& options = {});

/// get_triad_counts + analyze_counts.
TriadAnalysis analyze_triad(const CountProvider& provider, const std::string& a, const std::string& b,
                            const std::string& c, const std::vector<std::string>& phrase,
                            const AnalysisOptions& options = {});

}  // namespace wwwstory
