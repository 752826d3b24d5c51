#pragma once

#include <optional>
#include <string>

namespace wwwstory {

struct Probability {
  double value = 0;
};

enum class BondClass { attractive, repulsive, neutral };

std::string to_string(BondClass c);

struct MeaningBond {
  double value = 0;
  BondClass classification = BondClass::neutral;
};

/// Neutral band for exact (local) counts.
inline constexpr double kExactNeutralBand = 1e-9;
/// Neutral band suggested for rounded external counts.
inline constexpr double kRecordedNeutralBand = 0.05;

/// p(X) = n_X / n_W. Throws MeasureError for n_W = 0 or n_X > n_W.
Probability landing_probability(double n_x, double n_w);

/// p(X|Y) = n_XY / n_Y. Throws MeasureError for n_Y = 0 or n_XY > n_Y;
/// inconsistent counts are rejected, never clamped.
Probability conditional_probability(double n_xy, double n_y);

/// Classifies a bond value against the neutral band |value - 1| <= band.
BondClass classify_bond(double value, double neutral_band = kExactNeutralBand);

/// M(A,B) = n_AB n_W / (n_A n_B), where n_AB counts documents containing both.
/// Throws MeasureError when n_W is absent or n_A, n_B, n_W is zero.
MeaningBond meaning_bond(double n_ab, double n_a, double n_b, std::optional<double> n_w,
                         double neutral_band = kExactNeutralBand);

/// Bond between C and the pair {A, B} co-occurring anywhere in a document:
/// M(C; A,B) = n_ABC n_W / (n_A_B n_C).
MeaningBond meaning_bond_joint(double n_abc, double n_a_b, double n_c, std::optional<double> n_w,
                               double neutral_band = kExactNeutralBand);

}  // namespace wwwstory
