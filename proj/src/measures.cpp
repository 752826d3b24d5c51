#include "wwwstory/measures.hpp"

#include <cmath>
#include <cstdio>

#include "wwwstory/errors.hpp"

namespace wwwstory {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_count(double n, const char* name) {
  if (!(n >= 0) || !std::isfinite(n)) {
    throw MeasureError(MeasureErrorCode::inconsistent_counts, std::string(name) + " must be a nonnegative count");
  }
}

double require_total(std::optional<double> n_w) {
  if (!n_w) {
    throw MeasureError(MeasureErrorCode::nw_unavailable,
                       "n_W unavailable: this count source does not report a total number of documents");
  }
  require_count(*n_w, "n_W");
  if (*n_w == 0) throw MeasureError(MeasureErrorCode::undefined_bond, "n_W is zero");
  return *n_w;
}

}  // namespace

std::string to_string(BondClass c) {
  switch (c) {
    case BondClass::attractive:
      return "attractive";
    case BondClass::repulsive:
      return "repulsive";
    case BondClass::neutral:
      return "neutral";
  }
  return "?";
}

Probability landing_probability(double n_x, double n_w) {
  require_count(n_x, "n_X");
  require_count(n_w, "n_W");
  if (n_w == 0) throw MeasureError(MeasureErrorCode::undefined_probability, "landing probability undefined: n_W = 0");
  if (n_x > n_w) {
    throw MeasureError(MeasureErrorCode::inconsistent_counts, "n_X (" + num(n_x) + ") exceeds n_W (" + num(n_w) + ")");
  }
  return {n_x / n_w};
}

Probability conditional_probability(double n_xy, double n_y) {
  require_count(n_xy, "n_XY");
  require_count(n_y, "n_Y");
  if (n_y == 0) {
    throw MeasureError(MeasureErrorCode::undefined_probability, "conditional probability undefined: n_Y = 0");
  }
  if (n_xy > n_y) {
    throw MeasureError(MeasureErrorCode::inconsistent_counts,
                       "n_XY (" + num(n_xy) + ") exceeds n_Y (" + num(n_y) + ")");
  }
  return {n_xy / n_y};
}

BondClass classify_bond(double value, double neutral_band) {
  if (std::abs(value - 1.0) <= neutral_band) return BondClass::neutral;
  return value > 1.0 ? BondClass::attractive : BondClass::repulsive;
}

MeaningBond meaning_bond(double n_ab, double n_a, double n_b, std::optional<double> n_w, double neutral_band) {
  require_count(n_ab, "n_A_B");
  require_count(n_a, "n_A");
  require_count(n_b, "n_B");
  if (n_a == 0 || n_b == 0) {
    throw MeasureError(MeasureErrorCode::undefined_bond, "meaning bond undefined: n_A or n_B is zero");
  }
  const double total = require_total(n_w);
  // Grouped so that swapping A and B gives bit-identical results.
  const double value = n_ab * total / (n_a * n_b);
  return {value, classify_bond(value, neutral_band)};
}

MeaningBond meaning_bond_joint(double n_abc, double n_a_b, double n_c, std::optional<double> n_w,
                               double neutral_band) {
  require_count(n_abc, "n_A_B_C");
  require_count(n_a_b, "n_A_B");
  require_count(n_c, "n_C");
  if (n_a_b == 0 || n_c == 0) {
    throw MeasureError(MeasureErrorCode::undefined_bond, "joint meaning bond undefined: n_A_B or n_C is zero");
  }
  const double total = require_total(n_w);
  const double value = n_abc * total / (n_a_b * n_c);
  return {value, classify_bond(value, neutral_band)};
}

}  // namespace wwwstory
