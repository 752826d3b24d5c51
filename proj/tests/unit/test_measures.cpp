#include <gtest/gtest.h>

#include <random>

#include "wwwstory/errors.hpp"
#include "wwwstory/measures.hpp"

using namespace wwwstory;

namespace {

template <class F>
MeasureErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const MeasureError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no MeasureError thrown";
  return MeasureErrorCode::undefined_ratio;
}

}  // namespace

TEST(Landing, Values) {
  EXPECT_DOUBLE_EQ(landing_probability(5, 10).value, 0.5);
  EXPECT_DOUBLE_EQ(landing_probability(0, 10).value, 0.0);
  EXPECT_DOUBLE_EQ(landing_probability(10, 10).value, 1.0);
}

TEST(Landing, Errors) {
  EXPECT_EQ(code_of([] { landing_probability(0, 0); }), MeasureErrorCode::undefined_probability);
  EXPECT_EQ(code_of([] { landing_probability(11, 10); }), MeasureErrorCode::inconsistent_counts);
}

TEST(Conditional, PetFishValues) {
  EXPECT_NEAR(conditional_probability(1.37e5, 6.17e5).value, 2.22e-1, 2.22e-1 * 5e-3);
  EXPECT_NEAR(conditional_probability(6.12e5, 7.14e8).value, 8.57e-4, 8.57e-4 * 5e-3);
}

TEST(Conditional, SubsetEqualsSuperset) {
  for (double k : {1.0, 7.0, 1e9}) EXPECT_EQ(conditional_probability(k, k).value, 1.0);
}

TEST(Conditional, Errors) {
  EXPECT_EQ(code_of([] { conditional_probability(0, 0); }), MeasureErrorCode::undefined_probability);
  EXPECT_EQ(code_of([] { conditional_probability(3, 2); }), MeasureErrorCode::inconsistent_counts);
}

TEST(Bond, Toy10) {
  auto ab = meaning_bond(2, 5, 4, 10.0);
  EXPECT_DOUBLE_EQ(ab.value, 1.0);
  EXPECT_EQ(ab.classification, BondClass::neutral);
  auto ac = meaning_bond(2, 5, 3, 10.0);
  EXPECT_DOUBLE_EQ(ac.value, 4.0 / 3.0);
  EXPECT_EQ(ac.classification, BondClass::attractive);
}

TEST(Bond, NoCooccurrenceIsRepulsive) {
  auto b = meaning_bond(0, 5, 4, 10.0);
  EXPECT_EQ(b.value, 0.0);
  EXPECT_EQ(b.classification, BondClass::repulsive);
}

TEST(Bond, Errors) {
  EXPECT_EQ(code_of([] { meaning_bond(0, 0, 4, 10.0); }), MeasureErrorCode::undefined_bond);
  EXPECT_EQ(code_of([] { meaning_bond(0, 4, 0, 10.0); }), MeasureErrorCode::undefined_bond);
  EXPECT_EQ(code_of([] { meaning_bond(1, 4, 4, std::nullopt); }), MeasureErrorCode::nw_unavailable);
  EXPECT_EQ(code_of([] { meaning_bond_joint(1, 4, 4, std::nullopt); }), MeasureErrorCode::nw_unavailable);
}

TEST(Bond, Joint) {
  auto m = meaning_bond_joint(2, 2, 3, 10.0);
  EXPECT_DOUBLE_EQ(m.value, 10.0 / 3.0);
  EXPECT_EQ(m.classification, BondClass::attractive);
  EXPECT_EQ(meaning_bond_joint(0, 4, 3, 10.0).classification, BondClass::repulsive);
  auto neutral = meaning_bond_joint(6, 6, 10, 10.0);
  EXPECT_DOUBLE_EQ(neutral.value, 1.0);
  EXPECT_EQ(neutral.classification, BondClass::neutral);
}

TEST(Bond, NeutralBand) {
  EXPECT_EQ(classify_bond(1.03, kRecordedNeutralBand), BondClass::neutral);
  EXPECT_EQ(classify_bond(1.03), BondClass::attractive);
  EXPECT_EQ(classify_bond(0.94, kRecordedNeutralBand), BondClass::repulsive);
  EXPECT_EQ(to_string(BondClass::attractive), "attractive");
}

// Random consistent counts: M(A,B) is symmetric and equals p(A|B)/p(A) = p(B|A)/p(B).
TEST(Bond, SymmetryAndConditionalForms) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 2000; ++i) {
    std::uniform_int_distribution<int> w(1, 5000);
    int n_w = w(rng);
    int n_a = std::uniform_int_distribution<int>(1, n_w)(rng);
    int n_b = std::uniform_int_distribution<int>(1, n_w)(rng);
    int lo = std::max(0, n_a + n_b - n_w), hi = std::min(n_a, n_b);
    int n_ab = std::uniform_int_distribution<int>(lo, hi)(rng);
    double m = meaning_bond(n_ab, n_a, n_b, double(n_w)).value;
    EXPECT_DOUBLE_EQ(m, meaning_bond(n_ab, n_b, n_a, double(n_w)).value);
    double via_a = conditional_probability(n_ab, n_b).value / landing_probability(n_a, n_w).value;
    double via_b = conditional_probability(n_ab, n_a).value / landing_probability(n_b, n_w).value;
    EXPECT_NEAR(m, via_a, 1e-12 * std::max(1.0, m));
    EXPECT_NEAR(m, via_b, 1e-12 * std::max(1.0, m));
  }
}
