#pragma once

#include <Eigen/Dense>
#include <complex>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>

#include "wwwstory/fallacy.hpp"

namespace wwwstory::quantum {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Entrywise tolerance for unit norms, hermiticity, idempotence, orthogonality,
/// and for imaginary residues of quantities that are real by construction.
inline constexpr double kTolerance = 1e-10;
/// Equality band for the fallacy inequalities; equality counts as a fallacy.
inline constexpr double kFallacyTieBand = 1e-12;
/// Maximum per-target error accepted from a fit.
inline constexpr double kFitTolerance = 1e-6;

class StateVector {
 public:
  /// Throws InvariantViolation unless the norm is 1 within kTolerance.
  static StateVector from_amplitudes(CVector amplitudes);
  /// Scales a nonzero vector to unit norm.
  static StateVector normalized(const CVector& v);
  static StateVector basis(Eigen::Index dim, Eigen::Index k);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

 private:
  explicit StateVector(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {}
  CVector amplitudes_;
};

/// Orthogonal projector: Hermitian and idempotent within kTolerance.
class Projector {
 public:
  /// Validates; never repairs. Throws InvariantViolation.
  static Projector from_matrix(CMatrix matrix);
  /// Projector onto the column span of `columns` (rank-revealing, any column count).
  static Projector onto(const CMatrix& columns);
  static Projector identity(Eigen::Index dim);
  static Projector zero(Eigen::Index dim);

  Projector complement() const;
  const CMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  Eigen::Index rank() const;

 private:
  explicit Projector(CMatrix matrix) : matrix_(std::move(matrix)) {}
  CMatrix matrix_;
};

/// Sequential-measurement model: belief state |S>, question projectors M_A and M_B.
struct OEModel {
  StateVector state;
  Projector m_a;
  Projector m_b;

  /// Throws InvariantViolation on dimension mismatch.
  static OEModel make(StateVector state, Projector m_a, Projector m_b);
};

struct OEPrediction {
  double p_a = 0, p_b = 0;
  double p_a_then_b = 0, p_b_then_a = 0;
  double p_aprime_then_b = 0;  // "no" to A, then "yes" to B
  double p_a_then_bprime = 0;  // "yes" to A, then "no" to B
  double int_b = 0;            // interference contribution to p(B)
  /// |(p_a_then_b - p_b) + (p_aprime_then_b + int_b)|; zero up to rounding.
  double identity_residual = 0;
};

/// Throws InvariantViolation if the interference term has an imaginary residue above kTolerance.
OEPrediction oe_forward(const OEModel& model);

struct NoDoubleFallacyCheck {
  bool holds = true;
  double p_a = 0;
  double p_a_then_b = 0;
  double margin = 0;  // p_a_then_b - p_a, never above kTolerance for a valid model
};

/// True iff p(A then B) <= p(A) + kTolerance. Holds for every valid model.
NoDoubleFallacyCheck oe_no_double_fallacy_check(const OEPrediction& prediction);

enum class FitStatus { feasible, infeasible };

struct OEFitResult {
  FitStatus status = FitStatus::feasible;
  std::optional<OEModel> model;
  OEPrediction prediction;
  double residual = 0;        // max |forward - target| over the three targets
  Eigen::Index dim = 0;       // dimension of the returned model
  bool dimension_bumped = false;
  std::string verdict;        // explanation when infeasible
};

/// Finds (|S>, M_A, M_B) reproducing p(A), p(B), p(A then B).
/// p_a_then_b > p_a is rejected up front as structurally infeasible. Otherwise a
/// seeded least-squares search runs over projector ranks at `dim`, then dim + 1.
/// Throws UsageError for targets outside [0,1] or dim < 2, FitFailure when no witness is found.
OEFitResult oe_fit(double p_a, double p_b, double p_a_then_b, Eigen::Index dim, std::mt19937_64& rng);

/// Emergence model: orthogonal concept states |A>, |B>, question projector M.
/// The conjunction state is (|A> + |B>)/sqrt(2).
struct EEModel {
  StateVector state_a;
  StateVector state_b;
  Projector m;

  /// Throws InvariantViolation when dimensions differ or <A|B> != 0 within kTolerance.
  static EEModel make(StateVector state_a, StateVector state_b, Projector m);
  StateVector combined() const;
};

struct EEPrediction {
  double p_a = 0, p_b = 0, p_a_and_b = 0;
  double interference = 0;  // Re<A|M|B>
  bool fallacy_wrt_a = false;  // p_a_and_b strictly above p_a
  bool fallacy_wrt_b = false;
};

EEPrediction ee_forward(const EEModel& model);

/// Largest |Re<A|M|B>| any valid model with these p_a, p_b can produce:
/// min(sqrt(p_a p_b), sqrt((1-p_a)(1-p_b))).
double ee_feasible_interference_bound(double p_a, double p_b);

struct EEFitResult {
  FitStatus status = FitStatus::feasible;
  double required_interference = 0;  // p_a_and_b - (p_a + p_b)/2
  double bound = 0;
  std::optional<EEModel> model;
  EEPrediction prediction;
  double residual = 0;
  Eigen::Index dim = 0;
  std::string verdict;
};

/// Throws UsageError for targets outside [0,1] or dim < 3, FitFailure if the
/// constructed witness does not verify.
EEFitResult ee_fit(double p_a, double p_b, double p_a_and_b, Eigen::Index dim, std::mt19937_64& rng);

struct FallacyClassification {
  FallacyClass classification = FallacyClass::none;
  double margin_a = 0;  // t + (p_b - p_a)/2 = p(A and B) - p(A)
  double margin_b = 0;  // t - (p_b - p_a)/2 = p(A and B) - p(B)
};

/// Classifies with ">=" (equality within kFallacyTieBand counts as a fallacy).
FallacyClassification ee_fallacy_classification(double p_a, double p_b, double interference);

// Random instances for property suites.
StateVector random_state(Eigen::Index dim, std::mt19937_64& rng);
Projector random_projector(Eigen::Index dim, Eigen::Index rank, std::mt19937_64& rng);
CMatrix random_unitary(Eigen::Index dim, std::mt19937_64& rng);
/// Dimension uniform in [min_dim, max_dim], projector ranks uniform in [0, dim].
OEModel random_oe_model(std::mt19937_64& rng, Eigen::Index min_dim = 2, Eigen::Index max_dim = 6);
EEModel random_ee_model(std::mt19937_64& rng, Eigen::Index min_dim = 2, Eigen::Index max_dim = 6);

// JSON: amplitudes as [re, im] pairs, matrices as row-major arrays of rows.
nlohmann::json to_json(const OEModel& model);
nlohmann::json to_json(const EEModel& model);
OEModel oe_model_from_json(const nlohmann::json& j);
EEModel ee_model_from_json(const nlohmann::json& j);

}  // namespace wwwstory::quantum
