#include "wwwstory/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>
#include <vector>

#include "wwwstory/errors.hpp"

namespace wwwstory::quantum {

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double norm_squared(const CVector& v) { return v.squaredNorm(); }

double real_checked(Complex z, const char* what) {
  if (std::abs(z.imag()) > kTolerance) {
    throw InvariantViolation(std::string(what) + " has imaginary residue " + fmt_num(z.imag()));
  }
  return z.real();
}

// Accepts the rounding band forward predictions live in and snaps it back to [0,1].
void require_unit_interval(double& p, const char* name) {
  if (!(p >= -kTolerance && p <= 1.0 + kTolerance)) {
    throw UsageError(std::string(name) + " must lie in [0,1], got " + fmt_num(p));
  }
  p = std::clamp(p, 0.0, 1.0);
}

CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// States and projectors

StateVector StateVector::from_amplitudes(CVector amplitudes) {
  if (amplitudes.size() == 0) throw InvariantViolation("state vector must have at least one amplitude");
  const double n = amplitudes.norm();
  if (std::abs(n - 1.0) > kTolerance) throw InvariantViolation("state vector norm is " + fmt_num(n) + ", expected 1");
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::normalized(const CVector& v) {
  const double n = v.norm();
  if (!(n > 0)) throw InvariantViolation("cannot normalize a zero vector");
  return StateVector(v / n);
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return StateVector(std::move(v));
}

Projector Projector::from_matrix(CMatrix matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) throw InvariantViolation("projector must be square");
  const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kTolerance) throw InvariantViolation("matrix is not Hermitian (max |P - P^+| = " + fmt_num(herm) + ")");
  const double idem = (matrix * matrix - matrix).cwiseAbs().maxCoeff();
  if (idem > kTolerance) throw InvariantViolation("matrix is not idempotent (max |P^2 - P| = " + fmt_num(idem) + ")");
  return Projector(std::move(matrix));
}

Projector Projector::onto(const CMatrix& columns) {
  const Eigen::Index dim = columns.rows();
  if (columns.cols() == 0) return zero(dim);
  Eigen::ColPivHouseholderQR<CMatrix> qr(columns);
  qr.setThreshold(1e-12);
  const Eigen::Index r = qr.rank();
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, r);
  CMatrix p = q * q.adjoint();
  // Symmetrize away rounding so validation sees an exactly Hermitian matrix.
  p = (0.5 * (p + p.adjoint())).eval();
  return from_matrix(std::move(p));
}

Projector Projector::identity(Eigen::Index dim) { return Projector(CMatrix::Identity(dim, dim)); }

Projector Projector::zero(Eigen::Index dim) { return Projector(CMatrix::Zero(dim, dim)); }

Projector Projector::complement() const {
  return Projector(CMatrix::Identity(dim(), dim()) - matrix_);
}

Eigen::Index Projector::rank() const { return static_cast<Eigen::Index>(std::lround(matrix_.trace().real())); }

// ---------------------------------------------------------------------------
// Sequential (order-effect) model

OEModel OEModel::make(StateVector state, Projector m_a, Projector m_b) {
  if (state.dim() != m_a.dim() || state.dim() != m_b.dim()) {
    throw InvariantViolation("state and projector dimensions disagree");
  }
  return OEModel{std::move(state), std::move(m_a), std::move(m_b)};
}

OEPrediction oe_forward(const OEModel& model) {
  const CVector& s = model.state.amplitudes();
  const CMatrix& ma = model.m_a.matrix();
  const CMatrix& mb = model.m_b.matrix();
  const CMatrix ma_c = model.m_a.complement().matrix();
  const CMatrix mb_c = model.m_b.complement().matrix();

  const CVector a_s = ma * s;
  const CVector b_s = mb * s;
  const CVector ac_s = ma_c * s;

  OEPrediction p;
  p.p_a = norm_squared(a_s);
  p.p_b = norm_squared(b_s);
  p.p_a_then_b = norm_squared(mb * a_s);
  p.p_b_then_a = norm_squared(ma * b_s);
  p.p_aprime_then_b = norm_squared(mb * ac_s);
  p.p_a_then_bprime = norm_squared(mb_c * a_s);
  const Complex interference = s.dot(ma * (mb * ac_s)) + s.dot(ma_c * (mb * a_s));
  p.int_b = real_checked(interference, "Int_B");
  p.identity_residual = std::abs((p.p_a_then_b - p.p_b) + (p.p_aprime_then_b + p.int_b));
  return p;
}

NoDoubleFallacyCheck oe_no_double_fallacy_check(const OEPrediction& prediction) {
  NoDoubleFallacyCheck check;
  check.p_a = prediction.p_a;
  check.p_a_then_b = prediction.p_a_then_b;
  check.margin = prediction.p_a_then_b - prediction.p_a;
  check.holds = check.margin <= kTolerance;
  return check;
}

namespace {

// Least-squares residuals of the OE targets over a free parameterization:
// the state is x_s/|x_s|, each projector is V (V^+ V)^-1 V^+ for a free d x rank block V.
struct OEResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  Eigen::Index dim, rank_a, rank_b;
  double target_a, target_b, target_ab;

  int inputs() const { return static_cast<int>(2 * dim * (1 + rank_a + rank_b)); }
  // MINPACK wants at least as many residuals as parameters; the extras stay zero.
  int values() const { return std::max(3, inputs()); }

  CMatrix block(const Eigen::VectorXd& x, Eigen::Index offset, Eigen::Index cols) const {
    CMatrix m(dim, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        const Eigen::Index k = offset + 2 * (j * dim + i);
        m(i, j) = Complex(x(k), x(k + 1));
      }
    }
    return m;
  }

  static CMatrix projector_from(const CMatrix& v, Eigen::Index dim) {
    if (v.cols() == 0) return CMatrix::Zero(dim, dim);
    if (v.cols() == dim) return CMatrix::Identity(dim, dim);
    const CMatrix gram = v.adjoint() * v;
    return v * gram.ldlt().solve(v.adjoint());
  }

  void decode(const Eigen::VectorXd& x, CVector& s, CMatrix& ma, CMatrix& mb) const {
    s = block(x, 0, 1).col(0);
    const double n = s.norm();
    if (n > 0) s /= n;
    ma = projector_from(block(x, 2 * dim, rank_a), dim);
    mb = projector_from(block(x, 2 * dim * (1 + rank_a), rank_b), dim);
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    CVector s;
    CMatrix ma, mb;
    decode(x, s, ma, mb);
    const CVector a_s = ma * s;
    f.setZero(values());
    f(0) = a_s.squaredNorm() - target_a;
    f(1) = (mb * s).squaredNorm() - target_b;
    f(2) = (mb * a_s).squaredNorm() - target_ab;
    for (Eigen::Index i = 0; i < 3; ++i) {
      if (!std::isfinite(f(i))) f(i) = 1e3;
    }
    return 0;
  }
};

std::vector<Eigen::Index> candidate_ranks(double p, Eigen::Index dim) {
  std::vector<Eigen::Index> ranks;
  if (p == 0.0) ranks.push_back(0);
  if (p == 1.0) ranks.push_back(dim);
  for (Eigen::Index r = 1; r < dim; ++r) ranks.push_back(r);
  return ranks;
}

double max_target_error(const OEPrediction& p, double ta, double tb, double tab) {
  return std::max({std::abs(p.p_a - ta), std::abs(p.p_b - tb), std::abs(p.p_a_then_b - tab)});
}

struct OEAttempt {
  std::optional<OEModel> model;
  double residual = std::numeric_limits<double>::infinity();
};

OEAttempt oe_search(double ta, double tb, double tab, Eigen::Index dim, std::mt19937_64& rng) {
  constexpr int kRestarts = 12;
  OEAttempt best;
  std::normal_distribution<double> normal;
  for (auto ra : candidate_ranks(ta, dim)) {
    for (auto rb : candidate_ranks(tb, dim)) {
      OEResidual functor{dim, ra, rb, ta, tb, tab};
      for (int restart = 0; restart < kRestarts; ++restart) {
        Eigen::VectorXd x(functor.inputs());
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
        Eigen::NumericalDiff<OEResidual> diff(functor);
        Eigen::LevenbergMarquardt<Eigen::NumericalDiff<OEResidual>> lm(diff);
        lm.parameters.maxfev = 4000;
        lm.parameters.xtol = 1e-15;
        lm.parameters.ftol = 1e-15;
        lm.minimize(x);

        CVector s;
        CMatrix ma, mb;
        functor.decode(x, s, ma, mb);
        // Rebuild clean projectors from the column spaces before verifying.
        try {
          auto model = OEModel::make(StateVector::normalized(s),
                                     ra == 0 ? Projector::zero(dim) : Projector::onto(functor.block(x, 2 * dim, ra)),
                                     rb == 0 ? Projector::zero(dim)
                                             : Projector::onto(functor.block(x, 2 * dim * (1 + ra), rb)));
          const double err = max_target_error(oe_forward(model), ta, tb, tab);
          if (err < best.residual) {
            best.residual = err;
            best.model = std::move(model);
          }
        } catch (const InvariantViolation&) {
          continue;  // degenerate parameter block; try another start
        }
        if (best.residual <= 1e-10) return best;
      }
    }
  }
  return best;
}

}  // namespace

OEFitResult oe_fit(double p_a, double p_b, double p_a_then_b, Eigen::Index dim, std::mt19937_64& rng) {
  require_unit_interval(p_a, "p_a");
  require_unit_interval(p_b, "p_b");
  require_unit_interval(p_a_then_b, "p_a_then_b");
  if (dim < 2) throw UsageError("oe_fit needs dim >= 2");

  OEFitResult result;
  if (p_a_then_b > p_a + kFallacyTieBand) {
    result.status = FitStatus::infeasible;
    result.verdict = "structurally infeasible: p(A then B) = " + fmt_num(p_a_then_b) + " exceeds p(A) = " +
                     fmt_num(p_a) +
                     ", but p(A) = p(A then B) + p(A then B') for every sequential-projector model, so no "
                     "double conjunction fallacy can be represented";
    return result;
  }

  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index d : {dim, dim + 1}) {
    auto attempt = oe_search(p_a, p_b, p_a_then_b, d, rng);
    best = std::min(best, attempt.residual);
    if (attempt.model && attempt.residual <= kFitTolerance) {
      result.model = std::move(attempt.model);
      result.prediction = oe_forward(*result.model);
      result.residual = attempt.residual;
      result.dim = d;
      result.dimension_bumped = d != dim;
      return result;
    }
  }
  throw FitFailure("oe_fit did not converge at dim " + std::to_string(dim) + " or " + std::to_string(dim + 1) +
                       "; best residual " + fmt_num(best),
                   best);
}

// ---------------------------------------------------------------------------
// Superposition (emergence) model

EEModel EEModel::make(StateVector state_a, StateVector state_b, Projector m) {
  if (state_a.dim() != state_b.dim() || state_a.dim() != m.dim()) {
    throw InvariantViolation("state and projector dimensions disagree");
  }
  const Complex overlap = state_a.amplitudes().dot(state_b.amplitudes());
  if (std::abs(overlap) > kTolerance) {
    throw InvariantViolation("component states must be orthogonal, |<A|B>| = " + fmt_num(std::abs(overlap)));
  }
  return EEModel{std::move(state_a), std::move(state_b), std::move(m)};
}

StateVector EEModel::combined() const {
  return StateVector::from_amplitudes((state_a.amplitudes() + state_b.amplitudes()) / std::sqrt(2.0));
}

EEPrediction ee_forward(const EEModel& model) {
  const CVector& a = model.state_a.amplitudes();
  const CVector& b = model.state_b.amplitudes();
  const CMatrix& m = model.m.matrix();
  const CVector ab = model.combined().amplitudes();

  EEPrediction p;
  p.p_a = real_checked(a.dot(m * a), "<A|M|A>");
  p.p_b = real_checked(b.dot(m * b), "<B|M|B>");
  p.p_a_and_b = real_checked(ab.dot(m * ab), "<A and B|M|A and B>");
  p.interference = a.dot(m * b).real();
  p.fallacy_wrt_a = p.p_a_and_b - p.p_a > kFallacyTieBand;
  p.fallacy_wrt_b = p.p_a_and_b - p.p_b > kFallacyTieBand;
  return p;
}

double ee_feasible_interference_bound(double p_a, double p_b) {
  const double inside = std::max(0.0, p_a * p_b);
  const double outside = std::max(0.0, (1.0 - p_a) * (1.0 - p_b));
  return std::min(std::sqrt(inside), std::sqrt(outside));
}

namespace {

// Witness in C^3 with a rank-1 projector |e0><e0|, valid when q_a + q_b <= 1:
//   A = sqrt(q_a) e0 + sqrt(1-q_a) e1
//   B = sqrt(q_b) e^{i phi} e0 + b1 e1 + b2 e2,  b1 chosen so <A|B> = 0
// giving <A|P|B> = sqrt(q_a q_b) e^{i phi}, so Re<A|P|B> sweeps [-sqrt(q_a q_b), sqrt(q_a q_b)].
void rank_one_witness(double q_a, double q_b, double target, CVector& a, CVector& b) {
  const double scale = std::sqrt(q_a * q_b);
  const double cos_phi = scale > 0 ? std::clamp(target / scale, -1.0, 1.0) : 0.0;
  const Complex phase(cos_phi, std::sqrt(std::max(0.0, 1.0 - cos_phi * cos_phi)));
  a = CVector::Zero(3);
  b = CVector::Zero(3);
  if (q_a >= 1.0) {
    // q_b = 0 here, so B just needs to avoid e0 and be orthogonal to A = e0.
    a(0) = 1.0;
    b(2) = 1.0;
    return;
  }
  a(0) = std::sqrt(q_a);
  a(1) = std::sqrt(1.0 - q_a);
  const Complex b1 = -scale * phase / std::sqrt(1.0 - q_a);
  b(0) = std::sqrt(q_b) * phase;
  b(1) = b1;
  b(2) = std::sqrt(std::max(0.0, 1.0 - q_b - std::norm(b1)));
}

}  // namespace

EEFitResult ee_fit(double p_a, double p_b, double p_a_and_b, Eigen::Index dim, std::mt19937_64& rng) {
  require_unit_interval(p_a, "p_a");
  require_unit_interval(p_b, "p_b");
  require_unit_interval(p_a_and_b, "p_a_and_b");
  if (dim < 3) throw UsageError("ee_fit needs dim >= 3");

  EEFitResult result;
  result.required_interference = p_a_and_b - 0.5 * (p_a + p_b);
  result.bound = ee_feasible_interference_bound(p_a, p_b);
  if (std::abs(result.required_interference) > result.bound + kFallacyTieBand) {
    result.status = FitStatus::infeasible;
    result.verdict = "infeasible: required interference t = " + fmt_num(result.required_interference) +
                     " exceeds the bound " + fmt_num(result.bound) +
                     " = min(sqrt(p_a p_b), sqrt((1-p_a)(1-p_b))) reachable by any model";
    return result;
  }

  // Work with whichever of M, 1-M has the smaller total weight on |A>, |B>.
  const bool use_complement = p_a + p_b > 1.0;
  const double q_a = use_complement ? 1.0 - p_a : p_a;
  const double q_b = use_complement ? 1.0 - p_b : p_b;
  const double target = use_complement ? -result.required_interference : result.required_interference;
  CVector a3, b3;
  rank_one_witness(q_a, q_b, target, a3, b3);

  CVector a = CVector::Zero(dim), b = CVector::Zero(dim);
  a.head(3) = a3;
  b.head(3) = b3;
  CMatrix m = CMatrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  if (use_complement) m = CMatrix::Identity(dim, dim) - m;

  // Rotate into a generic basis so the witness does not sit on coordinate axes.
  const CMatrix u = random_unitary(dim, rng);
  a = u * a;
  b = u * b;
  m = u * m * u.adjoint();
  m = (0.5 * (m + m.adjoint())).eval();

  auto model = EEModel::make(StateVector::normalized(a), StateVector::normalized(b), Projector::from_matrix(m));
  result.prediction = ee_forward(model);
  result.residual = std::max({std::abs(result.prediction.p_a - p_a), std::abs(result.prediction.p_b - p_b),
                              std::abs(result.prediction.p_a_and_b - p_a_and_b)});
  result.dim = dim;
  if (result.residual > kFitTolerance) {
    throw FitFailure("ee_fit witness failed verification; residual " + fmt_num(result.residual), result.residual);
  }
  result.model = std::move(model);
  return result;
}

FallacyClassification ee_fallacy_classification(double p_a, double p_b, double interference) {
  FallacyClassification out;
  out.margin_a = interference + 0.5 * (p_b - p_a);
  out.margin_b = interference - 0.5 * (p_b - p_a);
  out.classification = classify_fallacy(out.margin_a >= -kFallacyTieBand, out.margin_b >= -kFallacyTieBand);
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

StateVector random_state(Eigen::Index dim, std::mt19937_64& rng) {
  return StateVector::normalized(gaussian_matrix(dim, 1, rng).col(0));
}

CMatrix random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(dim, dim, rng));
  return qr.householderQ() * CMatrix::Identity(dim, dim);
}

Projector random_projector(Eigen::Index dim, Eigen::Index rank, std::mt19937_64& rng) {
  if (rank <= 0) return Projector::zero(dim);
  if (rank >= dim) return Projector::identity(dim);
  return Projector::onto(gaussian_matrix(dim, rank, rng));
}

OEModel random_oe_model(std::mt19937_64& rng, Eigen::Index min_dim, Eigen::Index max_dim) {
  const auto dim = std::uniform_int_distribution<Eigen::Index>(min_dim, max_dim)(rng);
  std::uniform_int_distribution<Eigen::Index> rank(0, dim);
  auto state = random_state(dim, rng);
  auto m_a = random_projector(dim, rank(rng), rng);
  auto m_b = random_projector(dim, rank(rng), rng);
  return OEModel::make(std::move(state), std::move(m_a), std::move(m_b));
}

EEModel random_ee_model(std::mt19937_64& rng, Eigen::Index min_dim, Eigen::Index max_dim) {
  const auto dim = std::uniform_int_distribution<Eigen::Index>(std::max<Eigen::Index>(min_dim, 2), max_dim)(rng);
  const CMatrix u = random_unitary(dim, rng);
  auto m = random_projector(dim, std::uniform_int_distribution<Eigen::Index>(0, dim)(rng), rng);
  return EEModel::make(StateVector::normalized(u.col(0)), StateVector::normalized(u.col(1)), std::move(m));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json vector_json(const CVector& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

nlohmann::json matrix_json(const CMatrix& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

CVector vector_from(const nlohmann::json& j) {
  if (!j.is_array()) throw UsageError("expected an array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& z = j[i];
    if (!z.is_array() || z.size() != 2) throw UsageError("complex entries must be [re, im] pairs");
    v(static_cast<Eigen::Index>(i)) = Complex(z[0].get<double>(), z[1].get<double>());
  }
  return v;
}

CMatrix matrix_from(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    CVector row = vector_from(j[static_cast<std::size_t>(i)]);
    if (row.size() != n) throw UsageError("matrix must be square");
    m.row(i) = row.transpose();
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const OEModel& model) {
  return {{"kind", "oe"},
          {"dim", model.state.dim()},
          {"state", vector_json(model.state.amplitudes())},
          {"m_a", matrix_json(model.m_a.matrix())},
          {"m_b", matrix_json(model.m_b.matrix())}};
}

nlohmann::json to_json(const EEModel& model) {
  return {{"kind", "ee"},
          {"dim", model.state_a.dim()},
          {"state_a", vector_json(model.state_a.amplitudes())},
          {"state_b", vector_json(model.state_b.amplitudes())},
          {"m", matrix_json(model.m.matrix())}};
}

OEModel oe_model_from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "oe") throw UsageError("not an OE model document");
  return OEModel::make(StateVector::from_amplitudes(vector_from(j.at("state"))),
                       Projector::from_matrix(matrix_from(j.at("m_a"))),
                       Projector::from_matrix(matrix_from(j.at("m_b"))));
}

EEModel ee_model_from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "ee") throw UsageError("not an EE model document");
  return EEModel::make(StateVector::from_amplitudes(vector_from(j.at("state_a"))),
                       StateVector::from_amplitudes(vector_from(j.at("state_b"))),
                       Projector::from_matrix(matrix_from(j.at("m"))));
}

}  // namespace wwwstory::quantum
