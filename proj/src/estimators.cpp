#include "lsfct/estimators.hpp"

#include <cmath>
#include <sstream>

#include "lsfct/errors.hpp"

namespace lsfct {

namespace {

void require_dimension(Eigen::Index expected, Eigen::Index actual, const char* what) {
  if (expected != actual) {
    std::ostringstream os;
    os << what << " has dimension " << actual << ", expected " << expected;
    throw ConfigError(os.str());
  }
}

void require_finite_state(const LsState& state) {
  if (!state.theta_hat.allFinite() || !state.F.allFinite() || !std::isfinite(state.z)) {
    std::ostringstream os;
    os << "non-finite estimator state at t=" << state.t;
    throw InputDataError(os.str());
  }
}

void check_sample(const LsState& state, const RegressorSample& sample) {
  require_dimension(state.dimension(), sample.dimension(), "regressor");
  require_dimension(state.dimension(), state.F.rows(), "covariance");
  validate(sample);
  require_finite_state(state);
}

Eigen::Map<const Vector> head_of(std::span<const double> state, Eigen::Index q) {
  return Eigen::Map<const Vector>(state.data(), q);
}

void check_covariance(const Matrix& F, double t, const std::string& who) {
  if (!F.allFinite()) {
    throw NumericalIntegrityError(who + ": covariance became non-finite", t);
  }
  const double lowest = min_eigenvalue(F);
  if (!(lowest >= kMinCovarianceEigenvalue)) {
    std::ostringstream os;
    os << who << ": covariance lost positive definiteness (min eigenvalue " << lowest
       << ") at t=" << t << "; reduce the integration step";
    throw NumericalIntegrityError(os.str(), t);
  }
}

}  // namespace

std::string_view to_string(MatrixNorm norm) {
  return norm == MatrixNorm::spectral ? "spectral" : "frobenius";
}

MatrixNorm parse_matrix_norm(std::string_view text) {
  if (text == "spectral") return MatrixNorm::spectral;
  if (text == "frobenius") return MatrixNorm::frobenius;
  throw ConfigError("unknown matrix norm '" + std::string(text) + "' (expected spectral or frobenius)");
}

LsGains::LsGains(double gamma_F, double f0, double chi0, double k, MatrixNorm norm)
    : gamma_F_(gamma_F), f0_(f0), chi0_(chi0), k_(k), norm_(norm) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(gamma_F)) throw ConfigError("gains.gamma_F must be positive");
  if (!positive(f0)) throw ConfigError("gains.f0 must be positive");
  if (!positive(chi0)) throw ConfigError("gains.chi0 must be positive");
  if (!std::isfinite(k) || k < 1.0 / f0) {
    std::ostringstream os;
    os << "gain constraint violated: gains.k = " << k << " must satisfy k >= 1/f0 = " << 1.0 / f0;
    throw ConfigError(os.str());
  }
}

LsState LsState::initial(const ParamVector& theta0, double f0) {
  const auto q = theta0.size();
  LsState s;
  s.theta_hat = theta0;
  s.F = Matrix::Identity(q, q) / f0;
  s.z = 1.0;
  s.t = 0.0;
  return s;
}

double forgetting_rate(const Matrix& F, const LsGains& gains) {
  double norm = 0.0;
  if (gains.norm() == MatrixNorm::spectral) {
    norm = std::max(std::abs(max_eigenvalue(F)), std::abs(min_eigenvalue(F)));
  } else {
    norm = F.norm();
  }
  return gains.chi0() * (1.0 - norm / gains.k());
}

LsDerivative ls_ff_derivative(const LsState& state, const LsGains& gains,
                              const RegressorSample& sample) {
  check_sample(state, sample);
  const Vector& phi = sample.phi;
  const double error = sample.y - phi.dot(state.theta_hat);
  const Vector Fphi = state.F * phi;
  const double chi = forgetting_rate(state.F, gains);

  LsDerivative d;
  d.dtheta_hat = gains.gamma_F() * error * Fphi;
  d.dF = -gains.gamma_F() * (Fphi * Fphi.transpose()) + chi * state.F;
  d.dz = -chi * state.z;
  return d;
}

LsDerivative ls_standard_derivative(const LsState& state, const RegressorSample& sample) {
  check_sample(state, sample);
  const Vector& phi = sample.phi;
  const double error = sample.y - phi.dot(state.theta_hat);
  const Vector Fphi = state.F * phi;

  LsDerivative d;
  d.dtheta_hat = error * Fphi;
  d.dF = -(Fphi * Fphi.transpose());
  d.dz = 0.0;
  return d;
}

Vector gradient_derivative(const ParamVector& theta_hat, double gamma, const RegressorSample& sample) {
  require_dimension(theta_hat.size(), sample.dimension(), "regressor");
  validate(sample);
  if (!theta_hat.allFinite()) {
    throw InputDataError("non-finite gradient estimate");
  }
  if (!(gamma > 0.0)) {
    throw ConfigError("gradient gain must be positive");
  }
  const double error = sample.y - sample.phi.dot(theta_hat);
  return gamma * error * sample.phi;
}

double parameter_error(const ParamVector& theta_hat, const ParamVector& theta_true) {
  require_dimension(theta_true.size(), theta_hat.size(), "estimate");
  return (theta_hat - theta_true).norm();
}

FctResult fct_reconstruct(const LsState& state, const LsGains& gains, const ParamVector& theta0,
                          double delta_fct) {
  if (!(delta_fct > 0.0)) {
    throw ConfigError("delta_fct must be positive");
  }
  require_dimension(state.dimension(), theta0.size(), "theta0");
  require_finite_state(state);

  const auto q = state.dimension();
  const Matrix scaled = (state.z * gains.f0()) * state.F;
  const Matrix M = Matrix::Identity(q, q) - scaled;
  const Eigen::PartialPivLU<Matrix> lu(M);

  FctResult result;
  result.determinant = lu.determinant();
  result.threshold = delta_fct;
  if (!(result.determinant >= delta_fct)) {
    return result;
  }
  const Vector rhs = state.theta_hat - scaled * theta0;
  Vector value = lu.solve(rhs);
  if (!value.allFinite()) {
    std::ostringstream os;
    os << "FCT solve failed at t=" << state.t << " with det(M)=" << result.determinant
       << ", reciprocal condition estimate " << lu.rcond();
    throw NumericalIntegrityError(os.str(), state.t);
  }
  result.value = std::move(value);
  return result;
}

FctTracker::FctTracker(LsGains gains, ParamVector theta0, double delta_fct)
    : gains_(gains), theta0_(std::move(theta0)), delta_fct_(delta_fct) {
  if (!(delta_fct > 0.0)) {
    throw ConfigError("delta_fct must be positive");
  }
}

std::optional<ParamVector> FctTracker::observe(const LsState& state) {
  FctResult r = fct_reconstruct(state, gains_, theta0_, delta_fct_);
  last_det_ = r.determinant;
  if (r.value) {
    if (!first_valid_time_) {
      first_valid_time_ = state.t;
      latched_ = *r.value;
    }
    return r.value;
  }
  if (!first_valid_time_) {
    return std::nullopt;
  }
  // det(M) fell back under the gate after validity; cannot happen in exact
  // arithmetic, so count it and keep publishing.
  ++dips_;
  const auto q = state.dimension();
  const Matrix scaled = (state.z * gains_.f0()) * state.F;
  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(q, q) - scaled);
  Vector value = lu.solve(state.theta_hat - scaled * theta0_);
  if (!value.allFinite()) {
    std::ostringstream os;
    os << "FCT solve failed after det(M) dipped to " << r.determinant << " at t=" << state.t
       << ", reciprocal condition estimate " << lu.rcond();
    throw NumericalIntegrityError(os.str(), state.t);
  }
  return value;
}

void pack_symmetric(const Matrix& m, std::span<double> out) {
  const auto q = m.rows();
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = i; j < q; ++j) {
      out[n++] = m(i, j);
    }
  }
}

Matrix unpack_symmetric(std::span<const double> packed, Eigen::Index q) {
  Matrix m(q, q);
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = i; j < q; ++j) {
      m(i, j) = packed[n];
      m(j, i) = packed[n];
      ++n;
    }
  }
  return m;
}

void Estimator::check_state(std::span<const double> state, double t) const {
  for (double v : state) {
    if (!std::isfinite(v)) {
      throw NumericalIntegrityError(name() + ": state became non-finite", t);
    }
  }
}

// --- LS with forgetting factor ----------------------------------------------

LsForgettingEstimator::LsForgettingEstimator(LsGains gains, ParamVector theta0)
    : gains_(gains), theta0_(std::move(theta0)) {
  if (theta0_.size() < 1 || !theta0_.allFinite()) {
    throw ConfigError("ls_ff: initial estimate must be finite with dimension >= 1");
  }
}

std::size_t LsForgettingEstimator::state_size() const {
  const auto q = static_cast<std::size_t>(theta0_.size());
  return q + triangle_size(q) + 1;
}

void LsForgettingEstimator::initial_state(std::span<double> out) const {
  const LsState s = LsState::initial(theta0_, gains_.f0());
  const auto q = static_cast<std::size_t>(theta0_.size());
  Eigen::Map<Vector>(out.data(), theta0_.size()) = s.theta_hat;
  pack_symmetric(s.F, out.subspan(q, triangle_size(q)));
  out[q + triangle_size(q)] = s.z;
}

LsState LsForgettingEstimator::unpack(std::span<const double> state, double t) const {
  const auto q = static_cast<std::size_t>(theta0_.size());
  LsState s;
  s.theta_hat = head_of(state, theta0_.size());
  s.F = unpack_symmetric(state.subspan(q, triangle_size(q)), theta0_.size());
  s.z = state[q + triangle_size(q)];
  s.t = t;
  return s;
}

void LsForgettingEstimator::derivative(std::span<const double> state, const RegressorSample& sample,
                                       std::span<double> out) const {
  const LsDerivative d = ls_ff_derivative(unpack(state, sample.t), gains_, sample);
  const auto q = static_cast<std::size_t>(theta0_.size());
  Eigen::Map<Vector>(out.data(), theta0_.size()) = d.dtheta_hat;
  pack_symmetric(d.dF, out.subspan(q, triangle_size(q)));
  out[q + triangle_size(q)] = d.dz;
}

ParamVector LsForgettingEstimator::estimate(std::span<const double> state) const {
  return head_of(state, theta0_.size());
}

void LsForgettingEstimator::check_state(std::span<const double> state, double t) const {
  Estimator::check_state(state, t);
  const LsState s = unpack(state, t);
  check_covariance(s.F, t, name());
  if (!(s.z > 0.0)) {
    throw NumericalIntegrityError("ls_ff: forgetting state z left (0, inf)", t);
  }
}

// --- LS without forgetting --------------------------------------------------

LsStandardEstimator::LsStandardEstimator(double f0, ParamVector theta0)
    : f0_(f0), theta0_(std::move(theta0)) {
  if (!(f0 > 0.0) || !std::isfinite(f0)) {
    throw ConfigError("ls_standard: f0 must be positive");
  }
  if (theta0_.size() < 1 || !theta0_.allFinite()) {
    throw ConfigError("ls_standard: initial estimate must be finite with dimension >= 1");
  }
}

std::size_t LsStandardEstimator::state_size() const {
  const auto q = static_cast<std::size_t>(theta0_.size());
  return q + triangle_size(q);
}

void LsStandardEstimator::initial_state(std::span<double> out) const {
  const LsState s = LsState::initial(theta0_, f0_);
  const auto q = static_cast<std::size_t>(theta0_.size());
  Eigen::Map<Vector>(out.data(), theta0_.size()) = s.theta_hat;
  pack_symmetric(s.F, out.subspan(q, triangle_size(q)));
}

LsState LsStandardEstimator::unpack(std::span<const double> state, double t) const {
  const auto q = static_cast<std::size_t>(theta0_.size());
  LsState s;
  s.theta_hat = head_of(state, theta0_.size());
  s.F = unpack_symmetric(state.subspan(q, triangle_size(q)), theta0_.size());
  s.z = 1.0;
  s.t = t;
  return s;
}

void LsStandardEstimator::derivative(std::span<const double> state, const RegressorSample& sample,
                                     std::span<double> out) const {
  const LsDerivative d = ls_standard_derivative(unpack(state, sample.t), sample);
  const auto q = static_cast<std::size_t>(theta0_.size());
  Eigen::Map<Vector>(out.data(), theta0_.size()) = d.dtheta_hat;
  pack_symmetric(d.dF, out.subspan(q, triangle_size(q)));
}

ParamVector LsStandardEstimator::estimate(std::span<const double> state) const {
  return head_of(state, theta0_.size());
}

void LsStandardEstimator::check_state(std::span<const double> state, double t) const {
  Estimator::check_state(state, t);
  check_covariance(unpack(state, t).F, t, name());
}

// --- gradient ---------------------------------------------------------------

GradientEstimator::GradientEstimator(double gamma, ParamVector theta0)
    : gamma_(gamma), theta0_(std::move(theta0)) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gradient: gain must be positive");
  }
  if (theta0_.size() < 1 || !theta0_.allFinite()) {
    throw ConfigError("gradient: initial estimate must be finite with dimension >= 1");
  }
}

void GradientEstimator::initial_state(std::span<double> out) const {
  Eigen::Map<Vector>(out.data(), theta0_.size()) = theta0_;
}

void GradientEstimator::derivative(std::span<const double> state, const RegressorSample& sample,
                                   std::span<double> out) const {
  const Vector d = gradient_derivative(head_of(state, theta0_.size()), gamma_, sample);
  Eigen::Map<Vector>(out.data(), theta0_.size()) = d;
}

ParamVector GradientEstimator::estimate(std::span<const double> state) const {
  return head_of(state, theta0_.size());
}

}  // namespace lsfct
