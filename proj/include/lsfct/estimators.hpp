#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "lsfct/regression.hpp"

namespace lsfct {

/// Norm of F used by the state-dependent forgetting rate.
enum class MatrixNorm { spectral, frobenius };

std::string_view to_string(MatrixNorm norm);
MatrixNorm parse_matrix_norm(std::string_view text);

/// Tuning gains of the LS estimator with forgetting factor.
/// Construction enforces gamma_F, f0, chi0 > 0 and k >= 1/f0.
class LsGains {
 public:
  LsGains(double gamma_F, double f0, double chi0, double k, MatrixNorm norm = MatrixNorm::spectral);

  double gamma_F() const { return gamma_F_; }
  double f0() const { return f0_; }
  double chi0() const { return chi0_; }
  double k() const { return k_; }
  MatrixNorm norm() const { return norm_; }

 private:
  double gamma_F_;
  double f0_;
  double chi0_;
  double k_;
  MatrixNorm norm_;
};

struct LsState {
  ParamVector theta_hat;
  Matrix F;
  double z = 1.0;
  double t = 0.0;

  /// theta_hat(0) = theta0, F(0) = I / f0, z(0) = 1.
  static LsState initial(const ParamVector& theta0, double f0);

  Eigen::Index dimension() const { return theta_hat.size(); }
};

struct LsDerivative {
  Vector dtheta_hat;
  Matrix dF;
  double dz = 0.0;
};

/// chi = chi0 (1 - ||F|| / k).
double forgetting_rate(const Matrix& F, const LsGains& gains);

/// LS with forgetting factor:
///   dtheta_hat = gamma_F F phi (y - phi^T theta_hat)
///   dF         = -gamma_F F phi phi^T F + chi F
///   dz         = -chi z
LsDerivative ls_ff_derivative(const LsState& state, const LsGains& gains,
                              const RegressorSample& sample);

/// Unnormalized LS without forgetting (chi = 0, gamma_F = 1). dz is always zero.
LsDerivative ls_standard_derivative(const LsState& state, const RegressorSample& sample);

/// dtheta_hat = gamma phi (y - phi^T theta_hat).
Vector gradient_derivative(const ParamVector& theta_hat, double gamma, const RegressorSample& sample);

/// Euclidean norm of theta_hat - theta_true.
double parameter_error(const ParamVector& theta_hat, const ParamVector& theta_true);

inline constexpr double kDefaultDeltaFct = 0.001;

struct FctResult {
  std::optional<ParamVector> value;  // present iff determinant >= threshold
  double determinant = 0.0;
  double threshold = kDefaultDeltaFct;
};

/// Algebraic reconstruction of theta from the LS-FF state:
///   M = I - z f0 F,   theta_FCT = M^{-1} (theta_hat - z f0 F theta0)
/// gated on det(M) >= delta_fct. Solved by partial-pivot LU, never by inversion.
FctResult fct_reconstruct(const LsState& state, const LsGains& gains, const ParamVector& theta0,
                          double delta_fct);

/// Follows fct_reconstruct along a trajectory. After the first valid instant it
/// keeps publishing the reconstruction even if det(M) dips below the gate; each
/// such dip is counted as a diagnostic. Also keeps the value latched at the first
/// valid instant.
class FctTracker {
 public:
  FctTracker(LsGains gains, ParamVector theta0, double delta_fct = kDefaultDeltaFct);

  /// Reconstruction published for this state, if any.
  std::optional<ParamVector> observe(const LsState& state);

  double last_determinant() const { return last_det_; }
  std::optional<double> first_valid_time() const { return first_valid_time_; }
  const std::optional<ParamVector>& latched() const { return latched_; }
  std::size_t determinant_dips() const { return dips_; }
  double delta_fct() const { return delta_fct_; }

 private:
  LsGains gains_;
  ParamVector theta0_;
  double delta_fct_;
  double last_det_ = 0.0;
  std::optional<double> first_valid_time_;
  std::optional<ParamVector> latched_;
  std::size_t dips_ = 0;
};

// ---------------------------------------------------------------------------
// Pluggable estimator interface. Every estimator maps (packed state, sample) to
// the packed state derivative, so the integrator drives them uniformly.

inline constexpr double kMinCovarianceEigenvalue = 1e-12;

/// Number of entries in the upper triangle of a q x q matrix.
constexpr std::size_t triangle_size(std::size_t q) { return q * (q + 1) / 2; }

/// Row-major upper triangle of a symmetric matrix.
void pack_symmetric(const Matrix& m, std::span<double> out);
Matrix unpack_symmetric(std::span<const double> packed, Eigen::Index q);

class Estimator {
 public:
  virtual ~Estimator() = default;

  virtual std::string name() const = 0;
  virtual std::size_t state_size() const = 0;
  virtual Eigen::Index dimension() const = 0;

  virtual void initial_state(std::span<double> out) const = 0;
  virtual void derivative(std::span<const double> state, const RegressorSample& sample,
                          std::span<double> out) const = 0;
  virtual ParamVector estimate(std::span<const double> state) const = 0;

  /// Called after every integration step; throws NumericalIntegrityError when
  /// the state left its admissible set.
  virtual void check_state(std::span<const double> state, double t) const;
};

/// Packed layout: [theta_hat (q), upper(F) (q(q+1)/2), z].
class LsForgettingEstimator final : public Estimator {
 public:
  LsForgettingEstimator(LsGains gains, ParamVector theta0);

  std::string name() const override { return "ls_ff"; }
  std::size_t state_size() const override;
  Eigen::Index dimension() const override { return theta0_.size(); }
  void initial_state(std::span<double> out) const override;
  void derivative(std::span<const double> state, const RegressorSample& sample,
                  std::span<double> out) const override;
  ParamVector estimate(std::span<const double> state) const override;
  void check_state(std::span<const double> state, double t) const override;

  LsState unpack(std::span<const double> state, double t = 0.0) const;
  const LsGains& gains() const { return gains_; }
  const ParamVector& theta0() const { return theta0_; }

 private:
  LsGains gains_;
  ParamVector theta0_;
};

/// Packed layout: [theta_hat (q), upper(F) (q(q+1)/2)]. F(0) = I / f0.
class LsStandardEstimator final : public Estimator {
 public:
  LsStandardEstimator(double f0, ParamVector theta0);

  std::string name() const override { return "ls_standard"; }
  std::size_t state_size() const override;
  Eigen::Index dimension() const override { return theta0_.size(); }
  void initial_state(std::span<double> out) const override;
  void derivative(std::span<const double> state, const RegressorSample& sample,
                  std::span<double> out) const override;
  ParamVector estimate(std::span<const double> state) const override;
  void check_state(std::span<const double> state, double t) const override;

  LsState unpack(std::span<const double> state, double t = 0.0) const;

 private:
  double f0_;
  ParamVector theta0_;
};

class GradientEstimator final : public Estimator {
 public:
  GradientEstimator(double gamma, ParamVector theta0);

  std::string name() const override { return "gradient"; }
  std::size_t state_size() const override { return static_cast<std::size_t>(theta0_.size()); }
  Eigen::Index dimension() const override { return theta0_.size(); }
  void initial_state(std::span<double> out) const override;
  void derivative(std::span<const double> state, const RegressorSample& sample,
                  std::span<double> out) const override;
  ParamVector estimate(std::span<const double> state) const override;

 private:
  double gamma_;
  ParamVector theta0_;
};

}  // namespace lsfct
