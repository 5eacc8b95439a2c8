#pragma once

#include <Eigen/Dense>
#include <optional>

namespace lsfct {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameter vectors (true value, estimate, error, reconstruction) share one representation.
using ParamVector = Vector;

/// One evaluation of the linear regression y(t) = phi(t)^T theta.
struct RegressorSample {
  double t = 0.0;
  double y = 0.0;
  Vector phi;

  Eigen::Index dimension() const { return phi.size(); }
};

/// Throws InputDataError if t is negative or anything is non-finite.
void validate(const RegressorSample& sample);

inline constexpr double kDefaultRhoThreshold = 1e-3;
inline constexpr double kSymmetryTolerance = 1e-10;

/// Smallest eigenvalue of a symmetric matrix. The input is symmetrized before
/// evaluation; an entrywise asymmetry above kSymmetryTolerance is rejected with
/// NumericalIntegrityError.
double min_eigenvalue(const Matrix& m);

/// Largest eigenvalue, same contract as min_eigenvalue.
double max_eigenvalue(const Matrix& m);

/// Running excitation certificate: Gram integral of phi phi^T, its smallest
/// eigenvalue, and the first time the latter reached the threshold.
struct ExcitationRecord {
  Matrix gram;
  double min_eig = 0.0;
  double rho_threshold = kDefaultRhoThreshold;
  std::optional<double> t_c;

  // Previous sample, needed by the trapezoidal rule.
  std::optional<Vector> last_phi;
  double last_t = 0.0;

  explicit ExcitationRecord(Eigen::Index q, double rho = kDefaultRhoThreshold);

  Eigen::Index dimension() const { return gram.rows(); }
};

/// Accumulates the trapezoidal contribution of phi phi^T over [sample.t - dt, sample.t].
/// The first sample fed to a fresh record only seeds the quadrature.
ExcitationRecord gram_update(ExcitationRecord record, const RegressorSample& sample, double dt);

/// True iff the Gram integral dominates rho_threshold * I.
bool is_identifiable(const ExcitationRecord& record);

}  // namespace lsfct
