#include "lsfct/regression.hpp"

#include <cmath>
#include <sstream>

#include "lsfct/errors.hpp"

namespace lsfct {

namespace {

Matrix symmetrized(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NumericalIntegrityError("eigenvalue requested for a non-square or empty matrix");
  }
  if (!m.allFinite()) {
    throw NumericalIntegrityError("eigenvalue requested for a non-finite matrix");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os << "matrix asymmetry " << asym << " exceeds tolerance " << kSymmetryTolerance;
    throw NumericalIntegrityError(os.str());
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

void validate(const RegressorSample& sample) {
  if (!std::isfinite(sample.t) || sample.t < 0.0) {
    throw InputDataError("regressor sample has invalid time");
  }
  if (!std::isfinite(sample.y) || !sample.phi.allFinite()) {
    std::ostringstream os;
    os << "non-finite regressor sample at t=" << sample.t;
    throw InputDataError(os.str());
  }
}

double min_eigenvalue(const Matrix& m) {
  const Matrix s = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& m) {
  const Matrix s = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

ExcitationRecord::ExcitationRecord(Eigen::Index q, double rho)
    : gram(Matrix::Zero(q, q)), rho_threshold(rho) {
  if (q < 1) {
    throw ConfigError("regressor dimension must be at least 1");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ConfigError("rho_threshold must be positive and finite");
  }
}

ExcitationRecord gram_update(ExcitationRecord record, const RegressorSample& sample, double dt) {
  if (sample.dimension() != record.dimension()) {
    std::ostringstream os;
    os << "regressor dimension " << sample.dimension() << " does not match monitor dimension "
       << record.dimension();
    throw ConfigError(os.str());
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("gram_update requires a positive step");
  }
  validate(sample);

  if (record.last_phi) {
    const Vector& a = *record.last_phi;
    const Vector& b = sample.phi;
    record.gram += (0.5 * dt) * (a * a.transpose() + b * b.transpose());
    record.min_eig = min_eigenvalue(record.gram);
  }
  record.last_phi = sample.phi;
  record.last_t = sample.t;

  if (!record.t_c && record.min_eig >= record.rho_threshold) {
    record.t_c = sample.t;
  }
  return record;
}

bool is_identifiable(const ExcitationRecord& record) {
  return record.min_eig >= record.rho_threshold;
}

}  // namespace lsfct
