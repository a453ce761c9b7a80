// SPDX-License-Identifier: Apache-2.0

#include "yosida/linops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace yosida {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidOperator: return "InvalidOperator";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::ExpOverflow: return "ExpOverflow";
    case ErrorKind::SpectrumFailure: return "SpectrumFailure";
    case ErrorKind::BranchCutViolation: return "BranchCutViolation";
    case ErrorKind::InconclusiveVerification: return "InconclusiveVerification";
    case ErrorKind::DivergentClassP: return "DivergentClassP";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::LambdaTooSmall: return "LambdaTooSmall";
    case ErrorKind::ContourFailure: return "ContourFailure";
    case ErrorKind::DiscretizationInconsistency: return "DiscretizationInconsistency";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::InvalidPerturbation: return "InvalidPerturbation";
    case ErrorKind::BaseNotHyperbolic: return "BaseNotHyperbolic";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace la {

bool all_finite(const CMatrix &m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

namespace {

Eigen::VectorXd singular_values(const CMatrix &m) {
  if (m.rows() <= 16 && m.cols() <= 16) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues();
  }
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues();
}

}  // namespace

double norm2(const CMatrix &m) {
  if (m.size() == 0) return 0.0;
  if (m.cols() == 1) return m.norm();
  if (m.rows() == 1) return m.norm();
  return singular_values(m)(0);
}

double min_singular_value(const CMatrix &m) {
  const Eigen::VectorXd s = singular_values(m);
  return s(s.size() - 1);
}

CMatrix inverse_checked(const CMatrix &m, double *residual) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  CMatrix inv = lu.inverse();
  if (residual != nullptr) {
    const Eigen::Index n = m.rows();
    *residual = (m * inv - CMatrix::Identity(n, n)).norm();
  }
  return inv;
}

namespace {

// Higham (2005) thresholds on the 1-norm for Pade orders 3, 5, 7, 9, 13.
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0,
                                          5.371920351148152e0};

double norm1(const CMatrix &a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

CMatrix pade_low(const CMatrix &a, int order) {
  static const std::array<double, 4> b3 = {120., 60., 12., 1.};
  static const std::array<double, 6> b5 = {30240., 15120., 3360., 420., 30., 1.};
  static const std::array<double, 8> b7 = {17297280., 8648640., 1995840., 277200.,
                                           25200.,    1512.,    56.,      1.};
  static const std::array<double, 10> b9 = {17643225600., 8821612800., 2075673600., 302702400.,
                                            30270240.,    2162160.,    110880.,     3960.,
                                            90.,          1.};
  const double *b = nullptr;
  switch (order) {
    case 3: b = b3.data(); break;
    case 5: b = b5.data(); break;
    case 7: b = b7.data(); break;
    default: b = b9.data(); break;
  }
  const Eigen::Index n = a.rows();
  const CMatrix ident = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  CMatrix power = ident;
  CMatrix u_inner = b[1] * ident;
  CMatrix v = b[0] * ident;
  for (int k = 2; k <= order; k += 2) {
    power = power * a2;
    v += b[k] * power;
    u_inner += b[k + 1] * power;
  }
  const CMatrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

CMatrix pade13(const CMatrix &a) {
  static const std::array<double, 14> b = {
      64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
      129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
      1323241920.,        40840800.,          960960.,           16380.,
      182.,               1.};
  const Eigen::Index n = a.rows();
  const CMatrix ident = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                          b[3] * a2 + b[1] * ident;
  const CMatrix u = a * u_inner;
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                    b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMatrix expm(const CMatrix &a) {
  const Eigen::Index n = a.rows();
  if (!all_finite(a)) throw Error(ErrorKind::ExpOverflow, "matrix_exp: non-finite argument");
  const double nrm = norm1(a);
  if (nrm == 0.0) return CMatrix::Identity(n, n);
  static constexpr std::array<int, 4> kLowOrders = {3, 5, 7, 9};
  for (std::size_t i = 0; i < kLowOrders.size(); ++i) {
    if (nrm <= kTheta[i]) return pade_low(a, kLowOrders[i]);
  }
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta[4]))));
  if (s > 1000) throw Error(ErrorKind::ExpOverflow, "matrix_exp: argument norm too large");
  CMatrix result = pade13(a / std::ldexp(1.0, s));
  for (int k = 0; k < s; ++k) {
    result = result * result;
    if (!all_finite(result)) break;
  }
  if (!all_finite(result)) throw Error(ErrorKind::ExpOverflow, "matrix_exp: result overflows");
  return result;
}

}  // namespace la

// ---------------------------------------------------------------------------
// OperatorMatrix

struct OperatorMatrix::Cache {
  std::once_flag spectrum_once;
  SpectrumResult spectrum;
  std::once_flag norm_once;
  double norm = 0.0;
};

OperatorMatrix::OperatorMatrix(CMatrix entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)), cache_(std::make_shared<Cache>()) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    std::ostringstream os;
    os << "operator must be a non-empty square matrix, got " << entries_.rows() << "x"
       << entries_.cols();
    throw Error(ErrorKind::InvalidOperator, os.str());
  }
  if (!la::all_finite(entries_)) {
    throw Error(ErrorKind::InvalidOperator, "operator has non-finite entries");
  }
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index dim, std::string label) {
  return OperatorMatrix(CMatrix::Identity(dim, dim), std::move(label));
}

OperatorMatrix OperatorMatrix::zero(Eigen::Index dim, std::string label) {
  return OperatorMatrix(CMatrix::Zero(dim, dim), std::move(label));
}

OperatorMatrix OperatorMatrix::diagonal(const std::vector<cplx> &diag, std::string label) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(diag.size()),
                            static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  }
  return OperatorMatrix(std::move(m), std::move(label));
}

OperatorMatrix OperatorMatrix::from_real(const Eigen::MatrixXd &entries, std::string label) {
  return OperatorMatrix(entries.cast<cplx>(), std::move(label));
}

OperatorMatrix OperatorMatrix::with_label(std::string label) const {
  OperatorMatrix copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

const SpectrumResult &OperatorMatrix::spectral_data() const {
  std::call_once(cache_->spectrum_once, [this] { cache_->spectrum = spectrum(*this); });
  return cache_->spectrum;
}

double OperatorMatrix::norm() const {
  std::call_once(cache_->norm_once, [this] { cache_->norm = la::norm2(entries_); });
  return cache_->norm;
}

double OperatorMatrix::spectral_abscissa() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const cplx &z : spectral_data().eigenvalues) best = std::max(best, z.real());
  return best;
}

OperatorMatrix operator+(const OperatorMatrix &a, const OperatorMatrix &b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::InvalidInput, "dimension mismatch in +");
  return OperatorMatrix(a.entries_ + b.entries_);
}

OperatorMatrix operator-(const OperatorMatrix &a, const OperatorMatrix &b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::InvalidInput, "dimension mismatch in -");
  return OperatorMatrix(a.entries_ - b.entries_);
}

OperatorMatrix operator*(const OperatorMatrix &a, const OperatorMatrix &b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::InvalidInput, "dimension mismatch in *");
  return OperatorMatrix(a.entries_ * b.entries_);
}

OperatorMatrix operator*(cplx s, const OperatorMatrix &a) { return OperatorMatrix(s * a.entries_); }

// ---------------------------------------------------------------------------
// Operations

double operator_norm(const OperatorMatrix &a) { return a.norm(); }

OperatorMatrix resolvent(const OperatorMatrix &a, cplx lambda) {
  const Eigen::Index n = a.dim();
  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.norm();
  const auto &eig = a.spectral_data().eigenvalues;
  for (const cplx &z : eig) {
    if (std::abs(lambda - z) <= tol) {
      Error err(ErrorKind::SingularResolvent, "resolvent: lambda lies on the spectrum");
      err.eigenvalue = z;
      throw err;
    }
  }
  const CMatrix shifted = lambda * CMatrix::Identity(n, n) - a.matrix();
  double residual = 0.0;
  CMatrix inv = la::inverse_checked(shifted, &residual);
  // Frobenius residual bounds the 2-norm residual from above.
  const double allowed = 1e-10 * (1.0 + inv.norm() * a.norm());
  if (!la::all_finite(inv) || residual > allowed) {
    cplx nearest = eig.empty() ? lambda : eig.front();
    for (const cplx &z : eig) {
      if (std::abs(lambda - z) < std::abs(lambda - nearest)) nearest = z;
    }
    Error err(ErrorKind::SingularResolvent, "resolvent: lambda I - A is numerically singular");
    err.eigenvalue = nearest;
    throw err;
  }
  return OperatorMatrix(std::move(inv));
}

OperatorMatrix matrix_exp(const OperatorMatrix &a, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "matrix_exp: t must be finite");
  return OperatorMatrix(la::expm(t * a.matrix()));
}

SpectrumResult spectrum(const OperatorMatrix &a) {
  Eigen::ComplexEigenSolver<CMatrix> solver(a.matrix(), true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::SpectrumFailure, "eigensolver did not converge");
  }
  const CVector &values = solver.eigenvalues();
  const CMatrix &vectors = solver.eigenvectors();
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  SpectrumResult result;
  result.eigenvalues.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const CVector v = vectors.col(k).normalized();
    const double res = (a.matrix() * v - values(k) * v).norm();
    if (!(res <= 1e-8 * scale)) {
      throw Error(ErrorKind::SpectrumFailure, "eigenpair residual exceeds tolerance");
    }
    result.eigenvalues.push_back(values(k));
  }
  const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(vectors).singularValues();
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? sv(0) / smin : 1e300;
  result.condition_estimate = std::clamp(cond, 1.0, 1e300);
  return result;
}

SemigroupBound semigroup_bound(const OperatorMatrix &a, double T_check, int grid) {
  if (!(T_check > 0.0) || !std::isfinite(T_check)) {
    throw Error(ErrorKind::InvalidInput, "semigroup_bound: T_check must be positive");
  }
  if (grid < 2) throw Error(ErrorKind::InvalidInput, "semigroup_bound: grid too small");
  SemigroupBound bound;
  bound.T_check = T_check;
  bound.omega = a.spectral_abscissa() + 1e-9;

  // Linear on (0, min(1, T_check)], log-spaced on (1, T_check].
  bound.grid.push_back(0.0);
  if (T_check <= 1.0) {
    for (int k = 1; k <= grid; ++k) bound.grid.push_back(T_check * k / grid);
  } else {
    const int linear = grid / 2;
    const int logs = grid - linear;
    for (int k = 1; k <= linear; ++k) bound.grid.push_back(static_cast<double>(k) / linear);
    const double span = std::log(T_check);
    for (int k = 1; k <= logs; ++k) bound.grid.push_back(std::exp(span * k / logs));
  }

  double m = 1.0;
  for (double t : bound.grid) {
    const double growth = la::norm2(la::expm(t * a.matrix())) * std::exp(-bound.omega * t);
    m = std::max(m, growth);
  }
  bound.M = m;
  return bound;
}

OperatorMatrix fractional_power(const OperatorMatrix &a, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "fractional_power: alpha must lie in (0, 1]");
  }
  const auto &eig = a.spectral_data();
  const double scale = std::max(1.0, a.norm());
  for (const cplx &z : eig.eigenvalues) {
    if (z.real() <= 1e-12 * scale && std::abs(z.imag()) <= 1e-12 * scale) {
      throw Error(ErrorKind::BranchCutViolation,
                  "fractional_power: spectrum touches the branch cut (-inf, 0]");
    }
  }
  if (alpha == 1.0) return a;

  const CMatrix &m = a.matrix();
  const Eigen::Index n = a.dim();
  if ((m - m.adjoint()).norm() <= 1e-14 * scale * static_cast<double>(n)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    const Eigen::VectorXd powered = solver.eigenvalues().array().pow(alpha);
    const CMatrix &v = solver.eigenvectors();
    return OperatorMatrix(v * powered.cast<cplx>().asDiagonal() * v.adjoint());
  }
  if (eig.condition_estimate < 1e6) {
    Eigen::ComplexEigenSolver<CMatrix> solver(m, true);
    CVector powered(n);
    for (Eigen::Index k = 0; k < n; ++k) powered(k) = std::pow(solver.eigenvalues()(k), alpha);
    const CMatrix &v = solver.eigenvectors();
    return OperatorMatrix(v * powered.asDiagonal() * v.partialPivLu().inverse());
  }
  // Defective or badly conditioned: Schur-based real power.
  Eigen::MatrixPower<CMatrix> power(m);
  return OperatorMatrix(power(alpha));
}

}  // namespace yosida
