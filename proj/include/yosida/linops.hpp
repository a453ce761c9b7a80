// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "yosida/error.hpp"

namespace yosida {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct SpectrumResult {
  std::vector<cplx> eigenvalues;
  // 2-norm condition number of the eigenvector matrix; 1 for normal matrices,
  // capped at 1e300 for defective ones.
  double condition_estimate = 1.0;
};

/// Dense square complex matrix standing in for a (discretized) linear operator.
/// Immutable after construction; the spectrum is computed lazily once and
/// shared between copies, so values are safe to share across threads.
class OperatorMatrix {
public:
  OperatorMatrix() : OperatorMatrix(CMatrix::Zero(1, 1)) {}
  explicit OperatorMatrix(CMatrix entries, std::string label = {});

  static OperatorMatrix identity(Eigen::Index dim, std::string label = {});
  static OperatorMatrix zero(Eigen::Index dim, std::string label = {});
  static OperatorMatrix diagonal(const std::vector<cplx> &diag, std::string label = {});
  static OperatorMatrix from_real(const Eigen::MatrixXd &entries, std::string label = {});

  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix &matrix() const { return entries_; }
  const std::string &label() const { return label_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// Cached eigenvalues (computed on first use).
  const SpectrumResult &spectral_data() const;
  /// Cached induced 2-norm.
  double norm() const;
  /// Largest real part of the spectrum.
  double spectral_abscissa() const;

  OperatorMatrix with_label(std::string label) const;

  friend OperatorMatrix operator+(const OperatorMatrix &a, const OperatorMatrix &b);
  friend OperatorMatrix operator-(const OperatorMatrix &a, const OperatorMatrix &b);
  friend OperatorMatrix operator*(const OperatorMatrix &a, const OperatorMatrix &b);
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix &a);

  /// Exact entrywise equality (bit-level for finite doubles).
  bool operator==(const OperatorMatrix &other) const { return entries_ == other.entries_; }

private:
  struct Cache;
  CMatrix entries_;
  std::string label_;
  std::shared_ptr<Cache> cache_;
};

/// Certifies ||exp(tA)|| <= M exp(omega t) on the sampled grid of [0, T_check].
struct SemigroupBound {
  double M = 1.0;
  double omega = 0.0;
  double T_check = 0.0;
  std::vector<double> grid;
};

// Raw-matrix kernels. These back the OperatorMatrix API and are used directly in
// inner loops where constructing validated operators would be wasteful.
namespace la {

double norm2(const CMatrix &m);
double min_singular_value(const CMatrix &m);
CMatrix expm(const CMatrix &a);
CMatrix inverse_checked(const CMatrix &m, double *residual = nullptr);
bool all_finite(const CMatrix &m);

}  // namespace la

double operator_norm(const OperatorMatrix &a);

/// (lambda I - A)^{-1}. Throws SingularResolvent when lambda lies within
/// dim * eps * ||A|| of an eigenvalue.
OperatorMatrix resolvent(const OperatorMatrix &a, cplx lambda);

/// exp(tA) by scaling and squaring with diagonal Pade approximants (orders 3..13).
OperatorMatrix matrix_exp(const OperatorMatrix &a, double t);

SpectrumResult spectrum(const OperatorMatrix &a);

constexpr int kDefaultBoundGrid = 256;

SemigroupBound semigroup_bound(const OperatorMatrix &a, double T_check,
                               int grid = kDefaultBoundGrid);

/// Principal power A^alpha, alpha in (0, 1], branch cut along (-inf, 0].
OperatorMatrix fractional_power(const OperatorMatrix &a, double alpha);

}  // namespace yosida
