// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <doctest.h>

#include "yosida/error.hpp"
#include "yosida/linops.hpp"
#include "yosida/random.hpp"

namespace testutil {

using yosida::cplx;
using yosida::OperatorMatrix;

inline OperatorMatrix real(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto &row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return OperatorMatrix::from_real(m);
}

inline OperatorMatrix diag(std::initializer_list<double> d) {
  std::vector<cplx> v(d.begin(), d.end());
  return OperatorMatrix::diagonal(v);
}

inline double dist(const OperatorMatrix &a, const OperatorMatrix &b) {
  return yosida::la::norm2(a.matrix() - b.matrix());
}

inline OperatorMatrix random_matrix(yosida::SeededRng &rng, Eigen::Index n, double scale = 1.0) {
  return OperatorMatrix::from_real(scale * rng.normal_matrix(n, n));
}

// Runs fn and returns the kind of the yosida::Error it throws.
template <class F>
yosida::ErrorKind error_kind(F &&fn) {
  try {
    fn();
  } catch (const yosida::Error &e) {
    return e.kind();
  }
  FAIL("expected yosida::Error");
  return yosida::ErrorKind::InvalidInput;
}

}  // namespace testutil
