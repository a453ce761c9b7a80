// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "yosida/dichotomy.hpp"
#include "yosida/linops.hpp"
#include "yosida/yosida.hpp"

namespace yosida {

/// Atom theta -> W of a finite Stieltjes functional phi |-> sum_j W_j phi(theta_j).
struct KernelAtom {
  double theta = 0.0;
  OperatorMatrix weight;
};

/// Data of u'(t) = A u(t) + B u_t with B phi = B_point phi(-r) + sum_j W_j phi(theta_j).
class DelaySystem {
public:
  DelaySystem(OperatorMatrix a, double r, OperatorMatrix b_point, std::vector<KernelAtom> kernel = {});

  const OperatorMatrix &A() const { return a_; }
  const OperatorMatrix &B_point() const { return b_point_; }
  const std::vector<KernelAtom> &kernel() const { return kernel_; }
  double r() const { return r_; }
  Eigen::Index state_dim() const { return a_.dim(); }

  /// ||B_point|| + sum_j ||W_j||.
  double functional_norm() const;

  bool operator==(const DelaySystem &other) const;

private:
  OperatorMatrix a_;
  double r_;
  OperatorMatrix b_point_;
  std::vector<KernelAtom> kernel_;
};

namespace cheb {

/// Chebyshev-Gauss-Lobatto nodes cos(j pi / N), j = 0..N (descending from 1 to -1).
Eigen::VectorXd lobatto_nodes(int n);
/// Differentiation matrix on the Lobatto nodes of [-1, 1].
Eigen::MatrixXd differentiation_matrix(int n);
/// Barycentric weights for the Lobatto nodes.
Eigen::VectorXd barycentric_weights(int n);
/// Row of Lagrange basis values at x (exact unit vector when x is a node).
Eigen::RowVectorXd interpolation_row(const Eigen::VectorXd &nodes, const Eigen::VectorXd &weights,
                                     double x);
/// Clenshaw-Curtis nodes (on [-1, 1], same order as lobatto_nodes) and weights.
void clenshaw_curtis(int n, Eigen::VectorXd &nodes, Eigen::VectorXd &weights);

}  // namespace cheb

constexpr Eigen::Index kDefaultDimensionCap = 4000;

struct DiscretizedGenerator {
  std::vector<double> mesh;   // theta_0 = 0 > theta_1 > ... > theta_N = -r
  OperatorMatrix G;
  DelaySystem system;
  int order = 0;              // N

  Eigen::Index state_dim() const { return system.state_dim(); }
  /// n x n(N+1) block row realizing phi |-> B phi on mesh values.
  CMatrix functional_row() const;
};

DiscretizedGenerator assemble_generator(const DelaySystem &sys, int order,
                                        Eigen::Index dim_cap = kDefaultDimensionCap);

/// Solves (I - F_lambda) phi = J_lambda psi on the mesh. psi holds mesh values,
/// node-major (n entries per node).
CVector resolvent_via_F_J(const DiscretizedGenerator &gen, double lambda, const CVector &psi);

/// ||R(lambda, A)|| ||B||, the contraction factor bounding ||F_lambda||.
double f_lambda_bound(const DelaySystem &sys, double lambda);

struct StripConfig {
  std::optional<double> sigma_min;
  std::optional<double> sigma_max;
  std::optional<double> omega;  // |Im lambda| <= omega
  double newton_tol = 1e-10;
  double min_box = 1e-6;
};

struct CharRoot {
  cplx lambda;
  std::optional<int> mode_n;
  double residual = 0.0;
};

/// Roots of lambda - c0 - c1 exp(-lambda r) = 0 inside a rectangle, by argument
/// principle box subdivision and Newton polishing. Sorted by descending real part.
std::vector<CharRoot> scalar_delay_roots(double c0, double c1, double r, double sigma_min,
                                         double sigma_max, double omega,
                                         const StripConfig &cfg = {});

/// Roots of lambda + a + b exp(-lambda r) = -n^2 with the default strip
/// sigma in [-(n^2 + a + b + 10), b + 1], |Im| <= 20 pi / r.
std::vector<CharRoot> char_roots_rd(double a, double b, double r, int n,
                                    const StripConfig &cfg = {});

struct DelayDichotomyReport {
  DichotomyReport combined;                   // verdict over all modes
  std::vector<DichotomyReport> per_mode;      // empty unless modal
  std::vector<std::optional<int>> mode_labels;
  std::vector<std::vector<CharRoot>> roots;   // empty unless modal cross-check ran
  bool cross_checked = false;
  bool root_verdict = false;
  double closest_root_re = 0.0;               // min |Re lambda| over the scanned roots
};

/// Hyperbolicity of the solution semigroup. When A and B_point are diagonal and
/// there are no kernel atoms, each diagonal entry is treated as a separate mode
/// and the verdict is cross-checked against the characteristic roots.
DelayDichotomyReport dichotomy_of_delay_system(const DelaySystem &sys,
                                               const std::optional<std::vector<int>> &modes,
                                               int order);

struct GeneratorDistanceReport {
  double dY_G = 0.0;
  double dY_A = 0.0;
  double dY_B = 0.0;
  double tol = 0.0;
  bool bound_holds = false;
  YosidaDistanceEstimate estimate_G;
  YosidaDistanceEstimate estimate_A;
};

/// Norm of the difference of two atomic functionals, atoms merged by node.
double functional_distance(const DelaySystem &s0, const DelaySystem &s1);

GeneratorDistanceReport generator_yosida_distance(const DiscretizedGenerator &gen0,
                                                  const DiscretizedGenerator &gen1,
                                                  const MuGridConfig &cfg = {});

}  // namespace yosida
