// SPDX-License-Identifier: Apache-2.0

#include "yosida/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace yosida {

// ---------------------------------------------------------------------------
// DelaySystem

DelaySystem::DelaySystem(OperatorMatrix a, double r, OperatorMatrix b_point,
                         std::vector<KernelAtom> kernel)
    : a_(std::move(a)), r_(r), b_point_(std::move(b_point)), kernel_(std::move(kernel)) {
  if (!(r_ > 0.0) || !std::isfinite(r_)) {
    throw Error(ErrorKind::InvalidInput, "delay r must be positive and finite");
  }
  if (b_point_.dim() != a_.dim()) {
    throw Error(ErrorKind::InvalidInput, "B_point must match the state dimension of A");
  }
  const double node_tol = 1e-14 * r_;
  for (std::size_t i = 0; i < kernel_.size(); ++i) {
    const KernelAtom &atom = kernel_[i];
    if (!(atom.theta >= -r_ - node_tol && atom.theta <= node_tol)) {
      std::ostringstream os;
      os << "kernel node " << atom.theta << " outside [-r, 0]";
      throw Error(ErrorKind::InvalidInput, os.str());
    }
    if (atom.weight.dim() != a_.dim()) {
      throw Error(ErrorKind::InvalidInput, "kernel weight must match the state dimension");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(kernel_[j].theta - atom.theta) <= node_tol) {
        throw Error(ErrorKind::InvalidInput, "duplicate kernel nodes");
      }
    }
  }
}

double DelaySystem::functional_norm() const {
  double total = b_point_.norm();
  for (const KernelAtom &atom : kernel_) total += atom.weight.norm();
  return total;
}

bool DelaySystem::operator==(const DelaySystem &other) const {
  if (r_ != other.r_ || !(a_ == other.a_) || !(b_point_ == other.b_point_)) return false;
  if (kernel_.size() != other.kernel_.size()) return false;
  for (std::size_t i = 0; i < kernel_.size(); ++i) {
    if (kernel_[i].theta != other.kernel_[i].theta) return false;
    if (!(kernel_[i].weight == other.kernel_[i].weight)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Chebyshev machinery

namespace cheb {

Eigen::VectorXd lobatto_nodes(int n) {
  Eigen::VectorXd x(n + 1);
  for (int j = 0; j <= n; ++j) x(j) = std::cos(std::numbers::pi * j / n);
  // Exact symmetry removes O(eps) drift at the center.
  for (int j = 0; j <= n / 2; ++j) {
    const double v = 0.5 * (x(j) - x(n - j));
    x(j) = v;
    x(n - j) = -v;
  }
  return x;
}

Eigen::MatrixXd differentiation_matrix(int n) {
  const Eigen::VectorXd x = lobatto_nodes(n);
  Eigen::VectorXd c(n + 1);
  for (int j = 0; j <= n; ++j) c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i != j) d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
    }
  }
  // Negative-sum trick for the diagonal.
  for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

Eigen::VectorXd barycentric_weights(int n) {
  Eigen::VectorXd w(n + 1);
  for (int j = 0; j <= n; ++j) w(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
  return w;
}

Eigen::RowVectorXd interpolation_row(const Eigen::VectorXd &nodes, const Eigen::VectorXd &weights,
                                     double x) {
  const Eigen::Index m = nodes.size();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
  const double scale = nodes.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (std::abs(x - nodes(j)) <= 1e-14 * std::max(1.0, scale)) {
      row(j) = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    row(j) = weights(j) / (x - nodes(j));
    denom += row(j);
  }
  return row / denom;
}

void clenshaw_curtis(int n, Eigen::VectorXd &nodes, Eigen::VectorXd &weights) {
  nodes = lobatto_nodes(n);
  weights = Eigen::VectorXd::Zero(n + 1);
  const double pi = std::numbers::pi;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n - 1);
  auto theta = [&](int i) { return pi * i / n; };
  if (n % 2 == 0) {
    weights(0) = weights(n) = 1.0 / (static_cast<double>(n) * n - 1.0);
    for (int k = 1; k < n / 2; ++k) {
      for (int i = 1; i < n; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
    }
    for (int i = 1; i < n; ++i) v(i - 1) -= std::cos(n * theta(i)) / (static_cast<double>(n) * n - 1.0);
  } else {
    weights(0) = weights(n) = 1.0 / (static_cast<double>(n) * n);
    for (int k = 1; k <= (n - 1) / 2; ++k) {
      for (int i = 1; i < n; ++i) v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
    }
  }
  for (int i = 1; i < n; ++i) weights(i) = 2.0 * v(i - 1) / n;
}

}  // namespace cheb

// ---------------------------------------------------------------------------
// Generator assembly

namespace {

struct Mesh {
  Eigen::VectorXd theta;    // 0 = theta_0 > ... > theta_N = -r
  Eigen::VectorXd weights;  // barycentric
};

Mesh make_mesh(int order, double r) {
  const Eigen::VectorXd x = cheb::lobatto_nodes(order);
  Mesh mesh;
  mesh.theta = (x.array() - 1.0) * (r / 2.0);
  mesh.theta(0) = 0.0;
  mesh.theta(order) = -r;
  mesh.weights = cheb::barycentric_weights(order);
  return mesh;
}

CMatrix build_functional_row(const DelaySystem &sys, const Mesh &mesh) {
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index nodes = mesh.theta.size();
  CMatrix row = CMatrix::Zero(n, n * nodes);
  row.block(0, n * (nodes - 1), n, n) += sys.B_point().matrix();
  for (const KernelAtom &atom : sys.kernel()) {
    const Eigen::RowVectorXd ell = cheb::interpolation_row(mesh.theta, mesh.weights, atom.theta);
    for (Eigen::Index k = 0; k < nodes; ++k) {
      if (ell(k) != 0.0) row.block(0, n * k, n, n) += ell(k) * atom.weight.matrix();
    }
  }
  return row;
}

}  // namespace

CMatrix DiscretizedGenerator::functional_row() const {
  Mesh m;
  m.theta = Eigen::Map<const Eigen::VectorXd>(mesh.data(), static_cast<Eigen::Index>(mesh.size()));
  m.weights = cheb::barycentric_weights(order);
  return build_functional_row(system, m);
}

DiscretizedGenerator assemble_generator(const DelaySystem &sys, int order, Eigen::Index dim_cap) {
  if (order < 4) throw Error(ErrorKind::InvalidInput, "discretization order must be >= 4");
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index dim = n * (order + 1);
  if (dim > dim_cap) {
    std::ostringstream os;
    os << "generator dimension " << dim << " exceeds cap " << dim_cap;
    throw Error(ErrorKind::TooLarge, os.str());
  }
  const Mesh mesh = make_mesh(order, sys.r());
  const Eigen::MatrixXd d = cheb::differentiation_matrix(order) * (2.0 / sys.r());

  CMatrix g = CMatrix::Zero(dim, dim);
  for (int i = 1; i <= order; ++i) {
    for (int j = 0; j <= order; ++j) {
      if (d(i, j) == 0.0) continue;
      for (Eigen::Index c = 0; c < n; ++c) g(n * i + c, n * j + c) = d(i, j);
    }
  }
  // Splicing row at theta = 0: phi'(0) = A phi(0) + B phi.
  g.topRows(n) = build_functional_row(sys, mesh);
  g.block(0, 0, n, n) += sys.A().matrix();

  std::vector<double> nodes(mesh.theta.data(), mesh.theta.data() + mesh.theta.size());
  return DiscretizedGenerator{std::move(nodes), OperatorMatrix(std::move(g), "G"), sys, order};
}

double f_lambda_bound(const DelaySystem &sys, double lambda) {
  return resolvent(sys.A(), cplx(lambda, 0.0)).norm() * sys.functional_norm();
}

CVector resolvent_via_F_J(const DiscretizedGenerator &gen, double lambda, const CVector &psi) {
  const Eigen::Index n = gen.state_dim();
  const int order = gen.order;
  const Eigen::Index nodes = order + 1;
  if (psi.size() != n * nodes) {
    throw Error(ErrorKind::InvalidInput, "psi does not match the phase-space dimension");
  }
  if (!(lambda > 0.0) || !(f_lambda_bound(gen.system, lambda) < 1.0)) {
    throw Error(ErrorKind::LambdaTooSmall,
                "||R(lambda, A)|| ||B|| must be < 1 for the F/J construction");
  }
  const CMatrix r_a = resolvent(gen.system.A(), cplx(lambda, 0.0)).matrix();
  const Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(gen.mesh.data(), nodes);
  const Eigen::VectorXd bary = cheb::barycentric_weights(order);
  const double r = gen.system.r();

  // J psi (theta_i) = e^{lambda theta_i} R(lambda, A) psi(0)
  //                   - int_0^{theta_i} e^{lambda (theta_i - xi)} psi(xi) dxi,
  // the integral taken as a signed integral (theta_i <= 0).
  const int cc_order = 64 + 2 * order + static_cast<int>(std::ceil(4.0 * lambda * r));
  Eigen::VectorXd cc_x, cc_w;
  cheb::clenshaw_curtis(cc_order, cc_x, cc_w);
  CVector j_psi(n * nodes);
  const CVector psi0 = psi.head(n);
  const CVector head = r_a * psi0;
  for (Eigen::Index i = 0; i < nodes; ++i) {
    const double ti = theta(i);
    CVector integral = CVector::Zero(n);
    if (ti != 0.0) {
      // xi = ti + (0 - ti) (x + 1) / 2 on [ti, 0]; int_0^{ti} = -int_{ti}^0.
      const double half = -ti / 2.0;
      for (Eigen::Index q = 0; q < cc_x.size(); ++q) {
        const double xi = ti + half * (cc_x(q) + 1.0);
        const Eigen::RowVectorXd ell = cheb::interpolation_row(theta, bary, xi);
        CVector value = CVector::Zero(n);
        for (Eigen::Index k = 0; k < nodes; ++k) {
          if (ell(k) != 0.0) value += ell(k) * psi.segment(n * k, n);
        }
        integral += (cc_w(q) * half * std::exp(lambda * (ti - xi))) * value;
      }
      integral = -integral;
    }
    j_psi.segment(n * i, n) = std::exp(lambda * ti) * head - integral;
  }

  // F phi (theta_i) = e^{lambda theta_i} R(lambda, A) B phi.
  const CMatrix b_row = gen.functional_row();
  const CMatrix rb = r_a * b_row;
  CMatrix system = CMatrix::Identity(n * nodes, n * nodes);
  for (Eigen::Index i = 0; i < nodes; ++i) {
    system.middleRows(n * i, n) -= std::exp(lambda * theta(i)) * rb;
  }
  return system.partialPivLu().solve(j_psi);
}

// ---------------------------------------------------------------------------
// Characteristic roots

namespace {

struct ScalarChar {
  double c0, c1, r;
  cplx f(cplx z) const { return z - c0 - c1 * std::exp(-z * r); }
  cplx df(cplx z) const { return 1.0 + c1 * r * std::exp(-z * r); }
  double scale(cplx z) const {
    return 1.0 + std::abs(z) + std::abs(c0) + std::abs(c1 * std::exp(-z * r));
  }
};

struct Box {
  double re0, re1, im0, im1;
  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  cplx center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
  bool contains(cplx z, double pad) const {
    return z.real() >= re0 - pad && z.real() <= re1 + pad && z.imag() >= im0 - pad &&
           z.imag() <= im1 + pad;
  }
};

struct ContourHit {};

double edge_arg_change(const ScalarChar &fn, cplx za, cplx fa, cplx zb, cplx fb, int depth) {
  const double delta = std::arg(fb / fa);
  if (std::abs(delta) < std::numbers::pi / 4.0 || depth >= 40) return delta;
  const cplx zm = 0.5 * (za + zb);
  const cplx fm = fn.f(zm);
  if (std::abs(fm) < 1e-13 * fn.scale(zm)) throw ContourHit{};
  return edge_arg_change(fn, za, fa, zm, fm, depth + 1) +
         edge_arg_change(fn, zm, fm, zb, fb, depth + 1);
}

// Number of roots enclosed by the box (argument principle).
int winding_count(const ScalarChar &fn, const Box &box) {
  const cplx corners[5] = {{box.re0, box.im0}, {box.re1, box.im0}, {box.re1, box.im1},
                           {box.re0, box.im1}, {box.re0, box.im0}};
  constexpr int kSegments = 32;
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    cplx za = corners[e];
    cplx fa = fn.f(za);
    if (std::abs(fa) < 1e-13 * fn.scale(za)) throw ContourHit{};
    for (int s = 1; s <= kSegments; ++s) {
      const cplx zb = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(s) / kSegments);
      const cplx fb = fn.f(zb);
      if (std::abs(fb) < 1e-13 * fn.scale(zb)) throw ContourHit{};
      total += edge_arg_change(fn, za, fa, zb, fb, 0);
      za = zb;
      fa = fb;
    }
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.05) throw ContourHit{};
  return static_cast<int>(rounded);
}

int robust_count(const ScalarChar &fn, Box &box) {
  for (int attempt = 0; attempt <= 3; ++attempt) {
    try {
      return winding_count(fn, box);
    } catch (const ContourHit &) {
      const double eps = 1e-6 * (attempt + 1);
      box.re0 -= eps;
      box.re1 += eps * 0.73;
      box.im0 -= eps * 0.61;
      box.im1 += eps * 0.89;
    }
  }
  throw Error(ErrorKind::ContourFailure, "argument-principle contour passes through a root");
}

std::optional<cplx> newton(const ScalarChar &fn, cplx z, double tol) {
  for (int it = 0; it < 100; ++it) {
    const cplx fz = fn.f(z);
    if (std::abs(fz) <= tol) return z;
    const cplx d = fn.df(z);
    if (std::abs(d) == 0.0) return std::nullopt;
    const cplx step = fz / d;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    if (std::abs(step) <= 4e-16 * std::abs(z)) {
      return std::abs(fn.f(z)) <= std::max(tol, 1e-13 * fn.scale(z)) ? std::optional<cplx>(z)
                                                                      : std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<CharRoot> scalar_delay_roots(double c0, double c1, double r, double sigma_min,
                                         double sigma_max, double omega, const StripConfig &cfg) {
  if (!(r > 0.0) || !(sigma_max > sigma_min) || !(omega > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "invalid root-search strip");
  }
  const ScalarChar fn{c0, c1, r};
  // exp(-lambda r) overflows beyond Re lambda * r < -700; no roots live there.
  sigma_min = std::max(sigma_min, -600.0 / r);

  std::vector<cplx> found;
  std::vector<Box> stack{{sigma_min, sigma_max, -omega, omega}};
  constexpr double kSplit = 0.5 + 0.0137;  // off-center to avoid symmetric root lines
  while (!stack.empty()) {
    Box box = stack.back();
    stack.pop_back();
    const int count = robust_count(fn, box);
    if (count <= 0) continue;
    const bool tiny = std::max(box.width(), box.height()) < cfg.min_box;
    if (count == 1 || tiny) {
      const auto root = newton(fn, box.center(), cfg.newton_tol);
      const double pad = 1e-9 * (1.0 + std::abs(box.center()));
      if (root && box.contains(*root, pad)) {
        found.push_back(*root);
        continue;
      }
      if (tiny) {
        throw Error(ErrorKind::ContourFailure, "Newton polishing failed inside a minimal box");
      }
    }
    Box lo = box;
    Box hi = box;
    if (box.width() >= box.height()) {
      const double cut = box.re0 + kSplit * box.width();
      lo.re1 = cut;
      hi.re0 = cut;
    } else {
      const double cut = box.im0 + kSplit * box.height();
      lo.im1 = cut;
      hi.im0 = cut;
    }
    stack.push_back(lo);
    stack.push_back(hi);
  }

  std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  std::vector<CharRoot> roots;
  for (const cplx &z : found) {
    const bool dup = std::any_of(roots.begin(), roots.end(), [&](const CharRoot &c) {
      return std::abs(c.lambda - z) <= 1e-8 * (1.0 + std::abs(z));
    });
    if (!dup) roots.push_back(CharRoot{z, std::nullopt, std::abs(fn.f(z))});
  }
  return roots;
}

std::vector<CharRoot> char_roots_rd(double a, double b, double r, int n, const StripConfig &cfg) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "mode index n must be positive");
  const double n2 = static_cast<double>(n) * n;
  const double sigma_min = cfg.sigma_min.value_or(-(n2 + a + b + 10.0));
  const double sigma_max = cfg.sigma_max.value_or(b + 1.0);
  const double omega = cfg.omega.value_or(2.0 * std::numbers::pi / r * 10.0);
  auto roots = scalar_delay_roots(-a - n2, -b, r, sigma_min, sigma_max, omega, cfg);
  for (CharRoot &root : roots) root.mode_n = n;
  return roots;
}

// ---------------------------------------------------------------------------
// Dichotomy of delay systems

namespace {

bool is_diagonal(const CMatrix &m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
    }
  }
  return true;
}

bool is_real(const CMatrix &m) { return m.imag().isZero(0.0); }

}  // namespace

DelayDichotomyReport dichotomy_of_delay_system(const DelaySystem &sys,
                                               const std::optional<std::vector<int>> &modes,
                                               int order) {
  DelayDichotomyReport report;
  const Eigen::Index n = sys.state_dim();
  const bool modal = sys.kernel().empty() && is_diagonal(sys.A().matrix()) &&
                     is_diagonal(sys.B_point().matrix());
  if (modes && (!modal || static_cast<Eigen::Index>(modes->size()) != n)) {
    throw Error(ErrorKind::InvalidInput,
                "modal evaluation needs diagonal A and B_point, no kernel atoms, and one mode "
                "label per state component");
  }
  if (!modal) {
    const DiscretizedGenerator gen = assemble_generator(sys, order);
    report.combined = check_hyperbolic(gen.G);
    return report;
  }

  // Modal: decoupled scalar systems lambda = A_ii + B_ii exp(-lambda r).
  const Eigen::Index nodes = order + 1;
  CMatrix projection = CMatrix::Zero(n * nodes, n * nodes);
  DichotomyReport &all = report.combined;
  all.hyperbolic = true;
  all.gap = std::numeric_limits<double>::infinity();
  all.alpha = std::numeric_limits<double>::infinity();
  all.N = 1.0;
  all.contour_verified = true;
  const bool real = is_real(sys.A().matrix()) && is_real(sys.B_point().matrix());
  report.cross_checked = real;
  report.root_verdict = true;
  report.closest_root_re = std::numeric_limits<double>::infinity();

  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx aii = sys.A()(i, i);
    const cplx bii = sys.B_point()(i, i);
    const DelaySystem scalar(OperatorMatrix(CMatrix::Constant(1, 1, aii)), sys.r(),
                             OperatorMatrix(CMatrix::Constant(1, 1, bii)));
    const DiscretizedGenerator gen = assemble_generator(scalar, order);
    DichotomyReport mode = check_hyperbolic(gen.G);

    all.hyperbolic = all.hyperbolic && mode.hyperbolic;
    all.gap = std::min(all.gap, mode.gap);
    all.rank += mode.rank;
    all.t1_spectrum.insert(all.t1_spectrum.end(), mode.t1_spectrum.begin(), mode.t1_spectrum.end());
    if (mode.hyperbolic) {
      all.alpha = std::min(all.alpha, mode.alpha);
      all.N = std::max(all.N, mode.N);
      all.contour_verified = all.contour_verified && mode.contour_verified;
      all.contour_points_used = std::max(all.contour_points_used, mode.contour_points_used);
      all.contour_deviation = std::max(all.contour_deviation, mode.contour_deviation);
      all.t_grid_checked = mode.t_grid_checked;
      const CMatrix &p = mode.projection->matrix();
      for (Eigen::Index a = 0; a < nodes; ++a) {
        for (Eigen::Index b = 0; b < nodes; ++b) projection(n * a + i, n * b + i) = p(a, b);
      }
    }
    report.mode_labels.push_back(modes ? std::optional<int>((*modes)[static_cast<std::size_t>(i)])
                                       : std::nullopt);

    if (real) {
      const double c0 = aii.real();
      const double c1 = bii.real();
      const double sigma_min = -(std::abs(c0) + std::abs(c1) + 10.0);
      const double sigma_max = std::max(0.0, c0 + std::abs(c1)) + 1.0;
      const double omega = 2.0 * std::numbers::pi / sys.r() * 10.0;
      auto roots = scalar_delay_roots(c0, c1, sys.r(), sigma_min, sigma_max, omega);
      for (CharRoot &root : roots) {
        root.mode_n = report.mode_labels.back();
        report.closest_root_re = std::min(report.closest_root_re, std::abs(root.lambda.real()));
        if (std::abs(root.lambda.real()) <= DichotomyConfig{}.gap_tol) report.root_verdict = false;
      }
      report.roots.push_back(std::move(roots));
    }
    report.per_mode.push_back(std::move(mode));
  }
  if (all.hyperbolic) {
    all.projection = OperatorMatrix(std::move(projection), "P");
  } else {
    all.alpha = 0.0;
    all.N = 1.0;
  }

  // Near-critical roots (|Re| <= 1e-6) cannot be resolved reliably by either route.
  if (report.cross_checked && report.root_verdict != all.hyperbolic &&
      report.closest_root_re > 1e-6) {
    std::ostringstream os;
    os << "discretized verdict (hyperbolic=" << all.hyperbolic << ", gap=" << all.gap
       << ") disagrees with characteristic roots (closest |Re lambda|=" << report.closest_root_re
       << ")";
    throw Error(ErrorKind::DiscretizationInconsistency, os.str());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Yosida distance between generators

double functional_distance(const DelaySystem &s0, const DelaySystem &s1) {
  if (s0.state_dim() != s1.state_dim() || s0.r() != s1.r()) {
    throw Error(ErrorKind::MeshMismatch, "functionals act on different phase spaces");
  }
  const double r = s0.r();
  const double node_tol = 1e-14 * r;
  std::vector<std::pair<double, CMatrix>> atoms;
  auto add = [&](double theta, const CMatrix &w) {
    for (auto &[t, m] : atoms) {
      if (std::abs(t - theta) <= node_tol) {
        m += w;
        return;
      }
    }
    atoms.emplace_back(theta, w);
  };
  add(-r, s0.B_point().matrix() - s1.B_point().matrix());
  for (const KernelAtom &atom : s0.kernel()) add(atom.theta, atom.weight.matrix());
  for (const KernelAtom &atom : s1.kernel()) add(atom.theta, -atom.weight.matrix());
  double total = 0.0;
  for (const auto &[t, m] : atoms) total += la::norm2(m);
  return total;
}

GeneratorDistanceReport generator_yosida_distance(const DiscretizedGenerator &gen0,
                                                  const DiscretizedGenerator &gen1,
                                                  const MuGridConfig &cfg) {
  if (gen0.order != gen1.order || gen0.mesh != gen1.mesh ||
      gen0.state_dim() != gen1.state_dim()) {
    throw Error(ErrorKind::MeshMismatch, "generators do not share mesh and state dimension");
  }
  GeneratorDistanceReport report;
  report.estimate_G = yosida_distance(gen0.G, gen1.G, cfg);
  report.estimate_A = yosida_distance(gen0.system.A(), gen1.system.A(), cfg);
  if (!report.estimate_G.converged || !report.estimate_A.converged) {
    throw Error(ErrorKind::InconclusiveVerification,
                "Yosida distance estimate did not converge on the mu grid");
  }
  report.dY_G = report.estimate_G.value;
  report.dY_A = report.estimate_A.value;
  report.dY_B = functional_distance(gen0.system, gen1.system);
  report.tol = 1e-3 * (1.0 + report.dY_A + report.dY_B);
  report.bound_holds = report.dY_G <= 2.0 * report.dY_B + report.dY_A + report.tol;
  return report;
}

}  // namespace yosida
