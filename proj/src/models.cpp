// SPDX-License-Identifier: Apache-2.0

#include "yosida/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "yosida/random.hpp"

namespace yosida {

void ReactionDiffusionConfig::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(r > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidInput, "reaction-diffusion config needs a, b, r > 0");
  }
  if (disc == SpatialDisc::Modal && n_modes < 1) {
    throw Error(ErrorKind::InvalidInput, "n_modes must be positive");
  }
  if (disc == SpatialDisc::FiniteDifference && m < 8) {
    throw Error(ErrorKind::InvalidInput, "finite-difference path needs m >= 8");
  }
}

double PerturbationConfig::eps3_sup() const {
  double sup = 0.0;
  for (double v : eps3_samples) sup = std::max(sup, std::abs(v));
  return sup;
}

double PerturbationConfig::var_eps4() const {
  double total = 0.0;
  for (const Eps4Atom &atom : eps4_atoms) total += std::abs(atom.weight);
  return total;
}

bool PerturbationConfig::is_zero() const {
  return eps1 == 0.0 && eps2 == 0.0 && eps5 == 0.0 && eps3_sup() == 0.0 && var_eps4() == 0.0;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Piecewise-linear interpolation of eps3 samples on the uniform grid of [0, pi].
double eps3_at(const std::vector<double> &samples, double x) {
  if (samples.size() == 1) return samples.front();
  const double pos = std::clamp(x / kPi, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return (1.0 - frac) * samples[i] + frac * samples[i + 1];
}

}  // namespace

SpatialOperators spatial_operators(const ReactionDiffusionConfig &cfg) {
  cfg.validate();
  SpatialOperators ops;
  if (cfg.disc == SpatialDisc::Modal) {
    const int n = cfg.n_modes;
    ops.laplacian = Eigen::MatrixXd::Zero(n, n);
    ops.derivative = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i <= n; ++i) {
      ops.laplacian(i - 1, i - 1) = -static_cast<double>(i) * i;
      for (int j = 1; j <= n; ++j) {
        // <e_i, d/dx e_j> with e_k = sqrt(2/pi) sin(kx); nonzero when i + j is odd.
        if ((i + j) % 2 == 1) {
          ops.derivative(i - 1, j - 1) =
              (2.0 / kPi) * j * i * 2.0 / (static_cast<double>(i) * i - static_cast<double>(j) * j);
        }
      }
    }
    return ops;
  }
  const int m = cfg.m;
  const double h = kPi / (m + 1);
  ops.laplacian = Eigen::MatrixXd::Zero(m, m);
  ops.derivative = Eigen::MatrixXd::Zero(m, m);
  ops.grid = Eigen::VectorXd(m);
  for (int k = 0; k < m; ++k) {
    ops.grid(k) = (k + 1) * h;
    ops.laplacian(k, k) = -2.0 / (h * h);
    if (k > 0) {
      ops.laplacian(k, k - 1) = 1.0 / (h * h);
      ops.derivative(k, k - 1) = -1.0 / (2.0 * h);
    }
    if (k + 1 < m) {
      ops.laplacian(k, k + 1) = 1.0 / (h * h);
      ops.derivative(k, k + 1) = 1.0 / (2.0 * h);
    }
  }
  return ops;
}

Eigen::MatrixXd multiplication_operator(const ReactionDiffusionConfig &cfg,
                                        const std::vector<double> &samples) {
  if (samples.empty()) throw Error(ErrorKind::InvalidPerturbation, "eps3 needs samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidPerturbation, "eps3 sample not finite");
  }
  const int n = cfg.dim();
  if (samples.size() == 1) return samples.front() * Eigen::MatrixXd::Identity(n, n);
  if (cfg.disc == SpatialDisc::FiniteDifference) {
    const SpatialOperators ops = spatial_operators(cfg);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = eps3_at(samples, ops.grid(k));
    return d;
  }
  // Galerkin entries (2/pi) int_0^pi eps3 sin(ix) sin(jx) dx, composite Simpson.
  constexpr int kPanels = 4096;
  const double h = kPi / kPanels;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q <= kPanels; ++q) {
    const double x = q * h;
    const double w = (q == 0 || q == kPanels) ? 1.0 : (q % 2 ? 4.0 : 2.0);
    const double f = eps3_at(samples, x) * w * h / 3.0 * (2.0 / kPi);
    for (int i = 1; i <= n; ++i) {
      const double si = std::sin(i * x);
      for (int j = 1; j <= n; ++j) g(i - 1, j - 1) += f * si * std::sin(j * x);
    }
  }
  return g;
}

std::vector<int> mode_labels(const ReactionDiffusionConfig &cfg) {
  std::vector<int> labels;
  if (cfg.disc == SpatialDisc::Modal) {
    for (int i = 1; i <= cfg.n_modes; ++i) labels.push_back(i);
  }
  return labels;
}

DelaySystem build_unperturbed(const ReactionDiffusionConfig &cfg) {
  const SpatialOperators ops = spatial_operators(cfg);
  const int n = cfg.dim();
  const Eigen::MatrixXd a0 = ops.laplacian - cfg.a * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd b0 = -cfg.b * Eigen::MatrixXd::Identity(n, n);
  return DelaySystem(OperatorMatrix::from_real(a0, "A0"), cfg.r,
                     OperatorMatrix::from_real(b0, "B0"));
}

DelaySystem build_perturbed(const ReactionDiffusionConfig &cfg, const PerturbationConfig &pert,
                            ExampleKind example) {
  for (double v : {pert.eps1, pert.eps2, pert.eps5}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidPerturbation, "perturbation not finite");
  }
  if (pert.eps3_samples.empty()) throw Error(ErrorKind::InvalidPerturbation, "eps3 needs samples");
  if (example == ExampleKind::DelayedDerivative && pert.eps2 != 0.0) {
    throw Error(ErrorKind::InvalidPerturbation, "eps2 has no role in the delayed-derivative example");
  }
  if (example == ExampleKind::FirstOrderPerturbation && pert.eps5 != 0.0) {
    throw Error(ErrorKind::InvalidPerturbation, "eps5 only enters the delayed-derivative example");
  }
  if (pert.is_zero()) return build_unperturbed(cfg);

  const SpatialOperators ops = spatial_operators(cfg);
  const int n = cfg.dim();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd a = ops.laplacian - cfg.a * ident;
  a += pert.eps1 * ops.laplacian;
  if (pert.eps2 != 0.0) a += pert.eps2 * ops.derivative;
  a -= multiplication_operator(cfg, pert.eps3_samples);

  Eigen::MatrixXd b = -cfg.b * ident;
  if (pert.eps5 != 0.0) b += pert.eps5 * ops.derivative;

  std::vector<KernelAtom> kernel;
  for (const Eps4Atom &atom : pert.eps4_atoms) {
    if (!std::isfinite(atom.weight) || !std::isfinite(atom.theta)) {
      throw Error(ErrorKind::InvalidPerturbation, "eps4 atom not finite");
    }
    kernel.push_back(KernelAtom{atom.theta, OperatorMatrix::from_real(atom.weight * ident)});
  }
  return DelaySystem(OperatorMatrix::from_real(a, "A"), cfg.r, OperatorMatrix::from_real(b, "B"),
                     std::move(kernel));
}

A0BoundReport a0_bound_check(const ReactionDiffusionConfig &cfg, const PerturbationConfig &pert,
                              std::uint64_t seed, int samples) {
  if (cfg.disc != SpatialDisc::FiniteDifference) {
    throw Error(ErrorKind::InvalidInput, "the A0-boundedness check needs the finite-difference path");
  }
  const SpatialOperators ops = spatial_operators(cfg);
  const int n = cfg.dim();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a0 = ops.laplacian - cfg.a * ident;
  const Eigen::MatrixXd a1 = pert.eps1 * ops.laplacian + pert.eps2 * ops.derivative -
                             multiplication_operator(cfg, pert.eps3_samples);
  const double e1 = std::abs(pert.eps1);
  const double e2 = std::abs(pert.eps2);
  const double sup3 = pert.eps3_sup();

  A0BoundReport report;
  report.seed = seed;
  report.holds = true;
  report.displayed_form_holds = true;
  SeededRng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd y;
    if (s % 2 == 0) {
      y = rng.normal_vector(n);
    } else {
      // Smooth samples: a few low sine modes with random amplitudes.
      y = Eigen::VectorXd::Zero(n);
      for (int k = 1; k <= 4; ++k) {
        const double amp = rng.normal();
        for (int i = 0; i < n; ++i) y(i) += amp * std::sin(k * ops.grid(i));
      }
    }
    const double lhs = (a1 * y).norm();
    const double a0y = (a0 * y).norm();
    const double ny = y.norm();
    const double rhs = (e1 + e2 / 2.0) * a0y + (18.0 * e2 + sup3) * ny;
    const double displayed = (e1 + e2 / 2.0) * a0y + sup3 * ny;
    report.lhs_samples.push_back(lhs);
    report.rhs_samples.push_back(rhs);
    report.displayed_rhs_samples.push_back(displayed);
    report.holds = report.holds && lhs <= rhs * (1.0 + 1e-9) + 1e-9;
    report.displayed_form_holds = report.displayed_form_holds && lhs <= displayed * (1.0 + 1e-9) + 1e-9;
  }
  return report;
}

FunctionalBoundReport functional_bound_check(const ReactionDiffusionConfig &cfg, const PerturbationConfig &pert,
                              std::uint64_t seed, int samples) {
  if (pert.eps2 != 0.0) {
    throw Error(ErrorKind::InvalidPerturbation, "the functional bound applies to the delayed-derivative example");
  }
  const SpatialOperators ops = spatial_operators(cfg);
  const int n = cfg.dim();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd neg_a0 = -(ops.laplacian - cfg.a * ident);
  // ||x||_{1/2} = ||(-A0)^{1/2} x||; K maps unit alpha-norm coordinates back to X.
  const CMatrix sqrt_neg_a0 = fractional_power(OperatorMatrix::from_real(neg_a0), 0.5).matrix();
  const CMatrix k = sqrt_neg_a0.partialPivLu().inverse();

  // Atoms merged by node; the delayed derivative sits at theta = -r.
  std::vector<std::pair<double, CMatrix>> nodes;
  auto add = [&](double theta, const CMatrix &w) {
    for (auto &[t, m] : nodes) {
      if (std::abs(t - theta) <= 1e-14 * cfg.r) {
        m += w;
        return;
      }
    }
    nodes.emplace_back(theta, w);
  };
  if (pert.eps5 != 0.0) add(-cfg.r, pert.eps5 * ops.derivative.cast<cplx>() * k);
  for (const Eps4Atom &atom : pert.eps4_atoms) add(atom.theta, atom.weight * k);

  FunctionalBoundReport report;
  for (const auto &[t, m] : nodes) report.dY_value += la::norm2(m);
  report.bound = std::abs(pert.eps5) + pert.var_eps4();
  report.holds = report.dY_value <= report.bound * 1.05 + 1e-9;

  // Lower estimate from sampled phi with sup_theta ||phi(theta)||_{1/2} = 1.
  SeededRng rng(seed);
  for (int s = 0; s < samples && !nodes.empty(); ++s) {
    CVector total = CVector::Zero(n);
    for (const auto &[t, m] : nodes) {
      Eigen::VectorXd u = rng.normal_vector(n);
      u /= u.norm();
      total += m * u.cast<cplx>();
    }
    report.sampled_lower = std::max(report.sampled_lower, total.norm());
  }
  return report;
}

}  // namespace yosida
