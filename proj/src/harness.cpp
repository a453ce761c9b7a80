// SPDX-License-Identifier: Apache-2.0

#include "yosida/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <numbers>
#include <thread>

#include "yosida/random.hpp"

namespace yosida::harness {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string &msg) { throw Error(ErrorKind::InvalidInput, msg); }

double get_number(const json &j, const char *key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json &v = j.at(key);
  if (!v.is_number()) bad(std::string("config field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(std::string("config field '") + key + "' must be finite");
  return x;
}

int get_int(const json &j, const char *key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json &v = j.at(key);
  if (!v.is_number_integer()) bad(std::string("config field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string resolve(const std::string &base_dir, const std::string &file) {
  const fs::path p(file);
  return p.is_absolute() ? file : (fs::path(base_dir) / p).string();
}

// Number (1x1 or multiple of I when dim is known), nested real rows, matrix
// object, or file name.
OperatorMatrix matrix_value(const json &v, const std::string &base_dir, Eigen::Index dim,
                            const char *what) {
  if (v.is_number()) {
    const double x = v.get<double>();
    return OperatorMatrix::from_real(x * Eigen::MatrixXd::Identity(std::max<Eigen::Index>(dim, 1),
                                                                   std::max<Eigen::Index>(dim, 1)));
  }
  if (v.is_string()) return io::load_matrix(resolve(base_dir, v.get<std::string>()));
  if (v.is_object()) return io::matrix_from_json(v);
  if (v.is_array()) {
    const auto n = static_cast<Eigen::Index>(v.size());
    if (n == 0) bad(std::string(what) + ": empty matrix");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json &row = v.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        bad(std::string(what) + ": rows must have " + std::to_string(n) + " entries");
      }
      for (Eigen::Index k = 0; k < n; ++k) {
        const json &x = row.at(static_cast<std::size_t>(k));
        if (!x.is_number()) bad(std::string(what) + ": entries must be numbers");
        m(i, k) = x.get<double>();
      }
    }
    return OperatorMatrix::from_real(m);
  }
  bad(std::string(what) + ": unsupported matrix value");
}

std::vector<int> parse_modes(const json &j) {
  std::vector<int> modes;
  const json *v = j.contains("modes") ? &j.at("modes") : (j.contains("n_modes") ? &j.at("n_modes") : nullptr);
  if (v == nullptr) return {1};
  if (v->is_number_integer()) {
    const int count = v->get<int>();
    if (count < 1) bad("modes must be positive");
    for (int n = 1; n <= count; ++n) modes.push_back(n);
  } else if (v->is_array()) {
    for (const json &x : *v) {
      if (!x.is_number_integer() || x.get<int>() < 1) bad("mode labels must be positive integers");
      modes.push_back(x.get<int>());
    }
    if (modes.empty()) bad("modes list is empty");
  } else {
    bad("modes must be a count or a list of mode numbers");
  }
  return modes;
}

bool is_diagonal(const CMatrix &m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != cplx(0.0)) return false;
    }
  }
  return true;
}

// Mode labels when the system decouples, nothing otherwise.
std::optional<std::vector<int>> decoupled_labels(const DelaySystem &sys,
                                                 const ReactionDiffusionConfig &rd) {
  if (rd.disc != SpatialDisc::Modal || !sys.kernel().empty() || !is_diagonal(sys.A().matrix()) ||
      !is_diagonal(sys.B_point().matrix())) {
    return std::nullopt;
  }
  return mode_labels(rd);
}

}  // namespace

DelayConfig delay_config_from_json(const json &j, const std::string &base_dir) {
  if (!j.is_object()) bad("delay config must be a table");
  const double r = get_number(j, "r", 1.0);
  const int order = get_int(j, "N", 20);
  std::optional<std::vector<int>> modes;
  OperatorMatrix a;
  OperatorMatrix b;

  const bool explicit_a = j.contains("A") || j.contains("A_file");
  if (explicit_a) {
    a = matrix_value(j.contains("A") ? j.at("A") : j.at("A_file"), base_dir, 1, "A");
    if (j.contains("B") || j.contains("B_file")) {
      b = matrix_value(j.contains("B") ? j.at("B") : j.at("B_file"), base_dir, a.dim(), "B");
    } else {
      b = OperatorMatrix::zero(a.dim());
    }
  } else {
    if (!j.contains("a") || !j.contains("b")) bad("delay config needs (a, b) or an explicit A");
    const double av = get_number(j, "a", 0.0);
    const double bv = get_number(j, "b", 0.0);
    modes = parse_modes(j);
    std::vector<cplx> ad;
    std::vector<cplx> bd;
    for (int n : *modes) {
      ad.emplace_back(-static_cast<double>(n) * n - av);
      bd.emplace_back(-bv);
    }
    a = OperatorMatrix::diagonal(ad, "A0");
    b = OperatorMatrix::diagonal(bd, "B0");
  }

  std::vector<KernelAtom> kernel;
  if (j.contains("kernel")) {
    const json &atoms = j.at("kernel");
    if (!atoms.is_array()) bad("kernel must be a list of atoms");
    for (const json &atom : atoms) {
      if (!atom.is_object() || !atom.contains("theta")) bad("kernel atom needs theta");
      const double theta = get_number(atom, "theta", 0.0);
      const json *w = atom.contains("weight")        ? &atom.at("weight")
                      : atom.contains("weight_file") ? &atom.at("weight_file")
                                                     : nullptr;
      if (w == nullptr) bad("kernel atom needs weight or weight_file");
      kernel.push_back(KernelAtom{theta, matrix_value(*w, base_dir, a.dim(), "kernel weight")});
    }
  }
  if (!kernel.empty()) modes.reset();
  return DelayConfig{DelaySystem(a, r, b, std::move(kernel)), modes, order};
}

ModelConfig model_config_from_json(const json &j) {
  if (!j.is_object()) bad("model config must be a table");
  ModelConfig cfg;
  cfg.rd.a = get_number(j, "a", cfg.rd.a);
  cfg.rd.b = get_number(j, "b", cfg.rd.b);
  cfg.rd.r = get_number(j, "r", cfg.rd.r);
  if (j.contains("m")) {
    cfg.rd.disc = SpatialDisc::FiniteDifference;
    cfg.rd.m = get_int(j, "m", cfg.rd.m);
  } else {
    cfg.rd.disc = SpatialDisc::Modal;
    cfg.rd.n_modes = get_int(j, "n_modes", cfg.rd.n_modes);
  }
  cfg.rd.validate();

  cfg.pert.eps1 = get_number(j, "eps1", 0.0);
  cfg.pert.eps2 = get_number(j, "eps2", 0.0);
  cfg.pert.eps5 = get_number(j, "eps5", 0.0);
  if (j.contains("eps3_samples")) {
    const json &s = j.at("eps3_samples");
    if (!s.is_array() || s.empty()) bad("eps3_samples must be a non-empty list");
    cfg.pert.eps3_samples.clear();
    for (const json &x : s) {
      if (!x.is_number()) bad("eps3_samples entries must be numbers");
      cfg.pert.eps3_samples.push_back(x.get<double>());
    }
  } else {
    cfg.pert.eps3_samples = {get_number(j, "eps3_const", 0.0)};
  }
  if (j.contains("eps4_atoms")) {
    const json &atoms = j.at("eps4_atoms");
    if (!atoms.is_array()) bad("eps4_atoms must be a list");
    for (const json &atom : atoms) {
      if (!atom.is_object()) bad("eps4 atom must be a table {theta, weight}");
      cfg.pert.eps4_atoms.push_back(Eps4Atom{get_number(atom, "theta", 0.0), get_number(atom, "weight", 0.0)});
    }
  }

  const std::string example = j.contains("example") ? (j.at("example").is_string()
                                                           ? j.at("example").get<std::string>()
                                                           : j.at("example").dump())
                                                    : std::string{};
  if (example.empty()) {
    cfg.example = cfg.pert.eps5 != 0.0 ? ExampleKind::DelayedDerivative : ExampleKind::FirstOrderPerturbation;
  } else if (example == "first_order" || example == "6.3") {
    cfg.example = ExampleKind::FirstOrderPerturbation;
  } else if (example == "delayed_derivative" || example == "6.6") {
    cfg.example = ExampleKind::DelayedDerivative;
  } else {
    bad("unknown example '" + example + "'");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) bad("seed must be an integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

json to_json(const ModelConfig &cfg) {
  json atoms = json::array();
  for (const Eps4Atom &a : cfg.pert.eps4_atoms) atoms.push_back(json{{"theta", a.theta}, {"weight", a.weight}});
  json out{{"a", cfg.rd.a},
           {"b", cfg.rd.b},
           {"r", cfg.rd.r},
           {"eps1", cfg.pert.eps1},
           {"eps2", cfg.pert.eps2},
           {"eps3_samples", cfg.pert.eps3_samples},
           {"eps3_sup", cfg.pert.eps3_sup()},
           {"eps4_atoms", atoms},
           {"var_eps4", cfg.pert.var_eps4()},
           {"eps5", cfg.pert.eps5},
           {"example", cfg.example == ExampleKind::DelayedDerivative ? "delayed_derivative" : "first_order"}};
  if (cfg.rd.disc == SpatialDisc::Modal) {
    out["n_modes"] = cfg.rd.n_modes;
  } else {
    out["m"] = cfg.rd.m;
  }
  return out;
}

// ---------------------------------------------------------------------------

Knob knob_from_string(const std::string &name) {
  if (name == "eps1") return Knob::Eps1;
  if (name == "eps3_sup") return Knob::Eps3Sup;
  if (name == "eps5") return Knob::Eps5;
  if (name == "var_eps4") return Knob::VarEps4;
  if (name == "b_shift") return Knob::BShift;
  if (name == "A_shift_norm") return Knob::AShiftNorm;
  bad("unknown sweep knob '" + name + "'");
}

std::string to_string(Knob knob) {
  switch (knob) {
    case Knob::Eps1: return "eps1";
    case Knob::Eps3Sup: return "eps3_sup";
    case Knob::Eps5: return "eps5";
    case Knob::VarEps4: return "var_eps4";
    case Knob::BShift: return "b_shift";
    case Knob::AShiftNorm: return "A_shift_norm";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (values.empty()) bad("sweep needs at least one knob value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) bad("sweep values must be finite and >= 0");
    if (i > 0 && !(values[i] > values[i - 1])) bad("sweep values must be strictly increasing");
  }
  if (N < 4) bad("sweep N must be at least 4");
  if (knob == Knob::Eps5 && base.pert.eps2 != 0.0) bad("eps5 sweeps need eps2 = 0");
}

SweepSpec sweep_spec_from_json(const json &j) {
  if (!j.is_object()) bad("sweep config must be a table");
  SweepSpec spec;
  spec.base = model_config_from_json(j.contains("base") ? j.at("base") : json::object());
  if (!j.contains("knob") || !j.at("knob").is_string()) bad("sweep config needs a knob name");
  spec.knob = knob_from_string(j.at("knob").get<std::string>());
  if (!j.contains("values") || !j.at("values").is_array()) bad("sweep config needs a values list");
  for (const json &v : j.at("values")) {
    if (!v.is_number()) bad("sweep values must be numbers");
    spec.values.push_back(v.get<double>());
  }
  spec.N = get_int(j, "N", spec.N);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) bad("seed must be an integer");
    spec.seed = j.at("seed").get<std::uint64_t>();
  } else if (spec.base.seed) {
    spec.seed = *spec.base.seed;
  }
  spec.validate();
  return spec;
}

DelaySystem sweep_system(const SweepSpec &spec, double value) {
  ModelConfig cfg = spec.base;
  switch (spec.knob) {
    case Knob::Eps1: cfg.pert.eps1 = value; break;
    case Knob::Eps3Sup: cfg.pert.eps3_samples = {value}; break;
    case Knob::Eps5:
      cfg.pert.eps5 = value;
      cfg.example = ExampleKind::DelayedDerivative;
      break;
    case Knob::VarEps4:
      if (value != 0.0) cfg.pert.eps4_atoms.push_back(Eps4Atom{-cfg.rd.r / 2.0, value});
      break;
    case Knob::BShift: cfg.rd.b += value; break;
    case Knob::AShiftNorm: break;
  }
  DelaySystem sys = build_perturbed(cfg.rd, cfg.pert, cfg.example);
  if (spec.knob == Knob::AShiftNorm && value != 0.0) {
    return DelaySystem(sys.A() + cplx(value) * OperatorMatrix::identity(sys.state_dim()), sys.r(),
                       sys.B_point(), sys.kernel());
  }
  return sys;
}

SweepResult run_sweep(const SweepSpec &spec) {
  spec.validate();
  SweepResult result;
  result.seed = spec.seed;
  const DelaySystem base = sweep_system(spec, 0.0);
  const DelayDichotomyReport base_report =
      dichotomy_of_delay_system(base, decoupled_labels(base, spec.base.rd), spec.N);
  if (!base_report.combined.hyperbolic) {
    throw Error(ErrorKind::BaseNotHyperbolic, "base system of the sweep is not hyperbolic");
  }
  const DiscretizedGenerator g0 = assemble_generator(base, spec.N);
  const CMatrix t0 = matrix_exp(g0.G, 1.0).matrix();
  result.base_margin = persistence_margin(g0.G);

  result.rows.resize(spec.values.size());
  parallel_for(spec.values.size(), [&](std::size_t i) {
    const double v = spec.values[i];
    const DelaySystem sys = sweep_system(spec, v);
    const DiscretizedGenerator g1 = assemble_generator(sys, spec.N);
    const GeneratorDistanceReport dist = generator_yosida_distance(g0, g1);
    const DelayDichotomyReport rep =
        dichotomy_of_delay_system(sys, decoupled_labels(sys, spec.base.rd), spec.N);
    SweepRow &row = result.rows[i];
    row.knob_value = v;
    row.dY_A = dist.dY_A;
    row.dY_B = dist.dY_B;
    row.dY_G = dist.dY_G;
    row.gap = rep.combined.gap;
    row.hyperbolic = rep.combined.hyperbolic;
    row.d_T1 = la::norm2(matrix_exp(g1.G, 1.0).matrix() - t0);
    row.margin = result.base_margin;
    row.predicted_persist = row.d_T1 < row.margin;
    row.sound = !row.predicted_persist || row.hyperbolic;
  });
  for (const SweepRow &row : result.rows) {
    if (!row.hyperbolic && !result.breakpoint) result.breakpoint = row.knob_value;
    if (!row.sound) ++result.soundness_violations;
  }
  return result;
}

json to_json(const SweepResult &result, const SweepSpec &spec) {
  json rows = json::array();
  for (const SweepRow &r : result.rows) {
    rows.push_back(json{{"knob_value", r.knob_value},
                        {"dY_A", r.dY_A},
                        {"dY_B", r.dY_B},
                        {"dY_G", r.dY_G},
                        {"gap", r.gap},
                        {"hyperbolic", r.hyperbolic},
                        {"d_T1", r.d_T1},
                        {"margin", r.margin},
                        {"predicted_persist", r.predicted_persist},
                        {"sound", r.sound}});
  }
  return json{{"knob", to_string(spec.knob)},
              {"N", spec.N},
              {"seed", result.seed},
              {"base", to_json(spec.base)},
              {"base_margin", result.base_margin},
              {"rows", rows},
              {"breakpoint", result.breakpoint ? json(*result.breakpoint) : json(nullptr)},
              {"soundness_violations", result.soundness_violations}};
}

std::string to_csv(const SweepResult &result) {
  std::string out = "knob_value,dY_A,dY_B,dY_G,gap,hyperbolic\n";
  char buf[256];
  for (const SweepRow &r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.knob_value, r.dY_A,
                  r.dY_B, r.dY_G, r.gap, r.hyperbolic ? "true" : "false");
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

DomainDemoReport demo_domain_noninclusion(double b0, double b1, int order) {
  if (!std::isfinite(b0) || !std::isfinite(b1)) bad("b0 and b1 must be finite");
  constexpr double r = 1.0;
  const DelaySystem s0(OperatorMatrix::zero(1), r, OperatorMatrix(CMatrix::Constant(1, 1, b0)));
  const DelaySystem s1(OperatorMatrix::zero(1), r, OperatorMatrix(CMatrix::Constant(1, 1, b1)));
  const DiscretizedGenerator g0 = assemble_generator(s0, order);
  const DiscretizedGenerator g1 = assemble_generator(s1, order);

  // phi(t) = 1 + (1 + t) b0 lies in the domain of the b0 generator only.
  CVector phi(order + 1);
  for (int k = 0; k <= order; ++k) phi(k) = 1.0 + (1.0 + g0.mesh[static_cast<std::size_t>(k)]) * b0;
  const Eigen::MatrixXd d = cheb::differentiation_matrix(order);
  cplx deriv = 0.0;
  for (int k = 0; k <= order; ++k) deriv += (2.0 / r) * d(0, k) * phi(k);

  DomainDemoReport rep;
  rep.b0 = b0;
  rep.b1 = b1;
  rep.order = order;
  rep.derivative_at_0 = deriv.real();
  rep.residual0 = std::abs(deriv - (g0.functional_row() * phi)(0));
  rep.residual1 = std::abs(deriv - (g1.functional_row() * phi)(0));
  rep.pass = rep.residual0 <= 1e-12 && std::abs(rep.residual1 - std::abs(b0 - b1)) <= 1e-12;
  return rep;
}

json to_json(const DomainDemoReport &r) {
  return json{{"b0", r.b0},
              {"b1", r.b1},
              {"order", r.order},
              {"derivative_at_0", r.derivative_at_0},
              {"residual0", r.residual0},
              {"residual1", r.residual1},
              {"pass", r.pass}};
}

// ---------------------------------------------------------------------------
// Regression computations. Small versions of the acceptance runs.

namespace {

constexpr std::uint64_t kRegressSeed = 20241;

OperatorMatrix random_matrix(SeededRng &rng, Eigen::Index n, double scale) {
  return OperatorMatrix::from_real(scale * rng.normal_matrix(n, n));
}

json operators_doc() {
  json out{{"seed", 0}};
  out["norm_diag"] = operator_norm(OperatorMatrix::diagonal({-1.0, 2.0}));
  const OperatorMatrix jordan = OperatorMatrix::from_real((Eigen::MatrixXd(2, 2) << 0, 1, 0, 0).finished());
  out["resolvent_jordan"] = io::matrix_to_json(resolvent(jordan, 1.0));
  out["exp_jordan"] = io::matrix_to_json(matrix_exp(jordan, 1.0));
  const OperatorMatrix companion = OperatorMatrix::from_real((Eigen::MatrixXd(2, 2) << 0, 1, 1, 1).finished());
  std::vector<cplx> eig = spectrum(companion).eigenvalues;
  std::sort(eig.begin(), eig.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
  out["companion_eigenvalues"] = io::to_json(eig);
  const OperatorMatrix transient = OperatorMatrix::from_real((Eigen::MatrixXd(2, 2) << -1, 10, 0, -1).finished());
  const SemigroupBound sb = semigroup_bound(transient, 10.0, 256);
  out["transient_bound"] = json{{"M", sb.M}, {"omega", sb.omega}};
  const OperatorMatrix spd = OperatorMatrix::from_real((Eigen::MatrixXd(2, 2) << 8.5, 7.5, 7.5, 8.5).finished());
  out["spd_quarter_power"] = io::matrix_to_json(fractional_power(spd, 0.25));
  return out;
}

json bounded_distance_doc() {
  SeededRng rng(kRegressSeed);
  json rows = json::array();
  for (int k = 0; k < 8; ++k) {
    const Eigen::Index n = rng.integer(2, 6);
    const OperatorMatrix a = random_matrix(rng, n, 1.0);
    const OperatorMatrix b = random_matrix(rng, n, 1.0);
    const YosidaDistanceEstimate est = yosida_distance(a, b);
    rows.push_back(json{{"dim", n}, {"dY", est.value}, {"norm_diff", operator_norm(a - b)},
                        {"converged", est.converged}});
  }
  return json{{"seed", kRegressSeed}, {"pairs", rows}};
}

json perturbation_doc() {
  SeededRng rng(kRegressSeed + 1);
  json bounded = json::array();
  json differences = json::array();
  for (int k = 0; k < 6; ++k) {
    const Eigen::Index n = rng.integer(2, 5);
    Eigen::MatrixXd am = rng.normal_matrix(n, n);
    am -= (2.0 + am.norm()) * Eigen::MatrixXd::Identity(n, n);
    const OperatorMatrix a = OperatorMatrix::from_real(am);
    const OperatorMatrix c = random_matrix(rng, n, 0.3);
    const SemigroupBound sb = semigroup_bound(a, 10.0, 256);
    const BoundedPerturbationReport rep = verify_bounded_perturbation_bound(a, c, sb);
    bounded.push_back(json{{"lhs", rep.lhs}, {"rhs", rep.rhs}, {"holds", rep.holds}});
    const SemigroupDifferenceReport diff =
        semigroup_difference_bound(a, a + c, {0.25, 0.5, 1.0, 2.0}, sb.M, sb.omega);
    differences.push_back(io::to_json(diff));
  }
  const ClassPReport cp = class_P_constant(OperatorMatrix::from_real(-Eigen::MatrixXd::Identity(2, 2)),
                                           OperatorMatrix::identity(2));
  return json{{"seed", kRegressSeed + 1},
              {"bounded", bounded},
              {"differences", differences},
              {"class_P_closed_form", io::to_json(cp)}};
}

json dichotomy_doc() {
  SeededRng rng(kRegressSeed + 2);
  json gens = json::array();
  for (int k = 0; k < 4; ++k) {
    const Eigen::Index n = rng.integer(2, 5);
    const OperatorMatrix g = random_matrix(rng, n, 1.0);
    const DichotomyReport rep = check_hyperbolic(g);
    std::vector<cplx> eig = rep.t1_spectrum;
    std::sort(eig.begin(), eig.end(), [](cplx x, cplx y) {
      return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y) : std::arg(x) < std::arg(y);
    });
    json entry{{"hyperbolic", rep.hyperbolic}, {"gap", rep.gap}, {"rank", rep.rank},
               {"t1_spectrum", io::to_json(eig)}};
    if (rep.hyperbolic) {
      const OperatorMatrix g1 = g + random_matrix(rng, n, 1e-3);
      entry["persistence"] = io::to_json(verify_persistence(g, g1));
    }
    gens.push_back(std::move(entry));
  }
  return json{{"seed", kRegressSeed + 2}, {"generators", gens}};
}

double newton_scalar_root() {
  // lambda = 0.5 exp(-lambda), real root.
  double x = 0.35;
  for (int it = 0; it < 50; ++it) x -= (x - 0.5 * std::exp(-x)) / (1.0 + 0.5 * std::exp(-x));
  return x;
}

json delay_roots_doc() {
  const DelaySystem scalar(OperatorMatrix::zero(1), 1.0, OperatorMatrix(CMatrix::Constant(1, 1, 0.5)));
  const DiscretizedGenerator gen = assemble_generator(scalar, 20);
  std::vector<cplx> eig = spectrum(gen.G).eigenvalues;
  const cplx rightmost = *std::max_element(eig.begin(), eig.end(), [](cplx x, cplx y) {
    return x.real() < y.real();
  });
  json modes = json::array();
  for (int n = 1; n <= 3; ++n) {
    json roots = json::array();
    for (const CharRoot &root : char_roots_rd(1.0, 0.5, 1.0, n)) roots.push_back(io::to_json(root.lambda));
    modes.push_back(json{{"n", n}, {"roots", roots}});
  }
  return json{{"seed", 0},
              {"scalar_rightmost_eigenvalue", io::to_json(rightmost)},
              {"scalar_root_lambda", newton_scalar_root()},
              {"reaction_diffusion_roots", modes}};
}

json assumption_grid_doc() {
  json rows = json::array();
  for (double a : {0.5, 1.0, 2.0}) {
    for (double r : {0.5, 1.0, 2.0}) {
      ReactionDiffusionConfig cfg;
      cfg.a = a;
      cfg.b = 0.5 / r;
      cfg.r = r;
      cfg.n_modes = 3;
      const DelayDichotomyReport rep = dichotomy_of_delay_system(build_unperturbed(cfg), mode_labels(cfg), 12);
      rows.push_back(json{{"a", a}, {"b", cfg.b}, {"r", r}, {"hyperbolic", rep.combined.hyperbolic},
                          {"gap", rep.combined.gap}, {"root_verdict", rep.root_verdict}});
    }
  }
  return json{{"seed", 0}, {"grid", rows}};
}

json model_bounds_doc() {
  ReactionDiffusionConfig fd;
  fd.disc = SpatialDisc::FiniteDifference;
  fd.m = 32;
  PerturbationConfig pa;
  pa.eps1 = 0.05;
  pa.eps2 = 0.02;
  pa.eps3_samples = {0.1, 0.2, 0.05, 0.0, 0.1};
  const A0BoundReport a0b = a0_bound_check(fd, pa, kRegressSeed + 3);

  ReactionDiffusionConfig modal;
  modal.n_modes = 4;
  PerturbationConfig pf;
  pf.eps5 = 0.05;
  pf.eps4_atoms = {{-0.5, 0.01}, {-0.25, 0.01}};
  const FunctionalBoundReport fb = functional_bound_check(modal, pf, kRegressSeed + 4);
  return json{{"seed", kRegressSeed + 3},
              {"first_order", json{{"holds", a0b.holds}, {"displayed_form_holds", a0b.displayed_form_holds},
                                   {"max_ratio", [&] {
                                      double m = 0.0;
                                      for (std::size_t i = 0; i < a0b.lhs_samples.size(); ++i) {
                                        if (a0b.rhs_samples[i] > 0.0) m = std::max(m, a0b.lhs_samples[i] / a0b.rhs_samples[i]);
                                      }
                                      return m;
                                    }()}}},
              {"delayed_derivative", io::to_json(fb)}};
}

json sweep_doc() {
  SweepSpec spec;
  spec.base.rd.a = 1.0;
  spec.base.rd.b = 0.5;
  spec.base.rd.r = 1.0;
  spec.base.rd.n_modes = 2;
  spec.knob = Knob::BShift;
  spec.values = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0};
  spec.N = 10;
  spec.seed = kRegressSeed;
  return to_json(run_sweep(spec), spec);
}

json generator_distance_doc() {
  SeededRng rng(kRegressSeed + 5);
  json rows = json::array();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Index n = rng.integer(1, 3);
    Eigen::MatrixXd a0 = rng.normal_matrix(n, n) - 2.0 * Eigen::MatrixXd::Identity(n, n);
    const DelaySystem s0(OperatorMatrix::from_real(a0), 1.0, random_matrix(rng, n, 0.3));
    const DelaySystem s1(OperatorMatrix::from_real(a0) + random_matrix(rng, n, 0.1), 1.0,
                         s0.B_point() + random_matrix(rng, n, 0.1));
    const GeneratorDistanceReport rep =
        generator_yosida_distance(assemble_generator(s0, 8), assemble_generator(s1, 8));
    rows.push_back(json{{"dY_G", rep.dY_G}, {"dY_A", rep.dY_A}, {"dY_B", rep.dY_B},
                        {"bound_holds", rep.bound_holds}});
  }
  return json{{"seed", kRegressSeed + 5}, {"pairs", rows}};
}

bool is_absolute_field(const std::string &path) {
  for (const char *key : {"eigen", "spectrum", "lambda", "root"}) {
    if (path.find(key) != std::string::npos) return true;
  }
  return false;
}

std::string show(const json &j) {
  std::string s = io::dump(j, 0);
  while (!s.empty() && (s.back() == '\n')) s.pop_back();
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s.size() > 80 ? s.substr(0, 77) + "..." : s;
}

}  // namespace

std::vector<std::pair<std::string, json>> regression_outputs() {
  std::vector<std::pair<std::string, std::function<json()>>> jobs = {
      {"operators.json", operators_doc},
      {"bounded_distance.json", bounded_distance_doc},
      {"perturbation_bounds.json", perturbation_doc},
      {"dichotomy.json", dichotomy_doc},
      {"delay_roots.json", delay_roots_doc},
      {"assumption_grid.json", assumption_grid_doc},
      {"domain_demo.json", [] { return json{{"seed", 0}, {"report", to_json(demo_domain_noninclusion(0.3, 0.5))}}; }},
      {"model_bounds.json", model_bounds_doc},
      {"generator_distance.json", generator_distance_doc},
      {"sweep.json", sweep_doc},
  };
  std::vector<std::pair<std::string, json>> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { out[i] = {jobs[i].first, jobs[i].second()}; });
  return out;
}

void compare_json(const json &baseline, const json &current, const std::string &path,
                  std::vector<std::string> &diffs) {
  const std::string where = path.empty() ? std::string("<root>") : path;
  if (baseline.is_number() && current.is_number()) {
    const double x = baseline.get<double>();
    const double y = current.get<double>();
    const bool ok = is_absolute_field(path)
                        ? std::abs(x - y) <= 1e-8
                        : std::abs(x - y) <= 1e-6 * std::max(std::abs(x), std::abs(y)) + 1e-14;
    if (!ok) diffs.push_back(where + ": baseline " + show(baseline) + ", current " + show(current));
    return;
  }
  if (baseline.type() != current.type()) {
    diffs.push_back(where + ": baseline " + show(baseline) + ", current " + show(current));
    return;
  }
  if (baseline.is_object()) {
    for (auto it = baseline.begin(); it != baseline.end(); ++it) {
      const std::string sub = path.empty() ? it.key() : path + "." + it.key();
      if (!current.contains(it.key())) {
        diffs.push_back(sub + ": missing in current output");
      } else {
        compare_json(it.value(), current.at(it.key()), sub, diffs);
      }
    }
    for (auto it = current.begin(); it != current.end(); ++it) {
      if (!baseline.contains(it.key())) {
        diffs.push_back((path.empty() ? it.key() : path + "." + it.key()) + ": not in baseline");
      }
    }
    return;
  }
  if (baseline.is_array()) {
    if (baseline.size() != current.size()) {
      diffs.push_back(where + ": baseline has " + std::to_string(baseline.size()) +
                      " entries, current " + std::to_string(current.size()));
      return;
    }
    for (std::size_t i = 0; i < baseline.size(); ++i) {
      compare_json(baseline[i], current[i], path + "[" + std::to_string(i) + "]", diffs);
    }
    return;
  }
  if (baseline != current) {
    diffs.push_back(where + ": baseline " + show(baseline) + ", current " + show(current));
  }
}

RegressionSummary regression_suite(const std::string &baseline_dir, const std::string &out_dir,
                                   bool bless) {
  if (baseline_dir.empty()) bad("regress needs a baseline directory");
  if (!bless && !fs::is_directory(baseline_dir)) {
    throw Error(ErrorKind::IoError, "no baselines in " + baseline_dir + " (run with --bless first)");
  }
  const std::string target = bless ? baseline_dir : out_dir;
  std::error_code ec;
  if (!target.empty()) {
    fs::create_directories(target, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + target + ": " + ec.message());
  }

  RegressionSummary summary;
  summary.blessed = bless;
  for (const auto &[name, doc] : regression_outputs()) {
    summary.files.push_back(name);
    if (!target.empty()) io::write_file((fs::path(target) / name).string(), io::dump(doc));
    if (bless) continue;
    const fs::path base_file = fs::path(baseline_dir) / name;
    if (!fs::exists(base_file)) {
      summary.diffs.push_back(name + ": baseline file missing");
      continue;
    }
    json baseline;
    try {
      baseline = json::parse(io::read_file(base_file.string()));
    } catch (const json::exception &e) {
      summary.diffs.push_back(name + ": baseline is not valid JSON (" + e.what() + ")");
      continue;
    }
    std::vector<std::string> local;
    compare_json(baseline, doc, "", local);
    for (const std::string &d : local) summary.diffs.push_back(name + ": " + d);
  }
  summary.pass = summary.diffs.empty();
  if (!target.empty()) io::write_file((fs::path(target) / "summary.json").string(), io::dump(to_json(summary)));
  return summary;
}

json to_json(const RegressionSummary &s) {
  return json{{"pass", s.pass}, {"blessed", s.blessed}, {"files", s.files}, {"diffs", s.diffs},
              {"seed", kRegressSeed}};
}

// ---------------------------------------------------------------------------

unsigned thread_budget() {
  if (const char *env = std::getenv("YOSIDA_LAB_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn) {
  const std::size_t workers = std::min<std::size_t>(thread_budget(), count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread &t : pool) t.join();
  }
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace yosida::harness
