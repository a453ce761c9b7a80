// SPDX-License-Identifier: Apache-2.0

#include "yosida_lab.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <numbers>
#include <string>

#include "yosida/harness.hpp"

struct yl_matrix {
  yosida::OperatorMatrix m;
};

namespace {

using yosida::Error;
using yosida::ErrorKind;
using yosida::OperatorMatrix;
using yosida::io::json;

thread_local std::string g_last_error;

yl_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError: return YL_IO_ERROR;
    case ErrorKind::InconclusiveVerification:
    case ErrorKind::DivergentClassP:
    case ErrorKind::ContourFailure: return YL_INCONCLUSIVE;
    case ErrorKind::SingularResolvent:
    case ErrorKind::ExpOverflow:
    case ErrorKind::SpectrumFailure:
    case ErrorKind::DiscretizationInconsistency: return YL_NUMERICAL_ERROR;
    default: return YL_INVALID_INPUT;
  }
}

template <class F>
yl_status guard(F &&f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const Error &e) {
    g_last_error = std::string(yosida::to_string(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
    return YL_INTERNAL;
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return YL_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return YL_INTERNAL;
  }
}

char *dup_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void *p, const char *what) {
  if (p == nullptr) throw Error(ErrorKind::InvalidInput, std::string(what) + " is NULL");
}

// Stores the report with its pass flag and maps the verdict to a status.
yl_status emit(json report, bool pass, char **out, yl_status failure = YL_VERIFICATION_FAILED) {
  report["pass"] = pass;
  *out = dup_string(yosida::io::dump(report));
  if (!pass) g_last_error = "verification failed";
  return pass ? YL_OK : failure;
}

yl_status emit_matrix(OperatorMatrix m, yl_matrix **out) {
  *out = new yl_matrix{std::move(m)};
  return YL_OK;
}

json parse(const char *text) {
  need(text, "config text");
  return yosida::io::parse_config(text);
}

json roots_report(const json &cfg, const std::string &base_dir) {
  namespace h = yosida::harness;
  yosida::StripConfig strip;
  if (cfg.contains("sigma_min")) strip.sigma_min = cfg.at("sigma_min").get<double>();
  if (cfg.contains("sigma_max")) strip.sigma_max = cfg.at("sigma_max").get<double>();
  if (cfg.contains("omega")) strip.omega = cfg.at("omega").get<double>();

  const h::DelayConfig dc = h::delay_config_from_json(cfg, base_dir);
  json modes = json::array();
  if (dc.modes) {
    const double a = cfg.at("a").get<double>();
    const double b = cfg.at("b").get<double>();
    for (int n : *dc.modes) {
      json roots = json::array();
      for (const auto &root : yosida::char_roots_rd(a, b, dc.system.r(), n, strip)) {
        roots.push_back(yosida::io::to_json(root));
      }
      modes.push_back(json{{"n", n}, {"roots", roots}});
    }
    return json{{"a", a}, {"b", b}, {"r", dc.system.r()}, {"modes", modes}};
  }
  const auto &sys = dc.system;
  if (sys.state_dim() != 1 || !sys.kernel().empty()) {
    throw Error(ErrorKind::InvalidInput,
                "root scan needs a modal (a, b, modes) config or scalar A and B without kernel");
  }
  const double c0 = sys.A()(0, 0).real();
  const double c1 = sys.B_point()(0, 0).real();
  if (sys.A()(0, 0).imag() != 0.0 || sys.B_point()(0, 0).imag() != 0.0) {
    throw Error(ErrorKind::InvalidInput, "root scan needs real coefficients");
  }
  const double r = sys.r();
  const double smin = strip.sigma_min.value_or(-(std::abs(c0) + std::abs(c1) + 10.0));
  const double smax = strip.sigma_max.value_or(std::max(0.0, c0 + std::abs(c1)) + 1.0);
  const double om = strip.omega.value_or(20.0 * std::numbers::pi / r);
  json roots = json::array();
  for (const auto &root : yosida::scalar_delay_roots(c0, c1, r, smin, smax, om, strip)) {
    roots.push_back(yosida::io::to_json(root));
  }
  // Rightmost eigenvalue of the discretized generator, for comparison.
  const auto gen = yosida::assemble_generator(sys, dc.order);
  const auto eig = yosida::spectrum(gen.G).eigenvalues;
  yosida::cplx right = eig.front();
  for (const auto &z : eig) {
    if (z.real() > right.real()) right = z;
  }
  return json{{"c0", c0},
              {"c1", c1},
              {"r", r},
              {"N", dc.order},
              {"roots", roots},
              {"generator_rightmost", yosida::io::to_json(right)}};
}

}  // namespace

extern "C" {

int yl_exit_code(yl_status status) {
  switch (status) {
    case YL_OK: return 0;
    case YL_VERIFICATION_FAILED: return 2;
    case YL_INCONCLUSIVE:
    case YL_NUMERICAL_ERROR:
    case YL_INTERNAL: return 3;
    case YL_INVALID_INPUT:
    case YL_IO_ERROR: return 4;
  }
  return 3;
}

const char *yl_last_error(void) { return g_last_error.c_str(); }

const char *yl_version(void) { return "1.0.0"; }

void yl_string_free(char *s) { std::free(s); }

yl_status yl_matrix_create(int dim, const double *re, const double *im, yl_matrix **out) {
  return guard([&] {
    need(re, "re");
    need(out, "out");
    if (dim < 1) throw Error(ErrorKind::InvalidInput, "dim must be positive");
    yosida::CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int k = 0; k < dim; ++k) {
        const int idx = i * dim + k;
        m(i, k) = yosida::cplx(re[idx], im != nullptr ? im[idx] : 0.0);
      }
    }
    return emit_matrix(OperatorMatrix(std::move(m)), out);
  });
}

yl_status yl_matrix_load(const char *path, yl_matrix **out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    return emit_matrix(yosida::io::load_matrix(path), out);
  });
}

yl_status yl_matrix_save(const yl_matrix *m, const char *path, int text_format) {
  return guard([&] {
    need(m, "matrix");
    need(path, "path");
    yosida::io::save_matrix(path, m->m,
                            text_format ? yosida::io::MatrixFormat::Text : yosida::io::MatrixFormat::Json);
    return YL_OK;
  });
}

yl_status yl_matrix_dim(const yl_matrix *m, int *dim) {
  return guard([&] {
    need(m, "matrix");
    need(dim, "dim");
    *dim = static_cast<int>(m->m.dim());
    return YL_OK;
  });
}

yl_status yl_matrix_get(const yl_matrix *m, double *re, double *im) {
  return guard([&] {
    need(m, "matrix");
    need(re, "re");
    const auto n = m->m.dim();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        re[i * n + k] = m->m(i, k).real();
        if (im != nullptr) im[i * n + k] = m->m(i, k).imag();
      }
    }
    return YL_OK;
  });
}

void yl_matrix_free(yl_matrix *m) { delete m; }

yl_status yl_operator_norm(const yl_matrix *a, double *out) {
  return guard([&] {
    need(a, "matrix");
    need(out, "out");
    *out = yosida::operator_norm(a->m);
    return YL_OK;
  });
}

yl_status yl_resolvent(const yl_matrix *a, double lambda_re, double lambda_im, yl_matrix **out) {
  return guard([&] {
    need(a, "matrix");
    need(out, "out");
    return emit_matrix(yosida::resolvent(a->m, yosida::cplx(lambda_re, lambda_im)), out);
  });
}

yl_status yl_matrix_exp(const yl_matrix *a, double t, yl_matrix **out) {
  return guard([&] {
    need(a, "matrix");
    need(out, "out");
    return emit_matrix(yosida::matrix_exp(a->m, t), out);
  });
}

yl_status yl_fractional_power(const yl_matrix *a, double alpha, yl_matrix **out) {
  return guard([&] {
    need(a, "matrix");
    need(out, "out");
    return emit_matrix(yosida::fractional_power(a->m, alpha), out);
  });
}

yl_status yl_yosida_distance(const yl_matrix *a, const yl_matrix *b, int grid_points,
                             char **report_json) {
  return guard([&] {
    need(a, "A");
    need(b, "B");
    need(report_json, "report_json");
    yosida::MuGridConfig cfg;
    if (grid_points > 0) cfg.points = grid_points;
    const auto est = yosida::yosida_distance(a->m, b->m, cfg);
    const double norm = yosida::operator_norm(a->m - b->m);
    const bool matches = std::abs(est.value - norm) <= 1e-4 * (1.0 + norm);
    json report{{"estimate", yosida::io::to_json(est)},
                {"norm_difference", norm},
                {"matches_norm_difference", matches}};
    if (!est.converged) return emit(report, false, report_json, YL_INCONCLUSIVE);
    return emit(report, matches, report_json);
  });
}

yl_status yl_check_hyperbolic(const yl_matrix *g, char **report_json) {
  return guard([&] {
    need(g, "generator");
    need(report_json, "report_json");
    return emit(yosida::io::to_json(yosida::check_hyperbolic(g->m)), true, report_json);
  });
}

yl_status yl_persistence(const yl_matrix *g0, const yl_matrix *g1, char **report_json) {
  return guard([&] {
    need(g0, "G0");
    need(g1, "G1");
    need(report_json, "report_json");
    const auto rep = yosida::verify_persistence(g0->m, g1->m);
    return emit(yosida::io::to_json(rep), rep.sound, report_json);
  });
}

yl_status yl_delay(const char *command, const char *config_text, const char *base_dir,
                   char **report_json) {
  return guard([&] {
    namespace h = yosida::harness;
    need(command, "command");
    need(report_json, "report_json");
    const json cfg = parse(config_text);
    const std::string dir = base_dir != nullptr ? base_dir : ".";
    const std::string cmd = command;
    if (cmd == "roots") return emit(roots_report(cfg, dir), true, report_json);
    if (cmd == "dicho") {
      const h::DelayConfig dc = h::delay_config_from_json(cfg, dir);
      const auto rep = yosida::dichotomy_of_delay_system(dc.system, dc.modes, dc.order);
      json out = yosida::io::to_json(rep);
      out["N"] = dc.order;
      out["system"] = yosida::io::to_json(dc.system);
      return emit(out, true, report_json);
    }
    if (cmd == "ydist") {
      if (!cfg.contains("base") || !cfg.contains("perturbed")) {
        throw Error(ErrorKind::InvalidInput, "delay ydist config needs base and perturbed tables");
      }
      json base = cfg.at("base");
      json pert = cfg.at("perturbed");
      if (cfg.contains("N")) {
        base["N"] = cfg.at("N");
        pert["N"] = cfg.at("N");
      }
      const h::DelayConfig d0 = h::delay_config_from_json(base, dir);
      const h::DelayConfig d1 = h::delay_config_from_json(pert, dir);
      const auto rep = yosida::generator_yosida_distance(yosida::assemble_generator(d0.system, d0.order),
                                                         yosida::assemble_generator(d1.system, d1.order));
      json out = yosida::io::to_json(rep);
      out["rhs"] = 2.0 * rep.dY_B + rep.dY_A;
      return emit(out, rep.bound_holds, report_json);
    }
    throw Error(ErrorKind::InvalidInput, "unknown delay command '" + cmd + "'");
  });
}

yl_status yl_model(const char *command, const char *config_text, const uint64_t *seed,
                   char **report_json) {
  return guard([&] {
    namespace h = yosida::harness;
    need(command, "command");
    need(report_json, "report_json");
    h::ModelConfig cfg = h::model_config_from_json(parse(config_text));
    if (seed != nullptr) cfg.seed = *seed;
    const std::string cmd = command;
    json out{{"config", h::to_json(cfg)}};
    if (cmd == "build") {
      out["system"] = yosida::io::to_json(yosida::build_perturbed(cfg.rd, cfg.pert, cfg.example));
      return emit(out, true, report_json);
    }
    if (cmd == "check62") {
      const auto rep = yosida::a0_bound_check(cfg.rd, cfg.pert, cfg.seed.value_or(62));
      out["report"] = yosida::io::to_json(rep);
      out["seed"] = rep.seed;
      return emit(out, rep.holds, report_json);
    }
    if (cmd == "check64") {
      const std::uint64_t s = cfg.seed.value_or(64);
      const auto rep = yosida::functional_bound_check(cfg.rd, cfg.pert, s);
      out["report"] = yosida::io::to_json(rep);
      out["seed"] = s;
      return emit(out, rep.holds, report_json);
    }
    throw Error(ErrorKind::InvalidInput, "unknown model command '" + cmd + "'");
  });
}

yl_status yl_sweep(const char *config_text, const uint64_t *seed, char **report_json, char **csv) {
  return guard([&] {
    namespace h = yosida::harness;
    need(report_json, "report_json");
    h::SweepSpec spec = h::sweep_spec_from_json(parse(config_text));
    if (seed != nullptr) spec.seed = *seed;
    const h::SweepResult result = h::run_sweep(spec);
    if (csv != nullptr) *csv = dup_string(h::to_csv(result));
    return emit(h::to_json(result, spec), result.soundness_violations == 0, report_json);
  });
}

yl_status yl_demo_domain(double b0, double b1, char **report_json) {
  return guard([&] {
    need(report_json, "report_json");
    const auto rep = yosida::harness::demo_domain_noninclusion(b0, b1);
    return emit(yosida::harness::to_json(rep), rep.pass, report_json);
  });
}

yl_status yl_regress(const char *baseline_dir, const char *out_dir, int bless, char **summary_json) {
  return guard([&] {
    need(baseline_dir, "baseline_dir");
    need(summary_json, "summary_json");
    const auto summary = yosida::harness::regression_suite(baseline_dir, out_dir != nullptr ? out_dir : "",
                                                           bless != 0);
    json out = yosida::harness::to_json(summary);
    out.erase("pass");
    return emit(out, summary.pass, summary_json);
  });
}

}  // extern "C"
