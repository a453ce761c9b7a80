// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "yosida/delay.hpp"
#include "yosida/io.hpp"
#include "yosida/models.hpp"

namespace yosida::harness {

using io::json;

// ---------------------------------------------------------------------------
// Config readers. Relative file names inside a config resolve against base_dir.

struct DelayConfig {
  DelaySystem system;
  std::optional<std::vector<int>> modes;  // set for modal (a, b, modes) configs
  int order = 20;
};

/// {a, b, r, modes | n_modes, N, kernel: [{theta, weight | weight_file}]} or
/// {A | A_file, B | B_file, r, N, kernel}. A scalar weight w means w I.
DelayConfig delay_config_from_json(const json &j, const std::string &base_dir = ".");

struct ModelConfig {
  ReactionDiffusionConfig rd;
  PerturbationConfig pert;
  ExampleKind example = ExampleKind::FirstOrderPerturbation;
  std::optional<std::uint64_t> seed;
};

/// {a, b, r, n_modes | m, eps1, eps2, eps3_samples | eps3_const,
///  eps4_atoms: [{theta, weight}], eps5, example, seed}.
ModelConfig model_config_from_json(const json &j);
json to_json(const ModelConfig &cfg);

// ---------------------------------------------------------------------------
// Sweeps

enum class Knob { Eps1, Eps3Sup, Eps5, VarEps4, BShift, AShiftNorm };

Knob knob_from_string(const std::string &name);
std::string to_string(Knob knob);

struct SweepSpec {
  ModelConfig base;
  Knob knob = Knob::Eps1;
  std::vector<double> values;
  int N = 12;
  std::uint64_t seed = 0;

  void validate() const;
};

SweepSpec sweep_spec_from_json(const json &j);

struct SweepRow {
  double knob_value = 0.0;
  double dY_A = 0.0;
  double dY_B = 0.0;
  double dY_G = 0.0;
  double gap = 0.0;
  bool hyperbolic = false;
  double d_T1 = 0.0;
  double margin = 0.0;
  bool predicted_persist = false;
  bool sound = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> breakpoint;
  int soundness_violations = 0;
  double base_margin = 0.0;
  std::uint64_t seed = 0;
};

/// Perturbed system for one knob value; knob value 0 reproduces the base exactly.
DelaySystem sweep_system(const SweepSpec &spec, double value);

SweepResult run_sweep(const SweepSpec &spec);

json to_json(const SweepResult &result, const SweepSpec &spec);
/// Columns knob_value,dY_A,dY_B,dY_G,gap,hyperbolic.
std::string to_csv(const SweepResult &result);

// ---------------------------------------------------------------------------
// Domain non-inclusion witness for x'(t) = b x(t - 1).

struct DomainDemoReport {
  double b0 = 0.0;
  double b1 = 0.0;
  double derivative_at_0 = 0.0;
  double residual0 = 0.0;  // phi'(0) - b0 phi(-1)
  double residual1 = 0.0;  // phi'(0) - b1 phi(-1)
  int order = 0;
  bool pass = false;       // residual0 <= 1e-12 and |residual1 - |b0 - b1|| <= 1e-12
};

DomainDemoReport demo_domain_noninclusion(double b0, double b1, int order = 8);
json to_json(const DomainDemoReport &r);

// ---------------------------------------------------------------------------
// Regression baselines

struct RegressionSummary {
  bool pass = true;
  bool blessed = false;
  std::vector<std::string> files;
  std::vector<std::string> diffs;  // "file: field: baseline X, current Y"
};

/// Named JSON documents produced by the regression computations, in a fixed order.
std::vector<std::pair<std::string, json>> regression_outputs();

/// Field-wise comparison. Distances 1e-6 relative, eigenvalue and root fields
/// 1e-8 absolute, strings and booleans exact. Appends one line per mismatch.
void compare_json(const json &baseline, const json &current, const std::string &path,
                  std::vector<std::string> &diffs);

/// Writes outputs to out_dir (baseline_dir when blessing) and compares them with
/// baseline_dir otherwise. summary.json is written but never compared.
RegressionSummary regression_suite(const std::string &baseline_dir, const std::string &out_dir,
                                   bool bless);
json to_json(const RegressionSummary &s);

// ---------------------------------------------------------------------------

/// Worker count: YOSIDA_LAB_THREADS if set and positive, else hardware concurrency.
unsigned thread_budget();

/// Calls fn(i) for i in [0, count) on up to thread_budget() threads. Results are
/// indexed, so output order never depends on scheduling. The first exception
/// (by index) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn);

}  // namespace yosida::harness
