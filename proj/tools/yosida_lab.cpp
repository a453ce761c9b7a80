// SPDX-License-Identifier: Apache-2.0
//
// yosida-lab command line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "yosida_lab.h"

namespace {

struct Owned {
  char *s = nullptr;
  ~Owned() { yl_string_free(s); }
};

struct Matrix {
  yl_matrix *m = nullptr;
  ~Matrix() { yl_matrix_free(m); }
};

bool read_text(const std::string &path, std::string &out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int fail(yl_status st) {
  std::cerr << "error: " << yl_last_error() << "\n";
  return yl_exit_code(st);
}

// Writes the report to --json (if given) or stdout and returns the exit code.
int finish(yl_status st, const char *report, const std::string &json_path) {
  if (report == nullptr) return fail(st);
  if (json_path.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << report)) {
      std::cerr << "error: cannot write " << json_path << "\n";
      return yl_exit_code(YL_IO_ERROR);
    }
    std::cout << (st == YL_OK ? "pass" : "FAIL") << "  (" << json_path << ")\n";
  }
  if (st != YL_OK) std::cerr << "error: " << yl_last_error() << "\n";
  return yl_exit_code(st);
}

int load_config(const std::string &path, std::string &text, std::string &dir) {
  if (!read_text(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return yl_exit_code(YL_IO_ERROR);
  }
  const auto parent = std::filesystem::path(path).parent_path();
  dir = parent.empty() ? "." : parent.string();
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Yosida distances, dichotomies and delay generators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", yl_version());

  std::string json_out;
  std::string csv_out;
  std::string config;
  std::optional<std::uint64_t> seed;

  // ydist
  std::string a_path;
  std::string b_path;
  int grid = 0;
  auto *ydist = app.add_subcommand("ydist", "Yosida distance of two matrices");
  ydist->add_option("--a", a_path, "first operator (JSON or text matrix)")->required();
  ydist->add_option("--b", b_path, "second operator")->required();
  ydist->add_option("--grid", grid, "number of mu samples");
  ydist->add_option("--json", json_out, "write the report here");

  // dicho
  std::string gen_path;
  std::string perturbed_path;
  auto *dicho = app.add_subcommand("dicho", "exponential dichotomy of exp(tG)");
  dicho->add_option("--gen", gen_path, "generator matrix")->required();
  dicho->add_option("--perturbed", perturbed_path, "also check persistence against this generator");
  dicho->add_option("--json", json_out, "write the report here");

  // delay
  std::string delay_cmd;
  auto *delay = app.add_subcommand("delay", "delay systems: roots, dichotomy, generator distance");
  delay->add_option("command", delay_cmd, "roots | dicho | ydist")
      ->required()
      ->check(CLI::IsMember({"roots", "dicho", "ydist"}));
  delay->add_option("--config", config, "TOML or JSON config")->required();
  delay->add_option("--json", json_out, "write the report here");

  // model
  std::string model_cmd;
  auto *model = app.add_subcommand("model", "reaction-diffusion examples");
  model->add_option("command", model_cmd, "build | check62 | check64")
      ->required()
      ->check(CLI::IsMember({"build", "check62", "check64"}));
  model->add_option("--config", config, "TOML or JSON config")->required();
  model->add_option("--seed", seed, "random seed");
  model->add_option("--json", json_out, "write the report here");

  // sweep
  auto *sweep = app.add_subcommand("sweep", "perturbation sweep with persistence check");
  sweep->add_option("--config", config, "TOML or JSON sweep spec")->required();
  sweep->add_option("--seed", seed, "random seed");
  sweep->add_option("--json", json_out, "write the report here");
  sweep->add_option("--csv", csv_out, "write knob_value,dY_A,dY_B,dY_G,gap,hyperbolic rows here");

  // demo-domain
  double b0 = 0.3;
  double b1 = 0.5;
  auto *demo = app.add_subcommand("demo-domain", "domain condition of x' = b x(t-1) for two b");
  demo->add_option("--b0", b0, "coefficient defining phi");
  demo->add_option("--b1", b1, "coefficient tested");
  demo->add_option("--json", json_out, "write the report here");

  // regress
  std::string baseline;
  std::string out_dir;
  bool bless = false;
  auto *regress = app.add_subcommand("regress", "re-run the regression set against baselines");
  regress->add_option("--baseline", baseline, "baseline directory")->required();
  regress->add_option("--out", out_dir, "also write the current outputs here");
  regress->add_flag("--bless", bless, "write fresh baselines instead of comparing");
  regress->add_option("--json", json_out, "write the summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return yl_exit_code(YL_INVALID_INPUT);
  }

  Owned report;
  const std::uint64_t *seed_ptr = seed ? &*seed : nullptr;

  if (*ydist) {
    Matrix a;
    Matrix b;
    yl_status st = yl_matrix_load(a_path.c_str(), &a.m);
    if (st != YL_OK) return fail(st);
    st = yl_matrix_load(b_path.c_str(), &b.m);
    if (st != YL_OK) return fail(st);
    st = yl_yosida_distance(a.m, b.m, grid, &report.s);
    return finish(st, report.s, json_out);
  }
  if (*dicho) {
    Matrix g;
    yl_status st = yl_matrix_load(gen_path.c_str(), &g.m);
    if (st != YL_OK) return fail(st);
    if (perturbed_path.empty()) {
      st = yl_check_hyperbolic(g.m, &report.s);
    } else {
      Matrix g1;
      st = yl_matrix_load(perturbed_path.c_str(), &g1.m);
      if (st != YL_OK) return fail(st);
      st = yl_persistence(g.m, g1.m, &report.s);
    }
    return finish(st, report.s, json_out);
  }

  std::string text;
  std::string dir;
  if (*delay || *model || *sweep) {
    if (const int rc = load_config(config, text, dir)) return rc;
  }
  if (*delay) {
    const yl_status st = yl_delay(delay_cmd.c_str(), text.c_str(), dir.c_str(), &report.s);
    return finish(st, report.s, json_out);
  }
  if (*model) {
    const yl_status st = yl_model(model_cmd.c_str(), text.c_str(), seed_ptr, &report.s);
    return finish(st, report.s, json_out);
  }
  if (*sweep) {
    Owned csv;
    const yl_status st = yl_sweep(text.c_str(), seed_ptr, &report.s, csv_out.empty() ? nullptr : &csv.s);
    if (csv.s != nullptr) {
      std::ofstream out(csv_out, std::ios::binary | std::ios::trunc);
      if (!out || !(out << csv.s)) {
        std::cerr << "error: cannot write " << csv_out << "\n";
        return yl_exit_code(YL_IO_ERROR);
      }
    }
    return finish(st, report.s, json_out);
  }
  if (*demo) {
    const yl_status st = yl_demo_domain(b0, b1, &report.s);
    return finish(st, report.s, json_out);
  }
  if (*regress) {
    const yl_status st =
        yl_regress(baseline.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), bless ? 1 : 0, &report.s);
    return finish(st, report.s, json_out);
  }
  return yl_exit_code(YL_INVALID_INPUT);
}
