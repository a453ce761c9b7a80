// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "util.hpp"
#include "yosida/harness.hpp"

using namespace yosida;
using namespace yosida::harness;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

// b at which lambda + 1 + b e^{-lambda} = -1 has a root on the imaginary axis:
// 2 + b cos(xi) = 0 and xi = b sin(xi), i.e. tan(xi) = -xi/2 on (pi/2, pi).
double critical_b() {
  double xi = 2.3;
  for (int it = 0; it < 60; ++it) {
    const double f = std::tan(xi) + xi / 2.0;
    const double df = 1.0 / (std::cos(xi) * std::cos(xi)) + 0.5;
    xi -= f / df;
  }
  return xi / std::sin(xi);
}

SweepSpec spec_for(Knob knob, std::vector<double> values) {
  SweepSpec s;
  s.base.rd.a = 1.0;
  s.base.rd.b = 0.5;
  s.base.rd.n_modes = 1;
  s.knob = knob;
  s.values = std::move(values);
  s.N = 12;
  return s;
}

fs::path fresh_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "yosida_unit_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("modal delay config") {
  const auto cfg = delay_config_from_json(io::parse_config("a = 1\nb = 0.5\nn_modes = 3\nN = 14\n"));
  REQUIRE(cfg.modes.has_value());
  CHECK(*cfg.modes == std::vector<int>{1, 2, 3});
  CHECK(cfg.order == 14);
  CHECK(cfg.system.A() == diag({-2, -5, -10}));
  CHECK(cfg.system.B_point() == diag({-0.5, -0.5, -0.5}));

  const auto listed = delay_config_from_json(io::json::parse(R"({"a": 1, "b": 0.5, "modes": [2, 5]})"));
  CHECK(*listed.modes == std::vector<int>{2, 5});
  CHECK(listed.system.A() == diag({-5, -26}));
}

TEST_CASE("explicit delay config with files and kernel") {
  const fs::path dir = fresh_dir("delaycfg");
  io::save_matrix((dir / "a.txt").string(), real({{0, 1}, {-1, 0}}), io::MatrixFormat::Text);
  const auto cfg = delay_config_from_json(io::json::parse(R"({
      "A_file": "a.txt", "B": [[0.1, 0], [0, 0.2]], "r": 2,
      "kernel": [{"theta": -1, "weight": 0.3}]})"),
                                          dir.string());
  CHECK_FALSE(cfg.modes.has_value());
  CHECK(cfg.system.A() == real({{0, 1}, {-1, 0}}));
  CHECK(cfg.system.B_point() == real({{0.1, 0}, {0, 0.2}}));
  CHECK(cfg.system.r() == 2.0);
  REQUIRE(cfg.system.kernel().size() == 1);
  CHECK(cfg.system.kernel()[0].weight == 0.3 * OperatorMatrix::identity(2));

  CHECK(error_kind([] { delay_config_from_json(io::json::parse(R"({"b": 1})")); }) ==
        ErrorKind::InvalidInput);
  CHECK(error_kind([&] { delay_config_from_json(io::json::parse(R"({"A_file": "missing.txt"})"), dir.string()); }) ==
        ErrorKind::IoError);
}

TEST_CASE("model config") {
  const auto m = model_config_from_json(io::json::parse(
      R"({"a": 2, "n_modes": 4, "eps5": 0.05, "eps4_atoms": [{"theta": -0.5, "weight": 0.02}], "seed": 9})"));
  CHECK(m.rd.a == 2.0);
  CHECK(m.rd.n_modes == 4);
  CHECK(m.example == ExampleKind::DelayedDerivative);
  CHECK(m.pert.var_eps4() == doctest::Approx(0.02));
  CHECK(m.seed == 9u);

  const auto f = model_config_from_json(io::json::parse(R"({"m": 32, "eps3_const": 0.1})"));
  CHECK(f.rd.disc == SpatialDisc::FiniteDifference);
  CHECK(f.pert.eps3_sup() == doctest::Approx(0.1));
  CHECK(f.example == ExampleKind::FirstOrderPerturbation);

  CHECK(error_kind([] { model_config_from_json(io::json::parse(R"({"example": "other"})")); }) ==
        ErrorKind::InvalidInput);
  CHECK(model_config_from_json(io::json::parse(R"({"example": "delayed_derivative"})")).example ==
        ExampleKind::DelayedDerivative);
}

TEST_CASE("knob names round trip") {
  for (auto k : {Knob::Eps1, Knob::Eps3Sup, Knob::Eps5, Knob::VarEps4, Knob::BShift, Knob::AShiftNorm}) {
    CHECK(knob_from_string(to_string(k)) == k);
  }
  CHECK(error_kind([] { knob_from_string("eps9"); }) == ErrorKind::InvalidInput);
}

TEST_CASE("sweep spec validation") {
  CHECK(error_kind([] { spec_for(Knob::Eps1, {0.1, 0.1}).validate(); }) == ErrorKind::InvalidInput);
  CHECK(error_kind([] { spec_for(Knob::Eps1, {-0.1, 0.1}).validate(); }) == ErrorKind::InvalidInput);
  CHECK(error_kind([] { spec_for(Knob::Eps1, {}).validate(); }) == ErrorKind::InvalidInput);
  auto s = spec_for(Knob::Eps1, {0.0});
  s.N = 3;
  CHECK(error_kind([&] { s.validate(); }) == ErrorKind::InvalidInput);

  const auto parsed = sweep_spec_from_json(io::parse_config(
      "knob = \"b_shift\"\nvalues = [0, 0.5]\nN = 8\nseed = 4\n[base]\na = 1\nb = 0.5\n"));
  CHECK(parsed.knob == Knob::BShift);
  CHECK(parsed.values == std::vector<double>{0.0, 0.5});
  CHECK(parsed.seed == 4u);
}

TEST_CASE("knob value zero reproduces the base") {
  for (auto k : {Knob::Eps1, Knob::Eps3Sup, Knob::Eps5, Knob::VarEps4, Knob::BShift, Knob::AShiftNorm}) {
    auto s = spec_for(k, {0.0});
    s.base.rd.n_modes = 3;
    CHECK(sweep_system(s, 0.0) == build_unperturbed(s.base.rd));
  }
  auto s = spec_for(Knob::VarEps4, {0.1});
  const auto sys = sweep_system(s, 0.1);
  REQUIRE(sys.kernel().size() == 1);
  CHECK(sys.kernel()[0].theta == -0.5);
}

TEST_CASE("zero sweep") {
  const auto spec = spec_for(Knob::Eps1, {0.0});
  const auto r = run_sweep(spec);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].hyperbolic);
  CHECK(r.rows[0].dY_A == 0.0);
  CHECK(r.rows[0].dY_B == 0.0);
  CHECK(r.rows[0].dY_G == 0.0);
  CHECK_FALSE(r.breakpoint.has_value());
  CHECK(r.soundness_violations == 0);
}

TEST_CASE("b shift sweep finds the crossing") {
  const double bc = critical_b();
  CHECK(bc == doctest::Approx(3.0396).epsilon(1e-4));
  // the sufficient conditions (b < 1, b < a + 1 = 2) both fail from shift 1.5 on
  auto spec = spec_for(Knob::BShift, {0.0, 0.5, 1.0, 1.5, 2.0, bc - 0.5, 3.0});
  spec.N = 20;
  const auto r = run_sweep(spec);
  REQUIRE(r.breakpoint.has_value());
  CHECK(*r.breakpoint == bc - 0.5);
  CHECK(*r.breakpoint >= 1.5);
  CHECK(r.soundness_violations == 0);
  for (const auto &row : r.rows) {
    CHECK(row.dY_B == doctest::Approx(row.knob_value).epsilon(1e-12));
    CHECK(row.hyperbolic == (row.knob_value != bc - 0.5));
  }
}

TEST_CASE("small multiplier sweep stays hyperbolic") {
  const auto r = run_sweep(spec_for(Knob::Eps3Sup, {0.001, 0.01}));
  for (const auto &row : r.rows) {
    CHECK(row.hyperbolic);
    CHECK(row.predicted_persist);
    CHECK(row.dY_A == doctest::Approx(row.knob_value).epsilon(1e-4));
  }
}

TEST_CASE("non-hyperbolic base is rejected") {
  auto spec = spec_for(Knob::Eps1, {0.0, 0.1});
  spec.base.rd.b = critical_b();
  spec.N = 20;
  CHECK(error_kind([&] { run_sweep(spec); }) == ErrorKind::BaseNotHyperbolic);
}

TEST_CASE("sweep output is deterministic") {
  const auto spec = spec_for(Knob::AShiftNorm, {0.0, 0.5, 1.0});
  const auto a = run_sweep(spec);
  const auto b = run_sweep(spec);
  CHECK(io::dump(to_json(a, spec)) == io::dump(to_json(b, spec)));
  const std::string csv = to_csv(a);
  CHECK(csv.rfind("knob_value,dY_A,dY_B,dY_G,gap,hyperbolic\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("domain non-inclusion witness") {
  const auto same = demo_domain_noninclusion(0.3, 0.3);
  CHECK(std::abs(same.residual0) <= 1e-12);
  CHECK(std::abs(same.residual1) <= 1e-12);
  CHECK(same.pass);

  const auto d = demo_domain_noninclusion(0.3, 0.5);
  CHECK(std::abs(d.residual0) <= 1e-12);
  CHECK(std::abs(std::abs(d.residual1) - 0.2) <= 1e-12);
  CHECK(d.pass);

  const auto e = demo_domain_noninclusion(1.0, 0.0);
  CHECK(std::abs(std::abs(e.residual1) - 1.0) <= 1e-12);
  CHECK(e.pass);
}

TEST_CASE("field-wise comparison") {
  const auto base = io::json::parse(R"({"x": 1.0, "eigen": [0.5], "flag": true, "name": "a", "rows": [{"v": 2.0}]})");
  std::vector<std::string> diffs;
  compare_json(base, base, "", diffs);
  CHECK(diffs.empty());

  auto cur = base;
  cur["x"] = 1.0 + 1e-9;
  cur["eigen"][0] = 0.5 + 5e-9;
  compare_json(base, cur, "", diffs);
  CHECK(diffs.empty());

  cur["eigen"][0] = 0.5 + 1e-7;
  cur["rows"][0]["v"] = 2.1;
  cur["flag"] = false;
  cur.erase("name");
  cur["extra"] = 1;
  compare_json(base, cur, "", diffs);
  REQUIRE(diffs.size() == 5);
  const auto has = [&](const std::string &needle) {
    return std::any_of(diffs.begin(), diffs.end(),
                       [&](const std::string &d) { return d.find(needle) != std::string::npos; });
  };
  CHECK(has("eigen[0]"));
  CHECK(has("rows[0].v"));
  CHECK(has("flag"));
  CHECK(has("name: missing"));
  CHECK(has("extra: not in baseline"));
}

TEST_CASE("regression baselines: bless, compare, negative control") {
  const fs::path dir = fresh_dir("regress");
  const std::string baseline = (dir / "baseline").string();
  CHECK(error_kind([&] { regression_suite(baseline, "", false); }) == ErrorKind::IoError);

  const auto blessed = regression_suite(baseline, "", true);
  CHECK(blessed.pass);
  CHECK(blessed.blessed);
  CHECK(fs::exists(fs::path(baseline) / "summary.json"));

  const auto again = regression_suite(baseline, (dir / "out").string(), false);
  CHECK(again.pass);
  CHECK(again.diffs.empty());
  CHECK(io::read_file((dir / "out" / "sweep.json").string()) ==
        io::read_file((fs::path(baseline) / "sweep.json").string()));

  const std::string demo = (fs::path(baseline) / "domain_demo.json").string();
  auto doc = io::parse_config(io::read_file(demo));
  doc["report"]["residual1"] = doc["report"]["residual1"].get<double>() + 0.01;
  io::write_file(demo, io::dump(doc));
  const auto broken = regression_suite(baseline, "", false);
  CHECK_FALSE(broken.pass);
  REQUIRE(broken.diffs.size() == 1);
  CHECK(broken.diffs[0].find("domain_demo.json: report.residual1") == 0);
}

TEST_CASE("parallel_for is ordered and propagates errors") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));

  std::atomic<int> calls{0};
  try {
    parallel_for(20, [&](std::size_t i) {
      ++calls;
      if (i == 3 || i == 7) throw Error(ErrorKind::InvalidInput, "item " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const Error &e) {
    CHECK(std::string(e.what()) == "item 3");
  }
  CHECK(calls.load() == 20);
}

TEST_CASE("thread budget honours the environment") {
  ::setenv("YOSIDA_LAB_THREADS", "3", 1);
  CHECK(thread_budget() == 3u);
  ::setenv("YOSIDA_LAB_THREADS", "0", 1);
  CHECK(thread_budget() >= 1u);
  ::unsetenv("YOSIDA_LAB_THREADS");
  CHECK(thread_budget() >= 1u);
}

}  // TEST_SUITE
