#include "helpers.hpp"

#include "tsl/config.hpp"
#include "tsl/pipeline.hpp"
#include "tsl/serialize.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace tsl;

namespace {

RunConfig ready_config(const TropicalCurve& c, std::vector<double> T = {5, 10, 20, 40}) {
  RunConfig cfg;
  cfg.T_list = std::move(T);
  cfg.seed = 42;
  cfg.free_phase_seed = 7;
  finalize_config(cfg, c);
  return cfg;
}

}  // namespace

TEST_CASE("curve documents round trip") {
  for (const auto& name : testing::valid_fixtures()) {
    const TropicalCurve c = testing::fixture(name);
    CHECK(parse_curve(serialize_curve(c)) == c);
  }
}

TEST_CASE("Laurent polynomial round trip is exact") {
  std::mt19937_64 rng(3);
  LaurentPoly p;
  for (int i = 0; i < 10; ++i)
    p.coeffs[{static_cast<long>(i % 4), static_cast<long>(i / 4 - 1)}] = Complex(unit_uniform(rng) - 0.5, unit_uniform(rng));
  p.coeffs[{0, 0}] = Complex(0.1, 1e-300);
  const json j = laurent_to_json(p);
  const LaurentPoly q = laurent_from_json(json::parse(j.dump()));
  CHECK(q.coeffs == p.coeffs);
}

TEST_CASE("phase assignment round trip is exact") {
  const TropicalCurve c = testing::fixture("doubled_pants.json");
  const PhaseAssignment a = solve_phases(c, random_free_values(c, 11));
  CHECK(phases_from_json(json::parse(dump(phases_to_json(a)))) == a);
}

TEST_CASE("non-finite numbers become null") {
  CHECK(number_or_null(std::numeric_limits<double>::infinity()).is_null());
  CHECK(number_or_null(2.5) == json(2.5));
  CHECK(dump(json::object()).back() == '\n');
}

TEST_CASE("point cloud CSV and binary round trips") {
  std::mt19937_64 rng(8);
  PointCloud c(3);
  for (int i = 0; i < 100; ++i) c.push({unit_uniform(rng), -1e-7 * unit_uniform(rng), 1e5 * unit_uniform(rng)});
  std::stringstream csv, bin;
  write_csv(csv, c);
  write_binary(bin, c);
  const PointCloud a = read_csv(csv), b = read_binary(bin);
  CHECK(a.dim == 3);
  CHECK(a.coords == c.coords);
  CHECK(b.dim == 3);
  CHECK(b.coords == c.coords);
  std::stringstream junk("not,a\ncloud");
  CHECK(testing::code_of([&] { read_csv(junk); }) == ErrorCode::SyntaxError);
}

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(testing::fixture_text("run_config.json"));
  CHECK(cfg.T_list == std::vector<double>{5, 10, 20, 40});
  CHECK(cfg.free_phase_seed == 7u);
  CHECK(cfg.seed == 42u);
  CHECK(cfg.resolution == 128);
  CHECK(cfg.tolerances.parametrix == 1e-8);
  REQUIRE(cfg.kahler.has_value());
  CHECK(cfg.kahler->theta_hat == doctest::Approx(std::numbers::pi / 2));

  CHECK(testing::code_of([] { parse_config(testing::fixture_text("bad_config.json")); }) == ErrorCode::ConfigError);
  CHECK(testing::code_of([] { parse_config("{\"schema\": 1, \"T_list\": [1,"); }) == ErrorCode::SyntaxError);
  CHECK(testing::code_of([] { parse_config("{\"schema\": 2}"); }) == ErrorCode::ConfigError);
  CHECK(testing::code_of([] { parse_config("{\"schema\": 1, \"colour\": 3}"); }) == ErrorCode::ConfigError);
  CHECK(testing::code_of([] { parse_config("{\"schema\": 1, \"free_phases\": \"seed:x\"}"); }) ==
        ErrorCode::ConfigError);
  const RunConfig rat = parse_config(R"({"schema": 1, "kahler": {"g": [["3/2", 1], [1, "2"]]}})");
  CHECK(rat.kahler->g[0][0] == Rational(3, 2));
}

TEST_CASE("config finalization") {
  const TropicalCurve c = testing::fixture("pants.json");
  RunConfig cfg;
  CHECK(testing::code_of([&] { finalize_config(cfg, c); }) == ErrorCode::ConfigError);  // no seed
  cfg.seed = 1;
  finalize_config(cfg, c);
  REQUIRE(cfg.kahler.has_value());
  CHECK(cfg.kahler->dimension() == 2);

  RunConfig dec = cfg;
  dec.T_list = {10, 5};
  CHECK(testing::code_of([&] { finalize_config(dec, c); }) == ErrorCode::ConfigError);
  RunConfig wrong = cfg;
  wrong.free_phases = std::vector<double>{0.1};
  CHECK(testing::code_of([&] { finalize_config(wrong, c); }) == ErrorCode::ConfigError);
  RunConfig dim = cfg;
  dim.kahler = euclidean_kahler(3, 1.0);
  CHECK(testing::code_of([&] { finalize_config(dim, c); }) == ErrorCode::ConfigError);
  RunConfig low = cfg;
  low.resolution = 8;
  CHECK(testing::code_of([&] { finalize_config(low, c); }) == ErrorCode::ConfigError);
}

TEST_CASE("explicit free phases win over the seed") {
  const TropicalCurve c = testing::fixture("pants.json");
  RunConfig cfg = ready_config(c);
  CHECK(resolve_free_phases(cfg, c) == random_free_values(c, 7));
  cfg.free_phases = std::vector<double>{0.3, 0.5};
  CHECK(resolve_free_phases(cfg, c) == std::vector<double>{0.3, 0.5});
}

TEST_CASE("validate reports deficits") {
  const ValidationOutcome ok = run_validate(testing::fixture("pants.json"));
  CHECK(ok.passed);
  CHECK(ok.report.at("moduli_dimension") == 2);
  const ValidationOutcome bad = run_validate(testing::fixture("unbalanced.json"));
  CHECK_FALSE(bad.passed);
  CHECK(bad.report.at("moduli_dimension").is_null());
  bool nonzero = false;
  for (const auto& [v, d] : bad.report.at("deficits").items())
    for (const auto& x : d) nonzero = nonzero || x.get<std::string>() != "0";
  CHECK(nonzero);
}

TEST_CASE("compile and sample artifacts") {
  const TropicalCurve c = testing::fixture("two_vertex.json");
  const RunConfig cfg = ready_config(c, {10, 20});
  const Artifacts compiled = run_compile(c, cfg);
  REQUIRE(compiled.size() == 2);
  const json d = json::parse(compiled.at("datum_T20.json"));
  CHECK(d.at("matching_report").at("passed") == true);
  CHECK(d.at("T") == 20.0);
  CHECK(d.at("seed") == 42);

  const Artifacts bin = run_sample(c, cfg, OutputFormat::Binary);
  REQUIRE(bin.count("cloud_T10.bin") == 1);
  std::istringstream in(bin.at("cloud_T10.bin"));
  const PointCloud cloud = read_binary(in);
  CHECK(cloud.dim == 2);
  CHECK(cloud.size() > 100);
  CHECK(testing::code_of([] { parse_format("xml"); }) == ErrorCode::ConfigError);
}

TEST_CASE("verify writes every artifact and is deterministic") {
  const TropicalCurve c = testing::fixture("pants.json");
  RunConfig cfg = ready_config(c);
  cfg.resolution = 64;
  const VerifyOutcome a = run_verify(c, cfg);
  const VerifyOutcome b = run_verify(c, cfg);
  for (const char* f : {"convergence.csv", "convergence.json", "decay.json", "linear.json", "summary.json"})
    CHECK(a.files.count(f) == 1);
  CHECK(a.files == b.files);
  CHECK(a.passed);
  const json s = json::parse(a.files.at("summary.json"));
  CHECK(s.at("criteria").at("convergence") == true);
  CHECK(a.files.at("convergence.csv").rfind("T,d_hausdorff\n", 0) == 0);
}

TEST_CASE("short edges make the linear check fail") {
  const TropicalCurve c = testing::fixture("two_vertex.json");
  const RunConfig cfg = ready_config(c, {1, 2, 3});
  const LinearOutcome lin = run_linear(c, cfg, 3.0);
  CHECK_FALSE(lin.passed);
  CHECK(lin.error_code == "NoConvergence");
  CHECK(lin.report.at("cause") == "EdgeTooShort");
  RunConfig two = cfg;
  two.T_list = {1, 2};
  CHECK(testing::code_of([&] { run_verify(c, two); }) == ErrorCode::ConfigError);
}
