#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "saddle/error.hpp"
#include "saddle/experiment.hpp"
#include "saddle/simulate.hpp"

using namespace saddle;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::PreconditionViolation;
}

const char* kQuadratic = R"({
  "problem": {"type": "quadratic", "lambdas": [1, -1]},
  "eps": 0.1, "alpha_mode": 0.1, "inits": [0.00998], "seeds": [0],
  "lipschitz_samples": 200, "validation_samples": 100, "family_samples": 20
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("quadratic config reproduces the exit at 25") {
  auto recs = run_experiment(config_from_json(kQuadratic));
  REQUIRE(recs.size() == 1);
  const auto& r = recs[0];
  REQUIRE(r.first_exit_k.has_value());
  CHECK(*r.first_exit_k == 25);
  CHECK(r.radial_norms.size() == 26);
  CHECK(exit_time(r.radial_norms, r.eps) == *r.first_exit_k);
  CHECK(r.alpha == doctest::Approx(0.1));
  CHECK(r.theta_us_sq == doctest::Approx(0.00998));
  CHECK(r.constants.big_m == 0);
  CHECK(r.k_iota.has_value());
  CHECK(*r.k_iota == 25);
  for (size_t k = 0; k < r.radial_norms.size(); ++k)
    CHECK(r.stable_proj_sq[k] + r.unstable_proj_sq[k] == doctest::Approx(std::pow(r.radial_norms[k] / r.eps, 2)));

  std::string csv = records_to_csv(recs);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 27);  // header plus k = 0..25
  CHECK(csv.rfind("run_id,seed,init_label,k,radial_norm,stable_proj_sq,unstable_proj_sq,exited\n", 0) == 0);
}

TEST_CASE("config validation") {
  CHECK(code_of([] {
          config_from_json(R"({"problem": {"type": "quadratic", "lambdas": [1, -1]}, "inits": [1.5]})");
        }) == ErrorCode::ConfigError);
  CHECK(code_of([] { config_from_json(R"({"problem": {"type": "quadratic", "lambdas": [1, -1]}, "inits": [0.1], "bogus": 1})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { config_from_json(R"({"problem": {"type": "torus"}, "inits": [0.1]})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { config_from_json(R"({"problem": {"type": "cubic"}, "inits": [0.1], "alpha_mode": 1.5})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { config_from_json("{not json"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] {
          config_from_json(R"({"problem": {"type": "quadratic", "lambdas": [1, -1]}, "inits": [{"u0": [1, 2, 3]}]})");
        }) == ErrorCode::ConfigError);
  ExperimentConfig c = config_from_json(R"({"problem": {"type": "cubic"}, "inits": [0.2, {"label": "x", "theta_us_sq": 0.5}], "alpha_mode": [1, 0.1]})");
  CHECK(c.inits.size() == 2);
  CHECK(c.alpha_modes.size() == 2);
}

TEST_CASE("emit preconditions and json roundtrip") {
  CHECK(code_of([] { emit({}, Format::Csv, "/tmp/never_written.csv"); }) == ErrorCode::PreconditionViolation);
  auto recs = run_experiment(config_from_json(R"({
    "problem": {"type": "cubic"}, "eps": 0.05, "alpha_mode": [1.0, 0.1],
    "inits": [0.05, 0.5], "seeds": [3, 1],
    "lipschitz_samples": 300, "validation_samples": 100, "family_samples": 20})"));
  REQUIRE(recs.size() == 8);
  CHECK(code_of([&] { emit(recs, Format::Json, "/nonexistent_dir/x/out.json"); }) == ErrorCode::IoError);

  auto back = records_from_json(records_to_json(recs));
  REQUIRE(back.size() == recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].run_id == recs[i].run_id);
    CHECK(back[i].seed == recs[i].seed);
    CHECK(back[i].init_label == recs[i].init_label);
    CHECK(back[i].alpha == recs[i].alpha);
    CHECK(back[i].first_exit_k == recs[i].first_exit_k);
    CHECK(back[i].k_iota == recs[i].k_iota);
    CHECK(back[i].theorem2_k_bound == recs[i].theorem2_k_bound);
    CHECK(back[i].delta_threshold == recs[i].delta_threshold);
    CHECK(back[i].crude_k_bound == recs[i].crude_k_bound);
    CHECK(back[i].radial_norms == recs[i].radial_norms);
    CHECK(back[i].stable_proj_sq == recs[i].stable_proj_sq);
    CHECK(back[i].constants.big_m == recs[i].constants.big_m);
    CHECK(back[i].constants.eps_max == recs[i].constants.eps_max);
  }
  // sorted by (seed, init_label) and run ids follow that order
  for (size_t i = 1; i < recs.size(); ++i) {
    CHECK(std::make_pair(recs[i - 1].seed, recs[i - 1].init_label) < std::make_pair(recs[i].seed, recs[i].init_label));
    CHECK(recs[i].run_id == recs[i - 1].run_id + 1);
  }
}

TEST_CASE("byte determinism of emitted files") {
  ExperimentConfig c = config_from_json(R"({
    "problem": {"type": "phase_retrieval", "m": 8, "n": 8}, "eps": 0.1,
    "inits": [0.05, 0.5], "seeds": [0, 1, 2],
    "lipschitz_samples": 300, "validation_samples": 100, "family_samples": 20})");
  const auto dir = std::filesystem::temp_directory_path() / "saddle_test_experiment";
  std::filesystem::create_directories(dir);
  for (Format f : {Format::Csv, Format::Json}) {
    const std::string a = (dir / "a.out").string(), b = (dir / "b.out").string();
    emit(run_experiment(c), f, a);
    emit(run_experiment(c), f, b);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
  }
  for (auto fn : {simulate_output, bounds_output, family_output, approx_output, validate_output}) {
    Output x = fn(c), y = fn(c);
    CHECK(x.csv == y.csv);
    CHECK(x.summary_json == y.summary_json);
    CHECK(x.full_json == y.full_json);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("initial_radial puts the requested mass on the unstable side") {
  SaddleProblem p = quadratic_saddle({2, 1, -0.5, -3});
  Spectrum s = saddle_spectrum(p);
  for (double tus : {0.0, 0.1, 0.5, 1.0}) {
    Vec u0 = initial_radial(s, 0.1, tus);
    CHECK(u0.norm() == doctest::Approx(0.1));
    Projections pr = project(u0, s, 0.1);
    CHECK(pr.theta_us_sq() == doctest::Approx(tus));
  }
}
