#include "saddle/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "saddle/approx.hpp"
#include "saddle/error.hpp"
#include "saddle/perturb.hpp"
#include "saddle/simulate.hpp"

namespace saddle {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) return finite_or_null(*v);
  else return *v;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double get_number(const json& j, const char* key) {
  if (!j.at(key).is_number()) config_error(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key) {
  if (!j.at(key).is_number_integer()) config_error(std::string(key) + " must be an integer");
  return j.at(key).get<int>();
}

int problem_dim(const ProblemSpec& p) {
  if (p.type == "quadratic") return static_cast<int>(p.lambdas.size());
  if (p.type == "cubic") return 2;
  return p.n;
}

struct RunSetup {
  std::uint64_t seed = 0;
  std::string label;
  double alpha_mode = 1.0;
  const InitSpec* init = nullptr;
};

std::vector<RunSetup> enumerate_runs(const ExperimentConfig& cfg) {
  std::vector<RunSetup> runs;
  for (auto seed : cfg.seeds) {
    for (double mode : cfg.alpha_modes) {
      for (size_t i = 0; i < cfg.inits.size(); ++i) {
        const InitSpec& init = cfg.inits[i];
        std::string base = init.label;
        if (base.empty())
          base = init.theta_us_sq ? "tus=" + short_num(*init.theta_us_sq) : "u0_" + std::to_string(i);
        RunSetup r;
        r.seed = seed;
        r.alpha_mode = mode;
        r.init = &init;
        r.label = cfg.alpha_modes.size() > 1 ? "alpha=" + short_num(mode) + "/" + base : base;
        runs.push_back(r);
      }
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const RunSetup& a, const RunSetup& b) {
    return std::tie(a.seed, a.label) < std::tie(b.seed, b.label);
  });
  for (size_t i = 1; i < runs.size(); ++i)
    if (runs[i].seed == runs[i - 1].seed && runs[i].label == runs[i - 1].label)
      config_error("duplicate init label " + runs[i].label);
  return runs;
}

struct Prepared {
  SaddleProblem problem;
  Spectrum spectrum;
  Vec u0;
  double alpha = 0.0;
};

Prepared prepare(const ExperimentConfig& cfg, const RunSetup& run) {
  Prepared p;
  p.problem = build_problem(cfg.problem, run.seed);
  p.spectrum = saddle_spectrum(p.problem);
  p.alpha = run.alpha_mode / p.spectrum.big_l;
  if (run.init->u0) {
    const auto& v = *run.init->u0;
    p.u0 = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (std::abs(p.u0.norm() - cfg.eps) > 1e-8 * cfg.eps) config_error("explicit u0 must have norm eps");
  } else {
    p.u0 = initial_radial(p.spectrum, cfg.eps, *run.init->theta_us_sq);
  }
  return p;
}

int budget(const ExperimentConfig& cfg, const Prepared& p) {
  return cfg.k_max ? *cfg.k_max : default_k_max(cfg.eps, p.alpha, p.spectrum.beta);
}

template <class F>
auto parallel_map(const std::vector<RunSetup>& runs, F f) {
  using R = decltype(f(runs.front()));
  std::vector<std::future<R>> futures;
  for (const auto& r : runs) futures.push_back(std::async(std::launch::async, f, std::cref(r)));
  std::vector<R> out;
  for (auto& fu : futures) out.push_back(fu.get());
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json constants_json(const ProblemConstants& c) {
  return json{{"big_l", c.big_l}, {"beta", c.beta}, {"delta", c.delta}, {"big_m", c.big_m},
              {"eps_max", finite_or_null(c.eps_max)}};
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> known = {
      "problem", "eps", "alpha_mode", "inits", "seeds", "seed", "k_max", "method", "dt", "t_max",
      "rho", "gamma", "lipschitz_samples", "validation_samples", "family_samples"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) config_error("unknown key " + it.key());

  ExperimentConfig c;
  try {
    if (!j.contains("problem") || !j["problem"].is_object()) config_error("problem must be an object");
    const json& pj = j["problem"];
    if (!pj.contains("type") || !pj["type"].is_string()) config_error("problem.type must be a string");
    c.problem.type = pj["type"].get<std::string>();
    if (c.problem.type == "quadratic") {
      if (!pj.contains("lambdas") || !pj["lambdas"].is_array()) config_error("quadratic problem needs lambdas");
      c.problem.lambdas.clear();
      for (const auto& v : pj["lambdas"]) {
        if (!v.is_number()) config_error("lambdas must be numbers");
        c.problem.lambdas.push_back(v.get<double>());
      }
      if (c.problem.lambdas.size() < 2) config_error("quadratic problem needs at least two lambdas");
    } else if (c.problem.type == "phase_retrieval") {
      if (pj.contains("m")) c.problem.m = get_int(pj, "m");
      if (pj.contains("n")) c.problem.n = get_int(pj, "n");
      if (c.problem.m != c.problem.n || c.problem.n < 2) config_error("phase retrieval needs m = n >= 2");
    } else if (c.problem.type != "cubic") {
      config_error("unknown problem type " + c.problem.type);
    }

    if (j.contains("eps")) c.eps = get_number(j, "eps");
    if (!(c.eps > 0) || !std::isfinite(c.eps)) config_error("eps must be positive");
    if (j.contains("alpha_mode")) {
      c.alpha_modes.clear();
      const json& a = j["alpha_mode"];
      if (a.is_array()) {
        for (const auto& v : a) {
          if (!v.is_number()) config_error("alpha_mode entries must be numbers");
          c.alpha_modes.push_back(v.get<double>());
        }
      } else if (a.is_number()) {
        c.alpha_modes.push_back(a.get<double>());
      } else {
        config_error("alpha_mode must be a number or an array");
      }
      if (c.alpha_modes.empty()) config_error("alpha_mode is empty");
      for (double m : c.alpha_modes)
        if (!(m > 0 && m <= 1)) config_error("alpha_mode must lie in (0, 1]");
    }

    if (!j.contains("inits") || !j["inits"].is_array() || j["inits"].empty())
      config_error("inits must be a nonempty array");
    const int dim = problem_dim(c.problem);
    for (const auto& v : j["inits"]) {
      InitSpec s;
      if (v.is_number()) {
        s.theta_us_sq = v.get<double>();
      } else if (v.is_object()) {
        if (v.contains("label")) {
          if (!v["label"].is_string()) config_error("init label must be a string");
          s.label = v["label"].get<std::string>();
        }
        if (v.contains("theta_us_sq")) s.theta_us_sq = get_number(v, "theta_us_sq");
        if (v.contains("u0")) {
          if (!v["u0"].is_array()) config_error("u0 must be an array");
          std::vector<double> u;
          for (const auto& x : v["u0"]) {
            if (!x.is_number()) config_error("u0 entries must be numbers");
            u.push_back(x.get<double>());
          }
          if (static_cast<int>(u.size()) != dim) config_error("u0 dimension does not match the problem");
          s.u0 = u;
        }
        if (s.theta_us_sq.has_value() == s.u0.has_value())
          config_error("each init needs exactly one of theta_us_sq or u0");
      } else {
        config_error("inits entries must be numbers or objects");
      }
      if (s.theta_us_sq && !(*s.theta_us_sq >= 0 && *s.theta_us_sq <= 1))
        config_error("theta_us_sq must lie in [0, 1]");
      c.inits.push_back(s);
    }

    if (j.contains("seeds") && j.contains("seed")) config_error("give seeds or seed, not both");
    if (j.contains("seeds")) {
      if (!j["seeds"].is_array() || j["seeds"].empty()) config_error("seeds must be a nonempty array");
      c.seeds.clear();
      for (const auto& v : j["seeds"]) {
        if (!v.is_number_unsigned()) config_error("seeds must be nonnegative integers");
        c.seeds.push_back(v.get<std::uint64_t>());
      }
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) config_error("seed must be a nonnegative integer");
      c.seeds = {j["seed"].get<std::uint64_t>()};
    }
    if (j.contains("k_max")) {
      c.k_max = get_int(j, "k_max");
      if (*c.k_max < 1) config_error("k_max must be >= 1");
    }
    if (j.contains("method")) {
      if (!j["method"].is_string()) config_error("method must be a string");
      c.method = j["method"].get<std::string>();
      if (c.method != "gd" && c.method != "flow") config_error("method must be gd or flow");
    }
    if (j.contains("dt")) c.dt = get_number(j, "dt");
    if (j.contains("t_max")) c.t_max = get_number(j, "t_max");
    if (!(c.dt > 0) || !(c.t_max > 0)) config_error("dt and t_max must be positive");
    if (j.contains("rho")) c.rho = get_number(j, "rho");
    if (!(c.rho > 0 && c.rho < 1)) config_error("rho must lie in (0, 1)");
    if (j.contains("gamma")) c.gamma = get_number(j, "gamma");
    if (!(c.gamma > 0 && c.gamma <= 1)) config_error("gamma must lie in (0, 1]");
    if (j.contains("lipschitz_samples")) c.lipschitz_samples = get_int(j, "lipschitz_samples");
    if (j.contains("validation_samples")) c.validation_samples = get_int(j, "validation_samples");
    if (j.contains("family_samples")) c.family_samples = get_int(j, "family_samples");
    if (c.lipschitz_samples < 1 || c.validation_samples < 1 || c.family_samples < 1)
      config_error("sample counts must be >= 1");
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  enumerate_runs(c);  // rejects duplicate labels early
  return c;
}

ExperimentConfig phase_retrieval_protocol() {
  ExperimentConfig c;
  c.problem.type = "phase_retrieval";
  c.problem.m = 20;
  c.problem.n = 20;
  c.eps = 0.1;
  c.alpha_modes = {1.0, 0.1};
  InitSpec lo, hi;
  lo.theta_us_sq = 0.05;
  hi.theta_us_sq = 0.5;
  c.inits = {lo, hi};
  c.seeds.clear();
  for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
  return c;
}

SaddleProblem build_problem(const ProblemSpec& spec, std::uint64_t seed) {
  if (spec.type == "quadratic") return quadratic_saddle(spec.lambdas);
  if (spec.type == "cubic") return cubic_test();
  if (spec.type == "phase_retrieval") return phase_retrieval(spec.m, spec.n, seed);
  throw Error(ErrorCode::ConfigError, "unknown problem type " + spec.type);
}

Vec initial_radial(const Spectrum& spectrum, double eps, double theta_us_sq) {
  if (!(theta_us_sq >= 0 && theta_us_sq <= 1)) throw Error(ErrorCode::ConfigError, "theta_us_sq must lie in [0, 1]");
  const auto ns = static_cast<double>(spectrum.stable_idx.size());
  const auto nu = static_cast<double>(spectrum.unstable_idx.size());
  if (ns == 0 && theta_us_sq < 1) throw Error(ErrorCode::ConfigError, "no stable directions to hold the remaining mass");
  Vec u = Vec::Zero(spectrum.dim());
  for (int i : spectrum.stable_idx) u += std::sqrt((1.0 - theta_us_sq) / ns) * spectrum.eigenvectors.col(i);
  for (int j : spectrum.unstable_idx) u += std::sqrt(theta_us_sq / nu) * spectrum.eigenvectors.col(j);
  return eps * u / u.norm();
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  const auto runs = enumerate_runs(cfg);
  auto one = [&cfg](const RunSetup& run) {
    Prepared p = prepare(cfg, run);
    ExperimentRecord r;
    r.seed = run.seed;
    r.init_label = run.label;
    r.alpha_mode = run.alpha_mode;
    r.alpha = p.alpha;
    r.eps = cfg.eps;
    r.constants = estimate_constants(p.problem, cfg.eps, cfg.lipschitz_samples, run.seed, p.alpha);
    r.eps_within_max = cfg.eps <= r.constants.eps_max;

    RadialTrajectory traj = cfg.method == "flow"
                                ? flow_run(p.problem, p.u0, cfg.t_max, cfg.dt, cfg.eps)
                                : gd_run(p.problem, p.u0, p.alpha, budget(cfg, p), cfg.eps);
    r.first_exit_k = traj.exit_index;
    const Spectrum& s = p.spectrum;
    const double eps_sq = cfg.eps * cfg.eps;
    for (const Vec& u : traj.radials) {
      Vec c = s.eigenvectors.transpose() * u;
      double st = 0, us = 0;
      for (int i : s.stable_idx) st += c(i) * c(i);
      for (int j : s.unstable_idx) us += c(j) * c(j);
      r.radial_norms.push_back(u.norm());
      r.stable_proj_sq.push_back(st / eps_sq);
      r.unstable_proj_sq.push_back(us / eps_sq);
    }

    Projections proj = project(p.u0, s, cfg.eps);
    r.theta_us_sq = proj.theta_us_sq();
    const ProblemConstants& k = r.constants;
    const int n = s.dim();
    PsiConstants pc = psi_constants(k.big_l, k.beta, k.big_m, k.delta, n, p.alpha, cfg.eps,
                                    proj.theta_s_sq(), proj.theta_us_sq());
    try {
      // same budget as the descent run so k_iota and first_exit_k are comparable
      r.k_iota = k_iota_from_psi(pc, budget(cfg, p));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLinearExit) throw;
    }
    Theorem2Bound t2 = theorem2_bound(k.big_l, k.beta, k.big_m, k.delta, n, cfg.eps);
    r.theorem2_k_bound = t2.k_bound;
    r.theorem2_status = to_string(t2.status);
    r.delta_threshold = t2.delta_threshold;
    r.well_conditioned = t2.well_conditioned;
    r.passes_delta = r.theta_us_sq > t2.delta_threshold;
    r.crude_threshold = k.big_m * cfg.eps * cfg.eps / (2.0 * k.beta * (1.0 - cfg.rho));
    if (k.big_m > 0) {
      try {
        r.crude_k_bound = crude_bound({cfg.rho, cfg.gamma, k.beta, k.big_m, p.alpha, cfg.eps}).k_bound;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::VacuousBound) throw;
      }
    }
    Vec vn = s.most_unstable() * proj.signed_basis(n - 1);
    r.monotone = monotonicity_profile(traj, vn).strictly_increasing;
    return r;
  };
  auto records = parallel_map(runs, one);
  for (size_t i = 0; i < records.size(); ++i) records[i].run_id = static_cast<int>(i);
  return records;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "run_id,seed,init_label,k,radial_norm,stable_proj_sq,unstable_proj_sq,exited\n";
  for (const auto& r : records) {
    for (size_t k = 0; k < r.radial_norms.size(); ++k) {
      const bool exited = r.radial_norms[k] * r.radial_norms[k] > r.eps * r.eps && k > 0;
      out += std::to_string(r.run_id) + "," + std::to_string(r.seed) + "," + r.init_label + "," +
             std::to_string(k) + "," + num(r.radial_norms[k]) + "," + num(r.stable_proj_sq[k]) + "," +
             num(r.unstable_proj_sq[k]) + "," + (exited ? "1" : "0") + "\n";
    }
  }
  return out;
}

namespace {

json record_json(const ExperimentRecord& r, bool series) {
  json j{{"run_id", r.run_id},
         {"seed", r.seed},
         {"init_label", r.init_label},
         {"alpha_mode", r.alpha_mode},
         {"alpha", r.alpha},
         {"eps", r.eps},
         {"theta_us_sq", r.theta_us_sq},
         {"first_exit_k", opt_json(r.first_exit_k)},
         {"k_iota", opt_json(r.k_iota)},
         {"theorem2_k_bound", finite_or_null(r.theorem2_k_bound)},
         {"theorem2_status", r.theorem2_status},
         {"delta_threshold", r.delta_threshold},
         {"well_conditioned", r.well_conditioned},
         {"passes_delta", r.passes_delta},
         {"crude_k_bound", opt_json(r.crude_k_bound)},
         {"crude_threshold", r.crude_threshold},
         {"monotone", r.monotone},
         {"eps_within_max", r.eps_within_max},
         {"init_construction", "unstable and stable mass spread uniformly, positive signs"},
         {"constants", constants_json(r.constants)}};
  if (series) {
    j["radial_norms"] = r.radial_norms;
    j["stable_proj_sq"] = r.stable_proj_sq;
    j["unstable_proj_sq"] = r.unstable_proj_sq;
  }
  return j;
}

double number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string records_to_json(const std::vector<ExperimentRecord>& records, bool include_series) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_json(r, include_series));
  return dump(arr);
}

std::vector<ExperimentRecord> records_from_json(const std::string& text) {
  std::vector<ExperimentRecord> out;
  try {
    json arr = json::parse(text);
    for (const auto& j : arr) {
      ExperimentRecord r;
      r.run_id = j.at("run_id").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.init_label = j.at("init_label").get<std::string>();
      r.alpha_mode = j.at("alpha_mode").get<double>();
      r.alpha = j.at("alpha").get<double>();
      r.eps = j.at("eps").get<double>();
      r.theta_us_sq = j.at("theta_us_sq").get<double>();
      if (!j.at("first_exit_k").is_null()) r.first_exit_k = j["first_exit_k"].get<int>();
      if (!j.at("k_iota").is_null()) r.k_iota = j["k_iota"].get<int>();
      r.theorem2_k_bound = number_or_inf(j.at("theorem2_k_bound"));
      r.theorem2_status = j.at("theorem2_status").get<std::string>();
      r.delta_threshold = j.at("delta_threshold").get<double>();
      r.well_conditioned = j.at("well_conditioned").get<bool>();
      r.passes_delta = j.at("passes_delta").get<bool>();
      if (!j.at("crude_k_bound").is_null()) r.crude_k_bound = j["crude_k_bound"].get<double>();
      r.crude_threshold = j.at("crude_threshold").get<double>();
      r.monotone = j.at("monotone").get<bool>();
      r.eps_within_max = j.at("eps_within_max").get<bool>();
      const json& c = j.at("constants");
      r.constants.big_l = c.at("big_l").get<double>();
      r.constants.beta = c.at("beta").get<double>();
      r.constants.delta = c.at("delta").get<double>();
      r.constants.big_m = c.at("big_m").get<double>();
      r.constants.eps_max = number_or_inf(c.at("eps_max"));
      if (j.contains("radial_norms")) {
        r.radial_norms = j["radial_norms"].get<std::vector<double>>();
        r.stable_proj_sq = j.at("stable_proj_sq").get<std::vector<double>>();
        r.unstable_proj_sq = j.at("unstable_proj_sq").get<std::vector<double>>();
      }
      out.push_back(r);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed record JSON: ") + e.what());
  }
  return out;
}

void emit(const std::vector<ExperimentRecord>& records, Format format, const std::string& path) {
  if (records.empty()) throw Error(ErrorCode::PreconditionViolation, "no records to emit");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  f << (format == Format::Csv ? records_to_csv(records) : records_to_json(records));
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "failed writing " + path);
}

Output simulate_output(const ExperimentConfig& cfg) {
  auto records = run_experiment(cfg);
  return {records_to_csv(records), records_to_json(records, false), records_to_json(records, true)};
}

Output validate_output(const ExperimentConfig& cfg) {
  std::vector<RunSetup> runs;
  for (auto seed : cfg.seeds) runs.push_back({seed, "", 1.0, nullptr});
  auto one = [&cfg](const RunSetup& run) {
    SaddleProblem p = build_problem(cfg.problem, run.seed);
    AssumptionReport a = validate_assumptions(p, cfg.eps, cfg.validation_samples, run.seed, cfg.lipschitz_samples);
    json eps_max = json::array();
    if (a.spectrum_error.empty()) {
      for (double mode : cfg.alpha_modes) {
        const double e = eps_validity_bounds(a.big_l, a.big_m, p.dim, a.delta, mode / a.big_l, cfg.eps);
        eps_max.push_back({{"alpha_mode", mode}, {"eps_max", finite_or_null(e)}, {"eps_ok", cfg.eps <= e}});
      }
    }
    return std::make_pair(a, eps_max);
  };
  auto reports = parallel_map(runs, one);
  std::string csv = "seed,morse,strict_saddle,big_l,beta,delta,big_m,beta_delta_ok,grad_ratio,grad_tol,grad_ok\n";
  json arr = json::array();
  for (size_t i = 0; i < runs.size(); ++i) {
    const AssumptionReport& a = reports[i].first;
    csv += std::to_string(runs[i].seed) + "," + (a.morse ? "1" : "0") + "," + (a.strict_saddle ? "1" : "0") + "," +
           num(a.big_l) + "," + num(a.beta) + "," + num(a.delta) + "," + num(a.big_m) + "," +
           (a.beta_delta_ok ? "1" : "0") + "," + num(a.grad_ratio) + "," + num(a.grad_tol) + "," +
           (a.grad_ok ? "1" : "0") + "\n";
    arr.push_back({{"seed", runs[i].seed},
                   {"morse", a.morse},
                   {"strict_saddle", a.strict_saddle},
                   {"spectrum_error", a.spectrum_error},
                   {"big_l", a.big_l},
                   {"beta", a.beta},
                   {"delta", a.delta},
                   {"big_m", a.big_m},
                   {"groups", a.groups},
                   {"beta_delta_ok", a.beta_delta_ok},
                   {"grad_ratio", a.grad_ratio},
                   {"grad_tol", a.grad_tol},
                   {"grad_ok", a.grad_ok},
                   {"eps_max", reports[i].second},
                   {"all_ok", a.all_ok()}});
  }
  return {csv, dump(arr), dump(arr)};
}

Output approx_output(const ExperimentConfig& cfg) {
  const auto runs = enumerate_runs(cfg);
  struct Row {
    std::vector<double> exact, ref, ref_err, pred, pred_err;
    std::optional<int> exit;
  };
  auto one = [&cfg](const RunSetup& run) {
    Prepared p = prepare(cfg, run);
    RadialTrajectory traj = gd_run(p.problem, p.u0, p.alpha, budget(cfg, p), cfg.eps);
    Projections proj = project(p.u0, p.spectrum, cfg.eps);
    const int k = static_cast<int>(traj.radials.size()) - 1;
    auto coeffs = reference_coefficients(p.problem, p.spectrum, proj, traj, k);
    auto pred = predictive_trajectory(p.problem, p.spectrum, proj, p.alpha, k);
    Row row;
    row.exit = traj.exit_index;
    EpsTrajectory et(proj);
    for (int r = 0; r <= k; ++r) {
      if (r > 0) et.advance(coeffs[r - 1]);
      const Vec ua = to_ambient(p.spectrum, proj, et.coords());
      const Vec& ux = traj.radials[r];
      row.exact.push_back(ux.norm());
      row.ref.push_back(ua.norm());
      row.ref_err.push_back((ua - ux).norm() / ux.norm());
      row.pred.push_back(pred[r].norm());
      row.pred_err.push_back((pred[r] - ux).norm() / ux.norm());
    }
    return row;
  };
  auto rows = parallel_map(runs, one);
  std::string csv = "run_id,seed,init_label,k,exact_norm,reference_norm,reference_rel_error,predictive_norm,predictive_rel_error\n";
  json arr = json::array(), full = json::array();
  for (size_t i = 0; i < runs.size(); ++i) {
    const Row& r = rows[i];
    for (size_t k = 0; k < r.exact.size(); ++k)
      csv += std::to_string(i) + "," + std::to_string(runs[i].seed) + "," + runs[i].label + "," + std::to_string(k) +
             "," + num(r.exact[k]) + "," + num(r.ref[k]) + "," + num(r.ref_err[k]) + "," + num(r.pred[k]) + "," +
             num(r.pred_err[k]) + "\n";
    json s{{"run_id", i},
           {"seed", runs[i].seed},
           {"init_label", runs[i].label},
           {"first_exit_k", opt_json(r.exit)},
           {"max_reference_rel_error", *std::max_element(r.ref_err.begin(), r.ref_err.end())},
           {"max_predictive_rel_error", *std::max_element(r.pred_err.begin(), r.pred_err.end())},
           {"predictive_mode", "extrapolation from the approximate iterate"}};
    arr.push_back(s);
    s["reference_rel_error"] = r.ref_err;
    s["predictive_rel_error"] = r.pred_err;
    full.push_back(s);
  }
  return {csv, dump(arr), dump(full)};
}

Output family_output(const ExperimentConfig& cfg) {
  const auto runs = enumerate_runs(cfg);
  struct Fam {
    FamilyResult res;
    CoefficientIntervals iv;
    int k_max = 0;
  };
  auto one = [&cfg](const RunSetup& run) {
    Prepared p = prepare(cfg, run);
    ProblemConstants k = estimate_constants(p.problem, cfg.eps, cfg.lipschitz_samples, run.seed, p.alpha);
    Fam f;
    f.iv = coefficient_intervals(k.big_l, k.beta, k.big_m, k.delta, p.alpha, cfg.eps);
    Projections proj = project(p.u0, p.spectrum, cfg.eps);
    f.k_max = cfg.k_max ? *cfg.k_max : std::min(budget(cfg, p), 10000);
    f.res = sample_family(f.iv, proj, p.spectrum, f.k_max, cfg.eps, cfg.family_samples, run.seed);
    return f;
  };
  auto fams = parallel_map(runs, one);
  std::string csv = "run_id,seed,init_label,tau_index,exit_k\n";
  json arr = json::array(), full = json::array();
  for (size_t i = 0; i < runs.size(); ++i) {
    const FamilyResult& r = fams[i].res;
    const std::string prefix = std::to_string(i) + "," + std::to_string(runs[i].seed) + "," + runs[i].label + ",";
    for (size_t t = 0; t < r.sampled_exit_times.size(); ++t)
      csv += prefix + std::to_string(t) + "," +
             (r.sampled_exit_times[t] ? std::to_string(*r.sampled_exit_times[t]) : "") + "\n";
    csv += prefix + "k_iota," + (r.k_iota ? std::to_string(*r.k_iota) : "") + "\n";
    json s{{"run_id", i},
           {"seed", runs[i].seed},
           {"init_label", runs[i].label},
           {"k_iota", opt_json(r.k_iota)},
           {"sup_exit", r.sup_exit},
           {"non_exited", r.non_exited},
           {"k_max", fams[i].k_max},
           {"sup_exit_le_k_iota", r.k_iota && r.non_exited == 0 && r.sup_exit <= *r.k_iota},
           {"intervals",
            {{"c_s", {fams[i].iv.cs_lo, fams[i].iv.cs_hi}},
             {"c_us", {fams[i].iv.cus_lo, fams[i].iv.cus_hi}},
             {"d", {-fams[i].iv.d_max, fams[i].iv.d_max}}}}};
    arr.push_back(s);
    json exits = json::array();
    for (const auto& e : r.sampled_exit_times) exits.push_back(opt_json(e));
    s["sampled_exit_times"] = exits;
    s["min_norm_sq"] = r.min_norm_sq;
    full.push_back(s);
  }
  return {csv, dump(arr), dump(full)};
}

Output bounds_output(const ExperimentConfig& cfg) {
  const auto runs = enumerate_runs(cfg);
  struct B {
    ProblemConstants k;
    PsiConstants pc;
    std::vector<double> psi_values;
    std::optional<int> k_iota;
    Theorem2Bound t2;
    std::optional<CrudeBound> crude;
    std::string crude_error;
    BoundaryReport boundary;
  };
  auto one = [&cfg](const RunSetup& run) {
    Prepared p = prepare(cfg, run);
    B b;
    b.k = estimate_constants(p.problem, cfg.eps, cfg.lipschitz_samples, run.seed, p.alpha);
    Projections proj = project(p.u0, p.spectrum, cfg.eps);
    const int n = p.spectrum.dim();
    b.pc = psi_constants(b.k.big_l, b.k.beta, b.k.big_m, b.k.delta, n, p.alpha, cfg.eps, proj.theta_s_sq(),
                         proj.theta_us_sq());
    const int k_max = budget(cfg, p);
    try {
      b.k_iota = k_iota_from_psi(b.pc, k_max);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLinearExit) throw;
    }
    const int shown = b.k_iota ? *b.k_iota : std::min(k_max, default_psi_k_max(cfg.eps));
    for (int k = 0; k <= shown; ++k) b.psi_values.push_back(psi(k, b.pc));
    b.t2 = theorem2_bound(b.k.big_l, b.k.beta, b.k.big_m, b.k.delta, n, cfg.eps);
    try {
      b.crude = crude_bound({cfg.rho, cfg.gamma, b.k.beta, b.k.big_m, p.alpha, cfg.eps});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::VacuousBound && e.code() != ErrorCode::PreconditionViolation) throw;
      b.crude_error = to_string(e.code());
    }
    b.boundary = boundary_condition_check(proj, b.k, cfg.rho);
    return b;
  };
  auto bs = parallel_map(runs, one);
  std::string csv = "run_id,seed,init_label,k,psi\n";
  json arr = json::array(), full = json::array();
  for (size_t i = 0; i < runs.size(); ++i) {
    const B& b = bs[i];
    for (size_t k = 0; k < b.psi_values.size(); ++k)
      csv += std::to_string(i) + "," + std::to_string(runs[i].seed) + "," + runs[i].label + "," + std::to_string(k) +
             "," + num(b.psi_values[k]) + "\n";
    json s{{"run_id", i},
           {"seed", runs[i].seed},
           {"init_label", runs[i].label},
           {"constants", constants_json(b.k)},
           {"psi_constants",
            {{"c1", b.pc.c1}, {"c2", b.pc.c2}, {"c3", b.pc.c3}, {"c4", b.pc.c4}, {"b1", b.pc.b1}, {"b2", b.pc.b2},
             {"theta_s_sq", b.pc.theta_s_sq}, {"theta_us_sq", b.pc.theta_us_sq}}},
           {"k_iota", opt_json(b.k_iota)},
           {"k_bound", finite_or_null(b.t2.k_bound)},
           {"theorem2_status", to_string(b.t2.status)},
           {"delta_threshold", b.t2.delta_threshold},
           {"well_conditioned", b.t2.well_conditioned},
           {"crude_bound", b.crude ? json(b.crude->k_bound) : json(nullptr)},
           {"crude_error", b.crude_error},
           {"crude_gamma", cfg.gamma},
           {"crude_gamma_is_default", cfg.gamma == 1.0},
           {"sufficient_threshold", b.crude ? json(b.crude->sufficient_threshold) : json(b.boundary.crude_threshold)},
           {"boundary",
            {{"theta_us_sq", b.boundary.theta_us_sq},
             {"passes_delta", b.boundary.passes_delta},
             {"crude_value", b.boundary.crude_value},
             {"crude_threshold", b.boundary.crude_threshold},
             {"passes_crude", b.boundary.passes_crude}}}};
    arr.push_back(s);
    s["psi"] = b.psi_values;
    full.push_back(s);
  }
  return {csv, dump(arr), dump(full)};
}

Output phase_retrieval_output(const ExperimentConfig& cfg) {
  auto records = run_experiment(cfg);
  // per alpha mode: does the init with the largest unstable mass exit no later
  // than the one with the smallest?
  json trend = json::array();
  for (double mode : cfg.alpha_modes) {
    int agree = 0, compared = 0;
    json per_seed = json::array();
    for (auto seed : cfg.seeds) {
      const ExperimentRecord* lo = nullptr;
      const ExperimentRecord* hi = nullptr;
      for (const auto& r : records) {
        if (r.seed != seed || r.alpha_mode != mode) continue;
        if (!lo || r.theta_us_sq < lo->theta_us_sq) lo = &r;
        if (!hi || r.theta_us_sq > hi->theta_us_sq) hi = &r;
      }
      if (!lo || lo == hi) continue;
      ++compared;
      const bool ok = hi->first_exit_k && (!lo->first_exit_k || *hi->first_exit_k <= *lo->first_exit_k);
      agree += ok ? 1 : 0;
      per_seed.push_back({{"seed", seed},
                          {"low_exit_k", opt_json(lo->first_exit_k)},
                          {"high_exit_k", opt_json(hi->first_exit_k)},
                          {"higher_exits_no_later", ok}});
    }
    trend.push_back({{"alpha_mode", mode}, {"seeds_compared", compared}, {"seeds_agreeing", agree}, {"per_seed", per_seed}});
  }
  json summary{{"runs", json::parse(records_to_json(records, false))}, {"trend", trend}};
  json full{{"runs", json::parse(records_to_json(records, true))}, {"trend", trend}};
  return {records_to_csv(records), dump(summary), dump(full)};
}

}  // namespace saddle
