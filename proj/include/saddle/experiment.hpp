#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "saddle/bounds.hpp"
#include "saddle/problems.hpp"

namespace saddle {

struct ProblemSpec {
  std::string type = "quadratic";  // quadratic | cubic | phase_retrieval
  std::vector<double> lambdas{1.0, -1.0};
  int m = 20;
  int n = 20;
};

struct InitSpec {
  std::string label;
  std::optional<double> theta_us_sq;
  std::optional<std::vector<double>> u0;
};

struct ExperimentConfig {
  ProblemSpec problem;
  double eps = 0.1;
  std::vector<double> alpha_modes{1.0};
  std::vector<InitSpec> inits;
  std::vector<std::uint64_t> seeds{0};
  std::optional<int> k_max;
  std::string method = "gd";  // gd | flow
  double dt = 1e-2;
  double t_max = 100.0;
  double rho = 0.5;
  double gamma = 1.0;
  int lipschitz_samples = 10000;
  int validation_samples = 1000;
  int family_samples = 200;
};

struct ExperimentRecord {
  int run_id = 0;
  std::uint64_t seed = 0;
  std::string init_label;
  double alpha_mode = 1.0;
  double alpha = 0.0;
  double eps = 0.0;
  double theta_us_sq = 0.0;
  std::vector<double> radial_norms;
  std::vector<double> stable_proj_sq;
  std::vector<double> unstable_proj_sq;
  std::optional<int> first_exit_k;
  std::optional<int> k_iota;
  double theorem2_k_bound = 0.0;
  std::string theorem2_status;
  double delta_threshold = 0.0;
  bool well_conditioned = false;
  bool passes_delta = false;
  std::optional<double> crude_k_bound;
  double crude_threshold = 0.0;
  bool monotone = false;
  bool eps_within_max = false;
  ProblemConstants constants;
};

// Throws ConfigError on malformed or inconsistent documents.
ExperimentConfig config_from_json(const std::string& text);

// Two-initialisation comparison on phase_retrieval(20, 20), alpha = 1/L and 0.1/L.
ExperimentConfig phase_retrieval_protocol();

SaddleProblem build_problem(const ProblemSpec& spec, std::uint64_t seed);

// u0 on the eps-sphere: unstable mass theta_us_sq and stable mass
// 1 - theta_us_sq, each spread uniformly with positive signs.
Vec initial_radial(const Spectrum& spectrum, double eps, double theta_us_sq);

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::string records_to_json(const std::vector<ExperimentRecord>& records, bool include_series = true);
std::vector<ExperimentRecord> records_from_json(const std::string& text);

enum class Format { Csv, Json };

// Writes records to path; throws IoError when the file cannot be written.
void emit(const std::vector<ExperimentRecord>& records, Format format, const std::string& path);

// Rendered subcommand output. Csv mode writes csv plus summary_json,
// json mode writes full_json.
struct Output {
  std::string csv;
  std::string summary_json;
  std::string full_json;
};

Output simulate_output(const ExperimentConfig& config);
Output validate_output(const ExperimentConfig& config);
Output approx_output(const ExperimentConfig& config);
Output family_output(const ExperimentConfig& config);
Output bounds_output(const ExperimentConfig& config);
Output phase_retrieval_output(const ExperimentConfig& config);

}  // namespace saddle
