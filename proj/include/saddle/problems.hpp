#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "saddle/spectral.hpp"

namespace saddle {

struct SaddleProblem {
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  Vec saddle;
  std::string label;
};

struct ProblemConstants {
  double big_l = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double big_m = 0.0;
  double eps_max = 0.0;
};

struct AssumptionReport {
  bool morse = false;
  bool strict_saddle = false;
  std::string spectrum_error;  // empty when the saddle Hessian decomposed cleanly
  double big_l = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double big_m = 0.0;
  std::vector<std::vector<int>> groups;
  bool beta_delta_ok = false;  // beta >= delta / 2
  double grad_ratio = 0.0;   // max ||grad f(x)|| / (L ||x - x*||)
  double grad_tol = 0.0;     // 10 M eps / L
  bool grad_ok = false;
  bool all_ok() const { return morse && strict_saddle && beta_delta_ok && grad_ok; }
};

SaddleProblem quadratic_saddle(const std::vector<double>& lambdas);
SaddleProblem cubic_test();
SaddleProblem phase_retrieval(int m, int n, std::uint64_t seed);
// rows of a are the measurement vectors a_j
SaddleProblem phase_retrieval(const Mat& a);

// Spectrum of the Hessian at the saddle.
Spectrum saddle_spectrum(const SaddleProblem& problem);

// max over sampled pairs in the eps-ball of ||H(x) - H(y)||_2 / ||x - y||
double estimate_hessian_lipschitz(const SaddleProblem& problem, double eps, int samples,
                                  std::uint64_t seed);

AssumptionReport validate_assumptions(const SaddleProblem& problem, double eps, int samples,
                                      std::uint64_t seed, int lipschitz_samples = 10000);

// alpha <= 0 means alpha = 1/L
ProblemConstants estimate_constants(const SaddleProblem& problem, double eps, int samples,
                                    std::uint64_t seed, double alpha = 0.0);

double spectral_norm(const Mat& symmetric);

}  // namespace saddle
