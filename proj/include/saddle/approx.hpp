#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "saddle/simulate.hpp"

namespace saddle {

// Per-step coefficients in the (signed) eigenbasis of the saddle Hessian.
// c(i) is c^s_i for stable i and c^us_i for unstable i; d(i, l) couples
// component l into component i and d(i, i) = 0.
struct CoefficientSet {
  Vec c;
  Mat d;
  int step = 0;
};

struct CoefficientIntervals {
  double cs_lo = 0.0, cs_hi = 0.0;
  double cus_lo = 0.0, cus_hi = 0.0;
  double d_max = 0.0;  // d lies in [-d_max, d_max]
};

struct FamilyResult {
  std::vector<std::optional<int>> sampled_exit_times;
  std::optional<int> k_iota;
  int sup_exit = 0;
  int non_exited = 0;
  // pointwise minimum of ||u~_K||^2 / eps^2 for K = 0..k_iota (0..k_max without k_iota)
  std::vector<double> min_norm_sq;
};

// signs flips the eigenbasis (empty means no flips); within-group pairs
// get d = 0.
CoefficientSet coefficients_at(const Spectrum& spectrum, const Mat& h_matrix, double u_norm,
                               double alpha, const Vec& signs = Vec(), int step = 0);

CoefficientIntervals coefficient_intervals(double big_l, double beta, double big_m, double delta,
                                           double alpha, double eps);

bool contains(const CoefficientIntervals& iv, const Spectrum& spectrum, const CoefficientSet& c,
              double tol = 1e-12);

// Incremental evaluation of the eps-precision trajectory. Component i after
// K steps is eps * (prod_k c_i(k) theta_i + sum_{l != i} S_il(K) theta_l) with
// S_il(K+1) = c_l(K) S_il(K) + prod_{k<K} c_i(k) d_il(K).
class EpsTrajectory {
 public:
  explicit EpsTrajectory(const Projections& proj);
  void advance(const CoefficientSet& c);
  Vec coords() const;  // signed eigenbasis coordinates of u~_K
  int steps() const { return k_; }

 private:
  Vec theta_;
  double eps_;
  Vec prod_;
  Mat coupling_;
  int k_ = 0;
};

Vec eps_trajectory(const Projections& proj, const Spectrum& spectrum,
                   const std::vector<CoefficientSet>& coeffs, int k);

// Signed eigenbasis coordinates to ambient radial vector.
Vec to_ambient(const Spectrum& spectrum, const Projections& proj, const Vec& coords);

// Coefficients harvested along an exact trajectory, k = 0..K-1.
std::vector<CoefficientSet> reference_coefficients(const SaddleProblem& problem,
                                                   const Spectrum& spectrum,
                                                   const Projections& proj,
                                                   const RadialTrajectory& traj, int k);

// Self-consistent forecast: coefficients taken from the approximate iterate.
// Returns ambient radials u~_0..u~_K.
std::vector<Vec> predictive_trajectory(const SaddleProblem& problem, const Spectrum& spectrum,
                                       const Projections& proj, double alpha, int k);

FamilyResult sample_family(const CoefficientIntervals& intervals, const Projections& proj,
                           const Spectrum& spectrum, int k_max, double eps, int n_samples,
                           std::uint64_t seed);

}  // namespace saddle
