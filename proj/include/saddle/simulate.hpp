#pragma once

#include <optional>
#include <vector>

#include "saddle/problems.hpp"

namespace saddle {

struct RadialTrajectory {
  double eps = 0.0;
  double alpha = 0.0;  // step size for descent, time step for flow
  std::vector<Vec> radials;
  std::vector<double> norms;
  std::vector<double> times;  // sample times (k for descent, k*dt for flow)
  std::optional<int> exit_index;
  int budget = 0;
};

struct MonotonicityProfile {
  std::vector<double> inner;
  bool strictly_increasing = false;
};

// 10 * ceil(log(1/eps) / log(1 + alpha*beta)), capped at 10^6
int default_k_max(double eps, double alpha, double beta);

RadialTrajectory gd_run(const SaddleProblem& problem, const Vec& u0, double alpha, int k_max,
                        double eps, double radius_tol = 1e-8);

// Classical RK4 on dx/dt = -grad f(x), sampled every dt.
RadialTrajectory flow_run(const SaddleProblem& problem, const Vec& u0, double t_max, double dt,
                          double eps, double radius_tol = 1e-8);

int exit_time(const RadialTrajectory& traj);
int exit_time(const std::vector<double>& norms, double eps);

MonotonicityProfile monotonicity_profile(const RadialTrajectory& traj, const Vec& v);

}  // namespace saddle
