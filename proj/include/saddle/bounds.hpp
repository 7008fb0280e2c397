#pragma once

#include "saddle/problems.hpp"

namespace saddle {

struct PsiConstants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double theta_s_sq = 0.0, theta_us_sq = 0.0;
};

enum class BoundStatus { Ok, DivergentBound, IllConditioned };

const char* to_string(BoundStatus s);

struct Theorem2Bound {
  double k_bound = 0.0;
  double delta_threshold = 0.0;
  bool well_conditioned = false;
  BoundStatus status = BoundStatus::Ok;
};

struct CrudeBoundParams {
  double rho = 0.5;
  double gamma = 1.0;
  double beta = 0.0;
  double big_m = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
};

struct CrudeBound {
  double k_bound = 0.0;
  double sufficient_threshold = 0.0;
};

struct BoundaryReport {
  double theta_us_sq = 0.0;
  double delta_threshold = 0.0;
  bool passes_delta = false;
  double crude_value = 0.0;      // eps * theta^us_n
  double crude_threshold = 0.0;  // M eps^2 / (2 beta (1 - rho))
  bool passes_crude = false;
};

PsiConstants psi_constants(double big_l, double beta, double big_m, double delta, int n,
                           double alpha, double eps, double theta_s_sq, double theta_us_sq);

double psi(int k, const PsiConstants& p);

// ceil(10 log(1/eps))
int default_psi_k_max(double eps);

int k_iota_from_psi(const PsiConstants& p, int k_max);

// Step size is fixed at 1/L.
Theorem2Bound theorem2_bound(double big_l, double beta, double big_m, double delta, int n,
                             double eps);

CrudeBound crude_bound(const CrudeBoundParams& params);

// Principal branch, Halley iteration.
double lambert_w(double x);

// theta^us_n is the projection on the eigenvector of the most negative eigenvalue.
BoundaryReport boundary_condition_check(const Projections& proj, const ProblemConstants& constants,
                                        double rho = 0.5);

}  // namespace saddle
