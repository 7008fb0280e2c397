#pragma once

#include "saddle/problems.hpp"

namespace saddle {

struct PerturbationData {
  Mat h_matrix;
  Vec eigenvalue_rates;   // <v_i, H v_i>
  Mat eigenvector_rates;  // column i is dv_i/dw
  Vec direction;          // may be empty when H was supplied directly
};

// max(eps * 1e-3, 1e-6)
double default_fd_step(double eps);

Mat directional_hessian_derivative(const SaddleProblem& problem, const Vec& u_hat, double h);

PerturbationData rs_corrections(const Spectrum& spectrum, const Mat& h_matrix, bool degenerate,
                                const Vec& direction = Vec());

// hessian(x*) + p ||u|| H(u/||u||); h <= 0 picks default_fd_step(||u||)
Mat hessian_first_order(const SaddleProblem& problem, const Vec& u, double p, double h = 0.0);

// eps_guess is the requested ball radius, used only for the alpha-regime margin.
double eps_validity_bounds(double big_l, double big_m, int n, double delta, double alpha,
                           double eps_guess = 0.0);

}  // namespace saddle
