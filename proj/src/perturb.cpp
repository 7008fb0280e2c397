#include "saddle/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saddle/error.hpp"

namespace saddle {

double default_fd_step(double eps) { return std::max(eps * 1e-3, 1e-6); }

Mat directional_hessian_derivative(const SaddleProblem& problem, const Vec& u_hat, double h) {
  if (std::abs(u_hat.norm() - 1.0) > 1e-8) throw Error(ErrorCode::PreconditionViolation, "direction must be a unit vector");
  if (!(h > 0)) throw Error(ErrorCode::PreconditionViolation, "finite-difference step must be positive");
  Mat hp = problem.hessian(problem.saddle + h * u_hat);
  Mat hm = problem.hessian(problem.saddle - h * u_hat);
  Mat d = (hp - hm) / (2.0 * h);
  return 0.5 * (d + d.transpose());
}

PerturbationData rs_corrections(const Spectrum& spectrum, const Mat& h_matrix, bool degenerate,
                                const Vec& direction) {
  const int n = spectrum.dim();
  if (h_matrix.rows() != n || h_matrix.cols() != n)
    throw Error(ErrorCode::PreconditionViolation, "H dimension mismatch");
  if (degenerate && static_cast<int>(spectrum.group_of.size()) != n)
    throw Error(ErrorCode::PreconditionViolation, "degenerate corrections need populated groups");
  const Vec& lam = spectrum.eigenvalues;
  const Mat& v = spectrum.eigenvectors;
  const double tiny = 1e-8 * spectrum.big_l;

  PerturbationData d;
  d.h_matrix = h_matrix;
  d.direction = direction;
  Mat hv = v.transpose() * h_matrix * v;  // hv(l, i) = <v_l, H v_i>
  d.eigenvalue_rates = hv.diagonal();
  d.eigenvector_rates = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      if (l == i) continue;
      if (degenerate && spectrum.same_group(i, l)) continue;
      const double gap = lam(i) - lam(l);
      if (!degenerate && std::abs(gap) < tiny)
        throw Error(ErrorCode::DegeneracyUnhandled, "near-equal eigenvalues need the degenerate variant");
      d.eigenvector_rates.col(i) += hv(l, i) / gap * v.col(l);
    }
  }
  return d;
}

Mat hessian_first_order(const SaddleProblem& problem, const Vec& u, double p, double h) {
  if (!(p > 0 && p <= 1)) throw Error(ErrorCode::PreconditionViolation, "p must lie in (0, 1]");
  Mat base = problem.hessian(problem.saddle);
  const double r = u.norm();
  if (r == 0.0) return base;
  const double step = h > 0 ? h : default_fd_step(r);
  return base + p * r * directional_hessian_derivative(problem, u / r, step);
}

double eps_validity_bounds(double big_l, double big_m, int n, double delta, double alpha,
                           double eps_guess) {
  if (!(big_l > 0) || !(delta > 0)) throw Error(ErrorCode::PreconditionViolation, "L and delta must be positive");
  if (!(alpha > 0) || alpha * big_l > 1.0 + 1e-12) throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1/L]");
  if (big_m < 0) throw Error(ErrorCode::PreconditionViolation, "M must be nonnegative");
  if (big_m == 0.0) return std::numeric_limits<double>::infinity();
  const double margin = 10.0 * eps_guess * big_m / (2.0 * big_l);
  const double nn = static_cast<double>(n) * n;
  const bool interior = alpha <= 1.0 / big_l - margin && alpha * big_l < 1.0 - 1e-12;
  if (interior) return 2.0 * delta * (1.0 - alpha * big_l) / (alpha * big_m * (2.0 * big_l * nn + delta));
  return 2.0 * big_l * delta / (big_m * (2.0 * big_l * nn - delta));
}

}  // namespace saddle
