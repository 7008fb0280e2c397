#include "saddle/simulate.hpp"

#include <cmath>

#include "saddle/error.hpp"

namespace saddle {

namespace {

void check_start(const SaddleProblem& problem, const Vec& u0, double eps, double radius_tol) {
  if (u0.size() != problem.dim) throw Error(ErrorCode::PreconditionViolation, "u0 dimension mismatch");
  if (!(eps > 0)) throw Error(ErrorCode::PreconditionViolation, "eps must be positive");
  if (std::abs(u0.norm() - eps) > radius_tol * eps)
    throw Error(ErrorCode::WrongRadius, "||u0|| differs from eps");
}

}  // namespace

int default_k_max(double eps, double alpha, double beta) {
  const double k = std::ceil(std::log(1.0 / eps) / std::log1p(alpha * beta));
  if (!std::isfinite(k) || k > 1e5) return 1000000;
  return 10 * std::max(1, static_cast<int>(k));
}

RadialTrajectory gd_run(const SaddleProblem& problem, const Vec& u0, double alpha, int k_max,
                        double eps, double radius_tol) {
  check_start(problem, u0, eps, radius_tol);
  if (k_max < 1) throw Error(ErrorCode::PreconditionViolation, "k_max must be >= 1");
  const Mat h0 = problem.hessian(problem.saddle);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h0 + h0.transpose()), Eigen::EigenvaluesOnly);
  const double big_l = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(alpha > 0) || alpha * big_l > 1.0 + 1e-12)
    throw Error(ErrorCode::PreconditionViolation, "step size must satisfy 0 < alpha <= 1/L");

  RadialTrajectory t;
  t.eps = eps;
  t.alpha = alpha;
  t.budget = k_max;
  t.radials.push_back(u0);
  t.norms.push_back(u0.norm());
  t.times.push_back(0.0);
  Vec u = u0;
  const double eps_sq = eps * eps;
  for (int k = 1; k <= k_max; ++k) {
    u = u - alpha * problem.gradient(problem.saddle + u);
    t.radials.push_back(u);
    t.norms.push_back(u.norm());
    t.times.push_back(k);
    if (u.squaredNorm() > eps_sq) {
      t.exit_index = k;
      break;
    }
  }
  return t;
}

RadialTrajectory flow_run(const SaddleProblem& problem, const Vec& u0, double t_max, double dt,
                          double eps, double radius_tol) {
  check_start(problem, u0, eps, radius_tol);
  if (!(dt > 0) || !(t_max >= 0)) throw Error(ErrorCode::PreconditionViolation, "need dt > 0, t_max >= 0");

  auto rhs = [&](const Vec& u) -> Vec { return -problem.gradient(problem.saddle + u); };
  RadialTrajectory t;
  t.eps = eps;
  t.alpha = dt;
  t.radials.push_back(u0);
  t.norms.push_back(u0.norm());
  t.times.push_back(0.0);
  const long steps = static_cast<long>(std::llround(t_max / dt));
  t.budget = static_cast<int>(steps);
  Vec u = u0;
  const double eps_sq = eps * eps;
  for (long k = 1; k <= steps; ++k) {
    Vec k1 = rhs(u);
    Vec k2 = rhs(u + 0.5 * dt * k1);
    Vec k3 = rhs(u + 0.5 * dt * k2);
    Vec k4 = rhs(u + dt * k3);
    u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double nrm = u.norm();
    if (!std::isfinite(nrm) || nrm > 10.0 * eps)
      throw Error(ErrorCode::StepTooLarge, "flow norm jumped past 10*eps within one step");
    t.radials.push_back(u);
    t.norms.push_back(nrm);
    t.times.push_back(static_cast<double>(k) * dt);
    if (u.squaredNorm() > eps_sq) {
      t.exit_index = static_cast<int>(k);
      break;
    }
  }
  return t;
}

int exit_time(const std::vector<double>& norms, double eps) {
  if (norms.empty()) throw Error(ErrorCode::PreconditionViolation, "empty trajectory");
  const double eps_sq = eps * eps;
  for (size_t k = 1; k < norms.size(); ++k)
    if (norms[k] * norms[k] > eps_sq) return static_cast<int>(k);
  throw Error(ErrorCode::NoExit, "trajectory never leaves the ball");
}

int exit_time(const RadialTrajectory& traj) {
  if (traj.radials.empty()) throw Error(ErrorCode::PreconditionViolation, "empty trajectory");
  const double eps_sq = traj.eps * traj.eps;
  for (size_t k = 1; k < traj.radials.size(); ++k)
    if (traj.radials[k].squaredNorm() > eps_sq) return static_cast<int>(k);
  throw Error(ErrorCode::NoExit, "trajectory never leaves the ball");
}

MonotonicityProfile monotonicity_profile(const RadialTrajectory& traj, const Vec& v) {
  if (std::abs(v.norm() - 1.0) > 1e-8) throw Error(ErrorCode::PreconditionViolation, "v must be a unit vector");
  MonotonicityProfile p;
  size_t last = traj.radials.size();
  if (traj.exit_index) last = static_cast<size_t>(*traj.exit_index) + 1;
  for (size_t k = 0; k < last; ++k) p.inner.push_back(v.dot(traj.radials[k]));
  p.strictly_increasing = p.inner.size() >= 2;
  for (size_t k = 1; k < p.inner.size(); ++k)
    if (!(p.inner[k] > p.inner[k - 1])) p.strictly_increasing = false;
  return p;
}

}  // namespace saddle
