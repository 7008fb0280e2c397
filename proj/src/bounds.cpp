#include "saddle/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "saddle/error.hpp"

namespace saddle {

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Ok: return "Ok";
    case BoundStatus::DivergentBound: return "DivergentBound";
    case BoundStatus::IllConditioned: return "IllConditioned";
  }
  return "Unknown";
}

PsiConstants psi_constants(double big_l, double beta, double big_m, double delta, int n,
                           double alpha, double eps, double theta_s_sq, double theta_us_sq) {
  if (!(big_l > 0) || !(beta > 0) || !(delta > 0) || big_m < 0 || !(alpha > 0) || n < 1)
    throw Error(ErrorCode::PreconditionViolation, "invalid constants for psi");
  PsiConstants p;
  const double drift = alpha * eps * big_m / 2.0;
  p.c1 = 1.0 - alpha * big_l - drift;
  p.c2 = 1.0 - alpha * beta + drift;
  p.c3 = 1.0 + alpha * big_l + drift;
  p.c4 = 1.0 + alpha * beta - drift;
  p.b1 = alpha * eps * big_m * big_l * n / (2.0 * delta);
  p.b2 = p.b1 / (alpha * big_l + alpha * beta);
  p.theta_s_sq = theta_s_sq;
  p.theta_us_sq = theta_us_sq;
  return p;
}

double psi(int k, const PsiConstants& p) {
  if (k < 0) throw Error(ErrorCode::PreconditionViolation, "K must be nonnegative");
  const double kk = k;
  const double cross = p.b2 * std::pow(p.c3, kk) * std::pow(p.c2, kk) + p.b2 * std::pow(p.c3, 2 * kk);
  const double lin_s = k == 0 ? 0.0 : 2.0 * kk * std::pow(p.c2, 2 * kk - 1) * p.b1;
  const double lin_us = k == 0 ? 0.0 : 2.0 * kk * std::pow(p.c3, 2 * kk - 1) * p.b1;
  return (std::pow(p.c1, 2 * kk) - lin_s - cross) * p.theta_s_sq +
         (std::pow(p.c4, 2 * kk) - lin_us - cross) * p.theta_us_sq;
}

int default_psi_k_max(double eps) {
  return std::max(1, static_cast<int>(std::ceil(10.0 * std::log(1.0 / eps))));
}

int k_iota_from_psi(const PsiConstants& p, int k_max) {
  if (k_max < 1) throw Error(ErrorCode::PreconditionViolation, "k_max must be >= 1");
  for (int k = 1; k <= k_max; ++k)
    if (psi(k, p) > 1.0) return k;
  throw Error(ErrorCode::NoLinearExit, "psi stays at or below 1 up to k_max");
}

Theorem2Bound theorem2_bound(double big_l, double beta, double big_m, double delta, int n,
                             double eps) {
  if (!(eps > 0) || !(big_l > 0) || !(beta > 0) || !(delta > 0) || big_m < 0 || n < 1)
    throw Error(ErrorCode::PreconditionViolation, "invalid constants for the exit bound");
  Theorem2Bound b;
  b.delta_threshold = eps * big_m * big_l * n / (delta * (big_l + beta));
  b.well_conditioned = beta / big_l > eps * big_m / (2.0 * big_l);
  if (big_m == 0.0) {
    b.k_bound = std::numeric_limits<double>::infinity();
    b.status = BoundStatus::DivergentBound;
    return b;
  }
  const double s = eps * big_m / (2.0 * big_l);
  const double log_ratio = std::log((2.0 + s) / (1.0 + beta / big_l - s));
  b.k_bound = std::log((2.0 + s) * log_ratio * 2.0 * delta / (eps * big_m * n)) / (2.0 * log_ratio);
  b.status = b.well_conditioned ? BoundStatus::Ok : BoundStatus::IllConditioned;
  return b;
}

CrudeBound crude_bound(const CrudeBoundParams& q) {
  if (!(q.rho > 0 && q.rho < 1) || !(q.gamma > 0 && q.gamma <= 1) || !(q.big_m > 0) || !(q.beta > 0) ||
      !(q.alpha > 0) || !(q.eps > 0))
    throw Error(ErrorCode::PreconditionViolation, "invalid crude bound parameters");
  const double arg = 2.0 * q.gamma * q.beta * (1.0 - q.rho) / (q.big_m * q.eps);
  if (!(arg > 1.0)) throw Error(ErrorCode::VacuousBound, "log argument is at most 1");
  CrudeBound c;
  c.k_bound = std::log(arg) / std::log1p(q.rho * q.alpha * q.beta);
  c.sufficient_threshold = q.big_m * q.eps * q.eps / (2.0 * q.beta * (1.0 - q.rho));
  return c;
}

double lambert_w(double x) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(x) || x < branch) {
    if (x >= branch - 4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
    throw Error(ErrorCode::OutOfDomain, "lambert_w needs x >= -1/e");
  }
  if (x == 0.0) return 0.0;
  if (x == branch) return -1.0;
  if (std::isinf(x)) return x;

  double w;
  if (x < -0.32) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x);
    if (x > 0) w *= 0.8;
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

BoundaryReport boundary_condition_check(const Projections& proj, const ProblemConstants& k,
                                        double rho) {
  const int n = static_cast<int>(proj.theta.size());
  BoundaryReport r;
  r.theta_us_sq = proj.theta_us_sq();
  r.delta_threshold = proj.eps * k.big_m * k.big_l * n / (k.delta * (k.big_l + k.beta));
  r.passes_delta = r.theta_us_sq > r.delta_threshold;
  r.crude_value = proj.eps * proj.theta(n - 1);
  r.crude_threshold = k.big_m * proj.eps * proj.eps / (2.0 * k.beta * (1.0 - rho));
  r.passes_crude = r.crude_value >= r.crude_threshold;
  return r;
}

}  // namespace saddle
