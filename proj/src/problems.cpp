#include "saddle/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "saddle/error.hpp"
#include "saddle/perturb.hpp"
#include "saddle/random.hpp"

namespace saddle {

SaddleProblem quadratic_saddle(const std::vector<double>& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  if (n < 2) throw Error(ErrorCode::PreconditionViolation, "need at least two eigenvalues");
  bool pos = false, neg = false;
  for (double l : lambdas) {
    if (l == 0.0 || !std::isfinite(l))
      throw Error(ErrorCode::PreconditionViolation, "eigenvalues must be finite and nonzero");
    pos = pos || l > 0;
    neg = neg || l < 0;
  }
  if (!(pos && neg)) throw Error(ErrorCode::NotStrictSaddle, "eigenvalues share one sign");

  Vec lam = Eigen::Map<const Vec>(lambdas.data(), n);
  SaddleProblem p;
  p.dim = n;
  p.saddle = Vec::Zero(n);
  p.label = "quadratic";
  p.value = [lam](const Vec& x) { return 0.5 * x.dot(lam.cwiseProduct(x)); };
  p.gradient = [lam](const Vec& x) -> Vec { return lam.cwiseProduct(x); };
  Mat h = lam.asDiagonal();
  p.hessian = [h](const Vec&) -> Mat { return h; };
  return p;
}

SaddleProblem cubic_test() {
  SaddleProblem p;
  p.dim = 2;
  p.saddle = Vec::Zero(2);
  p.label = "cubic";
  p.value = [](const Vec& x) {
    return 0.5 * x(0) * x(0) - 0.5 * x(1) * x(1) + x(0) * x(0) * x(1);
  };
  p.gradient = [](const Vec& x) -> Vec {
    Vec g(2);
    g << x(0) + 2.0 * x(0) * x(1), -x(1) + x(0) * x(0);
    return g;
  };
  p.hessian = [](const Vec& x) -> Mat {
    Mat h(2, 2);
    h << 1.0 + 2.0 * x(1), 2.0 * x(0), 2.0 * x(0), -1.0;
    return h;
  };
  return p;
}

SaddleProblem phase_retrieval(const Mat& a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (m < 1 || n < 2) throw Error(ErrorCode::PreconditionViolation, "phase retrieval needs m >= 1, n >= 2");
  Vec y(m);
  for (int j = 0; j < m; ++j) y(j) = (j < m / 2) ? 1.0 : -1.0;

  auto data = std::make_shared<const std::pair<Mat, Vec>>(a, y);
  SaddleProblem p;
  p.dim = n;
  p.saddle = Vec::Zero(n);
  p.label = "phase_retrieval";
  p.value = [data, m](const Vec& x) {
    Vec ax = data->first * x;
    return (ax.array().square() - data->second.array()).square().sum() / (4.0 * m);
  };
  p.gradient = [data, m](const Vec& x) -> Vec {
    Vec ax = data->first * x;
    Vec w = (ax.array().square() - data->second.array()) * ax.array();
    return data->first.transpose() * w / m;
  };
  p.hessian = [data, m](const Vec& x) -> Mat {
    Vec ax = data->first * x;
    Vec w = 3.0 * ax.array().square() - data->second.array();
    Mat h = data->first.transpose() * w.asDiagonal() * data->first / m;
    return 0.5 * (h + h.transpose());
  };

  Eigen::SelfAdjointEigenSolver<Mat> es(p.hessian(p.saddle), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) < 0))
    throw Error(ErrorCode::NotStrictSaddleAtZero, "hessian at 0 has no negative eigenvalue");
  return p;
}

SaddleProblem phase_retrieval(int m, int n, std::uint64_t seed) {
  if (m != n) throw Error(ErrorCode::PreconditionViolation, "phase retrieval protocol uses m = n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat a(m, n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) a(j, i) = normal(rng);
  SaddleProblem p = phase_retrieval(a);
  p.label = "phase_retrieval";
  return p;
}

double spectral_norm(const Mat& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Spectrum saddle_spectrum(const SaddleProblem& problem) {
  return decompose(problem.hessian(problem.saddle));
}

double estimate_hessian_lipschitz(const SaddleProblem& problem, double eps, int samples,
                                  std::uint64_t seed) {
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(s));
    Vec x = uniform_in_ball(rng, problem.dim, eps);
    Vec y = uniform_in_ball(rng, problem.dim, eps);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    Mat diff = problem.hessian(problem.saddle + x) - problem.hessian(problem.saddle + y);
    best = std::max(best, spectral_norm(diff) / dist);
  }
  return best;
}

AssumptionReport validate_assumptions(const SaddleProblem& problem, double eps, int samples,
                                      std::uint64_t seed, int lipschitz_samples) {
  AssumptionReport r;
  const Mat h0 = problem.hessian(problem.saddle);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h0 + h0.transpose()), Eigen::EigenvaluesOnly);
  r.big_l = es.eigenvalues().cwiseAbs().maxCoeff();
  r.beta = es.eigenvalues().cwiseAbs().minCoeff();
  r.morse = r.beta > 1e-8 * r.big_l;
  r.strict_saddle = es.eigenvalues()(0) < 0;
  try {
    Spectrum s = decompose(h0);
    r.delta = s.delta;
    r.groups = s.groups;
    r.beta_delta_ok = s.beta >= s.delta / 2.0;
  } catch (const Error& e) {
    r.spectrum_error = e.what();
  }

  r.big_m = estimate_hessian_lipschitz(problem, eps, lipschitz_samples, seed);
  r.grad_tol = r.big_l > 0 ? 10.0 * r.big_m * eps / r.big_l : 0.0;
  // second half of the stream space keeps gradient-bound samples apart from the pair samples
  const std::uint64_t offset = std::uint64_t{1} << 62;
  for (int s = 0; s < samples; ++s) {
    auto rng = make_stream(seed, offset + static_cast<std::uint64_t>(s));
    Vec x = uniform_in_ball(rng, problem.dim, eps);
    const double nx = x.norm();
    if (nx == 0.0 || r.big_l == 0.0) continue;
    const double ratio = problem.gradient(problem.saddle + x).norm() / (r.big_l * nx);
    r.grad_ratio = std::max(r.grad_ratio, ratio);
  }
  r.grad_ok = r.grad_ratio <= 1.0 + r.grad_tol + 1e-12;
  return r;
}

ProblemConstants estimate_constants(const SaddleProblem& problem, double eps, int samples,
                                    std::uint64_t seed, double alpha) {
  Spectrum s = saddle_spectrum(problem);
  ProblemConstants c;
  c.big_l = s.big_l;
  c.beta = s.beta;
  c.delta = s.delta;
  c.big_m = estimate_hessian_lipschitz(problem, eps, samples, seed);
  const double a = alpha > 0 ? alpha : 1.0 / s.big_l;
  c.eps_max = eps_validity_bounds(c.big_l, c.big_m, problem.dim, c.delta, a, eps);
  return c;
}

}  // namespace saddle
