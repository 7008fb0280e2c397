#include "saddle/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "saddle/error.hpp"
#include "saddle/perturb.hpp"
#include "saddle/random.hpp"

namespace saddle {

CoefficientSet coefficients_at(const Spectrum& spectrum, const Mat& h_matrix, double u_norm,
                               double alpha, const Vec& signs, int step) {
  const int n = spectrum.dim();
  if (u_norm < 0) throw Error(ErrorCode::PreconditionViolation, "u_norm must be nonnegative");
  Mat v = spectrum.eigenvectors;
  if (signs.size() == n) v = v * signs.asDiagonal();
  const Vec& lam = spectrum.eigenvalues;
  Mat hv = v.transpose() * h_matrix * v;  // hv(l, i) = <v_l, H v_i>
  const bool grouped = static_cast<int>(spectrum.group_of.size()) == n;

  CoefficientSet c;
  c.step = step;
  c.c.resize(n);
  c.d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) c.c(i) = 1.0 - alpha * lam(i) - alpha * u_norm / 2.0 * hv(i, i);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      if (l == i || (grouped && spectrum.same_group(i, l))) continue;
      const double gap = lam(l) - lam(i);
      if (gap == 0.0) throw Error(ErrorCode::ZeroGap, "equal eigenvalues in a cross term");
      c.d(i, l) = hv(l, i) * lam(i) * alpha * u_norm / (2.0 * gap);
    }
  }
  return c;
}

CoefficientIntervals coefficient_intervals(double big_l, double beta, double big_m, double delta,
                                           double alpha, double eps) {
  if (!(big_l > 0) || !(beta > 0) || beta > big_l || big_m < 0 || !(alpha > 0) ||
      alpha * big_l > 1.0 + 1e-12 || eps < 0)
    throw Error(ErrorCode::PreconditionViolation, "invalid interval constants");
  const double drift = alpha * eps * big_m / 2.0;
  CoefficientIntervals iv;
  iv.cs_lo = 1.0 - alpha * big_l - drift;
  iv.cs_hi = 1.0 - alpha * beta + drift;
  iv.cus_lo = 1.0 + alpha * beta - drift;
  iv.cus_hi = 1.0 + alpha * big_l + drift;
  iv.d_max = big_m == 0.0 ? 0.0 : alpha * eps * big_m * big_l / (2.0 * delta);
  return iv;
}

bool contains(const CoefficientIntervals& iv, const Spectrum& spectrum, const CoefficientSet& c,
              double tol) {
  for (int i : spectrum.stable_idx)
    if (c.c(i) < iv.cs_lo - tol || c.c(i) > iv.cs_hi + tol) return false;
  for (int j : spectrum.unstable_idx)
    if (c.c(j) < iv.cus_lo - tol || c.c(j) > iv.cus_hi + tol) return false;
  return c.d.cwiseAbs().maxCoeff() <= iv.d_max + tol;
}

EpsTrajectory::EpsTrajectory(const Projections& proj)
    : theta_(proj.theta),
      eps_(proj.eps),
      prod_(Vec::Ones(proj.theta.size())),
      coupling_(Mat::Zero(proj.theta.size(), proj.theta.size())) {}

void EpsTrajectory::advance(const CoefficientSet& c) {
  const auto n = theta_.size();
  if (c.c.size() != n || c.d.rows() != n || c.d.cols() != n)
    throw Error(ErrorCode::PreconditionViolation, "coefficient dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == i) continue;
      coupling_(i, l) = c.c(l) * coupling_(i, l) + prod_(i) * c.d(i, l);
    }
  }
  prod_ = prod_.cwiseProduct(c.c);
  ++k_;
}

Vec EpsTrajectory::coords() const {
  return eps_ * (prod_.cwiseProduct(theta_) + coupling_ * theta_);
}

Vec eps_trajectory(const Projections& proj, const Spectrum& spectrum,
                   const std::vector<CoefficientSet>& coeffs, int k) {
  if (k < 0 || static_cast<int>(coeffs.size()) < k)
    throw Error(ErrorCode::PreconditionViolation, "need K >= 0 and at least K coefficient sets");
  if (proj.theta.size() != spectrum.dim())
    throw Error(ErrorCode::PreconditionViolation, "projection dimension mismatch");
  EpsTrajectory t(proj);
  for (int r = 0; r < k; ++r) t.advance(coeffs[r]);
  return t.coords();
}

Vec to_ambient(const Spectrum& spectrum, const Projections& proj, const Vec& coords) {
  return signed_eigenvectors(spectrum, proj) * coords;
}

std::vector<CoefficientSet> reference_coefficients(const SaddleProblem& problem,
                                                   const Spectrum& spectrum,
                                                   const Projections& proj,
                                                   const RadialTrajectory& traj, int k) {
  if (k < 0 || static_cast<int>(traj.radials.size()) < k)
    throw Error(ErrorCode::PreconditionViolation, "trajectory shorter than requested K");
  std::vector<CoefficientSet> out;
  const double h = default_fd_step(proj.eps);
  for (int r = 0; r < k; ++r) {
    const Vec& u = traj.radials[r];
    const double nrm = u.norm();
    Mat hm = nrm > 0 ? directional_hessian_derivative(problem, u / nrm, h)
                     : Mat::Zero(problem.dim, problem.dim);
    out.push_back(coefficients_at(spectrum, hm, nrm, traj.alpha, proj.signed_basis, r));
  }
  return out;
}

std::vector<Vec> predictive_trajectory(const SaddleProblem& problem, const Spectrum& spectrum,
                                       const Projections& proj, double alpha, int k) {
  EpsTrajectory t(proj);
  const double h = default_fd_step(proj.eps);
  std::vector<Vec> out;
  out.push_back(to_ambient(spectrum, proj, t.coords()));
  for (int r = 0; r < k; ++r) {
    const Vec& u = out.back();
    const double nrm = u.norm();
    Mat hm = nrm > 0 ? directional_hessian_derivative(problem, u / nrm, h)
                     : Mat::Zero(problem.dim, problem.dim);
    t.advance(coefficients_at(spectrum, hm, nrm, alpha, proj.signed_basis, r));
    out.push_back(to_ambient(spectrum, proj, t.coords()));
  }
  return out;
}

FamilyResult sample_family(const CoefficientIntervals& iv, const Projections& proj,
                           const Spectrum& spectrum, int k_max, double eps, int n_samples,
                           std::uint64_t seed) {
  if (n_samples < 1 || k_max < 1) throw Error(ErrorCode::PreconditionViolation, "need n_samples >= 1 and k_max >= 1");
  if (iv.cs_lo > iv.cs_hi || iv.cus_lo > iv.cus_hi || iv.d_max < 0)
    throw Error(ErrorCode::PreconditionViolation, "empty coefficient interval");
  const int n = spectrum.dim();
  std::vector<char> stable(n, 0);
  for (int i : spectrum.stable_idx) stable[i] = 1;

  // Samples advance in lockstep so the scan can stop at K^iota; each sample
  // still owns its own stream, so values do not depend on the scan order.
  std::vector<std::mt19937_64> rngs;
  std::vector<EpsTrajectory> trajs;
  for (int t = 0; t < n_samples; ++t) {
    rngs.push_back(make_stream(seed, static_cast<std::uint64_t>(t)));
    trajs.emplace_back(proj);
  }
  FamilyResult res;
  res.sampled_exit_times.assign(n_samples, std::nullopt);
  const double eps_sq = eps * eps;
  double m0 = std::numeric_limits<double>::infinity();
  for (const auto& tr : trajs) m0 = std::min(m0, tr.coords().squaredNorm());
  res.min_norm_sq.push_back(m0);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CoefficientSet c;
  c.c.resize(n);
  c.d = Mat::Zero(n, n);
  for (int k = 0; k < k_max; ++k) {
    c.step = k;
    double mk = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_samples; ++t) {
      auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unif(rngs[t]); };
      for (int i = 0; i < n; ++i) c.c(i) = stable[i] ? draw(iv.cs_lo, iv.cs_hi) : draw(iv.cus_lo, iv.cus_hi);
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
          if (l != i) c.d(i, l) = draw(-iv.d_max, iv.d_max);
      trajs[t].advance(c);
      const double nsq = trajs[t].coords().squaredNorm();
      mk = std::min(mk, nsq);
      if (!res.sampled_exit_times[t] && nsq > eps_sq) res.sampled_exit_times[t] = k + 1;
    }
    res.min_norm_sq.push_back(mk);
    if (mk > eps_sq) {
      res.k_iota = k + 1;
      break;
    }
  }
  for (const auto& e : res.sampled_exit_times) {
    if (e) res.sup_exit = std::max(res.sup_exit, *e);
    else ++res.non_exited;
  }
  if (res.non_exited == n_samples) throw Error(ErrorCode::NoExitInFamily, "no sampled trajectory exits within k_max");
  for (double& v : res.min_norm_sq) v /= eps_sq;
  return res;
}

}  // namespace saddle
