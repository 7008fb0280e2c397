#include "saddle/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saddle/error.hpp"

namespace saddle {

namespace {

void fill_index_sets(Spectrum& s) {
  s.stable_idx.clear();
  s.unstable_idx.clear();
  for (int i = 0; i < s.dim(); ++i) {
    if (s.eigenvalues(i) > 0) s.stable_idx.push_back(i);
    else s.unstable_idx.push_back(i);
  }
}

}  // namespace

double default_group_gap(const Vec& ev) {
  const int n = static_cast<int>(ev.size());
  double big_l = ev.cwiseAbs().maxCoeff();
  std::vector<double> gaps;
  for (int i = 0; i + 1 < n; ++i) gaps.push_back(ev(i) - ev(i + 1));
  std::sort(gaps.begin(), gaps.end());
  double med = 0.0;
  if (!gaps.empty()) {
    const size_t m = gaps.size();
    med = (m % 2 == 1) ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
  }
  return std::max(med / 10.0, 1e-6 * big_l);
}

Spectrum decompose(const Mat& hessian, std::optional<double> zero_tol) {
  const auto n = hessian.rows();
  if (n < 2 || hessian.cols() != n)
    throw Error(ErrorCode::PreconditionViolation, "decompose needs a square matrix with n >= 2");
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw Error(ErrorCode::NotSymmetric, "hessian is not symmetric");
  if (!hessian.allFinite()) throw Error(ErrorCode::NotMorse, "hessian has non-finite entries");

  Mat sym = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotMorse, "eigensolver failed");

  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (int j = 0; j < n; ++j) {
    Eigen::Index arg;
    s.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (s.eigenvectors(arg, j) < 0) s.eigenvectors.col(j) *= -1.0;
  }

  s.big_l = s.eigenvalues.cwiseAbs().maxCoeff();
  s.beta = s.eigenvalues.cwiseAbs().minCoeff();
  const double tol = zero_tol.value_or(1e-8 * s.big_l);
  if (s.big_l == 0.0 || s.beta <= tol)
    throw Error(ErrorCode::NotMorse, "eigenvalue within zero tolerance");
  fill_index_sets(s);
  if (s.unstable_idx.empty())
    throw Error(ErrorCode::NoNegativeEigenvalue, "no negative eigenvalue");

  return group_eigenvalues(s, default_group_gap(s.eigenvalues));
}

Spectrum group_eigenvalues(const Spectrum& spectrum, double group_gap) {
  if (!(group_gap > 0)) throw Error(ErrorCode::PreconditionViolation, "group_gap must be positive");
  Spectrum s = spectrum;
  const int n = s.dim();
  s.groups.clear();
  s.group_of.assign(n, 0);
  s.groups.push_back({0});
  double delta = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) {
    const double gap = s.eigenvalues(i - 1) - s.eigenvalues(i);
    if (gap < group_gap) {
      s.groups.back().push_back(i);
    } else {
      delta = std::min(delta, gap);
      s.groups.push_back({i});
    }
    s.group_of[i] = static_cast<int>(s.groups.size()) - 1;
  }
  if (s.groups.size() < 2) throw Error(ErrorCode::SingleGroup, "all eigenvalues fall in one group");
  s.delta = delta;
  return s;
}

Projections project(const Vec& u0, const Spectrum& spectrum, double eps, double rel_tol) {
  if (u0.size() != spectrum.dim())
    throw Error(ErrorCode::PreconditionViolation, "u0 dimension mismatch");
  if (!(eps > 0)) throw Error(ErrorCode::PreconditionViolation, "eps must be positive");
  if (std::abs(u0.norm() - eps) > rel_tol * eps)
    throw Error(ErrorCode::WrongRadius, "||u0|| differs from eps");

  Projections p;
  p.eps = eps;
  const int n = spectrum.dim();
  Vec inner = spectrum.eigenvectors.transpose() * u0;
  p.theta = inner.cwiseAbs() / eps;
  p.signed_basis = Vec::Ones(n);
  for (int i = 0; i < n; ++i)
    if (inner(i) < 0) p.signed_basis(i) = -1.0;
  p.theta_s.resize(static_cast<Eigen::Index>(spectrum.stable_idx.size()));
  p.theta_us.resize(static_cast<Eigen::Index>(spectrum.unstable_idx.size()));
  for (size_t k = 0; k < spectrum.stable_idx.size(); ++k) p.theta_s(k) = p.theta(spectrum.stable_idx[k]);
  for (size_t k = 0; k < spectrum.unstable_idx.size(); ++k)
    p.theta_us(k) = p.theta(spectrum.unstable_idx[k]);
  return p;
}

Mat signed_eigenvectors(const Spectrum& spectrum, const Projections& proj) {
  return spectrum.eigenvectors * proj.signed_basis.asDiagonal();
}

}  // namespace saddle
