#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace saddle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Spectrum {
  Vec eigenvalues;   // descending
  Mat eigenvectors;  // column i pairs with eigenvalues(i)
  std::vector<int> stable_idx;
  std::vector<int> unstable_idx;
  double big_l = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of;  // group index per eigenvalue

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  bool same_group(int i, int l) const { return group_of[i] == group_of[l]; }
  // eigenvector for the most negative eigenvalue
  Vec most_unstable() const { return eigenvectors.col(dim() - 1); }
};

struct Projections {
  Vec theta;  // |<u0, v_i>| / eps for every index, spectrum order
  Vec theta_s;
  Vec theta_us;
  double eps = 0.0;
  Vec signed_basis;  // +1 or -1 per eigenvector

  double theta_s_sq() const { return theta_s.squaredNorm(); }
  double theta_us_sq() const { return theta_us.squaredNorm(); }
};

// zero_tol defaults to 1e-8 * L. Groups are filled with default_group_gap.
Spectrum decompose(const Mat& hessian, std::optional<double> zero_tol = std::nullopt);

// median consecutive gap / 10, floored at 1e-6 * L
double default_group_gap(const Vec& eigenvalues_desc);

Spectrum group_eigenvalues(const Spectrum& spectrum, double group_gap);

// rel_tol is the allowed relative deviation of ||u0|| from eps.
Projections project(const Vec& u0, const Spectrum& spectrum, double eps, double rel_tol = 1e-8);

// Eigenvector matrix with the projection sign flips applied.
Mat signed_eigenvectors(const Spectrum& spectrum, const Projections& proj);

}  // namespace saddle
