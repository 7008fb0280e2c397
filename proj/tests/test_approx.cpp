#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "saddle/approx.hpp"
#include "saddle/error.hpp"
#include "saddle/perturb.hpp"

using namespace saddle;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::PreconditionViolation;
}

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x(i++) = a;
  return x;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Vec on_sphere(Vec d, double eps) { return eps * d / d.norm(); }

// The displayed double sum, term by term.
Vec literal_sum(const Projections& proj, const std::vector<CoefficientSet>& cs, int k) {
  const auto n = proj.theta.size();
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lead = proj.theta(i);
    for (int r = 0; r < k; ++r) lead *= cs[r].c(i);
    double cross = 0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == i) continue;
      for (int r = 0; r < k; ++r) {
        double term = cs[r].d(i, l) * proj.theta(l);
        for (int q = 0; q < r; ++q) term *= cs[q].c(i);
        for (int q = r + 1; q < k; ++q) term *= cs[q].c(l);
        cross += term;
      }
    }
    out(i) = proj.eps * (lead + cross);
  }
  return out;
}

double max_rel_error_reference(const SaddleProblem& p, const Vec& u0, double alpha, double eps, int k_cap) {
  Spectrum s = saddle_spectrum(p);
  Projections pr = project(u0, s, eps);
  RadialTrajectory t = gd_run(p, u0, alpha, k_cap, eps);
  const int kend = t.exit_index ? *t.exit_index : static_cast<int>(t.radials.size()) - 1;
  auto cs = reference_coefficients(p, s, pr, t, kend);
  EpsTrajectory et(pr);
  double worst = 0;
  for (int k = 0; k <= kend; ++k) {
    Vec approx = to_ambient(s, pr, et.coords());
    worst = std::max(worst, (approx - t.radials[k]).norm() / t.radials[k].norm());
    if (k < kend) et.advance(cs[k]);
  }
  return worst;
}

}  // namespace

TEST_CASE("coefficients_at examples") {
  Spectrum s = decompose(mat2(1, 0, 0, -1));
  CoefficientSet q = coefficients_at(s, Mat::Zero(2, 2), 0.1, 0.1);
  CHECK(q.c(0) == doctest::Approx(0.9));
  CHECK(q.c(1) == doctest::Approx(1.1));
  CHECK(q.d.cwiseAbs().maxCoeff() == 0);

  CoefficientSet c = coefficients_at(s, mat2(0, 2, 2, 0), 0.1, 0.1);
  CHECK(c.c(0) == doctest::Approx(0.9));
  CHECK(c.c(1) == doctest::Approx(1.1));
  CHECK(c.d(1, 0) == doctest::Approx(-0.005));
  // d carries lambda_i, so the transposed entry has the opposite sign here
  CHECK(c.d(0, 1) == doctest::Approx(2 * 1 * 0.1 * 0.1 / (2 * (-1 - 1))));
  CHECK(c.d(0, 0) == 0);

  CoefficientSet z = coefficients_at(s, mat2(3, 1, 1, 2), 0.0, 0.1);
  CHECK(z.c(0) == doctest::Approx(0.9));
  CHECK(z.c(1) == doctest::Approx(1.1));
  CHECK(z.d.cwiseAbs().maxCoeff() == 0);

  // flipping a basis vector flips the sign of the cross terms that touch it
  CoefficientSet f = coefficients_at(s, mat2(0, 2, 2, 0), 0.1, 0.1, vec({1, -1}));
  CHECK(f.d(1, 0) == doctest::Approx(0.005));
}

TEST_CASE("coefficients_at within a degeneracy group") {
  Mat a = Mat::Zero(3, 3);
  a.diagonal() = vec({1, 1, -1});
  Spectrum s = decompose(a);
  Mat h = Mat::Ones(3, 3);
  CoefficientSet c = coefficients_at(s, h, 0.1, 0.5);
  CHECK(c.d(0, 1) == 0);
  CHECK(c.d(1, 0) == 0);
  CHECK(c.d(0, 2) != 0);
  Spectrum bare = s;
  bare.groups.clear();
  bare.group_of.clear();
  CHECK(code_of([&] { coefficients_at(bare, h, 0.1, 0.5); }) == ErrorCode::ZeroGap);
}

TEST_CASE("coefficient_intervals examples") {
  CoefficientIntervals a = coefficient_intervals(1, 1, 0, 1, 0.1, 0.1);
  CHECK(a.cs_lo == doctest::Approx(0.9));
  CHECK(a.cs_hi == doctest::Approx(0.9));
  CHECK(a.cus_lo == doctest::Approx(1.1));
  CHECK(a.cus_hi == doctest::Approx(1.1));
  CHECK(a.d_max == 0);

  CoefficientIntervals b = coefficient_intervals(1, 0.5, 1, 0.5, 1, 0.01);
  CHECK(b.cs_lo == doctest::Approx(-0.005));
  CHECK(b.cs_hi == doctest::Approx(0.505));
  CHECK(b.cus_lo == doctest::Approx(1.495));
  CHECK(b.cus_hi == doctest::Approx(2.005));
  CHECK(b.d_max == doctest::Approx(0.01));

  CoefficientIntervals c = coefficient_intervals(2, 0.5, 3, 0.5, 0.25, 0.0);
  CHECK(c.cs_lo == doctest::Approx(0.5));
  CHECK(c.cs_hi == doctest::Approx(0.875));
  CHECK(c.cus_lo == doctest::Approx(1.125));
  CHECK(c.cus_hi == doctest::Approx(1.5));
  CHECK(c.d_max == 0);
}

TEST_CASE("eps_trajectory at K = 0 returns u0") {
  SaddleProblem p = quadratic_saddle({2, -1, 0.5});
  Spectrum s = saddle_spectrum(p);
  Vec u0 = on_sphere(vec({0.3, -0.5, 0.8}), 0.1);
  Projections pr = project(u0, s, 0.1);
  Vec back = to_ambient(s, pr, eps_trajectory(pr, s, {}, 0));
  CHECK((back - u0).norm() < 1e-15);
  CHECK(code_of([&] { eps_trajectory(pr, s, {}, 1); }) == ErrorCode::PreconditionViolation);
}

TEST_CASE("recurrence matches the literal double sum") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    Mat a = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = (i % 2 ? -1.0 : 1.0) * (1 + i);
    Spectrum s = decompose(a);
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = u(rng);
    Projections pr = project(on_sphere(d, 0.05), s, 0.05);
    std::vector<CoefficientSet> cs(12);
    for (auto& c : cs) {
      c.c.resize(n);
      c.d = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        c.c(i) = u(rng);
        for (int l = 0; l < n; ++l)
          if (l != i) c.d(i, l) = 0.1 * u(rng);
      }
    }
    for (int k = 0; k <= 12; ++k) {
      Vec lit = literal_sum(pr, cs, k);
      Vec rec = eps_trajectory(pr, s, cs, k);
      CHECK((lit - rec).norm() <= 1e-12 * (1 + lit.norm()));
    }
  }
}

TEST_CASE("constant Hessian: eps_trajectory reproduces gd_run") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 9;
    std::vector<double> lam;
    for (int i = 0; i < n; ++i) lam.push_back((i == 0 ? -1 : (i == 1 ? 1 : (g(rng) > 0 ? 1 : -1))) * (0.3 + std::abs(g(rng))));
    SaddleProblem p = quadratic_saddle(lam);
    Spectrum s = saddle_spectrum(p);
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = g(rng);
    const double eps = 0.1;
    Vec u0 = on_sphere(d, eps);
    const double alpha = (trial % 2 ? 1.0 : 0.3) / s.big_l;
    RadialTrajectory t = gd_run(p, u0, alpha, 2000, eps);
    Projections pr = project(u0, s, eps);
    const int kend = static_cast<int>(t.radials.size()) - 1;
    auto cs = reference_coefficients(p, s, pr, t, kend);
    EpsTrajectory et(pr);
    for (int k = 0; k <= kend; ++k) {
      Vec approx = to_ambient(s, pr, et.coords());
      CHECK((approx - t.radials[k]).norm() <= 1e-12 * t.radials[k].norm());
      if (k < kend) et.advance(cs[k]);
    }
    auto pred = predictive_trajectory(p, s, pr, alpha, kend);
    CHECK((pred.back() - t.radials.back()).norm() <= 1e-12 * t.radials.back().norm());
  }
}

TEST_CASE("cubic reference mode stays within 5 eps") {
  SaddleProblem p = cubic_test();
  const double eps = 0.01;
  for (double ang = 0.05; ang < 6.2; ang += 0.37) {
    const double tus = std::sin(ang);
    // very small unstable mass means long runs; the error constant grows with K_exit
    if (tus * tus < 0.01) continue;
    Vec u0 = on_sphere(vec({std::cos(ang), tus}), eps);
    CHECK(max_rel_error_reference(p, u0, 0.1, eps, 100000) <= 5 * eps);
  }
}

namespace {

double fixed_k_rel_error(const SaddleProblem& p, double ang, double eps, int k_fixed) {
  Vec u0 = on_sphere(vec({std::cos(ang), std::sin(ang)}), eps);
  Spectrum s = saddle_spectrum(p);
  Projections pr = project(u0, s, eps);
  // a large nominal radius keeps gd_run going for exactly k_fixed steps
  RadialTrajectory t = gd_run(p, u0, 0.1, k_fixed, 1e6 * eps, 1e9);
  REQUIRE(static_cast<int>(t.radials.size()) == k_fixed + 1);
  auto cs = reference_coefficients(p, s, pr, t, k_fixed);
  Vec approx = to_ambient(s, pr, eps_trajectory(pr, s, cs, k_fixed));
  return (approx - t.radials[k_fixed]).norm() / t.radials[k_fixed].norm();
}

}  // namespace

TEST_CASE("relative error at fixed K is first order in eps") {
  SaddleProblem p = cubic_test();
  for (int k : {3, 10, 20})
    for (double ang : {0.3, 1.0, 2.0, 2.8, 4.0}) {
      const double r2 = fixed_k_rel_error(p, ang, 1e-2, k) / 1e-2;
      const double r3 = fixed_k_rel_error(p, ang, 1e-3, k) / 1e-3;
      const double r4 = fixed_k_rel_error(p, ang, 1e-4, k) / 1e-4;
      CHECK(r2 < 1.0);
      CHECK(std::abs(r3 / r4 - 1) < 0.02);
      CHECK(std::abs(r2 / r4 - 1) < 0.2);
    }
}

// Reported, not gating: the limit order is exactly 1 here, so the finite-eps
// fit sits on either side of 1 depending on the direction.
TEST_CASE("fitted order over eps in 1e-1..1e-3" * doctest::may_fail()) {
  SaddleProblem p = cubic_test();
  for (double ang : {0.3, 1.0, 2.0}) {
    std::vector<double> le, lr;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      le.push_back(std::log(eps));
      lr.push_back(std::log(fixed_k_rel_error(p, ang, eps, 10)));
    }
    const double mx = (le[0] + le[1] + le[2]) / 3, my = (lr[0] + lr[1] + lr[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (le[i] - mx) * (lr[i] - my);
      sxx += (le[i] - mx) * (le[i] - mx);
    }
    CHECK(sxy / sxx >= 1.0);
  }
}

TEST_CASE("realized coefficients stay inside the intervals") {
  SaddleProblem p = cubic_test();
  Spectrum s = saddle_spectrum(p);
  const double big_m = 4.0 / std::sqrt(3.0);
  for (double eps : {0.05, 0.01}) {
    for (double alpha : {0.1, 0.5, 1.0}) {
      CoefficientIntervals iv = coefficient_intervals(s.big_l, s.beta, big_m, s.delta, alpha, eps);
      for (double ang = 0.1; ang < 6.2; ang += 0.5) {
        Vec u0 = on_sphere(vec({std::cos(ang), std::sin(ang)}), eps);
        Projections pr = project(u0, s, eps);
        RadialTrajectory t = gd_run(p, u0, alpha, 5000, eps);
        const int kend = t.exit_index ? *t.exit_index : static_cast<int>(t.radials.size()) - 1;
        auto cs = reference_coefficients(p, s, pr, t, kend);
        for (const auto& c : cs) CHECK(contains(iv, s, c, 1e-9));
      }
    }
  }
}

TEST_CASE("sample_family with zero-width intervals is deterministic") {
  SaddleProblem p = quadratic_saddle({1, -1});
  Spectrum s = saddle_spectrum(p);
  const double eps = 0.1;
  Vec u0 = eps * vec({std::sqrt(1 - 0.00998), std::sqrt(0.00998)});
  Projections pr = project(u0, s, eps);
  CoefficientIntervals iv = coefficient_intervals(1, 1, 0, 2, 0.1, eps);
  FamilyResult f = sample_family(iv, pr, s, 200, eps, 50, 7);
  REQUIRE(f.k_iota.has_value());
  RadialTrajectory t = gd_run(p, u0, 0.1, 200, eps);
  CHECK(*f.k_iota == *t.exit_index);
  CHECK(f.sup_exit == *f.k_iota);
  CHECK(f.non_exited == 0);
  for (const auto& e : f.sampled_exit_times) CHECK(*e == 25);
}

TEST_CASE("sample_family ordering and reproducibility") {
  SaddleProblem p = quadratic_saddle({1, 0.5, -1, -0.5});
  Spectrum s = saddle_spectrum(p);
  const double eps = 0.01;
  Vec u0 = on_sphere(vec({1, 1, 0.3, 0.2}), eps);
  Projections pr = project(u0, s, eps);
  CoefficientIntervals iv = coefficient_intervals(s.big_l, s.beta, 1.5, s.delta, 0.5, eps);
  FamilyResult a = sample_family(iv, pr, s, 5000, eps, 200, 11);
  FamilyResult b = sample_family(iv, pr, s, 5000, eps, 200, 11);
  REQUIRE(a.k_iota.has_value());
  CHECK(a.sup_exit <= *a.k_iota);
  CHECK(a.sampled_exit_times == b.sampled_exit_times);
  CHECK(a.min_norm_sq == b.min_norm_sq);
  CHECK(a.min_norm_sq.size() == static_cast<size_t>(*a.k_iota) + 1);
  CHECK(a.min_norm_sq.back() > 1.0);
  // fewer samples: a prefix of the same streams
  FamilyResult c = sample_family(iv, pr, s, 5000, eps, 50, 11);
  for (int t = 0; t < 50; ++t) CHECK(c.sampled_exit_times[t] == a.sampled_exit_times[t]);
  CHECK(*c.k_iota <= *a.k_iota);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    FamilyResult f = sample_family(iv, pr, s, 5000, eps, 100, seed);
    CHECK(f.sup_exit <= *f.k_iota);
  }
}

TEST_CASE("sample_family with a pure contraction start") {
  SaddleProblem p = quadratic_saddle({1, -1});
  Spectrum s = saddle_spectrum(p);
  Projections pr = project(vec({0.1, 0}), s, 0.1);
  CoefficientIntervals iv = coefficient_intervals(1, 1, 0, 2, 0.5, 0.1);
  CHECK(code_of([&] { sample_family(iv, pr, s, 300, 0.1, 20, 1); }) == ErrorCode::NoExitInFamily);
  CHECK(code_of([&] { sample_family(iv, pr, s, 300, 0.1, 0, 1); }) == ErrorCode::PreconditionViolation);
}
