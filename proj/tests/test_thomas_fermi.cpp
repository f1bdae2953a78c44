#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spheronlab/ode.hpp"
#include "spheronlab/thomas_fermi.hpp"

using namespace spheron::tf;
using spheron::ode::State;

namespace {

State<2> chart1_rhs(double x, const State<2>& s) {
  auto [df, dg] = tf_rhs(x, s[0], s[1]);
  return {df, dg};
}

State<2> chart2_rhs(double, const State<2>& s) {
  auto [dy, dz] = reduced_rhs(s[0], s[1]);
  return {dy, dz};
}

}  // namespace

TEST_CASE("tf_rhs basics and the Sommerfeld solution") {
  auto [df, dg] = tf_rhs(1.0, 0.0, 0.0);
  CHECK(df == 0.0);
  CHECK(dg == 0.0);

  // f = 144 x^-3 satisfies f'' = f^(3/2)/sqrt(x); at x = 2 both sides are 54
  for (double x : {0.5, 1.0, 2.0, 7.0}) {
    double f = 144.0 * std::pow(x, -3.0);
    double fpp_exact = 12.0 * 144.0 * std::pow(x, -5.0);
    auto [d1, d2] = tf_rhs(x, f, -3.0 * 144.0 * std::pow(x, -4.0));
    CHECK(d2 == doctest::Approx(fpp_exact).epsilon(1e-13));
  }
  auto [a1, a2] = tf_rhs(2.0, 144.0 / 8.0, 0.0);
  CHECK(a2 == doctest::Approx(54.0).epsilon(1e-13));

  // homogeneity: doubling f scales g' by 2^(3/2)
  auto [b1, b2] = tf_rhs(3.0, 1.0, 0.0);
  auto [c1, c2] = tf_rhs(3.0, 2.0, 0.0);
  CHECK(c2 / b2 == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));

  CHECK_THROWS_AS(tf_rhs(1.0, -0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(tf_rhs(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("reduced vector field and its fixed points") {
  auto [y1, z1] = reduced_rhs(0.0, 0.0);
  CHECK(y1 == 0.0);
  CHECK(z1 == 0.0);
  auto [y2, z2] = reduced_rhs(144.0, -432.0);
  CHECK(y2 == 0.0);
  CHECK(z2 == 0.0);
  auto [y3, z3] = reduced_rhs(1.0, 0.0);
  CHECK(y3 == 3.0);
  CHECK(z3 == 1.0);
  CHECK_THROWS_AS(reduced_rhs(-1.0, 0.0), std::domain_error);
}

TEST_CASE("chart round trip and the Sommerfeld constant trajectory") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pos(0.1, 5.0), any(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double x = pos(rng), f = pos(rng), g = any(rng);
    auto s = reduce(x, f, g);
    auto [x2, f2, g2] = unreduce(s);
    CHECK(std::abs(x2 - x) < 1e-12 * x);
    CHECK(std::abs(f2 - f) < 1e-12 * std::abs(f));
    CHECK(std::abs(g2 - g) < 1e-12 * (std::abs(g) + 1e-30));
  }
  for (double x : {0.3, 1.0, 4.0}) {
    auto s = reduce(x, 144.0 * std::pow(x, -3.0), -432.0 * std::pow(x, -4.0));
    CHECK(s.y == doctest::Approx(144.0).epsilon(1e-12));
    CHECK(s.z == doctest::Approx(-432.0).epsilon(1e-12));
  }
}

TEST_CASE("dual-chart integration agrees after conversion") {
  // chart 1 from x=1 to x=2
  State<2> c1{1.0, -0.5};
  auto end1 = spheron::ode::integrate(chart1_rhs, c1, 1.0, 2.0, 1e-12, 1e-14);
  // chart 2 over the matched log-span
  auto s0 = reduce(1.0, 1.0, -0.5);
  State<2> c2{s0.y, s0.z};
  auto end2 =
      spheron::ode::integrate(chart2_rhs, c2, s0.rho, std::log(2.0), 1e-12,
                              1e-14);
  auto [x_b, f_b, g_b] = unreduce({std::log(2.0), end2[0], end2[1]});
  CHECK(std::abs(f_b - end1[0]) < 1e-8);
  CHECK(std::abs(g_b - end1[1]) < 1e-8);
}

TEST_CASE("scale symmetry maps trajectories to trajectories") {
  for (double nu : {0.5, 2.0}) {
    State<2> base{0.8, -0.2};
    auto end = spheron::ode::integrate(chart1_rhs, base, 1.0, 3.0, 1e-12,
                                       1e-14);
    State<2> mapped{0.8 * std::pow(nu, -3.0), -0.2 * std::pow(nu, -4.0)};
    auto end_m = spheron::ode::integrate(chart1_rhs, mapped, nu, 3.0 * nu,
                                         1e-12, 1e-14);
    CHECK(std::abs(end_m[0] - end[0] * std::pow(nu, -3.0)) < 1e-8);
    CHECK(std::abs(end_m[1] - end[1] * std::pow(nu, -4.0)) < 1e-8);
  }
}

TEST_CASE("screening density is nonnegative and increasing in -V") {
  double prev = -1;
  for (double v : {0.0, -0.5, -1.0, -4.0}) {
    double mu = electron_density(v);
    CHECK(mu >= 0.0);
    CHECK(mu > prev);
    prev = mu;
  }
  CHECK_THROWS_AS(electron_density(0.1), std::invalid_argument);
}

TEST_CASE("fixed point classification") {
  auto origin = classify_fixed_point(0.0, 0.0);
  CHECK(origin.type == FixedPointReport::Type::UnstableNode);
  CHECK(origin.eig1.real() == doctest::Approx(3.0));
  CHECK(origin.eig2.real() == doctest::Approx(4.0));

  auto saddle = classify_fixed_point(144.0, -432.0);
  CHECK(saddle.type == FixedPointReport::Type::Saddle);
  CHECK(saddle.jacobian(1, 0) == doctest::Approx(18.0));
  CHECK(saddle.jacobian.determinant() == doctest::Approx(-6.0));
  double s73 = std::sqrt(73.0);
  CHECK(saddle.eig1.real() == doctest::Approx((7.0 - s73) / 2).epsilon(1e-12));
  CHECK(saddle.eig2.real() == doctest::Approx((7.0 + s73) / 2).epsilon(1e-12));
  // trace consistency
  CHECK(saddle.eig1.real() + saddle.eig2.real() ==
        doctest::Approx(saddle.jacobian.trace()).epsilon(1e-12));

  CHECK_THROWS_AS(classify_fixed_point(10.0, 10.0), std::invalid_argument);
}

TEST_CASE("atom separatrix reaches the Sommerfeld asymptote") {
  auto sol = separatrix_atom(1e-12);
  CHECK(sol.slope_bracket_width < 1e-12);
  CHECK(sol.initial_slope > -10.0);
  CHECK(sol.initial_slope < 0.0);
  CHECK(std::abs(sol.far_y - 144.0) < 0.05 * 144.0);

  REQUIRE(sol.x.size() > 10);
  for (size_t i = 1; i < sol.x.size(); ++i) {
    CHECK(sol.x[i] > sol.x[i - 1]);
    CHECK(sol.f[i] < sol.f[i - 1]);
    CHECK(sol.f[i] > 0.0);
  }
  // y = x^3 f rises monotonically toward 144 along the separatrix
  double prev_y = 0;
  for (size_t i = 0; i < sol.x.size(); ++i) {
    double y = sol.x[i] * sol.x[i] * sol.x[i] * sol.f[i];
    CHECK(y >= prev_y - 1e-9);
    CHECK(y < 144.0 * 1.05);
    prev_y = y;
  }
  CHECK_THROWS_AS(separatrix_atom(-1.0), std::invalid_argument);
}

TEST_CASE("fireball residual span and closed forms") {
  TFParams p{2.0, 10.0, 0.05};
  p.validate();
  double b = p.scale();
  CHECK(b == doctest::Approx(std::pow(3 * std::numbers::pi, 2.0 / 3.0) /
                             std::pow(2.0, 7.0 / 3.0)).epsilon(1e-14));

  // Sommerfeld constant trajectory: pick R so that (R/b)^3 = 144 and the
  // thermal potential so that the outer target is exactly 144
  double R = b * std::cbrt(144.0);
  double r0 = 0.4;
  double r1 = R + r0;
  double zeta = 144.0 * b * b * b * p.Q / std::pow(r1, 4);
  TFParams sp{p.Q, R, zeta};
  double x1 = r1 / b;
  double kappa = (144.0 + 432.0) / std::pow(x1, 3);
  auto res = fireball_bvp(sp, r0, kappa);
  CHECK(std::abs(res[0]) < 1e-8);            // y stays at 144 = (R/b)^3
  CHECK(res[1] == doctest::Approx(-432.0).epsilon(1e-9));

  // doubling Q at fixed geometry halves the outer target, which shifts
  // the inner-edge mismatch accordingly (linearity check via the target)
  TFParams q2{2 * sp.Q, sp.R, sp.zeta};
  auto res2 = fireball_bvp(q2, r0, 2 * kappa - 144.0 / std::pow(x1, 3));
  // with y-target halved and kappa adjusted to keep z1 fixed, the
  // backward trajectory differs only through y(rho1)
  CHECK(std::isfinite(res2[0]));

  CHECK_THROWS_AS(fireball_bvp(sp, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("fireball target is linear in 1/Q") {
  // compare outer targets through the residual of a frozen trajectory:
  // integrate nothing; check the documented identity directly
  TFParams p{3.0, 10.0, 0.05};
  double b = p.scale();
  double r0 = 0.2, r1 = p.R + r0;
  double target_q = std::pow(r1 / b, 3) * r1 * p.zeta / p.Q;
  TFParams p2{6.0, 10.0, 0.05};
  double target_2q = std::pow(r1 / b, 3) * r1 * p2.zeta / p2.Q;
  CHECK(target_2q == doctest::Approx(0.5 * target_q).epsilon(1e-14));
}

namespace {

// Build a consistent cover problem: integrate forward from the bare-Coulomb
// inner edge over a chosen width, then choose zeta so the outer boundary
// condition holds exactly, and read off the implied shielding factor.
struct Manufactured {
  TFParams params;
  double kappa_star;
  double r0_star;
};

Manufactured manufacture(double R, double r0_star, double Q) {
  double b = default_length_scale();
  double x0 = R / b, x1 = (R + r0_star) / b;
  State<2> s{std::pow(x0, 3), 0.0};
  s = spheron::ode::integrate(chart2_rhs, s, std::log(x0), std::log(x1),
                              1e-13, 1e-15);
  double zeta = s[0] * b * b * b * Q / std::pow(R + r0_star, 4);
  double kappa = (s[0] - s[1]) / std::pow(x1, 3);
  return {TFParams{Q, R, zeta}, kappa, r0_star};
}

}  // namespace

TEST_CASE("shielding iteration recovers a manufactured cover") {
  auto m = manufacture(1.0, 0.2, 5.0);
  CHECK(m.kappa_star > 0);
  CHECK(m.kappa_star < 1);
  auto sol = shielding_iteration(m.params);
  CHECK(std::abs(sol.r0 - m.r0_star) < 1e-8 * m.r0_star);
  CHECK(std::abs(sol.kappa - m.kappa_star) < 1e-8 * std::abs(m.kappa_star));
  auto res = fireball_bvp(m.params, sol.r0, sol.kappa);
  double scale = std::pow(m.params.R / m.params.scale(), 3);
  CHECK(std::abs(res[0]) < 1e-8 * scale);
  CHECK(std::abs(res[1]) < 1e-8 * scale);
}

TEST_CASE("Newton converges quadratically once inside the basin") {
  auto m = manufacture(1.0, 0.2, 5.0);
  auto sol = shielding_iteration(m.params, 0.6, m.params.R / 40);
  const auto& h = sol.residual_history;
  REQUIRE(h.size() >= 3);
  // successive residuals fall at least quadratically until the noise floor
  double scale = std::pow(m.params.R / m.params.scale(), 3);
  for (size_t k = 0; k + 1 < h.size(); ++k) {
    if (h[k + 1] < 1e-11 * scale) break;  // integrator noise floor
    double rk = h[k] / scale, rk1 = h[k + 1] / scale;
    CHECK(rk1 < 50.0 * rk * rk);
  }
}

TEST_CASE("shielding iteration is seed-insensitive") {
  auto m = manufacture(5.0, 0.1, 3.0);
  CHECK(m.kappa_star > 0);
  CHECK(m.kappa_star < 1);
  for (double k0 : {0.5, 0.75, 1.0})
    for (double r00 : {m.params.R / 200, m.params.R / 50}) {
      auto sol = shielding_iteration(m.params, k0, r00);
      CHECK(std::abs(sol.r0 - m.r0_star) < 1e-7);
      CHECK(std::abs(sol.kappa - m.kappa_star) < 1e-7);
    }
}
