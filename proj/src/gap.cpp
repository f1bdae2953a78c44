#include "spheronlab/gap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spheron::gap {

namespace {

constexpr double kPi = std::numbers::pi;

double kernel_charge(double R, double rho_ion, double e) {
  return 4.0 / 3.0 * kPi * R * R * R * rho_ion * e;
}

// sum_l W / (2 sqrt(delta^2 + eps_l^2)) - 1
double discrete_residual(std::span<const double> eps, double W, double delta) {
  double s = 0;
  for (double e : eps) s += W / (2 * std::hypot(delta, e));
  return s - 1.0;
}

// integral of d eps / sqrt(delta^2 + eps^2) over [0, eps_max] by composite
// Gauss-Legendre on octave panels (resolves the delta-scale knee)
double quadrature_integral(double delta, double eps_max) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  auto panel = [&](double a, double b) {
    double mid = (a + b) / 2, half = (b - a) / 2, acc = 0;
    for (int i = 0; i < 8; ++i)
      acc += gw[i] / std::hypot(delta, mid + half * gx[i]);
    return acc * half;
  };
  double lo = 0, hi = std::min(delta, eps_max), acc = 0;
  acc += panel(lo, hi);
  while (hi < eps_max) {
    lo = hi;
    hi = std::min(2 * hi, eps_max);
    acc += panel(lo, hi);
  }
  return acc;
}

}  // namespace

CoverGeometry CoverGeometry::make(double R, double r0, double rho_ion,
                                  double mu_e, double e, double m_e) {
  CoverGeometry g{R, r0, rho_ion, mu_e, e, m_e,
                  kernel_charge(R, rho_ion, e)};
  g.validate();
  return g;
}

void CoverGeometry::validate() const {
  if (!(R > 0) || r0 < 0 || !(rho_ion > 0) || !(mu_e > 0) || !(e > 0) ||
      !(m_e > 0))
    throw std::invalid_argument("CoverGeometry: nonpositive parameter");
  double q = kernel_charge(R, rho_ion, e);
  if (std::abs(Q - q) > 1e-12 * std::abs(q))
    throw std::invalid_argument(
        "CoverGeometry: Q inconsistent with (4/3) pi R^3 rho e");
}

double langmuir_frequency(double n, double e, double m) {
  if (!(n > 0) || !(e > 0) || !(m > 0))
    throw std::invalid_argument("langmuir_frequency: positive inputs required");
  return std::sqrt(4 * kPi * e * e * n / m);
}

double penetration_depth(double omega) {
  if (!(omega > 0))
    throw std::invalid_argument("penetration_depth: omega > 0 required");
  return kSpeedOfLight / omega;
}

double neutrality_delta(double kappa, double rho_ion, double mu_e) {
  if (!(rho_ion > 0) || !(mu_e > 0))
    throw std::invalid_argument("neutrality_delta: densities must be positive");
  double rhs = kappa * rho_ion / mu_e;
  if (rhs < 0)
    throw std::invalid_argument("neutrality_delta: negative right-hand side");
  return std::cbrt(1.0 + rhs) - 1.0;
}

double kinetic_energy(const CoverGeometry& geom, double r, double kappa) {
  geom.validate();
  if (r < 0 || r > geom.r0)
    throw std::invalid_argument("kinetic_energy: r outside [0, r0]");
  double rr = geom.R + r;
  double bracket = kappa * geom.rho_ion * std::pow(geom.R, 3) -
                   geom.mu_e * (std::pow(rr, 3) - std::pow(geom.R, 3));
  double eps = 2 * kPi * geom.e * geom.e / (3 * rr) * bracket;
  if (eps < 0 && r > 0 && r < geom.r0)
    throw std::domain_error(
        "kinetic_energy: negative energy inside the cover (inconsistent "
        "shielding profile)");
  return eps;
}

double electron_speed(const CoverGeometry& geom, double r, double kappa) {
  geom.validate();
  if (r < 0 || r > geom.r0)
    throw std::invalid_argument("electron_speed: r outside [0, r0]");
  double rr = geom.R + r;
  // enclosed charge seen at R + r: shielded kernel minus the cover shell
  double enclosed =
      kappa * geom.Q -
      4.0 / 3.0 * kPi * geom.mu_e * (std::pow(rr, 3) - std::pow(geom.R, 3)) *
          geom.e;
  double force = geom.e * enclosed / (rr * rr);
  if (force < 0)
    throw std::domain_error("electron_speed: net inward force vanished");
  return std::sqrt(force * rr / geom.m_e);
}

double energy_functional(std::span<const double> x,
                         std::span<const double> eps, double W) {
  if (x.size() != eps.size())
    throw std::invalid_argument("energy_functional: length mismatch");
  double quad = 0, pair = 0;
  for (size_t l = 0; l < x.size(); ++l) {
    if (x[l] < 0 || x[l] > 1)
      throw std::invalid_argument("energy_functional: x outside [0, 1]");
    quad += 2 * eps[l] * x[l] * x[l];
    pair += x[l] * std::sqrt(1 - x[l] * x[l]);
  }
  return quad - W * pair * pair;
}

GapSolution solve_gap_discrete(std::span<const double> eps, double W) {
  if (eps.empty())
    throw std::invalid_argument("solve_gap_discrete: at least one level");
  if (!(W > 0)) throw std::invalid_argument("solve_gap_discrete: W > 0");

  GapSolution sol;
  bool has_zero_level =
      std::any_of(eps.begin(), eps.end(), [](double e) { return e == 0.0; });
  if (!has_zero_level && discrete_residual(eps, W, 0.0) < 0) {
    // normal state: even a vanishing gap cannot satisfy the normalization
    sol.delta = 0;
  } else {
    double scale = 0;
    for (double e : eps) scale = std::max(scale, std::abs(e));
    scale = std::max(scale, W);
    double lo = 1e-300, hi = scale;
    while (discrete_residual(eps, W, hi) > 0) hi *= 2;
    for (int it = 0; it < 300 && (hi - lo) > 1e-15 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (discrete_residual(eps, W, mid) > 0 ? lo : hi) = mid;
    }
    sol.delta = 0.5 * (lo + hi);
  }
  for (double e : eps) {
    double big_e = std::hypot(sol.delta, e);
    sol.quasiparticle_energies.push_back(big_e);
    sol.occupations.push_back(big_e > 0 ? 0.5 * (1.0 - e / big_e)
                                        : 0.5);
  }
  return sol;
}

double solve_gap_integral(double W, double nu, double eps_max) {
  if (!(W > 0) || !(nu > 0) || !(eps_max > 0))
    throw std::invalid_argument("solve_gap_integral: positive inputs required");
  double delta = eps_max / std::sinh(2.0 / (W * nu));

  // independent verification: bisect the quadrature form of the integral
  // equation around the closed-form value
  double target = 2.0 / (W * nu);
  auto residual = [&](double d) {
    return quadrature_integral(d, eps_max) - target;
  };
  double lo = delta / 4, hi = delta * 4;
  while (residual(lo) < 0) lo /= 4;
  while (residual(hi) > 0) hi *= 4;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (residual(mid) > 0 ? lo : hi) = mid;
  }
  double root = 0.5 * (lo + hi);
  if (std::abs(root - delta) > 1e-10 * delta)
    throw std::logic_error(
        "solve_gap_integral: closed form and quadrature root disagree");
  return delta;
}

double pair_addition_energy(double delta, double eps) {
  if (delta < 0) throw std::invalid_argument("pair_addition_energy: delta >= 0");
  return eps - std::hypot(delta, eps);
}

double unpaired_penalty(double delta, double eps) {
  if (delta < 0) throw std::invalid_argument("unpaired_penalty: delta >= 0");
  return std::hypot(delta, eps);
}

}  // namespace spheron::gap
