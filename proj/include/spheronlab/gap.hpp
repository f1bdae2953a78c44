#pragma once

#include <span>
#include <vector>

namespace spheron::gap {

// Gaussian-cgs constants used by the plasma helpers.
inline constexpr double kSpeedOfLight = 2.99792458e10;   // cm/s
inline constexpr double kElectronCharge = 4.80320471e-10; // statC
inline constexpr double kElectronMass = 9.1093837015e-28; // g

// Charged kernel of radius R surrounded by an electron cover of width r0.
struct CoverGeometry {
  double R;        // kernel radius, cm
  double r0;       // cover width, cm
  double rho_ion;  // ion number density, cm^-3
  double mu_e;     // electron number density in the cover, cm^-3
  double e;        // elementary charge, Gaussian units
  double m_e;      // electron mass, g
  double Q;        // kernel charge, (4/3) pi R^3 rho_ion e

  static CoverGeometry make(double R, double r0, double rho_ion, double mu_e,
                            double e = kElectronCharge,
                            double m_e = kElectronMass);
  void validate() const;
};

// Plasma frequency omega = sqrt(4 pi e^2 n / m) and field penetration
// depth c / omega.
double langmuir_frequency(double n, double e = kElectronCharge,
                          double m = kElectronMass);
double penetration_depth(double omega);

// Relative cover width delta = r0/R from the charge-neutrality cubic
// delta^3 + 3 delta^2 + 3 delta = kappa rho / mu.
double neutrality_delta(double kappa, double rho_ion, double mu_e);

// Kinetic energy of a cover electron at radius R + r, for shielding
// factor kappa at that radius:
//   eps = 2 pi e^2 / (3 (R+r)) * [kappa rho R^3 - mu ((R+r)^3 - R^3)].
double kinetic_energy(const CoverGeometry& geom, double r, double kappa);

// Orbital speed from the electrostatic force balance; m v^2 / 2 equals
// kinetic_energy.
double electron_speed(const CoverGeometry& geom, double r, double kappa);

// Pairing energy functional E = sum 2 eps_l x_l^2 - W (sum x_l y_l)^2,
// y_l = sqrt(1 - x_l^2).
double energy_functional(std::span<const double> x,
                         std::span<const double> eps, double W);

struct GapSolution {
  double delta = 0;  // 0 signals the normal (no-gap) state
  std::vector<double> occupations;             // x_l^2
  std::vector<double> quasiparticle_energies;  // E_l = sqrt(delta^2+eps^2)
};

// Solves 1 = sum_l W / (2 sqrt(delta^2 + eps_l^2)) by bisection and fills
// the minus-branch occupations x_l^2 = (1 - eps_l/E_l)/2.  When even
// delta -> 0 cannot satisfy the normalization (sum W/(2|eps|) < 1) the
// normal state delta = 0 is returned.
GapSolution solve_gap_discrete(std::span<const double> eps, double W);

// Closed form delta = eps_max / sinh(2/(W nu)) for a constant density of
// states on [0, eps_max]; cross-checked internally against a quadrature +
// bisection root of the integral equation.
double solve_gap_integral(double W, double nu, double eps_max);

// Energy change on adding a bound pair at level energy eps:
// xi = eps - sqrt(delta^2 + eps^2) <= 0.
double pair_addition_energy(double delta, double eps);

// Quasiparticle energy sqrt(delta^2 + eps^2) >= delta (half the
// pair-breaking cost).
double unpaired_penalty(double delta, double eps);

}  // namespace spheron::gap
