#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace spheron::geo {

// Attraction of a point charge at colatitude offset psi toward a uniformly
// charged great circle: pi cos(psi) / (2 sin^2(psi)).
double point_circle_force(double psi);

// The same force by periodic trapezoid quadrature of the arc integral
// int_0^{2pi} sin(psi) cos(t) / (2 - 2 cos(psi) cos(t))^2 dt.
double point_circle_force_quadrature(double psi, int nodes);

// Torque between two uniformly charged great circles at angle theta, and
// the unit-normalized pair potential 1/sin(theta) whose derivative gives
// the torque up to the documented pi^2 factor.
double circle_circle_torque(double theta);     // pi^2 cos(theta)/sin^2(theta)
double circle_circle_potential(double theta);  // 1/sin(theta)

// A point of the projective plane in homogeneous coordinates, stored as a
// unit representative; q and -q denote the same point.
struct RP2Point {
  Eigen::Vector3d q;

  static RP2Point from(const Eigen::Vector3d& raw);  // normalizes
  bool same_as(const RP2Point& other, double tol = 1e-12) const;
};

// g |q_i||q_j| / |q_i x q_j| = g / sin(angle); homogeneous of degree zero
// in each argument and invariant under sign flips.
double pairwise_potential(const Eigen::Vector3d& qi, const Eigen::Vector3d& qj,
                          double g);

// Laplace-Beltrami operator on degree-zero homogeneous functions,
// evaluated through the reduced form |q|^2 (flat Laplacian), by central
// differences with Richardson extrapolation.  Rejects fields whose radial
// derivative at q exceeds 1e-8 (not homogeneous of degree zero).
double laplace_beltrami_rp2(
    const std::function<double(const Eigen::Vector3d&)>& field,
    const Eigen::Vector3d& q);

struct RP2Configuration {
  std::vector<Eigen::Vector3d> points;      // unit representatives
  std::vector<Eigen::Vector3d> velocities;  // tangent to the points
  double g;                                 // interaction parameter
  double gamma;                             // kinetic coefficient

  void validate() const;
};

// Negative tangential gradients of the total pair potential.
std::vector<Eigen::Vector3d> nbody_forces(const RP2Configuration& config);

// sum |v|^2 / (2 gamma) + sum V_ij
double total_energy(const RP2Configuration& config);

// Stiffness estimate used for the step-size guard dt * max_frequency < 0.1.
double max_frequency(const RP2Configuration& config);

// Constraint-projected leapfrog (renormalize points, re-tangentialize
// velocities every step).  A step bringing any pair closer than 1e-3 in
// angle is retried with a halved dt; below 1e-6 the simulation aborts.
RP2Configuration simulate(RP2Configuration config, double dt, long steps);

struct FreeLevel {
  int l;             // even harmonic degree
  double sigma;      // (gamma/2) l (l+1)
  int multiplicity;  // 2l + 1
};

// Spectrum of the free quasi-particle Hamiltonian on the projective plane:
// only even degrees survive the antipodal identification.
std::vector<FreeLevel> free_spectrum(double gamma, int l_max);

// Oscillator frequencies sqrt(sigma_k) for second quantization; n_max is
// the intended Fock-space truncation and must be at least 1.
std::vector<double> quantize_free(std::span<const double> sigma, int n_max);

}  // namespace spheron::geo
