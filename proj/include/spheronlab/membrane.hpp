#pragma once

#include <array>
#include <complex>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "spheronlab/harmonics.hpp"

namespace spheron::membrane {

// Scalar field on a uniform latitude/longitude grid.  phi is periodic on
// [0, 2pi); psi covers [-pi/2, pi/2] with both pole rows included.
// Storage is psi-major: values[i * n_phi + j].
struct LatLonField {
  int n_phi = 0;
  int n_psi = 0;
  std::vector<double> values;

  static LatLonField zeros(int n_phi, int n_psi);
  double psi(int i) const;
  double phi(int j) const;
  double& at(int i, int j) { return values[i * n_phi + j]; }
  double at(int i, int j) const { return values[i * n_phi + j]; }
};

// Displacement Pi = u r + v k + w l of the sphere of radius R, expressed in
// the moving frame (r radial, k azimuthal, l latitudinal).
struct DisplacementField {
  double R = 1.0;
  LatLonField u, v, w;
};

// Linearized mean curvature of the displaced surface X = R (r + Pi).
// For Pi = 0 this is -1/R everywhere.  Pole rows carry the phi-average of
// the adjacent ring.
LatLonField linearized_mean_curvature(const DisplacementField& field);

// beta/(2R) times the Laplace-Beltrami operator applied to grid samples
// (the restoring acceleration of the radial wave equation).  Pole rows
// carry the phi-average of the adjacent ring.
LatLonField radial_wave_rhs(const LatLonField& u, double beta, double R);

// Spectral state of the radial oscillation: per-(l, m) displacement and
// velocity amplitudes in the real spherical-harmonic basis.
struct ModalState {
  int l_max = 0;
  // (l, m) -> {amplitude, velocity}
  std::map<std::pair<int, int>, std::array<double, 2>> coefficients;
};

// Sum over modes of velocity^2 + l(l+1) amplitude^2.
double modal_energy(const ModalState& state);

// Exact per-mode propagation: amplitude(t) = a cos(w t) + (a'/w) sin(w t)
// with w = sqrt(l(l+1)); the l = 0 mode drifts linearly.
ModalState evolve_membrane(const ModalState& state, double t);

// Eigenfrequencies of the first-order system truncated at l_max:
// +-i sqrt(l(l+1)) for 1 <= l <= l_max, each with multiplicity 2l+1.
std::vector<std::complex<double>> stability_spectrum(int l_max);

// Analysis on the Gauss-Legendre x uniform-phi quadrature grid.  Fields are
// psi-major spans of size grid.x.size() * grid.n_phi.  Throws if the input
// is not band-limited to l_max (aliasing guard).
ModalState grid_to_modal(const harmonics::QuadGrid& grid,
                         std::span<const double> u,
                         std::span<const double> u_dot, int l_max);

// Synthesis back onto the same quadrature grid.
void modal_to_grid(const ModalState& state, const harmonics::QuadGrid& grid,
                   std::vector<double>& u, std::vector<double>& u_dot);

}  // namespace spheron::membrane
