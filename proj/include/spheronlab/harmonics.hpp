#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spheron::harmonics {

// Quadrature grid for spherical-harmonic analysis: Gauss-Legendre nodes in
// x = sin(psi) and a uniform periodic phi grid.  Analysis integrals are
// exact for band-limited fields up to degree n_psi - 1 (and azimuthal
// order < n_phi / 2).
struct QuadGrid {
  std::vector<double> x;        // Gauss-Legendre nodes in [-1, 1]
  std::vector<double> weights;  // matching weights
  int n_phi = 0;

  static QuadGrid make(int n_psi, int n_phi);
  double phi(int j) const;
};

// Real, fully normalized spherical harmonic: integral of Y^2 over the unit
// sphere equals 1.  m > 0 pairs with cos(m phi), m < 0 with sin(|m| phi).
double real_sh(int l, int m, double x /* = sin psi */, double phi);

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace spheron::harmonics
