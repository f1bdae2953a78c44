#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace spheron::spectra {

// Uniform latitude grid on [-pi/2, pi/2], endpoints included.
struct PsiGrid {
  int node_count = 0;
  std::vector<double> nodes;

  static PsiGrid uniform(int n);
  double spacing() const { return nodes[1] - nodes[0]; }
};

// Latitudinal oscillation eigenproblem
//   d/dpsi(cos(psi) f') - (U/cos(psi)) f = -alpha cos(psi) f,
//   f(+-pi/2) = 0,  U > 0.
struct SpectralProblem {
  double U;
  PsiGrid grid;
};

enum class Parity { Even, Odd };

struct Mode {
  int l;                        // degree label (l(l+1) ~ eigenvalue)
  double eigenvalue;            // alpha
  Parity parity;
  std::vector<double> samples;  // full grid, endpoints zero, weighted norm 1
};

// Symmetric interior discretization plus the diagonal cos(psi) weight.
struct OperatorPair {
  Eigen::MatrixXd stiffness;  // (n-2) x (n-2), exactly symmetric
  Eigen::VectorXd weight;     // interior cos(psi) values
};

OperatorPair assemble_operator(const SpectralProblem& problem);

std::vector<Mode> solve_spectrum(const SpectralProblem& problem, int count);

// Same problem solved on grids n and 2n-1 with Richardson-extrapolated
// eigenvalues; the samples come from the fine grid.
std::vector<Mode> solve_spectrum_refined(double U, int n, int count);

// Trapezoidal integral of f*g*cos(psi) over [-pi/2, pi/2].
double weighted_inner_product(std::span<const double> f,
                              std::span<const double> g, const PsiGrid& grid);

// Traveling-wave speed for azimuthal number n and tension beta:
// solves the eigenproblem at U = n^2 beta and returns
// kappa = sqrt(alpha / (2 n^2 R)) for the chosen eigenvalue.
double dispersion(int n, double beta, double R, int mode_index,
                  int grid_nodes = 2001);

}  // namespace spheron::spectra
