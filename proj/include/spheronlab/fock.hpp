#pragma once

#include <Eigen/Dense>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

namespace spheron::fock {

// Creation/annihilation pair on the truncated occupation basis e_0..e_n_max.
struct LadderAlgebra {
  int n_max = 0;
  Eigen::MatrixXd raise;  // e_n -> sqrt(n+1) e_{n+1}, e_{n_max} -> 0
  Eigen::MatrixXd lower;  // e_n -> sqrt(n) e_{n-1}
};

LadderAlgebra ladder_matrices(int n_max);

// raise * lower = diag(0, 1, ..., n_max) exactly.
Eigen::MatrixXd number_operator(const LadderAlgebra& alg);

// Commutator [lower, raise] evaluated in exact integer arithmetic: every
// product of matrix entries is sqrt(integer) * sqrt(integer) with a
// perfect-square product, so the result is an integer matrix.  Returns
// diag(1, ..., 1, -n_max).  Throws if a non-square product appears.
Eigen::MatrixXi commutator_exact(const LadderAlgebra& alg);

// Energies (n + 1/2) * omega for n = 0..n_max.
std::vector<double> oscillator_spectrum(double omega, int n_max);

// A single oscillator mode of the quantized field.
struct ModeIndex {
  enum class Kind { Spheron, Quasiparticle };
  Kind kind;
  int m = 0;       // azimuthal order
  int degree = 0;  // spherical degree; even for spherons
  double frequency = 0;

  // Cover oscillation mode: even degree d, frequency sqrt(d(d+1)).
  static ModeIndex spheron(int m, int degree);
  // Density oscillation mode with supplied spectral value sigma >= 0.
  static ModeIndex quasiparticle(int m, int degree, double sigma);

  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

// Sum of omega_mode (n_mode + 1/2) over the listed modes.
double field_hamiltonian(const std::vector<ModeIndex>& modes,
                         const std::map<ModeIndex, int>& occupations);

// Quantum-exchange coupling -W (a+ x A- + a- x A+) on the tensor basis
// |n1, n2>, with matrix elements between states of unequal unperturbed
// energy zeroed (energy-conservation selection).  Hermitian by construction.
Eigen::MatrixXd interaction_matrix(const ModeIndex& first,
                                   const ModeIndex& second, int n_max,
                                   double W);

// 2N x 2N operator [[diag(b), -W I], [-W I, diag(b)]].
struct BlockOperator {
  Eigen::VectorXd diagonal;
  double W = 0;
};

Eigen::MatrixXd assemble_block(const BlockOperator& op);

// Sorted multiset {b_k - W} union {b_k + W}.
std::vector<double> block_spectrum(const BlockOperator& op);

// Diagonal restrictions to the invariant subspaces {(x, x)} and {(x, -x)}:
// (diagonal - W, diagonal + W).
std::pair<Eigen::VectorXd, Eigen::VectorXd> polarize(const BlockOperator& op);

}  // namespace spheron::fock
