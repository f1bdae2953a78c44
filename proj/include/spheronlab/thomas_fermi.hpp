#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <utility>
#include <vector>

namespace spheron::tf {

// Length scale of the dimensionless substitution x = r/b.
double default_length_scale();  // (3 pi)^(2/3) / 2^(7/3)

// Kernel charge, kernel radius, outer-edge thermal potential and length
// scale of the shielding problem.  Rational units: e = 1, so Q e^2 = Q.
struct TFParams {
  double Q;
  double R;
  double zeta;
  double b = 0;  // 0 selects default_length_scale()

  void validate() const;
  double scale() const { return b > 0 ? b : default_length_scale(); }
};

// Screening ODE f'' = f^(3/2) / sqrt(x) as a first-order system.
std::pair<double, double> tf_rhs(double x, double f, double g);

// Autonomous reduction (y, z) = (x^3 f, x^4 g), rho = ln x:
// y' = 3y + z, z' = 4z + y^(3/2).
std::pair<double, double> reduced_rhs(double y, double z);

struct ReducedState {
  double rho;
  double y;
  double z;
};

ReducedState reduce(double x, double f, double g);
std::array<double, 3> unreduce(const ReducedState& s);  // {x, f, g}

// Electron density of the screening cloud as a function of the potential
// energy V <= 0 (rational units hbar = m = 1): (2|V|)^(3/2) / (3 pi^2).
double electron_density(double V);

struct FixedPointReport {
  enum class Type {
    UnstableNode,
    StableNode,
    Saddle,
    UnstableFocus,
    StableFocus,
    Center
  };
  double y, z;
  Eigen::Matrix2d jacobian;
  std::complex<double> eig1, eig2;
  Type type;
};

// Linearization of the reduced system at a fixed point; rejects points
// whose residual exceeds 1e-9.
FixedPointReport classify_fixed_point(double y, double z);

// The screening profile with f(0) = 1 decaying toward the Sommerfeld
// asymptote 144 x^-3, computed by shooting on the initial slope with
// staged re-bracketing in the reduced chart.
struct AtomSolution {
  double initial_slope;       // converged g(0)
  double slope_bracket_width; // final bisection bracket width
  std::vector<double> x;      // strictly increasing sample abscissae
  std::vector<double> f;      // positive, strictly decreasing samples
  double far_y;               // x^3 f at the far end (approaches 144)
};

AtomSolution separatrix_atom(double tolerance);

// Boundary residuals of the cover problem for a trial (r0, kappa):
// integrates the reduced system backward from the outer edge, where
// y(rho1) is fixed by the thermal potential and z(rho1) by the shielded
// force, and reports the inner-edge mismatches
//   {y(rho0) - (R/b)^3, z(rho0)}
// (the inner boundary carries the bare Coulomb potential: f = 1, f' = 0).
std::array<double, 2> fireball_bvp(const TFParams& params, double r0,
                                   double kappa);

struct ShieldingResult {
  double kappa;
  double r0;
  int iterations;
  std::vector<double> residual_history;  // max-norm residual per iterate
};

// Newton iteration on (kappa, r0) with the Jacobian assembled from the
// variational equations of the reduced system along the current
// trajectory (finite-difference cross-checked each step).
ShieldingResult shielding_iteration(const TFParams& params,
                                    double kappa0 = 1.0, double r00 = -1.0);

}  // namespace spheron::tf
