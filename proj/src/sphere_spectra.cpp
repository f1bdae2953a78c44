#include "spheronlab/sphere_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spheron::spectra {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

void validate(const SpectralProblem& problem) {
  if (!(problem.U > 0))
    throw std::invalid_argument("SpectralProblem: U must be positive");
  const auto& g = problem.grid;
  if (g.node_count < 16)
    throw std::invalid_argument("SpectralProblem: grid too coarse (need >= 16 nodes)");
  if ((int)g.nodes.size() != g.node_count)
    throw std::invalid_argument("PsiGrid: node_count/nodes mismatch");
  if (std::abs(g.nodes.front() + kHalfPi) > 1e-12 ||
      std::abs(g.nodes.back() - kHalfPi) > 1e-12)
    throw std::invalid_argument("PsiGrid: endpoints must be +-pi/2");
}

// Tridiagonal form of the interior operator, symmetrized by the
// cos(psi) weight: T = W^{-1/2} K W^{-1/2}.
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1
};

Tridiag build_tridiag(const SpectralProblem& p) {
  const auto& psi = p.grid.nodes;
  const int n = p.grid.node_count - 2;
  const double h = p.grid.spacing();
  Tridiag t;
  t.diag.resize(n);
  t.off.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    double c = std::cos(psi[i + 1]);
    double cm = std::cos(psi[i + 1] - h / 2);
    double cp = std::cos(psi[i + 1] + h / 2);
    double kd = (cm + cp) / (h * h) + p.U / c;
    t.diag[i] = kd / c;
    if (i + 1 < n) {
      double cnext = std::cos(psi[i + 2]);
      t.off[i] = -cp / (h * h) / std::sqrt(c * cnext);
    }
  }
  return t;
}

// Number of eigenvalues of T strictly below x (Sturm sequence count).
int sturm_count(const Tridiag& t, double x) {
  int n = (int)t.diag.size();
  int count = 0;
  double q = t.diag[0] - x;
  if (q < 0) ++count;
  for (int i = 1; i < n; ++i) {
    double e2 = t.off[i - 1] * t.off[i - 1];
    if (q == 0.0) q = 1e-300;
    q = t.diag[i] - x - e2 / q;
    if (q < 0) ++count;
  }
  return count;
}

// k-th (0-based) eigenvalue by bisection.
double bisect_eigenvalue(const Tridiag& t, int k) {
  double lo = t.diag[0], hi = t.diag[0];
  int n = (int)t.diag.size();
  for (int i = 0; i < n; ++i) {
    double r = 0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi));
       ++it) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count(t, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Inverse iteration for the eigenvector of T at (near-)eigenvalue lambda.
std::vector<double> inverse_iteration(const Tridiag& t, double lambda) {
  int n = (int)t.diag.size();
  std::vector<double> x(n, 1.0 / std::sqrt((double)n));
  // LU with partial pivoting of (T - lambda I), banded
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = t.diag[i] - lambda;
    for (int i = 0; i + 1 < n; ++i) u1[i] = t.off[i];
    std::vector<double> sub(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) sub[i + 1] = t.off[i];
    std::vector<double> b = x;
    // forward elimination with row swaps
    for (int i = 0; i + 1 < n; ++i) {
      if (std::abs(sub[i + 1]) > std::abs(d[i])) {
        std::swap(d[i], sub[i + 1]);
        std::swap(u1[i], d[i + 1]);
        // u2 fill-in from the swapped row
        if (i + 2 < n) {
          u2[i] = u1[i + 1];
          u1[i + 1] = 0.0;
        }
        std::swap(b[i], b[i + 1]);
      }
      if (d[i] == 0.0) d[i] = 1e-300;
      double m = sub[i + 1] / d[i];
      d[i + 1] -= m * u1[i];
      if (i + 2 < n) u1[i + 1] -= m * u2[i];
      b[i + 1] -= m * b[i];
    }
    if (d[n - 1] == 0.0) d[n - 1] = 1e-300;
    // back substitution
    x[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (b[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
      x[i] = (b[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
    double nrm = 0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : x) v /= nrm;
  }
  return x;
}

double tridiag_residual(const Tridiag& t, double lambda,
                        const std::vector<double>& x) {
  int n = (int)t.diag.size();
  double r2 = 0;
  for (int i = 0; i < n; ++i) {
    double v = (t.diag[i] - lambda) * x[i];
    if (i > 0) v += t.off[i - 1] * x[i - 1];
    if (i + 1 < n) v += t.off[i] * x[i + 1];
    r2 += v * v;
  }
  return std::sqrt(r2);
}

int degree_offset(double U) {
  int m = (int)std::lround(std::sqrt(U));
  return std::max(1, m);
}

std::vector<Mode> solve_on_grid(const SpectralProblem& p, int count) {
  validate(p);
  if (count < 1) throw std::invalid_argument("solve_spectrum: count >= 1 required");
  if (count > p.grid.node_count / 4)
    throw std::invalid_argument("solve_spectrum: count exceeds node_count/4 resolution guard");

  Tridiag t = build_tridiag(p);
  const auto& psi = p.grid.nodes;
  const int n = p.grid.node_count;
  const int l0 = degree_offset(p.U);

  std::vector<Mode> modes;
  for (int k = 0; k < count; ++k) {
    double lambda = bisect_eigenvalue(t, k);
    std::vector<double> v = inverse_iteration(t, lambda * (1 + 1e-11) + 1e-13);
    double res = tridiag_residual(t, lambda, v);
    if (res > 1e-6 * std::max(1.0, std::abs(lambda))) {
      std::ostringstream msg;
      msg << "solve_spectrum: eigenpair " << k
          << " failed to converge, residual norm " << res;
      throw std::runtime_error(msg.str());
    }

    Mode mode;
    mode.l = l0 + k;
    mode.eigenvalue = lambda;
    mode.samples.assign(n, 0.0);
    for (int i = 0; i < n - 2; ++i)
      mode.samples[i + 1] = v[i] / std::sqrt(std::cos(psi[i + 1]));

    double norm = std::sqrt(
        weighted_inner_product(mode.samples, mode.samples, p.grid));
    double sign = 1.0;
    for (double s : mode.samples)
      if (std::abs(s) > 1e-8) {
        sign = (s > 0) ? 1.0 : -1.0;
        break;
      }
    for (double& s : mode.samples) s *= sign / norm;

    double even = 0, odd = 0;
    for (int i = 0; i < n; ++i) {
      double a = mode.samples[i], b = mode.samples[n - 1 - i];
      even += (a - b) * (a - b);
      odd += (a + b) * (a + b);
    }
    mode.parity = (even <= odd) ? Parity::Even : Parity::Odd;
    modes.push_back(std::move(mode));
  }
  return modes;
}

}  // namespace

PsiGrid PsiGrid::uniform(int n) {
  if (n < 16) throw std::invalid_argument("PsiGrid: need at least 16 nodes");
  PsiGrid g;
  g.node_count = n;
  g.nodes.resize(n);
  double h = std::numbers::pi / (n - 1);
  for (int i = 0; i < n; ++i) g.nodes[i] = -kHalfPi + i * h;
  g.nodes.front() = -kHalfPi;
  g.nodes.back() = kHalfPi;
  return g;
}

OperatorPair assemble_operator(const SpectralProblem& problem) {
  validate(problem);
  const auto& psi = problem.grid.nodes;
  const int n = problem.grid.node_count - 2;
  const double h = problem.grid.spacing();
  OperatorPair out;
  out.stiffness = Eigen::MatrixXd::Zero(n, n);
  out.weight = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double c = std::cos(psi[i + 1]);
    double cm = std::cos(psi[i + 1] - h / 2);
    double cp = std::cos(psi[i + 1] + h / 2);
    out.stiffness(i, i) = (cm + cp) / (h * h) + problem.U / c;
    if (i + 1 < n) {
      out.stiffness(i, i + 1) = -cp / (h * h);
      out.stiffness(i + 1, i) = -cp / (h * h);
    }
    out.weight(i) = c;
  }
  return out;
}

std::vector<Mode> solve_spectrum(const SpectralProblem& problem, int count) {
  return solve_on_grid(problem, count);
}

std::vector<Mode> solve_spectrum_refined(double U, int n, int count) {
  SpectralProblem coarse{U, PsiGrid::uniform(n)};
  SpectralProblem fine{U, PsiGrid::uniform(2 * n - 1)};
  auto mc = solve_on_grid(coarse, count);
  auto mf = solve_on_grid(fine, count);
  for (int k = 0; k < count; ++k)
    mf[k].eigenvalue = (4 * mf[k].eigenvalue - mc[k].eigenvalue) / 3;
  return mf;
}

double weighted_inner_product(std::span<const double> f,
                              std::span<const double> g, const PsiGrid& grid) {
  if (f.size() != g.size() || (int)f.size() != grid.node_count)
    throw std::invalid_argument("weighted_inner_product: length mismatch");
  const double h = grid.spacing();
  double acc = 0;
  for (int i = 0; i < grid.node_count; ++i) {
    double w = (i == 0 || i == grid.node_count - 1) ? h / 2 : h;
    acc += w * f[i] * g[i] * std::cos(grid.nodes[i]);
  }
  return acc;
}

double dispersion(int n, double beta, double R, int mode_index,
                  int grid_nodes) {
  if (n < 1) throw std::invalid_argument("dispersion: n >= 1 required");
  if (!(beta > 0) || !(R > 0))
    throw std::invalid_argument("dispersion: beta and R must be positive");
  if (mode_index < 0) throw std::invalid_argument("dispersion: mode_index >= 0");
  auto modes =
      solve_spectrum_refined(double(n) * n * beta, grid_nodes, mode_index + 1);
  double alpha = modes[mode_index].eigenvalue;
  return std::sqrt(alpha / (2.0 * n * n * R));
}

}  // namespace spheron::spectra
