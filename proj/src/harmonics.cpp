#include "spheronlab/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spheron::harmonics {

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-based initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadGrid QuadGrid::make(int n_psi, int n_phi) {
  if (n_psi < 2 || n_phi < 4)
    throw std::invalid_argument("QuadGrid: grid too small");
  QuadGrid g;
  gauss_legendre(n_psi, g.x, g.weights);
  g.n_phi = n_phi;
  return g;
}

double QuadGrid::phi(int j) const {
  return 2.0 * std::numbers::pi * j / n_phi;
}

double real_sh(int l, int m, double x, double phi) {
  int am = std::abs(m);
  if (am > l) throw std::invalid_argument("real_sh: |m| > l");
  // (2l+1)/(4pi) * (l-|m|)!/(l+|m|)! via lgamma to avoid overflow
  double logratio = std::lgamma(l - am + 1.0) - std::lgamma(l + am + 1.0);
  double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) *
                          std::exp(logratio));
  double p = std::assoc_legendre(l, am, x);
  if (m == 0) return norm * p;
  double azi = (m > 0) ? std::cos(am * phi) : std::sin(am * phi);
  return std::numbers::sqrt2 * norm * p * azi;
}

}  // namespace spheron::harmonics
