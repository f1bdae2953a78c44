#include "spheronlab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spheron::fock {

namespace {

// Integer matrix of squared entries of a ladder matrix (all entries are
// sqrt of a nonnegative integer).
using SqMat = std::vector<std::vector<long long>>;

SqMat raise_squared(int n_max) {
  SqMat m(n_max + 1, std::vector<long long>(n_max + 1, 0));
  for (int n = 0; n < n_max; ++n) m[n + 1][n] = n + 1;
  return m;
}

SqMat lower_squared(int n_max) {
  SqMat m(n_max + 1, std::vector<long long>(n_max + 1, 0));
  for (int n = 1; n <= n_max; ++n) m[n - 1][n] = n;
  return m;
}

// Entry of the product of two sqrt-integer matrices, as an exact integer.
long long exact_product_entry(const SqMat& a, const SqMat& b, int i, int j) {
  long long acc = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    long long p = a[i][k] * b[k][j];
    if (p == 0) continue;
    long long r = std::llround(std::sqrt((double)p));
    if (r * r != p)
      throw std::logic_error("ladder product entry is not a perfect square");
    acc += r;
  }
  return acc;
}

void check_nmax(int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max >= 1 required");
}

}  // namespace

LadderAlgebra ladder_matrices(int n_max) {
  check_nmax(n_max);
  LadderAlgebra alg;
  alg.n_max = n_max;
  alg.raise = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  alg.lower = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n < n_max; ++n) {
    alg.raise(n + 1, n) = std::sqrt(double(n + 1));
    alg.lower(n, n + 1) = std::sqrt(double(n + 1));
  }
  return alg;
}

Eigen::MatrixXd number_operator(const LadderAlgebra& alg) {
  // every entry of raise*lower is sqrt(a)*sqrt(b) with a perfect-square
  // product, so evaluate it in integers to make the diagonal exact
  const int n = alg.n_max;
  SqMat r = raise_squared(n), l = lower_squared(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      out(i, j) = (double)exact_product_entry(r, l, i, j);
  return out;
}

Eigen::MatrixXi commutator_exact(const LadderAlgebra& alg) {
  const int n = alg.n_max;
  SqMat r = raise_squared(n), l = lower_squared(n);
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      c(i, j) = (int)(exact_product_entry(l, r, i, j) -
                      exact_product_entry(r, l, i, j));
  return c;
}

std::vector<double> oscillator_spectrum(double omega, int n_max) {
  check_nmax(n_max);
  if (omega < 0)
    throw std::invalid_argument("oscillator_spectrum: omega >= 0 required");
  std::vector<double> energies(n_max + 1);
  for (int n = 0; n <= n_max; ++n) energies[n] = (n + 0.5) * omega;
  return energies;
}

ModeIndex ModeIndex::spheron(int m, int degree) {
  if (degree < 2 || degree % 2 != 0)
    throw std::invalid_argument("spheron degree must be a positive even integer");
  if (std::abs(m) > degree)
    throw std::invalid_argument("spheron order |m| must not exceed degree");
  return {Kind::Spheron, m, degree, std::sqrt(double(degree) * (degree + 1))};
}

ModeIndex ModeIndex::quasiparticle(int m, int degree, double sigma) {
  if (sigma < 0)
    throw std::invalid_argument("quasiparticle sigma must be nonnegative");
  if (degree < 0 || std::abs(m) > degree)
    throw std::invalid_argument("quasiparticle mode index out of range");
  return {Kind::Quasiparticle, m, degree, std::sqrt(sigma)};
}

double field_hamiltonian(const std::vector<ModeIndex>& modes,
                         const std::map<ModeIndex, int>& occupations) {
  for (const auto& [mode, n] : occupations) {
    if (n < 0)
      throw std::invalid_argument("field_hamiltonian: negative occupation");
    if (std::find(modes.begin(), modes.end(), mode) == modes.end())
      throw std::invalid_argument(
          "field_hamiltonian: occupation given for an unlisted mode");
  }
  double e = 0;
  for (const auto& mode : modes) {
    auto it = occupations.find(mode);
    int n = (it == occupations.end()) ? 0 : it->second;
    e += mode.frequency * (n + 0.5);
  }
  return e;
}

Eigen::MatrixXd interaction_matrix(const ModeIndex& first,
                                   const ModeIndex& second, int n_max,
                                   double W) {
  check_nmax(n_max);
  if (first == second)
    throw std::invalid_argument("interaction_matrix: modes must be distinct");
  if (W < 0) throw std::invalid_argument("interaction_matrix: W >= 0");
  const int d = n_max + 1;
  auto alg = ladder_matrices(n_max);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  auto kron = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        out.block(i * d, j * d, d, d) = a(i, j) * b;
    return out;
  };

  Eigen::MatrixXd h = -W * (kron(alg.raise, alg.lower) +
                            kron(alg.lower, alg.raise));

  // energy-conservation selection: zero elements between tensor states whose
  // unperturbed energies differ
  auto energy = [&](int idx) {
    int n1 = idx / d, n2 = idx % d;
    return first.frequency * (n1 + 0.5) + second.frequency * (n2 + 0.5);
  };
  for (int i = 0; i < d * d; ++i)
    for (int j = 0; j < d * d; ++j)
      if (std::abs(energy(i) - energy(j)) > 1e-9) h(i, j) = 0.0;
  return h;
}

Eigen::MatrixXd assemble_block(const BlockOperator& op) {
  const int n = (int)op.diagonal.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = op.diagonal(i);
    m(n + i, n + i) = op.diagonal(i);
    m(i, n + i) = -op.W;
    m(n + i, i) = -op.W;
  }
  return m;
}

std::vector<double> block_spectrum(const BlockOperator& op) {
  std::vector<double> spec;
  spec.reserve(2 * op.diagonal.size());
  for (int i = 0; i < (int)op.diagonal.size(); ++i) {
    spec.push_back(op.diagonal(i) - op.W);
    spec.push_back(op.diagonal(i) + op.W);
  }
  std::sort(spec.begin(), spec.end());
  return spec;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> polarize(const BlockOperator& op) {
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(op.diagonal.size(), op.W);
  return {op.diagonal - ones, op.diagonal + ones};
}

}  // namespace spheron::fock
