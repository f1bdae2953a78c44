#include "spheronlab/acceptance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "spheronlab/fock.hpp"
#include "spheronlab/gap.hpp"
#include "spheronlab/geodesic.hpp"
#include "spheronlab/membrane.hpp"
#include "spheronlab/ode.hpp"
#include "spheronlab/sphere_spectra.hpp"
#include "spheronlab/thomas_fermi.hpp"

namespace spheron::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
  void bound(double value, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << " = " << value << " (tol " << tol << ")";
    require(value <= tol, s.str());
  }
  void note(const std::string& what) {
    if (ok && detail.tellp() == 0) detail << what;
  }
};

// ---------------------------------------------------------------- helpers

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult run_command(const std::string& command) {
  CommandResult res;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
    res.output.append(buf, got);
  res.status = pclose(pipe);
  return res;
}

// golden-section line minimization on [0, 1]
double golden_min(const std::function<double(double)>& f) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = 0, b = 1;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

std::vector<double> brute_force_occupations(const std::vector<double>& eps,
                                            double W) {
  size_t n = eps.size();
  std::vector<double> best_x(n, 0.5);
  double best_e = gap::energy_functional(best_x, eps, W);
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int start = 0; start < 8; ++start) {
    std::vector<double> x(n);
    for (auto& v : x) v = uni(rng);
    for (int sweep = 0; sweep < 300; ++sweep)
      for (size_t l = 0; l < n; ++l)
        x[l] = golden_min([&](double t) {
          auto y = x;
          y[l] = t;
          return gap::energy_functional(y, eps, W);
        });
    double e = gap::energy_functional(x, eps, W);
    if (e < best_e) {
      best_e = e;
      best_x = x;
    }
  }
  return best_x;
}

Eigen::Vector3d random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Eigen::Vector3d v{n(rng), n(rng), n(rng)};
  return v.normalized();
}

geo::RP2Configuration random_three_body(std::mt19937& rng) {
  geo::RP2Configuration c;
  c.g = 1.0;
  c.gamma = 1.0;
  while (c.points.size() < 3) {
    Eigen::Vector3d q = random_unit(rng);
    bool ok = true;
    for (const auto& p : c.points)
      if (std::abs(p.dot(q)) > 0.8) ok = false;
    if (!ok) continue;
    Eigen::Vector3d v = random_unit(rng);
    v -= v.dot(q) * q;
    c.points.push_back(q);
    c.velocities.push_back(0.3 * v.normalized());
  }
  return c;
}

// ------------------------------------------------------------- criteria

void eigenvalue_oracle(Check& c) {
  auto modes = spectra::solve_spectrum_refined(1.0, 1000, 4);
  const double want[4] = {2, 6, 12, 20};
  double worst = 0;
  for (int k = 0; k < 4; ++k)
    worst = std::max(worst,
                     std::abs(modes[k].eigenvalue - want[k]) / want[k]);
  c.bound(worst, 1e-6, "relative eigenvalue error");
}

void weighted_orthogonality(Check& c) {
  int n = 1000;
  auto modes = spectra::solve_spectrum_refined(1.0, n, 8);
  auto grid = spectra::PsiGrid::uniform(2 * n - 1);
  double worst_off = 0, worst_diag = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      double gram = spectra::weighted_inner_product(modes[a].samples,
                                                    modes[b].samples, grid);
      if (a == b)
        worst_diag = std::max(worst_diag, std::abs(gram - 1.0));
      else
        worst_off = std::max(worst_off, std::abs(gram));
    }
  c.bound(worst_off, 1e-8, "off-diagonal Gram entry");
  c.bound(worst_diag, 1e-8, "diagonal Gram defect");
}

double inflation_residual(double eps, double R, int n_phi, int n_psi) {
  membrane::DisplacementField field;
  field.R = R;
  field.u = membrane::LatLonField::zeros(n_phi, n_psi);
  field.v = membrane::LatLonField::zeros(n_phi, n_psi);
  field.w = membrane::LatLonField::zeros(n_phi, n_psi);
  std::fill(field.u.values.begin(), field.u.values.end(), eps);
  auto curv = membrane::linearized_mean_curvature(field);
  double exact = -1.0 / (R * (1 + eps));  // inflated sphere of radius R(1+eps)
  double worst = 0;
  for (double k : curv.values) worst = std::max(worst, std::abs(k - exact));
  return worst;
}

void curvature_linearization(Check& c) {
  const double R = 2.0, eps = 1e-3;
  membrane::DisplacementField field;
  field.R = R;
  field.u = membrane::LatLonField::zeros(32, 17);
  field.v = membrane::LatLonField::zeros(32, 17);
  field.w = membrane::LatLonField::zeros(32, 17);
  std::fill(field.u.values.begin(), field.u.values.end(), eps);
  auto curv = membrane::linearized_mean_curvature(field);
  double worst = 0;
  for (double k : curv.values)
    worst = std::max(worst, std::abs(k - (-1 + eps) / R));
  c.bound(worst, 1e-8, "linearized curvature defect");

  double r1 = inflation_residual(eps, R, 32, 17);
  double r2 = inflation_residual(eps / 2, R, 32, 17);
  c.require(r1 / r2 > 3.8 && r1 / r2 < 4.2,
            "halving the displacement does not quarter the residual (ratio " +
                std::to_string(r1 / r2) + ")");
}

void membrane_stability(Check& c) {
  auto freq = membrane::stability_spectrum(8);
  double worst_real = 0;
  for (auto w : freq) worst_real = std::max(worst_real, std::abs(w.real()));
  c.require(worst_real == 0.0, "nonzero real part in the stability spectrum");

  membrane::ModalState state;
  state.l_max = 4;
  state.coefficients[{1, 0}] = {1.0, 0.3};
  state.coefficients[{2, 1}] = {-0.4, 0.1};
  state.coefficients[{4, -3}] = {0.2, -0.7};
  double e0 = membrane::modal_energy(state);
  double period = 2 * kPi / std::sqrt(2.0);  // l = 1 mode
  auto evolved = membrane::evolve_membrane(state, 100 * period);
  c.bound(std::abs(membrane::modal_energy(evolved) - e0) / e0, 1e-12,
          "relative energy drift over 100 periods");
}

void ladder_algebra(Check& c) {
  const int n_max = 8;
  auto alg = fock::ladder_matrices(n_max);
  auto comm = fock::commutator_exact(alg);
  bool exact = true;
  for (int i = 0; i <= n_max; ++i)
    for (int j = 0; j <= n_max; ++j) {
      int want = (i == j) ? (i == n_max ? -n_max : 1) : 0;
      if (comm(i, j) != want) exact = false;
    }
  c.require(exact, "truncated commutator is not diag(1, ..., 1, -n_max)");

  double omega = std::sqrt(6.0);
  auto energies = fock::oscillator_spectrum(omega, n_max);
  bool spectra_exact = energies.size() == n_max + 1;
  for (int n = 0; n <= n_max && spectra_exact; ++n)
    spectra_exact = energies[n] == (n + 0.5) * omega;
  c.require(spectra_exact, "oscillator energies are not exactly (n+1/2) w");
}

void block_spectrum_theorem(Check& c) {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> size(1, 64);
  std::uniform_real_distribution<double> diag(-5.0, 5.0), coupling(0.0, 10.0);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = size(rng);
    fock::BlockOperator op;
    op.diagonal = Eigen::VectorXd::NullaryExpr(n, [&](int) {
      return diag(rng);
    });
    op.W = coupling(rng);
    auto predicted = fock::block_spectrum(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        fock::assemble_block(op));
    for (int k = 0; k < 2 * n; ++k)
      worst = std::max(worst,
                       std::abs(predicted[k] - solver.eigenvalues()(k)));
  }
  c.bound(worst, 1e-12, "block spectrum vs dense eigensolve");
}

void gap_consistency(Check& c) {
  // (a) brute-force minimization of the pairing functional
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> level(0.0, 1.0);
  double worst_occ = 0, worst_energy = 0;
  for (int count = 2; count <= 5; ++count) {
    std::vector<double> eps(count);
    for (auto& e : eps) e = level(rng);
    double W = 1.0;
    auto sol = gap::solve_gap_discrete(eps, W);
    auto brute = brute_force_occupations(eps, W);
    std::vector<double> solver_x(count);
    for (int l = 0; l < count; ++l)
      solver_x[l] = std::sqrt(sol.occupations[l]);
    double e_solver = gap::energy_functional(solver_x, eps, W);
    double e_brute = gap::energy_functional(brute, eps, W);
    worst_energy = std::max(
        worst_energy, std::abs(e_solver - e_brute) /
                          std::max(std::abs(e_brute), 1e-30));
    for (int l = 0; l < count; ++l)
      worst_occ = std::max(worst_occ, std::abs(sol.occupations[l] -
                                               brute[l] * brute[l]));
    // (c) excitation costs on every solved instance
    for (double e : eps) {
      c.require(gap::unpaired_penalty(sol.delta, e) >= sol.delta,
                "unpaired penalty below delta");
      c.require(2 * gap::unpaired_penalty(sol.delta, e) >= 2 * sol.delta,
                "pair-breaking cost below 2 delta");
    }
  }
  c.bound(worst_occ, 1e-3, "occupation mismatch vs brute force");
  c.bound(worst_energy, 1e-6, "relative energy mismatch vs brute force");

  // (b) closed form against an independent quadrature + bisection root
  double delta = gap::solve_gap_integral(1.0, 1.0, 1.0);
  c.bound(std::abs(delta - 1.0 / std::sinh(2.0)), 1e-12,
          "closed-form gap vs 1/sinh(2)");
  auto residual = [](double d) {
    // Simpson quadrature of the integral equation at (W, nu) = (1, 1)
    const int n = 20000;
    double acc = 0;
    for (int k = 0; k <= n; ++k) {
      double x = static_cast<double>(k) / n;
      double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      acc += w / std::hypot(d, x);
    }
    return acc / (3.0 * n) - 2.0;
  };
  double lo = 0.1, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    (residual(mid) > 0 ? lo : hi) = mid;
  }
  c.bound(std::abs(delta - (lo + hi) / 2) / delta, 1e-10,
          "closed-form gap vs quadrature root");
}

void tf_phase_portrait(Check& c) {
  auto [a1, a2] = tf::reduced_rhs(0.0, 0.0);
  auto [b1, b2] = tf::reduced_rhs(144.0, -432.0);
  c.require(a1 == 0.0 && a2 == 0.0 && b1 == 0.0 && b2 == 0.0,
            "fixed-point residuals are not exactly zero");

  auto origin = tf::classify_fixed_point(0.0, 0.0);
  c.require(origin.type == tf::FixedPointReport::Type::UnstableNode &&
                origin.eig1.real() == 3.0 && origin.eig2.real() == 4.0,
            "origin is not an unstable node with eigenvalues {3, 4}");
  auto saddle = tf::classify_fixed_point(144.0, -432.0);
  c.require(saddle.type == tf::FixedPointReport::Type::Saddle &&
                std::abs(saddle.jacobian.determinant() + 6.0) < 1e-12,
            "(144, -432) is not a saddle with det = -6");

  double worst = 0;
  for (int k = 1; k <= 20; ++k) {
    double x = 0.3 + 0.35 * k;
    double f = 144.0 * std::pow(x, -3.0);
    auto [df, dg] = tf::tf_rhs(x, f, -3.0 * 144.0 * std::pow(x, -4.0));
    double exact = 12.0 * 144.0 * std::pow(x, -5.0);
    worst = std::max(worst, std::abs(dg - exact) / exact);
  }
  c.bound(worst, 1e-12, "Sommerfeld substitution residual");
}

void atom_separatrix(Check& c) {
  auto sol = tf::separatrix_atom(1e-12);
  bool monotone = true;
  for (size_t i = 1; i < sol.x.size(); ++i)
    if (!(sol.f[i] > 0) || sol.f[i] >= sol.f[i - 1]) monotone = false;
  c.require(monotone, "profile is not positive and strictly decreasing");
  c.bound(std::abs(sol.far_y - 144.0) / 144.0, 0.05,
          "relative distance of x^3 f from the asymptote");

  // dual-chart agreement on a generic stretch
  using spheron::ode::State;
  auto chart1 = [](double x, const State<2>& s) -> State<2> {
    auto [df, dg] = tf::tf_rhs(x, s[0], s[1]);
    return {df, dg};
  };
  auto chart2 = [](double, const State<2>& s) -> State<2> {
    auto [dy, dz] = tf::reduced_rhs(s[0], s[1]);
    return {dy, dz};
  };
  State<2> direct =
      spheron::ode::integrate(chart1, State<2>{1.0, -0.5}, 1.0, 2.0,
                              1e-12, 1e-14);
  auto r = tf::reduce(1.0, 1.0, -0.5);
  State<2> reduced = spheron::ode::integrate(
      chart2, State<2>{r.y, r.z}, r.rho, std::log(2.0), 1e-12, 1e-14);
  auto [xb, fb, gb] = tf::unreduce({std::log(2.0), reduced[0], reduced[1]});
  c.bound(std::hypot(fb - direct[0], gb - direct[1]), 1e-8,
          "dual-chart disagreement");
}

void fireball_recovery(Check& c) {
  using spheron::ode::State;
  const double R = 1.0, r0_star = 0.2, Q = 5.0;
  double b = tf::default_length_scale();
  double x0 = R / b, x1 = (R + r0_star) / b;
  auto rhs = [](double, const State<2>& s) -> State<2> {
    auto [dy, dz] = tf::reduced_rhs(s[0], s[1]);
    return {dy, dz};
  };
  State<2> s = spheron::ode::integrate(rhs, State<2>{std::pow(x0, 3), 0.0},
                                       std::log(x0), std::log(x1), 1e-13,
                                       1e-15);
  double zeta = s[0] * b * b * b * Q / std::pow(R + r0_star, 4);
  double kappa_star = (s[0] - s[1]) / std::pow(x1, 3);
  tf::TFParams params{Q, R, zeta};

  auto sol = tf::shielding_iteration(params);
  c.bound(std::abs(sol.r0 - r0_star) / r0_star, 1e-8, "r0 recovery error");
  c.bound(std::abs(sol.kappa - kappa_star) / std::abs(kappa_star), 1e-8,
          "kappa recovery error");

  // empirically quadratic residual decay away from the noise floor
  const auto& h = sol.residual_history;
  double scale = std::pow(x0, 3);
  bool quadratic = h.size() >= 3;
  for (size_t k = 0; k + 1 < h.size() && quadratic; ++k) {
    if (h[k + 1] < 1e-11 * scale) break;
    quadratic = h[k + 1] / scale < 50.0 * std::pow(h[k] / scale, 2);
  }
  c.require(quadratic, "Newton residual history is not quadratic");
}

void geodesic_integrals(Check& c) {
  double worst_force = 0, worst_torque = 0;
  for (int k = 0; k <= 60; ++k) {
    double angle = 0.1 + (kPi / 2 - 0.1) * k / 60.0;
    double quad = geo::point_circle_force_quadrature(angle, 2048);
    worst_force = std::max(worst_force,
                           std::abs(quad - geo::point_circle_force(angle)));
    worst_torque = std::max(
        worst_torque,
        std::abs(2 * kPi * quad - geo::circle_circle_torque(angle)));
  }
  c.bound(worst_force, 1e-8, "point-circle quadrature defect");
  c.bound(worst_torque, 1e-8, "circle-circle quadrature defect");

  double theta = 0.7, h = 1e-5;
  double fd = -(geo::circle_circle_potential(theta + h) -
                geo::circle_circle_potential(theta - h)) /
              (2 * h);
  c.bound(std::abs(fd - std::cos(theta) / std::pow(std::sin(theta), 2)),
          1e-6, "potential derivative defect");
}

void rp2_nbody(Check& c) {
  std::mt19937 rng(41);
  auto config = random_three_body(rng);
  double dt = 5e-5 / geo::max_frequency(config);
  double e0 = geo::total_energy(config);
  auto out = geo::simulate(config, dt, 10000);
  c.bound(std::abs(geo::total_energy(out) - e0) / std::abs(e0), 1e-8,
          "relative energy drift over 10^4 steps");

  geo::RP2Configuration frame;
  frame.points = {Eigen::Vector3d{1, 0, 0}, Eigen::Vector3d{0, 1, 0},
                  Eigen::Vector3d{0, 0, 1}};
  frame.velocities.assign(3, Eigen::Vector3d::Zero());
  frame.g = 1.0;
  frame.gamma = 1.0;
  double worst = 0;
  for (const auto& f : geo::nbody_forces(frame))
    worst = std::max(worst, f.norm());
  geo::RP2Configuration pair = frame;
  pair.points.pop_back();
  pair.velocities.pop_back();
  for (const auto& f : geo::nbody_forces(pair))
    worst = std::max(worst, f.norm());
  c.bound(worst, 1e-12, "force at the equidistant configurations");

  auto flipped = config;
  flipped.points[1] = -flipped.points[1];
  flipped.velocities[1] = -flipped.velocities[1];
  c.require(geo::total_energy(flipped) == geo::total_energy(config),
            "energy changed under antipodal flip");
  auto f1 = geo::nbody_forces(config), f2 = geo::nbody_forces(flipped);
  c.require((f2[0] - f1[0]).norm() == 0.0 && (f2[2] - f1[2]).norm() == 0.0 &&
                (f2[1] + f1[1]).norm() == 0.0,
            "forces changed under antipodal flip");
}

void rp2_spectrum(Check& c) {
  auto h2 = [](const Eigen::Vector3d& p) {
    return p(0) * p(1) / p.squaredNorm();
  };
  std::mt19937 rng(43);
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Vector3d q = random_unit(rng);
    worst = std::max(worst,
                     std::abs(geo::laplace_beltrami_rp2(h2, q) + 6 * h2(q)));
  }
  c.bound(worst, 1e-6, "degree-2 eigenvalue defect");

  auto levels = geo::free_spectrum(1.0, 10);
  bool mult_ok = true;
  for (const auto& lvl : levels)
    if (lvl.multiplicity != 2 * lvl.l + 1) mult_ok = false;
  c.require(mult_ok && levels.size() == 5, "free-spectrum multiplicities");
}

void cli_determinism(Check& c, const RunOptions& options) {
  if (options.cli_path.empty()) {
    c.require(false, "no CLI binary supplied");
    return;
  }
  const std::string quoted = "'" + options.cli_path + "'";
  for (const char* args :
       {" spectrum --U 1 --count 4", " blockspec --diag 1,2 --W 0.5",
        " gap integral --W 1 --nu 1 --epsmax 1"}) {
    auto first = run_command(quoted + args);
    auto second = run_command(quoted + args);
    c.require(first.status == 0, std::string("nonzero exit for") + args);
    c.require(first.output == second.output && !first.output.empty(),
              std::string("outputs differ for") + args);
  }
  if (options.check_selftest_exit) {
    auto self = run_command(quoted + " selftest");
    c.require(self.status == 0, "selftest exited nonzero");
  }
}

}  // namespace

std::vector<CriterionResult> run_all(const RunOptions& options) {
  using Runner = std::function<void(Check&)>;
  const std::vector<std::pair<std::string, Runner>> criteria = {
      {"eigenvalue-oracle", eigenvalue_oracle},
      {"weighted-orthogonality", weighted_orthogonality},
      {"curvature-linearization", curvature_linearization},
      {"membrane-stability", membrane_stability},
      {"ladder-algebra", ladder_algebra},
      {"block-spectrum", block_spectrum_theorem},
      {"gap-consistency", gap_consistency},
      {"tf-phase-portrait", tf_phase_portrait},
      {"atom-separatrix", atom_separatrix},
      {"fireball-recovery", fireball_recovery},
      {"geodesic-integrals", geodesic_integrals},
      {"rp2-nbody", rp2_nbody},
      {"rp2-spectrum", rp2_spectrum},
      {"cli-determinism",
       [&options](Check& c) { cli_determinism(c, options); }},
  };
  const double budgets[] = {5,  1e9, 1e9, 1, 1e9, 10, 30,
                            1e9, 10,  10,  1e9, 1e9, 1e9, 1e9};

  std::vector<CriterionResult> results;
  for (size_t k = 0; k < criteria.size(); ++k) {
    CriterionResult res;
    res.index = static_cast<int>(k) + 1;
    res.name = criteria[k].first;
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (res.seconds > budgets[k])
      check.require(false, "runtime budget exceeded");
    if (options.sabotage == res.name)
      check.require(false, "tolerance perturbation injected");
    res.passed = check.ok;
    res.detail = check.detail.str();
    results.push_back(std::move(res));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.passed; });
}

void print_report(std::ostream& out,
                  const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << r.index
        << "  " << std::left << std::setw(26) << r.name << std::right
        << std::fixed << std::setprecision(2) << std::setw(7) << r.seconds
        << "s" << std::defaultfloat;
    if (!r.detail.empty()) out << "  " << r.detail;
    out << "\n";
  }
}

}  // namespace spheron::acceptance
