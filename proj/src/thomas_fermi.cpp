#include "spheronlab/thomas_fermi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spheronlab/ode.hpp"

namespace spheron::tf {

namespace {

constexpr double kPi = std::numbers::pi;

using ode::State;
using ode::StepRecord;

// reduced rhs with the cone edge clamped, for use inside shooting loops
// where trial trajectories may graze y = 0
State<2> reduced_rhs_clamped(double, const State<2>& s) {
  double y = std::max(s[0], 0.0);
  return {3 * s[0] + s[1], 4 * s[1] + std::pow(y, 1.5)};
}

enum class Side { Low, High, None };

// Integrate the reduced system chunk-wise from rho_s and classify the
// trajectory: Low = falls off the separatrix toward y -> 0 (slope too
// negative), High = diverges toward y -> infinity.
struct Classification {
  Side side = Side::None;
  double rho_exit = 0;
};

Classification classify_reduced(double rho_s, State<2> s, double rho_target,
                                std::vector<StepRecord<2>>* record = nullptr) {
  const double chunk = 0.25;
  double rho = rho_s;
  while (rho < rho_target) {
    double next = std::min(rho + chunk, rho_target);
    s = ode::integrate(reduced_rhs_clamped, s, rho, next, 1e-10, 1e-12,
                       record);
    rho = next;
    if (s[0] > 400.0) return {Side::High, rho};
    if (s[0] < 120.0 && 3 * s[0] + s[1] < -1e-3 * (1 + s[0]))
      return {Side::Low, rho};
    if (s[0] < 0) return {Side::Low, rho};
  }
  // ran the whole span: separate by the asymptote level
  return {s[0] > 144.0 ? Side::High : Side::Low, rho_target};
}

// Integrate the (x, f, g) chart from the series start and classify:
// Low = f driven negative (slope too steep), High = f divergent.
Classification classify_chart1(double g0, double x_end,
                               std::vector<StepRecord<2>>* record = nullptr) {
  const double x0 = 1e-6;
  State<2> s{1.0 + g0 * x0 + 4.0 / 3.0 * std::pow(x0, 1.5),
             g0 + 2.0 * std::sqrt(x0)};
  auto rhs = [](double x, const State<2>& v) -> State<2> {
    return {v[1], std::pow(std::max(v[0], 0.0), 1.5) / std::sqrt(x)};
  };
  double x = x0;
  while (x < x_end) {
    double next = std::min(x * 1.35, x_end);
    s = ode::integrate(rhs, s, x, next, 1e-10, 1e-12, record);
    x = next;
    if (s[0] < 0) return {Side::Low, x};
    if (s[0] > 1.2) return {Side::High, x};
  }
  // ran the full span: compare against the asymptote
  return {s[0] * x * x * x > 144.0 ? Side::High : Side::Low, x_end};
}

std::string format_exit(const char* what, double rho) {
  std::ostringstream msg;
  msg << what << " at rho = " << rho;
  return msg.str();
}

}  // namespace

double default_length_scale() {
  return std::pow(3 * kPi, 2.0 / 3.0) / std::pow(2.0, 7.0 / 3.0);
}

void TFParams::validate() const {
  if (!(Q > 0) || !(R > 0) || !(zeta > 0) || b < 0)
    throw std::invalid_argument("TFParams: all parameters must be positive");
}

std::pair<double, double> tf_rhs(double x, double f, double g) {
  if (!(x > 0)) throw std::invalid_argument("tf_rhs: x > 0 required");
  if (f < 0)
    throw std::domain_error("tf_rhs: f < 0 (trajectory left the physical cone)");
  return {g, std::pow(f, 1.5) / std::sqrt(x)};
}

std::pair<double, double> reduced_rhs(double y, double z) {
  if (y < 0)
    throw std::domain_error(
        "reduced_rhs: y < 0 (trajectory left the physical cone)");
  return {3 * y + z, 4 * z + std::pow(y, 1.5)};
}

ReducedState reduce(double x, double f, double g) {
  if (!(x > 0)) throw std::invalid_argument("reduce: x > 0 required");
  return {std::log(x), x * x * x * f, x * x * x * x * g};
}

std::array<double, 3> unreduce(const ReducedState& s) {
  double x = std::exp(s.rho);
  return {x, s.y / (x * x * x), s.z / (x * x * x * x)};
}

double electron_density(double V) {
  if (V > 0)
    throw std::invalid_argument("electron_density: V <= 0 required");
  return std::pow(-2.0 * V, 1.5) / (3.0 * kPi * kPi);
}

FixedPointReport classify_fixed_point(double y, double z) {
  auto [ry, rz] = reduced_rhs(y, z);
  double scale = 1.0 + std::abs(y) + std::abs(z);
  if (std::abs(ry) > 1e-9 * scale || std::abs(rz) > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "classify_fixed_point: not a fixed point, residual (" << ry << ", "
        << rz << ")";
    throw std::invalid_argument(msg.str());
  }
  FixedPointReport rep;
  rep.y = y;
  rep.z = z;
  rep.jacobian << 3, 1, 1.5 * std::sqrt(y), 4;
  double tr = rep.jacobian.trace(), det = rep.jacobian.determinant();
  double disc = tr * tr - 4 * det;
  if (disc >= 0) {
    double s = std::sqrt(disc);
    rep.eig1 = (tr - s) / 2;
    rep.eig2 = (tr + s) / 2;
    if (det < 0)
      rep.type = FixedPointReport::Type::Saddle;
    else
      rep.type = (tr > 0) ? FixedPointReport::Type::UnstableNode
                          : FixedPointReport::Type::StableNode;
  } else {
    double s = std::sqrt(-disc);
    rep.eig1 = {tr / 2, -s / 2};
    rep.eig2 = {tr / 2, s / 2};
    if (tr == 0)
      rep.type = FixedPointReport::Type::Center;
    else
      rep.type = (tr > 0) ? FixedPointReport::Type::UnstableFocus
                          : FixedPointReport::Type::StableFocus;
  }
  return rep;
}

AtomSolution separatrix_atom(double tolerance) {
  if (!(tolerance > 0))
    throw std::invalid_argument("separatrix_atom: tolerance > 0 required");

  // shooting on the initial slope: steep slopes crash f, shallow diverge
  double g_lo = -10.0, g_hi = 0.0;
  if (classify_chart1(g_lo, 30.0).side != Side::Low ||
      classify_chart1(g_hi, 30.0).side != Side::High)
    throw std::runtime_error(
        "separatrix_atom: slope interval [-10, 0] does not bracket the "
        "separatrix");
  for (int it = 0; it < 200 && g_hi - g_lo > std::min(tolerance, 1e-13);
       ++it) {
    double mid = 0.5 * (g_lo + g_hi);
    (classify_chart1(mid, 30.0).side == Side::Low ? g_lo : g_hi) = mid;
  }

  AtomSolution sol;
  sol.initial_slope = 0.5 * (g_lo + g_hi);
  sol.slope_bracket_width = g_hi - g_lo;

  // sample the safe prefix of the midpoint trajectory up to x = 1
  std::vector<StepRecord<2>> rec;
  classify_chart1(sol.initial_slope, 1.0, &rec);
  for (const auto& step : rec) {
    if (!sol.x.empty() && step.t <= sol.x.back()) continue;  // chunk seams
    sol.x.push_back(step.t);
    sol.f.push_back(step.y[0]);
  }

  // staged re-bracketing in the reduced chart: each stage restores full
  // floating-point accuracy in the transverse slope before the unstable
  // direction (rate ~ e^{7.77 rho}) erases it
  const double rho_target = std::log(400.0);
  double rho = 0.0;
  State<2> s{rec.back().y[0], rec.back().y[1]};  // x = 1: y = f, z = g

  for (int stage = 0; stage < 60; ++stage) {
    // establish a bracket around the current transverse slope; an endpoint
    // that survives the whole remaining span is already good enough
    double dz = 1e-12 * (std::abs(s[1]) + 1e-6);
    double z_lo = s[1] - dz, z_hi = s[1] + dz;
    for (int w = 0; w < 200; ++w) {
      if (classify_reduced(rho, {s[0], z_lo}, rho_target).side != Side::High)
        break;
      z_lo -= (s[1] - z_lo) * 2 + dz;
    }
    for (int w = 0; w < 200; ++w) {
      if (classify_reduced(rho, {s[0], z_hi}, rho_target).side != Side::Low)
        break;
      z_hi += (z_hi - s[1]) * 2 + dz;
    }
    for (int it = 0; it < 120 && z_hi - z_lo > 1e-16 * std::abs(z_lo); ++it) {
      double mid = 0.5 * (z_lo + z_hi);
      auto c = classify_reduced(rho, {s[0], mid}, rho_target);
      (c.side == Side::Low ? z_lo : z_hi) = mid;
    }
    double z_mid = 0.5 * (z_lo + z_hi);

    std::vector<StepRecord<2>> stage_rec;
    auto c = classify_reduced(rho, {s[0], z_mid}, rho_target, &stage_rec);

    // the transverse error of a machine-tight bracket grows like
    // e^{7.77 (rho' - rho)}; accept the remaining span outright only once
    // it is short enough for that growth to stay harmless
    bool final_stage =
        c.rho_exit >= rho_target - 1e-12 && rho_target - rho < 1.5;
    double rho_keep =
        final_stage ? rho_target : rho + 0.7 * (c.rho_exit - rho);
    for (const auto& step : stage_rec) {
      if (step.t > rho_keep) break;
      double x = std::exp(step.t);
      if (!sol.x.empty() && x <= sol.x.back()) continue;
      sol.x.push_back(x);
      sol.f.push_back(step.y[0] / (x * x * x));
    }
    // restart from the last kept step
    const StepRecord<2>* last = nullptr;
    for (const auto& step : stage_rec)
      if (step.t <= rho_keep) last = &step;
    if (!last || last->t <= rho + 1e-9)
      throw std::runtime_error(
          "separatrix_atom: staged shooting stalled (no forward progress)");
    rho = last->t;
    s = last->y;
    if (final_stage && rho >= rho_target - 1e-9) break;
  }

  sol.far_y = s[0];
  if (std::abs(sol.far_y - 144.0) > 0.05 * 144.0)
    throw std::runtime_error(
        "separatrix_atom: far-end trajectory missed the Sommerfeld "
        "asymptote");
  return sol;
}

std::array<double, 2> fireball_bvp(const TFParams& params, double r0,
                                   double kappa) {
  params.validate();
  if (!(r0 > 0)) throw std::invalid_argument("fireball_bvp: r0 > 0 required");
  const double b = params.scale();
  const double r1 = params.R + r0;
  const double x0 = params.R / b, x1 = r1 / b;
  const double rho0 = std::log(x0), rho1 = std::log(x1);

  const double y_target = std::pow(x1, 3) * r1 * params.zeta / params.Q;
  State<2> s{y_target, y_target - kappa * std::pow(x1, 3)};

  auto rhs = [](double rho, const State<2>& v) -> State<2> {
    if (v[0] < 0)
      throw std::domain_error(
          format_exit("fireball_bvp: trajectory left the cone y >= 0", rho));
    return {3 * v[0] + v[1], 4 * v[1] + std::pow(v[0], 1.5)};
  };
  s = ode::integrate(rhs, s, rho1, rho0, 1e-12, 1e-14);
  return {s[0] - std::pow(x0, 3), s[1]};
}

ShieldingResult shielding_iteration(const TFParams& params, double kappa0,
                                    double r00) {
  params.validate();
  const double b = params.scale();
  const double x0 = params.R / b;
  const double scale = std::pow(x0, 3);
  double kappa = kappa0;
  double r0 = (r00 > 0) ? r00 : params.R / 100.0;

  // backward flow of the state together with its 2x2 variational matrix
  auto propagate = [&](double r0v, double kappav) {
    const double r1 = params.R + r0v;
    const double x1 = r1 / b;
    const double y_target = std::pow(x1, 3) * r1 * params.zeta / params.Q;
    State<6> a{y_target, y_target - kappav * std::pow(x1, 3),
               1, 0, 0, 1};
    auto rhs = [](double rho, const State<6>& v) -> State<6> {
      if (v[0] < 0)
        throw std::domain_error(format_exit(
            "shielding_iteration: trajectory left the cone y >= 0", rho));
      // column-major variational matrix: (v2, v3) and (v4, v5) are the
      // responses to unit perturbations of y(rho1) and z(rho1)
      double j21 = 1.5 * std::sqrt(v[0]);
      return {3 * v[0] + v[1],       4 * v[1] + std::pow(v[0], 1.5),
              3 * v[2] + v[3],       j21 * v[2] + 4 * v[3],
              3 * v[4] + v[5],       j21 * v[4] + 4 * v[5]};
    };
    return ode::integrate(rhs, a, std::log(x1), std::log(x0), 1e-12, 1e-14);
  };

  auto residuals = [&](double r0v, double kappav) -> Eigen::Vector2d {
    auto g = fireball_bvp(params, r0v, kappav);
    return {g[0], g[1]};
  };

  ShieldingResult out;
  Eigen::Vector2d g = residuals(r0, kappa);
  out.residual_history.push_back(g.cwiseAbs().maxCoeff());

  for (int it = 0; it < 50; ++it) {
    if (g.cwiseAbs().maxCoeff() <= 1e-10 * scale) {
      out.kappa = kappa;
      out.r0 = r0;
      out.iterations = it;
      return out;
    }

    const double r1 = params.R + r0;
    const double x1 = r1 / b;
    const double y_target = std::pow(x1, 3) * r1 * params.zeta / params.Q;
    State<6> a = propagate(r0, kappa);
    Eigen::Matrix2d M;
    // columns of M: sensitivity of the inner-edge state to the outer state
    M << a[2], a[4], a[3], a[5];

    // explicit derivatives of the outer-edge data
    Eigen::Vector2d ds1_dk(0.0, -std::pow(x1, 3));
    Eigen::Vector2d ds1_dr(4 * y_target / r1,
                           4 * y_target / r1 - 3 * kappa * std::pow(x1, 3) / r1);
    auto [fy, fz] = reduced_rhs(a[0], a[1]);
    Eigen::Vector2d end_term(fy, fz);

    Eigen::Matrix2d J;
    J.col(0) = M * ds1_dk;                          // d/d kappa
    J.col(1) = M * ds1_dr - end_term / r1;          // d/d r0

    // finite-difference guard on the variational Jacobian
    double dk = 1e-6 * std::max(1.0, std::abs(kappa));
    // keep the step meaningful even when the trial width collapses, but
    // never probe a nonpositive width
    double dr = std::min(1e-6 * (r0 + 0.01 * params.R), 0.45 * r0);
    Eigen::Matrix2d J_fd;
    J_fd.col(0) = (residuals(r0, kappa + dk) - residuals(r0, kappa - dk)) /
                  (2 * dk);
    J_fd.col(1) = (residuals(r0 + dr, kappa) - residuals(r0 - dr, kappa)) /
                  (2 * dr);
    if ((J - J_fd).norm() > 5e-2 * J.norm())
      throw std::logic_error(
          "shielding_iteration: variational Jacobian disagrees with finite "
          "differences");

    Eigen::Vector2d step;
    if (std::abs(J.determinant()) < 1e-14 * J.norm() * J.norm()) {
      // singular Jacobian: one damped gradient step, then give up if it
      // fails to reduce the residual
      step = -1e-3 * (J.transpose() * g) / std::max(J.norm(), 1e-30);
    } else {
      step = -J.colPivHouseholderQr().solve(g);
    }

    double lambda = 1.0;
    Eigen::Vector2d g_new;
    double kappa_new = kappa, r0_new = r0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      kappa_new = kappa + lambda * step(0);
      r0_new = r0 + lambda * step(1);
      if (r0_new > 0) {
        try {
          g_new = residuals(r0_new, kappa_new);
          if (g_new.norm() < g.norm() || g_new.cwiseAbs().maxCoeff() <=
                                             1e-10 * scale) {
            accepted = true;
            break;
          }
        } catch (const std::domain_error&) {
          // trial left the cone; damp further
        }
      }
      lambda /= 2;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "shielding_iteration: no residual decrease; history:";
      for (double r : out.residual_history) msg << ' ' << r;
      throw std::runtime_error(msg.str());
    }
    kappa = kappa_new;
    r0 = r0_new;
    g = g_new;
    out.residual_history.push_back(g.cwiseAbs().maxCoeff());
  }

  std::ostringstream msg;
  msg << "shielding_iteration: not converged in 50 iterations; history:";
  for (double r : out.residual_history) msg << ' ' << r;
  throw std::runtime_error(msg.str());
}

}  // namespace spheron::tf
