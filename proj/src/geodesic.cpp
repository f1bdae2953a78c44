#include "spheronlab/geodesic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spheron::geo {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angle(double value, const char* who) {
  if (!(value > 0) || value > kPi / 2 + 1e-15)
    throw std::invalid_argument(std::string(who) +
                                ": angle must lie in (0, pi/2]");
}

double pair_sine(const Eigen::Vector3d& qi, const Eigen::Vector3d& qj,
                 const char* who) {
  double ni = qi.norm(), nj = qj.norm();
  if (!(ni > 0) || !(nj > 0))
    throw std::invalid_argument(std::string(who) + ": zero homogeneous triple");
  double s = qi.cross(qj).norm() / (ni * nj);
  if (s < 1e-300)
    throw std::invalid_argument(std::string(who) +
                                ": proportional points (collision)");
  return s;
}

double min_pair_angle(const std::vector<Eigen::Vector3d>& pts) {
  double best = kPi / 2;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double c = std::min(1.0, std::abs(pts[i].dot(pts[j])));
      best = std::min(best, std::acos(c));
    }
  return best;
}

Eigen::Vector3d tangent_part(const Eigen::Vector3d& v,
                             const Eigen::Vector3d& q) {
  return v - v.dot(q) * q;
}

}  // namespace

double point_circle_force(double psi) {
  check_angle(psi, "point_circle_force");
  double s = std::sin(psi);
  return kPi * std::cos(psi) / (2 * s * s);
}

double point_circle_force_quadrature(double psi, int nodes) {
  check_angle(psi, "point_circle_force_quadrature");
  if (nodes < 8)
    throw std::invalid_argument(
        "point_circle_force_quadrature: at least 8 nodes");
  double c = std::cos(psi), s = std::sin(psi), acc = 0;
  for (int k = 0; k < nodes; ++k) {
    double t = 2 * kPi * k / nodes;
    double den = 2 - 2 * c * std::cos(t);
    acc += s * std::cos(t) / (den * den);
  }
  return acc * 2 * kPi / nodes;
}

double circle_circle_torque(double theta) {
  check_angle(theta, "circle_circle_torque");
  double s = std::sin(theta);
  return kPi * kPi * std::cos(theta) / (s * s);
}

double circle_circle_potential(double theta) {
  check_angle(theta, "circle_circle_potential");
  return 1.0 / std::sin(theta);
}

RP2Point RP2Point::from(const Eigen::Vector3d& raw) {
  double n = raw.norm();
  if (!(n > 0)) throw std::invalid_argument("RP2Point: zero triple");
  return {raw / n};
}

bool RP2Point::same_as(const RP2Point& other, double tol) const {
  return (q - other.q).norm() < tol || (q + other.q).norm() < tol;
}

double pairwise_potential(const Eigen::Vector3d& qi, const Eigen::Vector3d& qj,
                          double g) {
  if (!(g > 0)) throw std::invalid_argument("pairwise_potential: g > 0");
  return g / pair_sine(qi, qj, "pairwise_potential");
}

double laplace_beltrami_rp2(
    const std::function<double(const Eigen::Vector3d&)>& field,
    const Eigen::Vector3d& q) {
  double n = q.norm();
  if (!(n > 0))
    throw std::invalid_argument("laplace_beltrami_rp2: zero triple");

  double f0 = field(q);
  double hr = 1e-4;
  double radial = (field(q * (1 + hr)) - field(q * (1 - hr))) / (2 * hr);
  if (std::abs(radial) > 1e-8 * (1 + std::abs(f0)))
    throw std::invalid_argument(
        "laplace_beltrami_rp2: field is not homogeneous of degree zero");

  auto flat = [&](double h) {
    double acc = 0;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(i) = h;
      acc += (field(q + e) - 2 * f0 + field(q - e)) / (h * h);
    }
    return acc;
  };
  double h = 1e-3 * n;
  double lap = (4 * flat(h / 2) - flat(h)) / 3;  // Richardson, O(h^4)
  return n * n * lap;
}

void RP2Configuration::validate() const {
  if (points.empty())
    throw std::invalid_argument("RP2Configuration: no points");
  if (velocities.size() != points.size())
    throw std::invalid_argument(
        "RP2Configuration: points/velocities length mismatch");
  if (!(g > 0) || !(gamma > 0))
    throw std::invalid_argument("RP2Configuration: g and gamma must be > 0");
  for (size_t i = 0; i < points.size(); ++i) {
    if (std::abs(points[i].norm() - 1.0) > 1e-9)
      throw std::invalid_argument(
          "RP2Configuration: points must be unit representatives");
    if (std::abs(points[i].dot(velocities[i])) > 1e-12)
      throw std::invalid_argument(
          "RP2Configuration: velocity not tangent to its point");
  }
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      pair_sine(points[i], points[j], "RP2Configuration");
}

namespace {

std::vector<Eigen::Vector3d> forces_on_points(
    const std::vector<Eigen::Vector3d>& pts, double g) {
  size_t n = pts.size();
  std::vector<Eigen::Vector3d> forces(n, Eigen::Vector3d::Zero());
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = pts[i].dot(pts[j]);
      double s = pair_sine(pts[i], pts[j], "nbody_forces");
      // gradient of g/sin(theta_ij) with respect to q_i, kept tangential
      forces[i] -= g * d * (pts[j] - d * pts[i]) / (s * s * s);
    }
  return forces;
}

}  // namespace

std::vector<Eigen::Vector3d> nbody_forces(const RP2Configuration& config) {
  config.validate();
  return forces_on_points(config.points, config.g);
}

double total_energy(const RP2Configuration& config) {
  config.validate();
  double kinetic = 0, potential = 0;
  for (const auto& v : config.velocities) kinetic += v.squaredNorm();
  for (size_t i = 0; i < config.points.size(); ++i)
    for (size_t j = i + 1; j < config.points.size(); ++j)
      potential +=
          pairwise_potential(config.points[i], config.points[j], config.g);
  return kinetic / (2 * config.gamma) + potential;
}

double max_frequency(const RP2Configuration& config) {
  config.validate();
  double worst = 0;
  for (size_t i = 0; i < config.points.size(); ++i) {
    double row = 0;
    for (size_t j = 0; j < config.points.size(); ++j) {
      if (j == i) continue;
      double s = pair_sine(config.points[i], config.points[j],
                           "max_frequency");
      row += config.g * (1 + 2 / (s * s * s));
    }
    worst = std::max(worst, row);
  }
  return std::sqrt(config.gamma * worst);
}

namespace {

// One constraint-projected leapfrog step (RATTLE form: the position-stage
// multiplier keeps the drifted point on the sphere, the velocity-stage
// projection restores tangency).  Recursion handles rejected steps by
// halving.
void advance(RP2Configuration& c, double dt, int depth) {
  if (depth > 24)
    throw std::runtime_error(
        "simulate: step halving did not resolve the close approach");
  RP2Configuration trial = c;
  size_t n = c.points.size();
  auto acc = forces_on_points(c.points, c.g);
  for (size_t i = 0; i < n; ++i) {
    const auto& q = c.points[i];
    Eigen::Vector3d w = c.velocities[i] + 0.5 * dt * c.gamma * acc[i];
    Eigen::Vector3d u = q + dt * w;
    double uq = u.dot(q);
    double disc = uq * uq - u.squaredNorm() + 1.0;
    if (disc <= 0) {  // drift overshoots the sphere: step too large
      advance(c, dt / 2, depth + 1);
      advance(c, dt / 2, depth + 1);
      return;
    }
    double beta = -uq + std::sqrt(disc);
    trial.points[i] = (u + beta * q).normalized();
    trial.velocities[i] = w + (beta / dt) * q;
  }
  double angle = min_pair_angle(trial.points);
  if (n > 1 && angle < 1e-6)
    throw std::runtime_error("simulate: collision (pair angle below 1e-6)");
  if (n > 1 && angle < 1e-3) {
    advance(c, dt / 2, depth + 1);
    advance(c, dt / 2, depth + 1);
    return;
  }
  auto acc_new = forces_on_points(trial.points, trial.g);
  for (size_t i = 0; i < n; ++i)
    trial.velocities[i] = tangent_part(
        trial.velocities[i] + 0.5 * dt * c.gamma * acc_new[i],
        trial.points[i]);
  c = trial;
}

}  // namespace

RP2Configuration simulate(RP2Configuration config, double dt, long steps) {
  config.validate();
  if (!(dt > 0) || steps < 0)
    throw std::invalid_argument("simulate: dt > 0 and steps >= 0 required");
  if (dt * max_frequency(config) >= 0.1)
    throw std::invalid_argument(
        "simulate: dt too large for the stiffest pair (dt * max_frequency "
        "must stay below 0.1)");
  for (long k = 0; k < steps; ++k) advance(config, dt, 0);
  return config;
}

std::vector<FreeLevel> free_spectrum(double gamma, int l_max) {
  if (!(gamma > 0)) throw std::invalid_argument("free_spectrum: gamma > 0");
  if (l_max < 2)
    throw std::invalid_argument(
        "free_spectrum: l_max >= 2 required (no even harmonics below 2)");
  std::vector<FreeLevel> out;
  for (int l = 2; l <= l_max; l += 2)
    out.push_back({l, gamma / 2 * l * (l + 1), 2 * l + 1});
  return out;
}

std::vector<double> quantize_free(std::span<const double> sigma, int n_max) {
  if (n_max < 1) throw std::invalid_argument("quantize_free: n_max >= 1");
  std::vector<double> freqs;
  for (double s : sigma) {
    if (!(s > 0))
      throw std::invalid_argument("quantize_free: sigma must be positive");
    freqs.push_back(std::sqrt(s));
  }
  return freqs;
}

}  // namespace spheron::geo
