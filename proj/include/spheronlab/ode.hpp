#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace spheron::ode {

// Adaptive Dormand-Prince 5(4) for small fixed-size states.
// rhs(t, y) -> dy/dt.  Integrates from t0 to t1 (either direction) and
// returns the final state.  If `record` is given, every accepted step's
// (t, y) is appended, including the initial and final points.
template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct StepRecord {
  double t;
  State<N> y;
};

template <std::size_t N, typename Rhs>
State<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1,
                   double rtol = 1e-10, double atol = 1e-12,
                   std::vector<StepRecord<N>>* record = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order embedded weights
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                          e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                          e6 = 187.0 / 2100, e7 = 1.0 / 40;

  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  double span = std::abs(t1 - t0);
  if (span == 0.0) {
    if (record) record->push_back({t0, y});
    return y;
  }
  double h = dir * std::min(span, std::max(1e-8, span / 100.0));
  if (record) record->push_back({t, y});

  State<N> k1 = rhs(t, y);
  std::size_t steps = 0;
  while (dir * (t1 - t) > 0) {
    if (++steps > 2'000'000)
      throw std::runtime_error("ode::integrate: step budget exhausted");
    if (dir * (t + h - t1) > 0) h = t1 - t;

    State<N> y2, y3, y4, y5, y6, y7;
    for (std::size_t i = 0; i < N; ++i) y2[i] = y[i] + h * a21 * k1[i];
    State<N> k2 = rhs(t + c2 * h, y2);
    for (std::size_t i = 0; i < N; ++i)
      y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    State<N> k3 = rhs(t + c3 * h, y3);
    for (std::size_t i = 0; i < N; ++i)
      y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    State<N> k4 = rhs(t + c4 * h, y4);
    for (std::size_t i = 0; i < N; ++i)
      y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    State<N> k5 = rhs(t + c5 * h, y5);
    for (std::size_t i = 0; i < N; ++i)
      y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    State<N> k6 = rhs(t + h, y6);
    for (std::size_t i = 0; i < N; ++i)
      y7[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    State<N> k7 = rhs(t + h, y7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double y4th = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y7[i]));
      double d = (y7[i] - y4th) / sc;
      err += d * d;
    }
    err = std::sqrt(err / N);

    if (err <= 1.0) {
      t += h;
      y = y7;
      k1 = k7;  // FSAL
      if (record) record->push_back({t, y});
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("ode::integrate: step size underflow");
  }
  return y;
}

}  // namespace spheron::ode
