#include "spheronlab/membrane.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spheron::membrane {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_shape(const LatLonField& f) {
  if (f.n_phi < 8 || f.n_psi < 8)
    throw std::invalid_argument("LatLonField: grid coarser than 8x8");
  if ((int)f.values.size() != f.n_phi * f.n_psi)
    throw std::invalid_argument("LatLonField: size mismatch");
}

// Require the pole rows of a frame component to be single-valued.
void check_pole_rows(const LatLonField& f, const char* name) {
  for (int i : {0, f.n_psi - 1}) {
    double ref = f.at(i, 0);
    for (int j = 1; j < f.n_phi; ++j)
      if (std::abs(f.at(i, j) - ref) > 1e-10)
        throw std::invalid_argument(std::string(name) +
                                    " not single-valued at a pole");
  }
}

void fill_poles_by_average(LatLonField& out) {
  for (int j = 0; j < out.n_phi; ++j) {
    double bot = 0, top = 0;
    for (int jj = 0; jj < out.n_phi; ++jj) {
      bot += out.at(1, jj);
      top += out.at(out.n_psi - 2, jj);
    }
    out.at(0, j) = bot / out.n_phi;
    out.at(out.n_psi - 1, j) = top / out.n_phi;
  }
}

struct Stencils {
  double h_psi, h_phi;
  const LatLonField& f;

  double dphi(int i, int j) const {
    int jm = (j + f.n_phi - 1) % f.n_phi, jp = (j + 1) % f.n_phi;
    return (f.at(i, jp) - f.at(i, jm)) / (2 * h_phi);
  }
  double dphi2(int i, int j) const {
    int jm = (j + f.n_phi - 1) % f.n_phi, jp = (j + 1) % f.n_phi;
    return (f.at(i, jp) - 2 * f.at(i, j) + f.at(i, jm)) / (h_phi * h_phi);
  }
  double dpsi(int i, int j) const {
    return (f.at(i + 1, j) - f.at(i - 1, j)) / (2 * h_psi);
  }
  double dpsi2(int i, int j) const {
    return (f.at(i + 1, j) - 2 * f.at(i, j) + f.at(i - 1, j)) /
           (h_psi * h_psi);
  }
};

void validate_state(const ModalState& s) {
  if (s.l_max < 0) throw std::invalid_argument("ModalState: l_max < 0");
  for (const auto& [lm, c] : s.coefficients) {
    auto [l, m] = lm;
    if (l < 0 || l > s.l_max || std::abs(m) > l)
      throw std::invalid_argument("ModalState: index out of range");
    if (!std::isfinite(c[0]) || !std::isfinite(c[1]))
      throw std::invalid_argument("ModalState: non-finite coefficient");
  }
}

}  // namespace

LatLonField LatLonField::zeros(int n_phi, int n_psi) {
  LatLonField f;
  f.n_phi = n_phi;
  f.n_psi = n_psi;
  f.values.assign((size_t)n_phi * n_psi, 0.0);
  return f;
}

double LatLonField::psi(int i) const {
  return -kPi / 2 + kPi * i / (n_psi - 1);
}

double LatLonField::phi(int j) const { return 2 * kPi * j / n_phi; }

LatLonField linearized_mean_curvature(const DisplacementField& field) {
  validate_shape(field.u);
  validate_shape(field.v);
  validate_shape(field.w);
  if (field.u.n_phi != field.v.n_phi || field.u.n_phi != field.w.n_phi ||
      field.u.n_psi != field.v.n_psi || field.u.n_psi != field.w.n_psi)
    throw std::invalid_argument("DisplacementField: component grids differ");
  if (!(field.R > 0))
    throw std::invalid_argument("DisplacementField: R must be positive");
  check_pole_rows(field.u, "u");

  const int n_phi = field.u.n_phi, n_psi = field.u.n_psi;
  const double h_psi = kPi / (n_psi - 1);
  const double h_phi = 2 * kPi / n_phi;
  Stencils du{h_psi, h_phi, field.u};
  Stencils dv{h_psi, h_phi, field.v};
  Stencils dw{h_psi, h_phi, field.w};

  LatLonField K = LatLonField::zeros(n_phi, n_psi);
  for (int i = 1; i < n_psi - 1; ++i) {
    double psi = field.u.psi(i);
    double c = std::cos(psi), s = std::sin(psi);
    for (int j = 0; j < n_phi; ++j) {
      double u = field.u.at(i, j), v_phi = dv.dphi(i, j),
             w = field.w.at(i, j);
      // frame components of derivatives of Pi = u r + v k + w l
      double r_psi = du.dpsi(i, j) - w;
      double l_psi = dw.dpsi(i, j) + u;
      double k_phi = u * c + v_phi - w * s;
      double r_phiphi = du.dphi2(i, j) - v_phi * c - c * k_phi;
      double r_psipsi = du.dpsi2(i, j) - 2 * dw.dpsi(i, j) - u;
      K.at(i, j) = (-1.0 - 0.5 * (s / c) * r_psi + r_phiphi / (2 * c * c) +
                    0.5 * r_psipsi + l_psi + k_phi / c) /
                   field.R;
    }
  }
  fill_poles_by_average(K);
  return K;
}

LatLonField radial_wave_rhs(const LatLonField& u, double beta, double R) {
  validate_shape(u);
  if (!(beta > 0) || !(R > 0))
    throw std::invalid_argument("radial_wave_rhs: beta, R must be positive");
  const double h_psi = kPi / (u.n_psi - 1);
  const double h_phi = 2 * kPi / u.n_phi;
  Stencils du{h_psi, h_phi, u};
  LatLonField out = LatLonField::zeros(u.n_phi, u.n_psi);
  const double scale = beta / (2 * R);
  for (int i = 1; i < u.n_psi - 1; ++i) {
    double psi = u.psi(i);
    double c = std::cos(psi), t = std::tan(psi);
    for (int j = 0; j < u.n_phi; ++j) {
      double lap = du.dpsi2(i, j) - t * du.dpsi(i, j) +
                   du.dphi2(i, j) / (c * c);
      out.at(i, j) = scale * lap;
    }
  }
  fill_poles_by_average(out);
  return out;
}

double modal_energy(const ModalState& state) {
  double e = 0;
  for (const auto& [lm, c] : state.coefficients) {
    double ll1 = double(lm.first) * (lm.first + 1);
    e += c[1] * c[1] + ll1 * c[0] * c[0];
  }
  return e;
}

ModalState evolve_membrane(const ModalState& state, double t) {
  validate_state(state);
  ModalState out;
  out.l_max = state.l_max;
  for (const auto& [lm, c] : state.coefficients) {
    int l = lm.first;
    std::array<double, 2> next;
    if (l == 0) {
      next = {c[0] + c[1] * t, c[1]};
    } else {
      double w = std::sqrt(double(l) * (l + 1));
      double cw = std::cos(w * t), sw = std::sin(w * t);
      next = {c[0] * cw + c[1] / w * sw, -c[0] * w * sw + c[1] * cw};
    }
    out.coefficients[lm] = next;
  }
  return out;
}

std::vector<std::complex<double>> stability_spectrum(int l_max) {
  if (l_max < 1) throw std::invalid_argument("stability_spectrum: l_max >= 1");
  std::vector<std::complex<double>> freqs;
  for (int l = 1; l <= l_max; ++l) {
    double w = std::sqrt(double(l) * (l + 1));
    for (int m = -l; m <= l; ++m) {
      freqs.emplace_back(0.0, w);
      freqs.emplace_back(0.0, -w);
    }
  }
  return freqs;
}

ModalState grid_to_modal(const harmonics::QuadGrid& grid,
                         std::span<const double> u,
                         std::span<const double> u_dot, int l_max) {
  const int n_psi = (int)grid.x.size(), n_phi = grid.n_phi;
  if (l_max < 0) throw std::invalid_argument("grid_to_modal: l_max < 0");
  if (n_psi < l_max + 1 || n_phi < 2 * l_max + 1)
    throw std::invalid_argument(
        "grid_to_modal: quadrature grid under-resolves l_max");
  if ((int)u.size() != n_psi * n_phi || (int)u_dot.size() != n_psi * n_phi)
    throw std::invalid_argument("grid_to_modal: field size mismatch");

  ModalState state;
  state.l_max = l_max;
  const double dphi_w = 2 * kPi / n_phi;
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      std::array<double, 2> c{0, 0};
      for (int i = 0; i < n_psi; ++i) {
        double wq = grid.weights[i] * dphi_w;
        for (int j = 0; j < n_phi; ++j) {
          double y = harmonics::real_sh(l, m, grid.x[i], grid.phi(j));
          c[0] += wq * y * u[i * n_phi + j];
          c[1] += wq * y * u_dot[i * n_phi + j];
        }
      }
      state.coefficients[{l, m}] = c;
    }

  // aliasing guard: the synthesis must reproduce the input
  std::vector<double> ru, rdu;
  modal_to_grid(state, grid, ru, rdu);
  double scale = 0, defect = 0;
  for (int k = 0; k < n_psi * n_phi; ++k) {
    scale = std::max({scale, std::abs(u[k]), std::abs(u_dot[k])});
    defect = std::max({defect, std::abs(ru[k] - u[k]),
                       std::abs(rdu[k] - u_dot[k])});
  }
  if (defect > 1e-6 * (scale + 1.0))
    throw std::runtime_error(
        "grid_to_modal: input contains degrees above l_max (aliasing)");
  return state;
}

void modal_to_grid(const ModalState& state, const harmonics::QuadGrid& grid,
                   std::vector<double>& u, std::vector<double>& u_dot) {
  validate_state(state);
  const int n_psi = (int)grid.x.size(), n_phi = grid.n_phi;
  u.assign((size_t)n_psi * n_phi, 0.0);
  u_dot.assign((size_t)n_psi * n_phi, 0.0);
  for (const auto& [lm, c] : state.coefficients) {
    if (c[0] == 0.0 && c[1] == 0.0) continue;
    for (int i = 0; i < n_psi; ++i)
      for (int j = 0; j < n_phi; ++j) {
        double y = harmonics::real_sh(lm.first, lm.second, grid.x[i],
                                      grid.phi(j));
        u[i * n_phi + j] += c[0] * y;
        u_dot[i * n_phi + j] += c[1] * y;
      }
  }
}

}  // namespace spheron::membrane
