// Command-line front end: every solver as a subcommand with JSON output.
#include <unistd.h>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "spheronlab/acceptance.hpp"
#include "spheronlab/fock.hpp"
#include "spheronlab/gap.hpp"
#include "spheronlab/geodesic.hpp"
#include "spheronlab/membrane.hpp"
#include "spheronlab/sphere_spectra.hpp"
#include "spheronlab/thomas_fermi.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
using namespace spheron;

std::string self_path(const char* argv0) {
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (n > 0) return std::string(buf, static_cast<size_t>(n));
  return argv0;
}

void emit(const ordered_json& doc, const std::string& path) {
  std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
  }
}

ordered_json spectrum_json(double U, int count, int grid) {
  auto modes = spectra::solve_spectrum_refined(U, grid, count);
  ordered_json arr = ordered_json::array();
  for (const auto& m : modes)
    arr.push_back({{"l", m.l},
                   {"eigenvalue", m.eigenvalue},
                   {"parity",
                    m.parity == spectra::Parity::Even ? "even" : "odd"}});
  return ordered_json{{"U", U}, {"grid", grid}, {"modes", arr}};
}

ordered_json membrane_json(const std::vector<std::string>& mode_specs,
                           int l_max, double t) {
  membrane::ModalState state;
  state.l_max = l_max;
  for (const auto& spec : mode_specs) {
    std::istringstream in(spec);
    int l, m;
    double amp, vel;
    char c1, c2, c3;
    if (!(in >> l >> c1 >> m >> c2 >> amp >> c3 >> vel) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw std::invalid_argument("--mode expects l,m,amplitude,velocity");
    state.coefficients[{l, m}] = {amp, vel};
  }
  auto evolved = membrane::evolve_membrane(state, t);
  ordered_json arr = ordered_json::array();
  for (const auto& [key, value] : evolved.coefficients)
    arr.push_back({{"l", key.first},
                   {"m", key.second},
                   {"amplitude", value[0]},
                   {"velocity", value[1]}});
  return ordered_json{{"t", t},
                      {"l_max", l_max},
                      {"energy", membrane::modal_energy(evolved)},
                      {"coefficients", arr}};
}

ordered_json fock_json(double omega, int n_max) {
  auto alg = fock::ladder_matrices(n_max);
  auto comm = fock::commutator_exact(alg);
  ordered_json diag = ordered_json::array();
  for (int i = 0; i <= n_max; ++i) diag.push_back(comm(i, i));
  return ordered_json{{"omega", omega},
                      {"n_max", n_max},
                      {"energies", fock::oscillator_spectrum(omega, n_max)},
                      {"commutator_diagonal", diag}};
}

ordered_json blockspec_json(const std::vector<double>& diag, double W) {
  fock::BlockOperator op;
  op.diagonal = Eigen::Map<const Eigen::VectorXd>(
      diag.data(), static_cast<Eigen::Index>(diag.size()));
  op.W = W;
  return ordered_json{{"diag", diag},
                      {"W", W},
                      {"spectrum", fock::block_spectrum(op)}};
}

ordered_json gap_discrete_json(const std::vector<double>& eps, double W) {
  auto sol = gap::solve_gap_discrete(eps, W);
  return ordered_json{{"eps", eps},
                      {"W", W},
                      {"delta", sol.delta},
                      {"occupations", sol.occupations},
                      {"quasiparticle_energies",
                       sol.quasiparticle_energies}};
}

ordered_json gap_integral_json(double W, double nu, double eps_max) {
  return ordered_json{{"W", W},
                      {"nu", nu},
                      {"eps_max", eps_max},
                      {"delta", gap::solve_gap_integral(W, nu, eps_max)}};
}

ordered_json tf_atom_json(double tol) {
  auto sol = tf::separatrix_atom(tol);
  return ordered_json{{"initial_slope", sol.initial_slope},
                      {"slope_bracket_width", sol.slope_bracket_width},
                      {"far_y", sol.far_y},
                      {"samples", sol.x.size()}};
}

ordered_json tf_portrait_json(double y, double z) {
  auto rep = tf::classify_fixed_point(y, z);
  const char* names[] = {"unstable node", "stable node",     "saddle",
                         "unstable focus", "stable focus",   "center"};
  return ordered_json{
      {"y", y},
      {"z", z},
      {"type", names[static_cast<int>(rep.type)]},
      {"eigenvalues",
       {{rep.eig1.real(), rep.eig1.imag()},
        {rep.eig2.real(), rep.eig2.imag()}}},
      {"jacobian",
       {{rep.jacobian(0, 0), rep.jacobian(0, 1)},
        {rep.jacobian(1, 0), rep.jacobian(1, 1)}}}};
}

ordered_json tf_fireball_json(double Q, double R, double zeta, double kappa0,
                              double r00) {
  auto sol = tf::shielding_iteration(tf::TFParams{Q, R, zeta}, kappa0, r00);
  return ordered_json{{"Q", Q},
                      {"R", R},
                      {"zeta", zeta},
                      {"kappa", sol.kappa},
                      {"r0", sol.r0},
                      {"iterations", sol.iterations},
                      {"residual_history", sol.residual_history}};
}

geo::RP2Configuration load_configuration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open configuration: " + path);
  ordered_json doc = ordered_json::parse(in);
  geo::RP2Configuration config;
  for (const auto& p : doc.at("points"))
    config.points.push_back(geo::RP2Point::from(
        {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()})
                                .q);
  for (const auto& v : doc.at("velocities"))
    config.velocities.emplace_back(v.at(0).get<double>(),
                                   v.at(1).get<double>(),
                                   v.at(2).get<double>());
  config.g = doc.at("g").get<double>();
  config.gamma = doc.at("gamma").get<double>();
  config.validate();
  return config;
}

ordered_json configuration_json(const geo::RP2Configuration& config) {
  ordered_json points = ordered_json::array();
  ordered_json velocities = ordered_json::array();
  for (const auto& p : config.points)
    points.push_back({p(0), p(1), p(2)});
  for (const auto& v : config.velocities)
    velocities.push_back({v(0), v(1), v(2)});
  return ordered_json{{"points", points},
                      {"velocities", velocities},
                      {"g", config.g},
                      {"gamma", config.gamma},
                      {"energy", geo::total_energy(config)}};
}

ordered_json geo_nbody_json(const std::string& config_path, double dt,
                            long steps, const std::string& trajectory_path,
                            long stride) {
  auto config = load_configuration(config_path);
  if (trajectory_path.empty()) {
    return configuration_json(geo::simulate(config, dt, steps));
  }
  std::ofstream csv(trajectory_path);
  if (!csv)
    throw std::runtime_error("cannot open trajectory file: " +
                             trajectory_path);
  csv << "step,point,x,y,z,energy\n";
  csv.precision(17);
  auto dump_row = [&](long step) {
    double energy = geo::total_energy(config);
    for (size_t i = 0; i < config.points.size(); ++i)
      csv << step << ',' << i << ',' << config.points[i](0) << ','
          << config.points[i](1) << ',' << config.points[i](2) << ','
          << energy << '\n';
  };
  dump_row(0);
  for (long k = 0; k < steps; ++k) {
    config = geo::simulate(config, dt, 1);
    if ((k + 1) % stride == 0 || k + 1 == steps) dump_row(k + 1);
  }
  return configuration_json(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spheron-lab: oscillation spectra, pairing gaps and "
               "Thomas-Fermi shielding of a charged-kernel plasma cover"};
  app.require_subcommand(1);
  std::string output_path;
  app.add_option("--out", output_path, "write JSON output to this file");
  app.set_config("--params", "",
                 "flat key=value file with flag defaults; explicit flags "
                 "override it");

  std::function<ordered_json()> action;

  // spectrum
  {
    auto* cmd = app.add_subcommand(
        "spectrum", "latitudinal oscillation eigenvalues and modes");
    auto U = std::make_shared<double>(1.0);
    auto count = std::make_shared<int>(4);
    auto grid = std::make_shared<int>(1000);
    cmd->add_option("--U", *U, "separation constant, > 0");
    cmd->add_option("--count", *count, "number of modes");
    cmd->add_option("--grid", *grid, "coarse grid node count");
    cmd->callback(
        [&action, U, count, grid] {
          action = [=] { return spectrum_json(*U, *count, *grid); };
        });
  }

  // membrane
  {
    auto* cmd = app.add_subcommand(
        "membrane", "modal evolution of the radial displacement wave");
    auto modes = std::make_shared<std::vector<std::string>>();
    auto l_max = std::make_shared<int>(4);
    auto t = std::make_shared<double>(0.0);
    cmd->add_option("--mode", *modes,
                    "mode as l,m,amplitude,velocity (repeatable)");
    cmd->add_option("--lmax", *l_max, "band limit");
    cmd->add_option("--t", *t, "evolution time");
    cmd->callback([&action, modes, l_max, t] {
      action = [=] { return membrane_json(*modes, *l_max, *t); };
    });
  }

  // fock
  {
    auto* cmd = app.add_subcommand(
        "fock", "truncated oscillator algebra and spectrum");
    auto omega = std::make_shared<double>(1.0);
    auto n_max = std::make_shared<int>(8);
    cmd->add_option("--omega", *omega, "oscillator frequency");
    cmd->add_option("--nmax", *n_max, "Fock-space truncation");
    cmd->callback([&action, omega, n_max] {
      action = [=] { return fock_json(*omega, *n_max); };
    });
  }

  // blockspec
  {
    auto* cmd = app.add_subcommand(
        "blockspec", "spectrum of the switch-back block operator");
    auto diag = std::make_shared<std::vector<double>>();
    auto W = std::make_shared<double>(0.0);
    cmd->add_option("--diag", *diag, "diagonal entries")
        ->delimiter(',')
        ->required();
    cmd->add_option("--W", *W, "coupling")->required();
    cmd->callback([&action, diag, W] {
      action = [=] { return blockspec_json(*diag, *W); };
    });
  }

  // gap
  {
    auto* cmd = app.add_subcommand("gap", "pairing gap equations");
    cmd->require_subcommand(1);
    auto* discrete = cmd->add_subcommand("discrete", "finite level ladder");
    auto eps = std::make_shared<std::vector<double>>();
    auto W = std::make_shared<double>(1.0);
    discrete->add_option("--eps", *eps, "level energies")
        ->delimiter(',')
        ->required();
    discrete->add_option("--W", *W, "pairing strength")->required();
    discrete->callback([&action, eps, W] {
      action = [=] { return gap_discrete_json(*eps, *W); };
    });

    auto* integral =
        cmd->add_subcommand("integral", "constant density of states");
    auto Wi = std::make_shared<double>(1.0);
    auto nu = std::make_shared<double>(1.0);
    auto eps_max = std::make_shared<double>(1.0);
    integral->add_option("--W", *Wi, "pairing strength")->required();
    integral->add_option("--nu", *nu, "density of states")->required();
    integral->add_option("--epsmax", *eps_max, "band edge")->required();
    integral->callback([&action, Wi, nu, eps_max] {
      action = [=] { return gap_integral_json(*Wi, *nu, *eps_max); };
    });
  }

  // tf
  {
    auto* cmd = app.add_subcommand("tf", "Thomas-Fermi screening problems");
    cmd->require_subcommand(1);

    auto* atom = cmd->add_subcommand("atom", "separatrix profile");
    auto tol = std::make_shared<double>(1e-12);
    atom->add_option("--tol", *tol, "slope bisection tolerance");
    atom->callback(
        [&action, tol] { action = [=] { return tf_atom_json(*tol); }; });

    auto* portrait =
        cmd->add_subcommand("portrait", "fixed-point classification");
    auto y = std::make_shared<double>(0.0);
    auto z = std::make_shared<double>(0.0);
    portrait->add_option("--y", *y, "reduced coordinate y")->required();
    portrait->add_option("--z", *z, "reduced coordinate z")->required();
    portrait->callback([&action, y, z] {
      action = [=] { return tf_portrait_json(*y, *z); };
    });

    auto* fireball =
        cmd->add_subcommand("fireball", "self-consistent cover shielding");
    auto Q = std::make_shared<double>(1.0);
    auto R = std::make_shared<double>(1.0);
    auto zeta = std::make_shared<double>(0.1);
    auto kappa0 = std::make_shared<double>(1.0);
    auto r00 = std::make_shared<double>(-1.0);
    fireball->add_option("--Q", *Q, "kernel charge")->required();
    fireball->add_option("--R", *R, "kernel radius")->required();
    fireball->add_option("--zeta", *zeta, "outer thermal potential")
        ->required();
    fireball->add_option("--kappa0", *kappa0, "shielding seed");
    fireball->add_option("--r00", *r00, "cover width seed (default R/100)");
    fireball->callback([&action, Q, R, zeta, kappa0, r00] {
      action = [=] { return tf_fireball_json(*Q, *R, *zeta, *kappa0, *r00); };
    });
  }

  // geo
  {
    auto* cmd =
        app.add_subcommand("geo", "charged geodesics and the RP^2 gas");
    cmd->require_subcommand(1);

    auto* force = cmd->add_subcommand("force", "point-circle attraction");
    auto psi = std::make_shared<double>(0.0);
    auto nodes = std::make_shared<int>(2048);
    force->add_option("--psi", *psi, "colatitude offset")->required();
    force->add_option("--nodes", *nodes, "quadrature nodes");
    force->callback([&action, psi, nodes] {
      action = [=] {
        return ordered_json{
            {"psi", *psi},
            {"force", geo::point_circle_force(*psi)},
            {"quadrature", geo::point_circle_force_quadrature(*psi, *nodes)}};
      };
    });

    auto* torque = cmd->add_subcommand("torque", "circle-circle law");
    auto theta = std::make_shared<double>(0.0);
    torque->add_option("--theta", *theta, "angle between circles")
        ->required();
    torque->callback([&action, theta] {
      action = [=] {
        return ordered_json{
            {"theta", *theta},
            {"torque", geo::circle_circle_torque(*theta)},
            {"potential", geo::circle_circle_potential(*theta)}};
      };
    });

    auto* nbody = cmd->add_subcommand("nbody", "quasi-particle dynamics");
    auto config_path = std::make_shared<std::string>();
    auto dt = std::make_shared<double>(1e-3);
    auto steps = std::make_shared<long>(100);
    auto traj = std::make_shared<std::string>();
    auto stride = std::make_shared<long>(1);
    nbody->add_option("--config", *config_path, "JSON configuration file")
        ->required();
    nbody->add_option("--dt", *dt, "time step");
    nbody->add_option("--steps", *steps, "step count");
    nbody->add_option("--traj", *traj, "trajectory CSV output path");
    nbody->add_option("--stride", *stride, "trajectory sampling stride");
    nbody->callback([&action, config_path, dt, steps, traj, stride] {
      action = [=] {
        return geo_nbody_json(*config_path, *dt, *steps, *traj, *stride);
      };
    });
  }

  // selftest
  {
    auto* cmd = app.add_subcommand(
        "selftest", "run the acceptance suite against this binary");
    auto sabotage = std::make_shared<std::string>();
    cmd->add_option("--sabotage", *sabotage,
                    "inject a failure into the named criterion");
    std::string exe = self_path(argv[0]);
    cmd->callback([&action, sabotage, exe] {
      action = [=]() -> ordered_json {
        spheron::acceptance::RunOptions options;
        options.cli_path = exe;
        options.check_selftest_exit = false;  // we are the selftest
        options.sabotage = *sabotage;
        auto results = spheron::acceptance::run_all(options);
        spheron::acceptance::print_report(std::cout, results);
        if (!spheron::acceptance::all_passed(results))
          throw std::runtime_error("acceptance criteria failed");
        return {};
      };
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    ordered_json doc = action();
    if (!doc.is_null() && !(doc.is_object() && doc.empty()))
      emit(doc, output_path);
  } catch (const std::exception& e) {
    ordered_json err{{"error", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
  return 0;
}
