// qpropsim: noisy variational-evolution experiments from the command line.
//
//   qpropsim <matrices|sweep-depolarizing|sweep-theorem1|constraint|evolve|bounds>
//            [--config cfg.json] [--out path] [--seed n] [--verify]
//            [--norm frobenius|spectral] [--jobs n]
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include "config.hpp"
#include "worker_pool.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace qpropsim;
namespace io = qprop::io;
using qprop::BoundValue;

struct Options {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> norm;
  bool verify = false;
  int jobs = 0;
};

void emit(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.output.empty() || cfg.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + cfg.output + "'");
  out << text;
}

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return io::format_number(v);
}

json matrix_json(const qprop::RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const qprop::RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// ---------------------------------------------------------------------------

std::string cmd_matrices(const ExperimentConfig& cfg, bool verify) {
  const auto a = build_ansatz(cfg);
  const auto theta = build_theta(cfg, a);
  const auto h = build_hamiltonian(cfg);
  if (h.n_qubits() != a.n_qubits()) throw ConfigError("Hamiltonian and ansatz act on different register sizes");
  const auto noise = build_noise(cfg, a.n_qubits());
  const auto rho0 = build_initial_state(cfg, a.n_qubits());

  qprop::MYOptions opt;
  opt.reference = cfg.reference;
  opt.norm = cfg.norm;
  opt.with_V = true;
  const auto s = qprop::compute_system(a, theta, h, noise, rho0, opt);

  using qprop::linalg::NormKind;
  json doc;
  doc["n_qubits"] = a.n_qubits();
  doc["n_params"] = a.parameter_count();
  doc["noise"] = {{"type", noise.name()}, {"p", noise.probability()}};
  doc["y_reference"] = cfg.reference == qprop::YReference::noisy_state ? "noisy_state" : "ideal_state";
  doc["norm"] = qprop::linalg::to_string(cfg.norm);
  doc["theta"] = vector_json(theta);
  doc["M"] = matrix_json(s.M);
  doc["Y"] = vector_json(s.Y);
  doc["V"] = vector_json(*s.V);
  doc["cond_M"] = {{"frobenius", number_or_string(qprop::linalg::condition_number(s.M, NormKind::frobenius))},
                   {"spectral", number_or_string(qprop::linalg::condition_number(s.M, NormKind::spectral))}};
  doc["norm_M"] = {{"frobenius", qprop::linalg::frobenius_norm(s.M)},
                   {"spectral", qprop::linalg::spectral_norm(s.M)}};
  doc["norm_Y"] = s.norm_Y;
  if (verify) {
    const auto gram = qprop::gram_oracle_M(a, theta, rho0);
    const auto ideal = qprop::compute_M(a, theta, qprop::NoiseChannel::none(), rho0);
    doc["verify"] = {{"gram_oracle_max_abs_diff", (gram - ideal).cwiseAbs().maxCoeff()}};
  }
  doc["metadata"] = {{"config_hash", io::hex64(io::fnv1a(cfg.hash_text()))},
                     {"seed", cfg.seed},
                     {"version", io::kVersion}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

struct GridPoint {
  int n;
  double p;
};

std::vector<GridPoint> sorted_grid(const std::vector<int>& ns, const std::vector<double>& ps) {
  std::vector<GridPoint> g;
  for (int n : ns)
    for (double p : ps) g.push_back({n, p});
  std::sort(g.begin(), g.end(), [](const GridPoint& x, const GridPoint& y) {
    return x.n != y.n ? x.n < y.n : x.p < y.p;
  });
  g.erase(std::unique(g.begin(), g.end(), [](const GridPoint& x, const GridPoint& y) {
            return x.n == y.n && x.p == y.p;
          }),
          g.end());
  return g;
}

std::string cmd_sweep_depolarizing(const ExperimentConfig& cfg, bool verify, int jobs) {
  const auto grid = sorted_grid(cfg.n_grid, cfg.p_grid);
  std::vector<std::string> header = {"N", "p", "relative_error"};
  if (verify) {
    header.push_back("measured");
    header.push_back("abs_diff");
  }

  // One instance per N, sampled up front so the worker schedule cannot
  // change which instance a point sees.
  std::vector<int> ns;
  for (const auto& g : grid)
    if (ns.empty() || ns.back() != g.n) ns.push_back(g.n);
  std::vector<qprop::RandomInstance> instances;
  if (verify) {
    instances = parallel_map<qprop::RandomInstance>(ns.size(), jobs, [&](std::size_t i) {
      const int n = ns[i];
      const int q = cfg.verify_qubits > 0 ? cfg.verify_qubits : qprop::default_qubits_for(n);
      return qprop::sample_instance(q, n, qprop::mix_seed(cfg.seed, static_cast<std::uint64_t>(n)));
    });
  }

  auto rows = parallel_map<std::vector<std::string>>(grid.size(), jobs, [&](std::size_t i) {
    const auto [n, p] = grid[i];
    const BoundValue predicted = qprop::bounds::theorem2_relative_error(n, p);
    std::vector<std::string> row = {std::to_string(n), io::format_number(p), io::format_bound(predicted)};
    if (!verify) return row;
    if (p == 1.0) {
      row.push_back("inf");
      row.push_back("invalid");
      return row;
    }
    const auto idx = static_cast<std::size_t>(std::find(ns.begin(), ns.end(), n) - ns.begin());
    const auto& inst = instances[idx];
    const auto rho0 = qprop::DensityOperator::basis_state(inst.ansatz.n_qubits());
    qprop::MYOptions opt;
    opt.reference = qprop::YReference::ideal_state;
    const auto noisy = qprop::compute_system(inst.ansatz, inst.theta, inst.hamiltonian,
                                             qprop::NoiseChannel::depolarizing(p), rho0, opt);
    const qprop::RealVector ideal_dot = qprop::linalg::solve_regularized(inst.ideal.M, inst.ideal.Y, 0.0);
    const qprop::RealVector noisy_dot = qprop::linalg::solve_regularized(noisy.M, noisy.Y, 0.0);
    const double measured = (noisy_dot - ideal_dot).norm() / ideal_dot.norm();
    row.push_back(io::format_number(measured));
    row.push_back(io::format_number(std::abs(measured - predicted.value())));
    return row;
  });

  io::CsvTable table(header);
  for (auto& r : rows) table.add_row(std::move(r));
  std::vector<std::string> notes;
  if (verify) notes.push_back("measured: random ansatz per N, Y evaluated against the noiseless output state");
  return table.render(cfg.hash_text(), cfg.seed, notes);
}

// ---------------------------------------------------------------------------

SystemInputs system_inputs(const ExperimentConfig& cfg) {
  if (!cfg.system.from_ansatz) {
    if (!(cfg.system.cond_M >= 1.0) || !(cfg.system.norm_M > 0.0) || !(cfg.system.norm_Y > 0.0)) {
      throw ConfigError("system: need cond_M >= 1 and positive norms");
    }
    return cfg.system;
  }
  const auto a = build_ansatz(cfg);
  const auto theta = build_theta(cfg, a);
  const auto h = build_hamiltonian(cfg);
  if (h.n_qubits() != a.n_qubits()) throw ConfigError("Hamiltonian and ansatz act on different register sizes");
  qprop::MYOptions opt;
  opt.norm = cfg.norm;
  const auto s = qprop::compute_system(a, theta, h, qprop::NoiseChannel::none(), build_initial_state(cfg, a.n_qubits()), opt);
  if (!std::isfinite(s.cond_M)) throw qprop::NumericError("system from ansatz: M is singular");
  return {true, s.cond_M, s.norm_M, s.norm_Y};
}

std::string cmd_sweep_theorem1(const ExperimentConfig& cfg, int jobs) {
  const SystemInputs sys = system_inputs(cfg);
  std::vector<int> ns = cfg.n_grid;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  auto series = parallel_map<std::vector<std::vector<std::string>>>(ns.size(), jobs, [&](std::size_t i) {
    const int n = ns[i];
    std::vector<std::vector<std::string>> rows;
    const BoundValue pmax = qprop::bounds::theorem1_pmax(sys.norm_M, n, cfg.delta);
    if (!pmax.is_finite()) {
      rows.push_back({std::to_string(n), "invalid", "invalid"});
      return rows;
    }
    std::vector<double> ps;
    for (double p : cfg.p_grid)
      if (p <= pmax.value()) ps.push_back(p);
    ps.push_back(pmax.value());
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (double p : ps) {
      const double b = qprop::bounds::theorem1_bound(sys.cond_M, sys.norm_M, sys.norm_Y, n, p);
      rows.push_back({std::to_string(n), io::format_number(p), io::format_number(b)});
    }
    return rows;
  });

  io::CsvTable table({"N", "p", "bound"});
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (series[i].size() == 1 && series[i][0][1] == "invalid") {
      notes.push_back("warning: delta=" + io::format_number(cfg.delta) + " too large for N=" + std::to_string(ns[i]));
    }
    for (auto& r : series[i]) table.add_row(std::move(r));
  }
  notes.push_back("cond_M=" + io::format_number(sys.cond_M) + ", norm_M=" + io::format_number(sys.norm_M) +
                  ", norm_Y=" + io::format_number(sys.norm_Y) + ", delta=" + io::format_number(cfg.delta));
  return table.render(cfg.hash_text(), cfg.seed, notes);
}

// ---------------------------------------------------------------------------

std::string cmd_constraint(const ExperimentConfig& cfg, int jobs) {
  const SystemInputs sys = system_inputs(cfg);
  std::vector<GridPoint> grid = sorted_grid(cfg.n_grid, cfg.delta_grid);  // p slot carries delta
  for (const auto& g : grid) {
    if (!(g.p > 0.0)) throw ConfigError("delta values must be positive");
  }
  auto rows = parallel_map<std::vector<std::string>>(grid.size(), jobs, [&](std::size_t i) {
    const auto [n, delta] = grid[i];
    return std::vector<std::string>{std::to_string(n), io::format_number(delta),
                                    io::format_bound(qprop::bounds::theorem1_pmax(sys.norm_M, n, delta))};
  });
  io::CsvTable table({"N", "delta", "p_max"});
  for (auto& r : rows) table.add_row(std::move(r));
  return table.render(cfg.hash_text(), cfg.seed, {"norm_M=" + io::format_number(sys.norm_M)});
}

// ---------------------------------------------------------------------------

std::string cmd_bounds(const ExperimentConfig& cfg, int jobs) {
  const SystemInputs sys = system_inputs(cfg);
  const auto grid = sorted_grid(cfg.n_grid, cfg.p_grid);
  auto rows = parallel_map<std::vector<std::string>>(grid.size(), jobs, [&](std::size_t i) {
    const auto [n, p] = grid[i];
    const auto r = qprop::make_bound_report(sys.cond_M, sys.norm_M, sys.norm_Y, n, p, cfg.delta);
    const auto caps = qprop::bounds::elementwise_caps(n, p);
    return std::vector<std::string>{std::to_string(n),          io::format_number(p),
                                    io::format_bound(r.theorem1), io::format_bound(r.theorem1_pmax),
                                    io::format_bound(r.theorem2), io::format_bound(r.loose),
                                    io::format_number(caps.M),    io::format_number(caps.Y)};
  });
  io::CsvTable table({"N", "p", "theorem1", "theorem1_pmax", "theorem2", "loose", "cap_M", "cap_Y"});
  for (auto& r : rows) table.add_row(std::move(r));
  return table.render(cfg.hash_text(), cfg.seed,
                      {"cond_M=" + io::format_number(sys.cond_M) + ", norm_M=" + io::format_number(sys.norm_M) +
                       ", norm_Y=" + io::format_number(sys.norm_Y) + ", delta=" + io::format_number(cfg.delta)});
}

// ---------------------------------------------------------------------------

std::string cmd_evolve(const ExperimentConfig& cfg) {
  const auto a = build_ansatz(cfg);
  const auto theta0 = build_theta(cfg, a);
  const auto h = build_hamiltonian(cfg);
  if (h.n_qubits() != a.n_qubits()) throw ConfigError("Hamiltonian and ansatz act on different register sizes");
  qprop::EvolutionConfig ev = cfg.evolution;
  ev.noise = build_noise(cfg, a.n_qubits());
  try {
    ev.validate();
  } catch (const qprop::DomainError& e) {
    throw ConfigError(e.what());
  }
  const auto trace = qprop::run(a, theta0, h, ev, build_initial_state(cfg, a.n_qubits()));

  std::vector<std::string> header = {"tau"};
  for (int k = 1; k <= a.parameter_count(); ++k) header.push_back("theta_" + std::to_string(k));
  for (const char* c : {"energy", "cond_M", "norm_M", "norm_Y", "fidelity"}) header.emplace_back(c);
  io::CsvTable table(header);
  for (const auto& r : trace.records) {
    std::vector<std::string> row = {io::format_number(r.tau)};
    for (Eigen::Index k = 0; k < r.theta.size(); ++k) row.push_back(io::format_number(r.theta(k)));
    row.push_back(io::format_number(r.energy));
    row.push_back(io::format_number(r.cond_M));
    row.push_back(io::format_number(r.norm_M));
    row.push_back(io::format_number(r.rhs_norm));
    row.push_back(io::format_number(r.fidelity));
    table.add_row(std::move(row));
  }
  std::vector<std::string> notes = {"mode=" + std::string(qprop::to_string(ev.mode)) +
                                    ", ground-energy=" + io::format_number(qprop::ground_energy(h))};
  for (const auto& d : trace.diagnostics) notes.push_back("diagnostic: " + d);
  return table.render(cfg.hash_text(), cfg.seed, notes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisy variational evolution experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "JSON experiment config");
  app.add_option("--out", o.out, "output path (default: stdout)");
  app.add_option("--seed", o.seed, "RNG seed (overrides config)");
  app.add_flag("--verify", o.verify, "recompute points by full simulation");
  app.add_option("--norm", o.norm, "norm for cond(M), ||M||")->check(CLI::IsMember({"frobenius", "spectral"}));
  app.add_option("--jobs", o.jobs, "worker threads (default: hardware concurrency)")->check(CLI::NonNegativeNumber);

  const std::pair<const char*, const char*> commands[] = {
      {"matrices", "M, Y, V and conditioning as JSON"},
      {"sweep-depolarizing", "depolarizing relative error over N and p"},
      {"sweep-theorem1", "general-noise bound over N and p, up to p_max"},
      {"constraint", "p_max over N and delta"},
      {"evolve", "variational evolution trace"},
      {"bounds", "all bounds side by side"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const int jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  try {
    json doc = load_document(o.config_path);
    if (o.seed) doc["seed"] = *o.seed;
    if (o.norm) doc["norm"] = *o.norm;
    if (!o.out.empty()) doc["output"] = o.out;
    doc["command"] = command;
    doc["verify"] = o.verify;
    const auto base = o.config_path.empty() ? std::filesystem::path(".")
                                            : std::filesystem::path(o.config_path).parent_path();
    const ExperimentConfig cfg = finalize(std::move(doc), base.empty() ? std::filesystem::path(".") : base);

    std::string text;
    if (command == "matrices") text = cmd_matrices(cfg, o.verify);
    else if (command == "sweep-depolarizing") text = cmd_sweep_depolarizing(cfg, o.verify, jobs);
    else if (command == "sweep-theorem1") text = cmd_sweep_theorem1(cfg, jobs);
    else if (command == "constraint") text = cmd_constraint(cfg, jobs);
    else if (command == "evolve") text = cmd_evolve(cfg);
    else text = cmd_bounds(cfg, jobs);
    emit(cfg, text);
  } catch (const ConfigError& e) {
    std::cerr << "qpropsim: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {  // DomainError, DimensionError
    std::cerr << "qpropsim: " << e.what() << "\n";
    return 2;
  } catch (const qprop::NumericError& e) {
    std::cerr << "qpropsim: numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "qpropsim: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
