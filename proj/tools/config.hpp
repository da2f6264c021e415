#pragma once

// JSON experiment configuration for qpropsim.

#include "qprop/qprop.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qpropsim {

using nlohmann::json;

/// Bad or missing configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Angles used for the 5-parameter preset by default.
inline const std::vector<double> kFiveParamAngles = {1.5249, 2.5142, 0.4457, 1.3250, 2.8769};

struct SystemInputs {
  bool from_ansatz = false;
  double cond_M = 66.7239;
  double norm_M = 0.9977;
  double norm_Y = 1.0;
};

struct ExperimentConfig {
  json raw = json::object();  // effective document, hashed into CSV metadata
  std::filesystem::path base_dir = ".";

  std::string ansatz = "five_param";
  std::optional<std::vector<double>> theta;  // nullopt: preset default or seeded random
  bool theta_random = false;
  std::string hamiltonian = "h2";
  std::uint64_t initial_basis_state = 0;
  json noise = json{{"type", "none"}};
  std::vector<double> p_grid;
  std::vector<int> n_grid = {5, 6, 10, 12, 14};
  std::vector<double> delta_grid;
  double delta = 0.04;
  SystemInputs system;
  qprop::EvolutionConfig evolution;
  qprop::YReference reference = qprop::YReference::noisy_state;
  qprop::linalg::NormKind norm = qprop::linalg::NormKind::frobenius;
  int verify_qubits = 0;  // 0: pick per N
  std::string output;
  std::uint64_t seed = 7;

  std::string hash_text() const { return raw.dump(); }
};

namespace detail {

inline std::vector<double> read_grid(const json& j, const char* what) {
  if (j.is_array()) {
    std::vector<double> out = j.get<std::vector<double>>();
    if (out.empty()) throw ConfigError(std::string(what) + " grid is empty");
    return out;
  }
  if (j.is_object()) {
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const int count = j.at("count").get<int>();
    if (count < 1) throw ConfigError(std::string(what) + " grid count must be >= 1");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return out;
  }
  throw ConfigError(std::string(what) + " grid must be a list or {start, stop, count}");
}

inline json default_document() {
  return json{
      {"ansatz", "five_param"},
      {"hamiltonian", "h2"},
      {"noise", {{"type", "none"}}},
      {"grid",
       {{"p", {{"start", 0.0}, {"stop", 0.2}, {"count", 21}}},
        {"N", {5, 6, 10, 12, 14}},
        {"delta", {{"start", 0.001}, {"stop", 0.1}, {"count", 100}}}}},
      {"delta", 0.04},
      {"system", {{"cond_M", 66.7239}, {"norm_M", 0.9977}, {"norm_Y", 1.0}}},
      {"evolution", {{"total_time", 5.0}, {"dtau", 0.05}, {"svd_cutoff", 1e-8}, {"mode", "imaginary"}}},
      {"y_reference", "noisy_state"},
      {"norm", "frobenius"},
      {"seed", 7},
  };
}

}  // namespace detail

/// Config file fields are merged over the defaults, then CLI overrides are
/// applied by the caller through `raw` before calling finalize().
inline json load_document(const std::string& path) {
  json doc = detail::default_document();
  if (path.empty()) return doc;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json user;
  try {
    user = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!user.is_object()) throw ConfigError("config root must be an object");
  // Keep the default grid entries the user did not override.
  if (user.contains("grid") && user["grid"].is_object()) {
    json grid = doc["grid"];
    grid.update(user["grid"]);
    user["grid"] = grid;
  }
  doc.update(user);
  return doc;
}

inline ExperimentConfig finalize(json doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    c.ansatz = doc.at("ansatz").get<std::string>();
    if (doc.contains("theta")) {
      const json& t = doc["theta"];
      if (t.is_array()) c.theta = t.get<std::vector<double>>();
      else if (t.is_object() && t.value("random", false)) c.theta_random = true;
      else throw ConfigError("theta must be a list or {\"random\": true}");
    }
    c.hamiltonian = doc.at("hamiltonian").get<std::string>();
    c.initial_basis_state = doc.value("initial_basis_state", std::uint64_t{0});
    c.noise = doc.at("noise");
    const json& grid = doc.at("grid");
    c.p_grid = detail::read_grid(grid.at("p"), "p");
    c.n_grid = grid.at("N").get<std::vector<int>>();
    if (c.n_grid.empty()) throw ConfigError("N grid is empty");
    for (int n : c.n_grid) if (n < 1) throw ConfigError("N values must be >= 1");
    for (double p : c.p_grid) if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p values must lie in [0, 1]");
    c.delta_grid = detail::read_grid(grid.at("delta"), "delta");
    c.delta = doc.at("delta").get<double>();

    const json& sys = doc.at("system");
    if (sys.is_string()) {
      if (sys.get<std::string>() != "from_ansatz") throw ConfigError("system must be an object or \"from_ansatz\"");
      c.system.from_ansatz = true;
    } else {
      c.system.cond_M = sys.at("cond_M").get<double>();
      c.system.norm_M = sys.at("norm_M").get<double>();
      c.system.norm_Y = sys.at("norm_Y").get<double>();
    }

    const json& ev = doc.at("evolution");
    c.evolution.total_time = ev.value("total_time", 5.0);
    c.evolution.dtau = ev.value("dtau", 0.05);
    c.evolution.svd_cutoff = ev.value("svd_cutoff", 1e-8);
    c.evolution.mode = qprop::parse_evolution_mode(ev.value("mode", std::string("imaginary")));

    const std::string ref = doc.at("y_reference").get<std::string>();
    if (ref == "noisy_state") c.reference = qprop::YReference::noisy_state;
    else if (ref == "ideal_state") c.reference = qprop::YReference::ideal_state;
    else throw ConfigError("y_reference must be noisy_state or ideal_state");
    c.evolution.reference = c.reference;

    c.norm = qprop::linalg::parse_norm_kind(doc.at("norm").get<std::string>());
    c.evolution.norm = c.norm;
    c.verify_qubits = doc.value("verify_qubits", 0);
    c.output = doc.value("output", std::string());
    c.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const qprop::DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  // Output path does not change results, so it is not hashed.
  doc.erase("output");
  c.raw = std::move(doc);
  return c;
}

inline std::filesystem::path resolve(const ExperimentConfig& c, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative() && !std::filesystem::exists(p)) return c.base_dir / p;
  return p;
}

inline qprop::Ansatz build_ansatz(const ExperimentConfig& c) {
  for (const auto& name : qprop::presets::names()) {
    if (c.ansatz == name) return qprop::presets::by_name(name);
  }
  try {
    return qprop::load_ansatz_file(resolve(c, c.ansatz).string());
  } catch (const qprop::DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline qprop::RealVector build_theta(const ExperimentConfig& c, const qprop::Ansatz& a) {
  const int n = a.parameter_count();
  if (c.theta) {
    if (static_cast<int>(c.theta->size()) != n) {
      throw ConfigError("theta has " + std::to_string(c.theta->size()) + " entries, ansatz needs " + std::to_string(n));
    }
    return Eigen::Map<const qprop::RealVector>(c.theta->data(), n);
  }
  if (!c.theta_random && c.ansatz == "five_param") {
    return Eigen::Map<const qprop::RealVector>(kFiveParamAngles.data(), n);
  }
  if (!c.theta_random && c.ansatz == "nine_param") return qprop::RealVector::Constant(n, 0.1);
  std::mt19937_64 rng(qprop::mix_seed(c.seed, 0x7468657461ULL));
  return qprop::random_angles(n, rng);
}

inline qprop::Hamiltonian build_hamiltonian(const ExperimentConfig& c) {
  if (c.hamiltonian == "h2") return qprop::h2_hamiltonian();
  std::ifstream in(resolve(c, c.hamiltonian));
  if (!in) throw ConfigError("cannot open Hamiltonian file '" + c.hamiltonian + "'");
  try {
    return qprop::parse_hamiltonian(in);
  } catch (const qprop::DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline qprop::NoiseChannel build_noise(const ExperimentConfig& c, int n_qubits) {
  const json& j = c.noise;
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "none") return qprop::NoiseChannel::none();
    const double p = j.at("p").get<double>();
    if (type == "depolarizing") return qprop::NoiseChannel::depolarizing(p);
    if (type == "dephasing") {
      if (!j.contains("pauli")) return qprop::NoiseChannel::dephasing(p, n_qubits);
      const qprop::PauliString ps(j["pauli"].get<std::string>());
      if (ps.n_qubits() != n_qubits) throw ConfigError("dephasing Pauli has the wrong length");
      return qprop::NoiseChannel::dephasing(p, ps);
    }
    if (type == "pauli_mixture") {
      std::vector<std::pair<double, std::string>> terms;
      for (const auto& t : j.at("terms")) {
        terms.emplace_back(t.at(0).get<double>(), t.at(1).get<std::string>());
        if (static_cast<int>(terms.back().second.size()) != n_qubits) {
          throw ConfigError("pauli_mixture label has the wrong length");
        }
      }
      return qprop::NoiseChannel::pauli_mixture(p, terms);
    }
    if (type == "random_pauli_mixture") {
      std::mt19937_64 rng(qprop::mix_seed(c.seed, 0x6e6f697365ULL));
      return qprop::random_pauli_mixture(n_qubits, p, j.value("count", 4), rng);
    }
    throw ConfigError("unknown noise type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  } catch (const qprop::DomainError& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
}

inline qprop::DensityOperator build_initial_state(const ExperimentConfig& c, int n_qubits) {
  try {
    return qprop::DensityOperator::basis_state(n_qubits, c.initial_basis_state);
  } catch (const qprop::DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace qpropsim
