#pragma once

// Euler-stepped variational imaginary- and real-time evolution.

#include "qprop/mky.hpp"

#include <cmath>
#include <limits>
#include <algorithm>
#include <string>
#include <vector>

namespace qprop {

enum class EvolutionMode { imaginary, real };

inline const char* to_string(EvolutionMode m) { return m == EvolutionMode::imaginary ? "imaginary" : "real"; }

inline EvolutionMode parse_evolution_mode(const std::string& s) {
  if (s == "imaginary") return EvolutionMode::imaginary;
  if (s == "real") return EvolutionMode::real;
  throw DomainError("unknown evolution mode '" + s + "'");
}

struct EvolutionConfig {
  double total_time = 5.0;
  double dtau = 0.05;
  double svd_cutoff = 1e-8;
  NoiseChannel noise = NoiseChannel::none();
  EvolutionMode mode = EvolutionMode::imaginary;
  YReference reference = YReference::noisy_state;
  linalg::NormKind norm = linalg::NormKind::frobenius;

  void validate() const {
    if (!(dtau > 0.0)) throw DomainError("evolution: dtau must be positive");
    if (!(total_time >= dtau)) throw DomainError("evolution: total time must be >= dtau");
    if (!(svd_cutoff >= 0.0)) throw DomainError("evolution: svd_cutoff must be >= 0");
  }

  int step_count() const { return static_cast<int>(std::ceil(total_time / dtau - 1e-9)); }
};

struct StepResult {
  RealVector theta_next;
  RealVector theta_dot;
  MYSystem system;
};

/// One Euler step. In real mode the right-hand side is V instead of Y.
inline StepResult step(const Ansatz& a, const RealVector& theta, const Hamiltonian& h, const EvolutionConfig& cfg,
                       const DensityOperator& rho0, double dt) {
  MYOptions opt;
  opt.reference = cfg.reference;
  opt.norm = cfg.norm;
  opt.with_V = cfg.mode == EvolutionMode::real;
  StepResult r;
  r.system = compute_system(a, theta, h, cfg.noise, rho0, opt);
  const RealVector& rhs = cfg.mode == EvolutionMode::real ? *r.system.V : r.system.Y;
  r.theta_dot = linalg::solve_regularized(r.system.M, rhs, cfg.svd_cutoff);
  if (!r.theta_dot.allFinite()) throw NumericError("evolution: non-finite parameter velocity");
  r.theta_next = theta + dt * r.theta_dot;
  return r;
}

inline StepResult step(const Ansatz& a, const RealVector& theta, const Hamiltonian& h, const EvolutionConfig& cfg,
                       const DensityOperator& rho0) {
  return step(a, theta, h, cfg, rho0, cfg.dtau);
}

/// rho(tau) = e^{-H tau} rho0 e^{-H tau} / Tr[...]. H is shifted by the
/// lowest eigenvalue that rho0 overlaps, so the exponentials stay bounded
/// and the normalization cannot underflow.
inline DensityOperator exact_imaginary_evolution(const Hamiltonian& h, const DensityOperator& rho0, double tau) {
  if (!(tau >= 0.0)) throw DomainError("exact_imaginary_evolution: tau must be >= 0");
  if (dimension_of(h.n_qubits()) != rho0.dimension()) throw DimensionError("exact_imaginary_evolution: size mismatch");
  if (tau == 0.0) return rho0;
  const ComplexMatrix hm = h.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (hm + hm.adjoint()));
  const ComplexMatrix& v = eig.eigenvectors();
  double shift = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double weight = (v.col(i).adjoint() * rho0.matrix() * v.col(i))(0).real();
    if (weight > 1e-14) {
      shift = eig.eigenvalues()(i);
      break;
    }
  }
  if (std::isnan(shift)) throw NumericError("exact_imaginary_evolution: state has no weight on any eigenvector");
  Eigen::VectorXcd g_diag(v.cols());
  // Levels below the shift carry no weight; growing them would only amplify
  // rounding noise.
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double gap = eig.eigenvalues()(i) - shift;
    g_diag(i) = gap < 0.0 ? 0.0 : std::exp(-tau * gap);
  }
  const ComplexMatrix g = v * g_diag.asDiagonal() * v.adjoint();
  ComplexMatrix out = g * rho0.matrix() * g;
  const double norm = out.trace().real();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw NumericError("exact_imaginary_evolution: normalization vanished");
  }
  out /= norm;
  return DensityOperator(rho0.n_qubits(), 0.5 * (out + out.adjoint()));
}

inline DensityOperator exact_real_evolution(const Hamiltonian& h, const DensityOperator& rho0, double t) {
  const ComplexMatrix u = linalg::unitary_propagator(h.matrix(), t);
  const ComplexMatrix out = u * rho0.matrix() * u.adjoint();
  return DensityOperator(rho0.n_qubits(), 0.5 * (out + out.adjoint()));
}

/// Row k holds the state after k steps and the system solved at that
/// state. `rhs_norm` is ||Y|| in imaginary mode and ||V|| in real mode.
struct TraceRecord {
  double tau = 0.0;
  RealVector theta;
  RealVector theta_dot;
  double energy = 0.0;
  double cond_M = 0.0;
  double norm_M = 0.0;
  double rhs_norm = 0.0;
  double fidelity = 1.0;
};

struct EvolutionTrace {
  EvolutionMode mode = EvolutionMode::imaginary;
  std::vector<TraceRecord> records;
  std::vector<std::string> diagnostics;

  int step_count() const { return static_cast<int>(records.size()) - 1; }
  const TraceRecord& final_record() const { return records.back(); }
};

inline EvolutionTrace run(const Ansatz& a, const RealVector& theta0, const Hamiltonian& h, const EvolutionConfig& cfg,
                          const DensityOperator& rho0) {
  cfg.validate();
  a.check_parameters(theta0);
  const ComplexMatrix hm = h.matrix();
  const auto none = NoiseChannel::none();
  const DensityOperator start = run_circuit(a, theta0, rho0, none);

  EvolutionTrace trace;
  trace.mode = cfg.mode;
  const int steps = cfg.step_count();
  trace.records.reserve(static_cast<std::size_t>(steps) + 1);

  RealVector theta = theta0;
  double tau = 0.0;
  bool flagged_zero = false;
  for (int s = 0; s <= steps; ++s) {
    const double dt = std::min(cfg.dtau, cfg.total_time - tau);
    StepResult r = step(a, theta, h, cfg, rho0, dt);
    if (r.system.norm_M == 0.0 && !flagged_zero) {
      trace.diagnostics.push_back("M vanishes at tau=" + std::to_string(tau) + "; parameters stay fixed");
      flagged_zero = true;
    }
    TraceRecord rec;
    rec.tau = tau;
    rec.theta = theta;
    rec.theta_dot = r.theta_dot;
    const DensityOperator variational = run_circuit(a, theta, rho0, cfg.noise);
    rec.energy = variational.expectation(hm);
    rec.cond_M = r.system.cond_M;
    rec.norm_M = r.system.norm_M;
    rec.rhs_norm = cfg.mode == EvolutionMode::real ? r.system.V->norm() : r.system.norm_Y;
    const DensityOperator exact = cfg.mode == EvolutionMode::imaginary ? exact_imaginary_evolution(h, start, tau)
                                                                       : exact_real_evolution(h, start, tau);
    rec.fidelity = fidelity(variational, exact);
    trace.records.push_back(std::move(rec));
    if (s == steps) break;
    theta = r.theta_next;
    tau = s + 1 == steps ? cfg.total_time : (s + 1) * cfg.dtau;
  }
  return trace;
}

}  // namespace qprop
