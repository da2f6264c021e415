#pragma once

// M, Y and V from noise-inserted operator chains.
//
// Chain (k, i): gates before k, each followed by the channel; at slot k the
// insertion S_{k,i} X T_{k,i}^dagger, then the channel; then the remaining
// gates, each followed by the channel. Summing r_{k,i} times the chains gives
// d rho_noisy / d theta_k.

#include "qprop/ansatz.hpp"

#include <optional>
#include <vector>

namespace qprop {

/// Which state enters the anticommutator of Y and the commutator of V.
///
/// noisy_state uses the output of the noisy circuit. ideal_state uses the
/// noiseless output; with depolarizing noise only this choice makes Y scale
/// exactly by (1-p)^N when the register has more than one qubit.
enum class YReference { noisy_state, ideal_state };

struct ChainTerm {
  Complex r;
  ComplexMatrix chain;
};

/// chains[k][i] for every parameter k and decomposition term i, plus the
/// final noisy and noiseless states.
struct ChainSet {
  std::vector<std::vector<ChainTerm>> chains;
  ComplexMatrix noisy_state;
  ComplexMatrix ideal_state;

  const ComplexMatrix& reference(YReference ref) const {
    return ref == YReference::noisy_state ? noisy_state : ideal_state;
  }
};

namespace detail {

inline void check_inputs(const Ansatz& a, const RealVector& theta, const DensityOperator& rho0) {
  a.check_parameters(theta);
  if (rho0.n_qubits() != a.n_qubits()) throw DimensionError("initial state size does not match ansatz");
}

inline ComplexMatrix run_tail(const std::vector<ComplexMatrix>& us, int from, ComplexMatrix x,
                              const NoiseChannel& noise) {
  for (std::size_t g = static_cast<std::size_t>(from); g < us.size(); ++g) {
    x = noise.apply(us[g] * x * us[g].adjoint());
  }
  return x;
}

}  // namespace detail

/// Single chain for 0-based parameter k and term i.
inline OperatorState chain_with_insertion(const Ansatz& a, const RealVector& theta, int k, int term,
                                          const NoiseChannel& noise, const DensityOperator& rho0) {
  detail::check_inputs(a, theta, rho0);
  if (k < 0 || k >= a.parameter_count()) throw DomainError("chain_with_insertion: parameter index out of range");
  const auto us = circuit_unitaries(a, theta);
  const auto decomposition = derivative_decomposition(a.gate(k), a.n_qubits(), theta(k));
  if (term < 0 || term >= static_cast<int>(decomposition.size())) {
    throw DomainError("chain_with_insertion: term index out of range");
  }
  ComplexMatrix x = rho0.matrix();
  for (int g = 0; g < k; ++g) x = noise.apply(us[g] * x * us[g].adjoint());
  const auto& t = decomposition[term];
  x = noise.apply(t.S * x * t.T.adjoint());
  return {a.n_qubits(), detail::run_tail(us, k + 1, std::move(x), noise)};
}

inline ChainSet compute_chains(const Ansatz& a, const RealVector& theta, const NoiseChannel& noise,
                               const DensityOperator& rho0) {
  detail::check_inputs(a, theta, rho0);
  const auto us = circuit_unitaries(a, theta);
  const int n = a.parameter_count();
  ChainSet out;
  out.chains.resize(static_cast<std::size_t>(n));

  ComplexMatrix prefix = rho0.matrix();
  ComplexMatrix ideal = rho0.matrix();
  for (int k = 0; k < n; ++k) {
    for (const auto& t : derivative_decomposition(a.gate(k), a.n_qubits(), theta(k))) {
      ComplexMatrix x = noise.apply(t.S * prefix * t.T.adjoint());
      out.chains[k].push_back({t.r, detail::run_tail(us, k + 1, std::move(x), noise)});
    }
    prefix = noise.apply(us[k] * prefix * us[k].adjoint());
    ideal = us[k] * ideal * us[k].adjoint();
  }
  out.noisy_state = prefix;
  out.ideal_state = ideal;
  return out;
}

namespace detail {

inline double checked_real(Complex z, double scale, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
  if (std::abs(z.imag()) > 1e-12 * std::max(1.0, scale)) {
    throw NumericError(std::string(what) + ": imaginary residue " + std::to_string(z.imag()));
  }
  return z.real();
}

}  // namespace detail

inline RealMatrix compute_M(const ChainSet& cs) {
  const auto n = static_cast<Eigen::Index>(cs.chains.size());
  RealMatrix m(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index q = k; q < n; ++q) {
      Complex acc = 0.0;
      for (const auto& ck : cs.chains[k]) {
        for (const auto& cq : cs.chains[q]) acc += std::conj(ck.r) * cq.r * linalg::hs_inner(ck.chain, cq.chain);
      }
      m(k, q) = m(q, k) = detail::checked_real(acc, 1.0, "compute_M");
    }
  }
  return m;
}

inline RealVector compute_Y(const ChainSet& cs, const ComplexMatrix& h, YReference ref = YReference::noisy_state) {
  const ComplexMatrix& rho = cs.reference(ref);
  if (h.rows() != rho.rows()) throw DimensionError("compute_Y: Hamiltonian size does not match ansatz");
  const ComplexMatrix anti = rho * h + h * rho;
  const double scale = h.norm();
  const auto n = static_cast<Eigen::Index>(cs.chains.size());
  RealVector y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (const auto& c : cs.chains[k]) acc += c.r * linalg::trace_product(c.chain, anti);
    y(k) = -detail::checked_real(acc, scale, "compute_Y");
  }
  return y;
}

/// V_k = Re sum_i r_{k,i} Tr[C_{k,i} (-i [H, rho])], expanded over the
/// Hamiltonian's Pauli terms.
inline RealVector compute_V(const ChainSet& cs, const Hamiltonian& h, YReference ref = YReference::noisy_state) {
  const ComplexMatrix& rho = cs.reference(ref);
  if (dimension_of(h.n_qubits()) != rho.rows()) throw DimensionError("compute_V: Hamiltonian size does not match ansatz");
  ComplexMatrix generator = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& term : h.terms()) {
    const ComplexMatrix sigma = PauliString(term.labels).matrix();
    generator += Complex(0.0, -term.coefficient) * (sigma * rho);
    generator += Complex(0.0, term.coefficient) * (rho * sigma);
  }
  const double scale = h.matrix().norm();
  const auto n = static_cast<Eigen::Index>(cs.chains.size());
  RealVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (const auto& c : cs.chains[k]) acc += c.r * linalg::trace_product(c.chain, generator);
    v(k) = detail::checked_real(acc, scale, "compute_V");
  }
  return v;
}

inline RealMatrix compute_M(const Ansatz& a, const RealVector& theta, const NoiseChannel& noise,
                            const DensityOperator& rho0) {
  return compute_M(compute_chains(a, theta, noise, rho0));
}

inline RealVector compute_Y(const Ansatz& a, const RealVector& theta, const Hamiltonian& h,
                            const NoiseChannel& noise, const DensityOperator& rho0,
                            YReference ref = YReference::noisy_state) {
  return compute_Y(compute_chains(a, theta, noise, rho0), h.matrix(), ref);
}

inline RealVector compute_V(const Ansatz& a, const RealVector& theta, const Hamiltonian& h,
                            const NoiseChannel& noise, const DensityOperator& rho0,
                            YReference ref = YReference::noisy_state) {
  return compute_V(compute_chains(a, theta, noise, rho0), h, ref);
}

/// d rho / d theta_k by central differences of the noiseless circuit.
inline std::vector<ComplexMatrix> finite_difference_derivatives(const Ansatz& a, const RealVector& theta,
                                                                const DensityOperator& rho0, double step = 1e-4) {
  const auto none = NoiseChannel::none();
  std::vector<ComplexMatrix> d;
  for (int k = 0; k < a.parameter_count(); ++k) {
    RealVector plus = theta;
    RealVector minus = theta;
    plus(k) += step;
    minus(k) -= step;
    d.push_back((run_circuit(a, plus, rho0, none).matrix() - run_circuit(a, minus, rho0, none).matrix()) /
                (2.0 * step));
  }
  return d;
}

/// Brute-force Gram matrix Tr[(d_k rho)^dagger d_q rho] from finite differences.
inline RealMatrix gram_oracle_M(const Ansatz& a, const RealVector& theta, const DensityOperator& rho0,
                                double step = 1e-4) {
  const auto d = finite_difference_derivatives(a, theta, rho0, step);
  const auto n = static_cast<Eigen::Index>(d.size());
  RealMatrix m(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index q = 0; q < n; ++q) m(k, q) = linalg::hs_inner(d[k], d[q]).real();
  }
  return 0.5 * (m + m.transpose());
}

struct MYOptions {
  YReference reference = YReference::noisy_state;
  linalg::NormKind norm = linalg::NormKind::frobenius;
  bool with_V = false;
};

struct MYSystem {
  RealMatrix M;
  RealVector Y;
  std::optional<RealVector> V;
  double cond_M = 0.0;
  double norm_M = 0.0;
  double norm_Y = 0.0;
  linalg::NormKind norm = linalg::NormKind::frobenius;
};

inline MYSystem compute_system(const Ansatz& a, const RealVector& theta, const Hamiltonian& h,
                               const NoiseChannel& noise, const DensityOperator& rho0, const MYOptions& opt = {}) {
  if (h.n_qubits() != a.n_qubits()) throw DimensionError("Hamiltonian size does not match ansatz");
  const ChainSet cs = compute_chains(a, theta, noise, rho0);
  MYSystem s;
  s.norm = opt.norm;
  s.M = compute_M(cs);
  s.Y = compute_Y(cs, h.matrix(), opt.reference);
  if (opt.with_V) s.V = compute_V(cs, h, opt.reference);
  if (!s.M.allFinite() || !s.Y.allFinite()) throw NumericError("M or Y has non-finite entries");
  s.norm_M = linalg::matrix_norm(s.M, opt.norm);
  s.norm_Y = s.Y.norm();
  s.cond_M = s.norm_M > 0.0 ? linalg::condition_number(s.M, opt.norm) : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace qprop
