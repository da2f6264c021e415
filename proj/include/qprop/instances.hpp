#pragma once

// Seeded random test problems: ansatz, angles and Hamiltonian with a
// well-conditioned M.

#include "qprop/mky.hpp"

#include <cstdint>
#include <random>

namespace qprop {

/// SplitMix64 finalizer, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RandomInstance {
  Ansatz ansatz;
  RealVector theta;
  Hamiltonian hamiltonian;
  MYSystem ideal;
  int attempts = 0;
};

/// Smallest register the sampler uses for N parameters. Two qubits give a
/// full-rank M only up to about 6 parameters.
inline int default_qubits_for(int n_params) { return n_params <= 6 ? 2 : 3; }

struct InstanceOptions {
  double max_cond = 1e6;
  double min_norm_Y = 1e-3;
  double hamiltonian_norm = 0.5;
  int hamiltonian_terms = 4;
  int max_attempts = 2000;
};

/// Resamples until cond_F(M) <= max_cond and ||Y|| >= min_norm_Y.
/// The Hamiltonian has spectral norm `hamiltonian_norm`.
inline RandomInstance sample_instance(int n_qubits, int n_params, std::uint64_t seed, const InstanceOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  const auto rho0 = DensityOperator::basis_state(n_qubits);
  const auto none = NoiseChannel::none();
  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    Ansatz a = random_ansatz(n_qubits, n_params, rng);
    RealVector theta = random_angles(n_params, rng);
    Hamiltonian h = random_pauli_hamiltonian(n_qubits, opt.hamiltonian_terms, opt.hamiltonian_norm, rng);
    MYSystem s = compute_system(a, theta, h, none, rho0);
    if (s.cond_M <= opt.max_cond && s.norm_Y >= opt.min_norm_Y) {
      return {std::move(a), std::move(theta), std::move(h), std::move(s), attempt};
    }
  }
  throw NumericError("sample_instance: no well-conditioned instance found");
}

}  // namespace qprop
