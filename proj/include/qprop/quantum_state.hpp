#pragma once

// Density operators, Pauli strings, Hamiltonians and global noise channels.
//
// Qubit 0 is the leftmost Kronecker factor (most significant bit of the
// basis index). A Pauli label such as "XZ" puts X on qubit 0 and Z on qubit 1.

#include "qprop/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qprop {

inline constexpr double kStateTolerance = 1e-10;

inline int dimension_of(int n_qubits) { return 1 << n_qubits; }

namespace pauli {

inline ComplexMatrix single(char label) {
  ComplexMatrix m(2, 2);
  switch (label) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw DomainError(std::string("invalid Pauli label '") + label + "'");
  }
  return m;
}

/// Single-qubit operator `op` acting on `qubit` of an n-qubit register.
inline ComplexMatrix embed(int n_qubits, int qubit, const ComplexMatrix& op) {
  if (qubit < 0 || qubit >= n_qubits) throw DomainError("embed: qubit index out of range");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    out = linalg::kron(out, q == qubit ? op : ComplexMatrix::Identity(2, 2));
  }
  return out;
}

inline ComplexMatrix projector(int n_qubits, int qubit, int bit) {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p(bit, bit) = 1.0;
  return embed(n_qubits, qubit, p);
}

}  // namespace pauli

/// Tensor product of single-qubit Paulis with a real coefficient.
struct PauliString {
  std::string labels;
  double coefficient = 1.0;

  PauliString() = default;
  explicit PauliString(std::string l, double c = 1.0) : labels(std::move(l)), coefficient(c) {
    if (labels.empty()) throw DomainError("PauliString: empty label");
    for (char ch : labels) {
      if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z') {
        throw DomainError("PauliString: invalid label '" + labels + "'");
      }
    }
  }

  int n_qubits() const { return static_cast<int>(labels.size()); }

  ComplexMatrix matrix() const {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (char ch : labels) out = linalg::kron(out, pauli::single(ch));
    return coefficient * out;
  }

  /// Whether the unit-coefficient strings commute (even number of
  /// positions with distinct non-identity labels).
  bool commutes_with(const PauliString& other) const {
    if (other.labels.size() != labels.size()) throw DimensionError("PauliString size mismatch");
    int clashes = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const char a = labels[i];
      const char b = other.labels[i];
      if (a != 'I' && b != 'I' && a != b) ++clashes;
    }
    return clashes % 2 == 0;
  }
};

/// Real linear combination of Pauli strings.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(std::vector<PauliString> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw DomainError("Hamiltonian: no terms");
    n_qubits_ = terms_.front().n_qubits();
    for (const auto& t : terms_) {
      if (t.n_qubits() != n_qubits_) throw DimensionError("Hamiltonian: terms act on different register sizes");
    }
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliString>& terms() const { return terms_; }

  ComplexMatrix matrix() const {
    const int d = dimension_of(n_qubits_);
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (const auto& t : terms_) h += t.matrix();
    return h;
  }

 private:
  int n_qubits_ = 0;
  std::vector<PauliString> terms_;
};

/// Parses `coefficient label` lines. Blank lines and `#` comments are
/// skipped.
inline Hamiltonian parse_hamiltonian(std::istream& in) {
  std::vector<PauliString> terms;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double coeff = 0.0;
    std::string label;
    if (!(ls >> coeff)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw DomainError("hamiltonian line " + std::to_string(line_no) + ": expected coefficient");
    }
    if (!(ls >> label)) {
      throw DomainError("hamiltonian line " + std::to_string(line_no) + ": expected Pauli label");
    }
    std::string extra;
    if (ls >> extra) {
      throw DomainError("hamiltonian line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
    }
    terms.emplace_back(label, coeff);
  }
  return Hamiltonian(std::move(terms));
}

inline Hamiltonian parse_hamiltonian(const std::string& text) {
  std::istringstream in(text);
  return parse_hamiltonian(in);
}

/// Reduced two-qubit H2 Hamiltonian (STO-3G, Bravyi-Kitaev):
/// g0 I + g1 Z0 + g2 Z1 + g3 Z0Z1 + g4 Y0Y1 + g5 X0X1.
inline Hamiltonian h2_hamiltonian() {
  return Hamiltonian({
      PauliString("II", 0.2252),
      PauliString("ZI", 0.3435),
      PauliString("IZ", -0.4347),
      PauliString("ZZ", 0.5716),
      PauliString("YY", 0.0910),
      PauliString("XX", 0.0910),
  });
}

inline double ground_energy(const Hamiltonian& h) {
  return linalg::hermitian_eigenvalues(h.matrix())(0);
}

/// General 2^n x 2^n operator; no Hermiticity or trace requirements.
struct OperatorState {
  int n_qubits = 0;
  ComplexMatrix matrix;

  OperatorState() = default;
  OperatorState(int n, ComplexMatrix m) : n_qubits(n), matrix(std::move(m)) {
    const int d = dimension_of(n);
    if (matrix.rows() != d || matrix.cols() != d) {
      throw DimensionError("OperatorState: matrix is not 2^n x 2^n");
    }
  }
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
 public:
  /// Validates the matrix; throws DomainError when it is not a state.
  DensityOperator(int n_qubits, ComplexMatrix m) : n_qubits_(n_qubits), matrix_(std::move(m)) {
    const int d = dimension_of(n_qubits);
    if (matrix_.rows() != d || matrix_.cols() != d) {
      throw DimensionError("DensityOperator: matrix is not 2^n x 2^n");
    }
    if (!linalg::is_hermitian(matrix_, kStateTolerance)) {
      throw DomainError("DensityOperator: not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0, 0.0)) > kStateTolerance) {
      throw DomainError("DensityOperator: trace differs from 1");
    }
    if (linalg::hermitian_eigenvalues(matrix_)(0) < -kStateTolerance) {
      throw DomainError("DensityOperator: negative eigenvalue");
    }
  }

  static DensityOperator basis_state(int n_qubits, std::uint64_t index = 0) {
    const int d = dimension_of(n_qubits);
    if (index >= static_cast<std::uint64_t>(d)) throw DomainError("basis_state: index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return DensityOperator(n_qubits, std::move(m));
  }

  static DensityOperator pure(int n_qubits, const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd v = psi.normalized();
    return DensityOperator(n_qubits, v * v.adjoint());
  }

  static DensityOperator maximally_mixed(int n_qubits) {
    const int d = dimension_of(n_qubits);
    return DensityOperator(n_qubits, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  }

  int n_qubits() const { return n_qubits_; }
  int dimension() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  OperatorState as_operator() const { return {n_qubits_, matrix_}; }

  double expectation(const ComplexMatrix& observable) const {
    return linalg::trace_product(matrix_, observable).real();
  }

 private:
  int n_qubits_;
  ComplexMatrix matrix_;
};

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dimension() != sigma.dimension()) throw DimensionError("fidelity: dimension mismatch");
  const ComplexMatrix s = linalg::psd_sqrt(rho.matrix());
  const ComplexMatrix inner = s * sigma.matrix() * s;
  const double t = linalg::psd_sqrt(0.5 * (inner + inner.adjoint())).trace().real();
  // Square roots of near-rank-deficient states overshoot by ~1e-8.
  return std::clamp(t * t, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Noise channels: E(X) = p N(X) + (1 - p) X, applied to the whole register.

struct WeightedUnitary {
  double weight = 0.0;
  ComplexMatrix unitary;
};

class NoiseChannel {
 public:
  struct None {};
  struct Depolarizing {};
  struct Dephasing {
    ComplexMatrix pauli;
    std::string label;
  };
  struct ProbabilisticUnitary {
    std::vector<WeightedUnitary> terms;
  };
  using Kind = std::variant<None, Depolarizing, Dephasing, ProbabilisticUnitary>;

  NoiseChannel() = default;

  static NoiseChannel none() { return NoiseChannel(0.0, None{}); }

  static NoiseChannel depolarizing(double p) { return NoiseChannel(p, Depolarizing{}); }

  /// D(A) = (A + P A P) / 2 with a global Pauli P (all-Z by default).
  static NoiseChannel dephasing(double p, int n_qubits) {
    return dephasing(p, PauliString(std::string(static_cast<std::size_t>(n_qubits), 'Z')));
  }
  static NoiseChannel dephasing(double p, const PauliString& pauli) {
    if (pauli.coefficient != 1.0) throw DomainError("dephasing: Pauli must have unit coefficient");
    return NoiseChannel(p, Dephasing{pauli.matrix(), pauli.labels});
  }

  static NoiseChannel probabilistic_unitary(double p, std::vector<WeightedUnitary> terms) {
    if (terms.empty()) throw DomainError("probabilistic_unitary: no terms");
    double total = 0.0;
    const auto d = terms.front().unitary.rows();
    for (const auto& t : terms) {
      if (t.weight < 0.0) throw DomainError("probabilistic_unitary: negative weight");
      if (t.unitary.rows() != d || t.unitary.cols() != d) {
        throw DimensionError("probabilistic_unitary: unitaries of different sizes");
      }
      const ComplexMatrix defect = t.unitary.adjoint() * t.unitary - ComplexMatrix::Identity(d, d);
      if (defect.cwiseAbs().maxCoeff() > 1e-10) throw DomainError("probabilistic_unitary: matrix is not unitary");
      total += t.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("probabilistic_unitary: weights do not sum to 1");
    return NoiseChannel(p, ProbabilisticUnitary{std::move(terms)});
  }

  static NoiseChannel pauli_mixture(double p, const std::vector<std::pair<double, std::string>>& terms) {
    std::vector<WeightedUnitary> unitaries;
    unitaries.reserve(terms.size());
    for (const auto& [w, label] : terms) unitaries.push_back({w, PauliString(label).matrix()});
    return probabilistic_unitary(p, std::move(unitaries));
  }

  double probability() const { return p_; }
  const Kind& kind() const { return kind_; }
  bool is_none() const { return std::holds_alternative<None>(kind_) || p_ == 0.0; }
  bool is_depolarizing() const { return std::holds_alternative<Depolarizing>(kind_); }

  std::string name() const {
    struct Visitor {
      std::string operator()(const None&) const { return "none"; }
      std::string operator()(const Depolarizing&) const { return "depolarizing"; }
      std::string operator()(const Dephasing&) const { return "dephasing"; }
      std::string operator()(const ProbabilisticUnitary&) const { return "probabilistic_unitary"; }
    };
    return std::visit(Visitor{}, kind_);
  }

  /// The error map N alone (identity for None).
  ComplexMatrix error_map(const ComplexMatrix& x) const {
    check_dimension(x);
    struct Visitor {
      const ComplexMatrix& x;
      ComplexMatrix operator()(const None&) const { return x; }
      ComplexMatrix operator()(const Depolarizing&) const {
        const auto d = x.rows();
        return x.trace() / static_cast<double>(d) * ComplexMatrix::Identity(d, d);
      }
      ComplexMatrix operator()(const Dephasing& dp) const {
        return 0.5 * (x + dp.pauli * x * dp.pauli);
      }
      ComplexMatrix operator()(const ProbabilisticUnitary& pu) const {
        ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
        for (const auto& t : pu.terms) out += t.weight * (t.unitary * x * t.unitary.adjoint());
        return out;
      }
    };
    return std::visit(Visitor{x}, kind_);
  }

  /// p N(X) + (1 - p) X, extended linearly to non-Hermitian X.
  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (is_none()) {
      check_dimension(x);
      return x;
    }
    if (p_ == 1.0) return error_map(x);
    return p_ * error_map(x) + (1.0 - p_) * x;
  }

  OperatorState apply(const OperatorState& x) const { return {x.n_qubits, apply(x.matrix)}; }

  DensityOperator apply(const DensityOperator& rho) const {
    return DensityOperator(rho.n_qubits(), apply(rho.matrix()));
  }

 private:
  NoiseChannel(double p, Kind kind) : p_(p), kind_(std::move(kind)) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("noise probability must lie in [0, 1]");
  }

  void check_dimension(const ComplexMatrix& x) const {
    if (x.rows() != x.cols()) throw DimensionError("noise channel: operator is not square");
    Eigen::Index d = -1;
    if (const auto* dp = std::get_if<Dephasing>(&kind_)) d = dp->pauli.rows();
    if (const auto* pu = std::get_if<ProbabilisticUnitary>(&kind_)) d = pu->terms.front().unitary.rows();
    if (d >= 0 && d != x.rows()) throw DimensionError("noise channel: dimension mismatch");
  }

  double p_ = 0.0;
  Kind kind_ = None{};
};

inline OperatorState apply_channel(const OperatorState& x, const NoiseChannel& ch) {
  return ch.apply(x);
}

/// Seeded random mixture of `count` non-identity Pauli strings with
/// Dirichlet(1,...,1) weights.
template <typename Rng>
NoiseChannel random_pauli_mixture(int n_qubits, double p, int count, Rng& rng) {
  if (count < 1) throw DomainError("random_pauli_mixture: count must be positive");
  const std::uint64_t n_strings = std::uint64_t{1} << (2 * n_qubits);
  std::uniform_int_distribution<std::uint64_t> pick(1, n_strings - 1);
  std::exponential_distribution<double> expo(1.0);
  std::vector<std::pair<double, std::string>> terms;
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    std::uint64_t code = pick(rng);
    std::string label;
    for (int q = 0; q < n_qubits; ++q) {
      label.push_back("IXYZ"[code & 3u]);
      code >>= 2;
    }
    const double w = expo(rng);
    total += w;
    terms.emplace_back(w, label);
  }
  for (auto& t : terms) t.first /= total;
  // Renormalise the last weight so the sum is 1 to rounding.
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) partial += terms[i].first;
  terms.back().first = 1.0 - partial;
  return NoiseChannel::pauli_mixture(p, terms);
}

/// Random real combination of `count` non-identity Pauli strings, rescaled
/// to the requested spectral norm.
template <typename Rng>
Hamiltonian random_pauli_hamiltonian(int n_qubits, int count, double spectral_norm, Rng& rng) {
  if (count < 1) throw DomainError("random_pauli_hamiltonian: count must be positive");
  const std::uint64_t n_strings = std::uint64_t{1} << (2 * n_qubits);
  std::uniform_int_distribution<std::uint64_t> pick(1, n_strings - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<PauliString> terms;
  for (int i = 0; i < count; ++i) {
    std::uint64_t code = pick(rng);
    std::string label;
    for (int q = 0; q < n_qubits; ++q) {
      label.push_back("IXYZ"[code & 3u]);
      code >>= 2;
    }
    terms.emplace_back(label, normal(rng));
  }
  const double current = linalg::spectral_norm(Hamiltonian(terms).matrix());
  if (!(current > 0.0)) throw NumericError("random_pauli_hamiltonian: terms cancel");
  for (auto& t : terms) t.coefficient *= spectral_norm / current;
  return Hamiltonian(std::move(terms));
}

/// Complex matrix with i.i.d. standard complex Gaussian entries.
template <typename Rng>
ComplexMatrix random_complex_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

struct ContractivityResult {
  bool contractive = true;
  double worst_ratio = 0.0;
};

/// Samples random operators X and reports max ||map(X)||_F / ||X||_F.
/// A sampled check, not a proof.
template <typename Map>
ContractivityResult check_contractivity(Map&& map, int dimension, int samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("check_contractivity: samples must be >= 1");
  std::mt19937_64 rng(seed);
  ContractivityResult result;
  // Always include the identity: it is the worst case for maps that
  // concentrate the trace.
  auto probe = [&](const ComplexMatrix& x) {
    const double ratio = map(x).norm() / x.norm();
    result.worst_ratio = std::max(result.worst_ratio, ratio);
  };
  probe(ComplexMatrix::Identity(dimension, dimension));
  for (int s = 1; s < samples; ++s) probe(random_complex_matrix(dimension, dimension, rng));
  result.contractive = result.worst_ratio <= 1.0 + 1e-10;
  return result;
}

inline ContractivityResult check_contractivity(const NoiseChannel& ch, int n_qubits, int samples,
                                               std::uint64_t seed) {
  return check_contractivity([&ch](const ComplexMatrix& x) { return ch.error_map(x); },
                             dimension_of(n_qubits), samples, seed);
}

}  // namespace qprop
