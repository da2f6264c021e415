#pragma once

// Parameterized rotation circuits and their exact derivative decompositions.
//
// Rotations are R(theta) = exp(-i theta P / 2). Parameter indices are 0-based
// in this API; ansatz files number them from 1.

#include "qprop/quantum_state.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qprop {

enum class GateKind { single_rotation, controlled_rotation };
enum class PauliAxis { X, Y, Z };

inline char axis_char(PauliAxis a) { return a == PauliAxis::X ? 'X' : a == PauliAxis::Y ? 'Y' : 'Z'; }

struct GateSpec {
  GateKind kind = GateKind::single_rotation;
  int target = 0;
  int control = -1;  // only for controlled_rotation
  PauliAxis axis = PauliAxis::X;
  int parameter = 0;

  static GateSpec rotation(PauliAxis axis, int target, int parameter) {
    return {GateKind::single_rotation, target, -1, axis, parameter};
  }
  static GateSpec controlled(PauliAxis axis, int control, int target, int parameter) {
    return {GateKind::controlled_rotation, target, control, axis, parameter};
  }

  /// File-format mnemonic, e.g. "RX" or "CRY".
  std::string mnemonic() const {
    std::string s = kind == GateKind::controlled_rotation ? "CR" : "R";
    s.push_back(axis_char(axis));
    return s;
  }
};

class Ansatz {
 public:
  Ansatz(int n_qubits, std::vector<GateSpec> gates) : n_qubits_(n_qubits), gates_(std::move(gates)) {
    if (n_qubits < 1 || n_qubits > 6) throw DomainError("Ansatz: n_qubits must be in [1, 6]");
    if (gates_.empty()) throw DomainError("Ansatz: no gates");
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      const GateSpec& g = gates_[i];
      if (g.parameter != static_cast<int>(i)) {
        throw DomainError("Ansatz: gate " + std::to_string(i + 1) + " must carry parameter " + std::to_string(i + 1));
      }
      if (g.target < 0 || g.target >= n_qubits) throw DomainError("Ansatz: target qubit out of range");
      if (g.kind == GateKind::controlled_rotation) {
        if (g.control < 0 || g.control >= n_qubits) throw DomainError("Ansatz: control qubit out of range");
        if (g.control == g.target) throw DomainError("Ansatz: control equals target");
      }
    }
  }

  int n_qubits() const { return n_qubits_; }
  int dimension() const { return dimension_of(n_qubits_); }
  int parameter_count() const { return static_cast<int>(gates_.size()); }
  const std::vector<GateSpec>& gates() const { return gates_; }
  const GateSpec& gate(int k) const { return gates_.at(static_cast<std::size_t>(k)); }

  void check_parameters(const RealVector& theta) const {
    if (theta.size() != parameter_count()) {
      throw DimensionError("theta has " + std::to_string(theta.size()) + " entries, ansatz has " +
                           std::to_string(parameter_count()) + " parameters");
    }
  }

 private:
  int n_qubits_;
  std::vector<GateSpec> gates_;
};

namespace detail {

inline ComplexMatrix axis_matrix(PauliAxis a) { return pauli::single(axis_char(a)); }

inline ComplexMatrix rotation_2x2(PauliAxis a, double theta) {
  return std::cos(theta / 2) * ComplexMatrix::Identity(2, 2) -
         Complex(0.0, std::sin(theta / 2)) * axis_matrix(a);
}

inline void check_gate(const GateSpec& g, int n_qubits) {
  if (g.target < 0 || g.target >= n_qubits) throw DomainError("gate target out of range");
  if (g.kind == GateKind::controlled_rotation &&
      (g.control < 0 || g.control >= n_qubits || g.control == g.target)) {
    throw DomainError("gate control invalid");
  }
}

}  // namespace detail

/// Full-register unitary of gate g at angle theta.
inline ComplexMatrix gate_unitary(const GateSpec& g, int n_qubits, double theta) {
  detail::check_gate(g, n_qubits);
  const ComplexMatrix r = pauli::embed(n_qubits, g.target, detail::rotation_2x2(g.axis, theta));
  if (g.kind == GateKind::single_rotation) return r;
  return pauli::projector(n_qubits, g.control, 0) + pauli::projector(n_qubits, g.control, 1) * r;
}

struct DerivativeTerm {
  Complex r;
  ComplexMatrix S;
  ComplexMatrix T;
};

/// Terms with sum_i r_i S_i rho T_i^dagger = d(U rho U^dagger)/d theta.
using DerivativeDecomposition = std::vector<DerivativeTerm>;

inline DerivativeDecomposition derivative_decomposition(const GateSpec& g, int n_qubits, double theta) {
  detail::check_gate(g, n_qubits);
  const ComplexMatrix p = pauli::embed(n_qubits, g.target, detail::axis_matrix(g.axis));
  const ComplexMatrix r = pauli::embed(n_qubits, g.target, detail::rotation_2x2(g.axis, theta));
  const Complex half_i(0.0, 0.5);
  if (g.kind == GateKind::single_rotation) {
    const ComplexMatrix pr = p * r;
    return {{-half_i, pr, r}, {half_i, r, pr}};
  }
  const ComplexMatrix one = pauli::projector(n_qubits, g.control, 1);
  const ComplexMatrix w = pauli::projector(n_qubits, g.control, 0) + one * r;
  const ComplexMatrix q = one * p * r;
  return {{half_i, w, q}, {-half_i, q, w}};
}

inline ComplexMatrix apply_decomposition(const DerivativeDecomposition& d, const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& t : d) out += t.r * (t.S * rho * t.T.adjoint());
  return out;
}

/// Gate unitaries of the whole circuit at theta.
inline std::vector<ComplexMatrix> circuit_unitaries(const Ansatz& a, const RealVector& theta) {
  a.check_parameters(theta);
  std::vector<ComplexMatrix> us;
  us.reserve(a.gates().size());
  for (const auto& g : a.gates()) us.push_back(gate_unitary(g, a.n_qubits(), theta(g.parameter)));
  return us;
}

/// Gate, then channel, once per gate.
inline DensityOperator run_circuit(const Ansatz& a, const RealVector& theta, const DensityOperator& rho0,
                                   const NoiseChannel& noise) {
  if (rho0.n_qubits() != a.n_qubits()) throw DimensionError("run_circuit: state size does not match ansatz");
  ComplexMatrix rho = rho0.matrix();
  for (const auto& u : circuit_unitaries(a, theta)) rho = noise.apply(u * rho * u.adjoint());
  const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
  return DensityOperator(a.n_qubits(), herm);
}

// ---------------------------------------------------------------------------
// Ansatz files

namespace detail {

inline bool parse_mnemonic(const std::string& word, GateKind& kind, PauliAxis& axis) {
  std::string w;
  for (char c : word) w.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  std::string axis_part;
  if (w.size() == 3 && w.rfind("CR", 0) == 0) {
    kind = GateKind::controlled_rotation;
    axis_part = w.substr(2);
  } else if (w.size() == 2 && w[0] == 'R') {
    kind = GateKind::single_rotation;
    axis_part = w.substr(1);
  } else {
    return false;
  }
  if (axis_part == "X") axis = PauliAxis::X;
  else if (axis_part == "Y") axis = PauliAxis::Y;
  else if (axis_part == "Z") axis = PauliAxis::Z;
  else return false;
  return true;
}

}  // namespace detail

/// Grammar in docs/formats.md. A `qubits n` line is optional; without it
/// the register size is one more than the largest qubit index used.
inline Ansatz parse_ansatz(std::istream& in) {
  std::vector<GateSpec> gates;
  int declared = -1;
  int highest = -1;
  std::string line;
  int line_no = 0;
  auto fail = [&line_no](const std::string& msg) {
    throw DomainError("ansatz line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "qubits") {
      if (!(ls >> declared) || declared < 1) fail("expected a positive qubit count");
      continue;
    }
    GateKind kind{};
    PauliAxis axis{};
    if (!detail::parse_mnemonic(word, kind, axis)) fail("unknown gate '" + word + "'");
    int control = -1;
    int target = -1;
    int k = 0;
    if (kind == GateKind::controlled_rotation && !(ls >> control)) fail("expected control qubit");
    if (!(ls >> target)) fail("expected target qubit");
    if (!(ls >> k)) fail("expected parameter index");
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
    if (k != static_cast<int>(gates.size()) + 1) {
      fail("parameter index must be " + std::to_string(gates.size() + 1));
    }
    if (target < 0 || (kind == GateKind::controlled_rotation && control < 0)) fail("negative qubit index");
    highest = std::max({highest, target, control});
    gates.push_back({kind, target, control, axis, k - 1});
  }
  if (gates.empty()) throw DomainError("ansatz file has no gates");
  const int n = declared > 0 ? declared : highest + 1;
  if (highest >= n) throw DomainError("ansatz: qubit index exceeds declared register size");
  return Ansatz(n, std::move(gates));
}

inline Ansatz parse_ansatz(const std::string& text) {
  std::istringstream in(text);
  return parse_ansatz(in);
}

inline Ansatz load_ansatz_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open ansatz file '" + path + "'");
  return parse_ansatz(in);
}

inline std::string format_ansatz(const Ansatz& a) {
  std::ostringstream os;
  os << "qubits " << a.n_qubits() << "\n";
  for (const auto& g : a.gates()) {
    os << g.mnemonic() << ' ';
    if (g.kind == GateKind::controlled_rotation) os << g.control << ' ';
    os << g.target << ' ' << g.parameter + 1 << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Presets

namespace presets {

/// RY q0, RY q1, CRY 0->1, RY q0, RY q1.
inline Ansatz five_param() {
  using A = PauliAxis;
  return Ansatz(2, {GateSpec::rotation(A::Y, 0, 0), GateSpec::rotation(A::Y, 1, 1),
                    GateSpec::controlled(A::Y, 0, 1, 2), GateSpec::rotation(A::Y, 0, 3),
                    GateSpec::rotation(A::Y, 1, 4)});
}

/// RY, RZ layers on both qubits around a CRX 0->1.
inline Ansatz nine_param() {
  using A = PauliAxis;
  return Ansatz(2, {GateSpec::rotation(A::Y, 0, 0), GateSpec::rotation(A::Y, 1, 1),
                    GateSpec::rotation(A::Z, 0, 2), GateSpec::rotation(A::Z, 1, 3),
                    GateSpec::controlled(A::X, 0, 1, 4), GateSpec::rotation(A::Y, 0, 5),
                    GateSpec::rotation(A::Y, 1, 6), GateSpec::rotation(A::Z, 0, 7),
                    GateSpec::rotation(A::Z, 1, 8)});
}

inline std::vector<std::string> names() { return {"five_param", "nine_param"}; }

inline Ansatz by_name(const std::string& name) {
  if (name == "five_param") return five_param();
  if (name == "nine_param") return nine_param();
  throw DomainError("unknown ansatz preset '" + name + "'");
}

}  // namespace presets

/// Uniformly random gates. With n_qubits == 1 only single rotations appear.
template <typename Rng>
Ansatz random_ansatz(int n_qubits, int n_params, Rng& rng, double controlled_fraction = 0.3) {
  if (n_params < 1) throw DomainError("random_ansatz: need at least one parameter");
  std::uniform_int_distribution<int> axis(0, 2);
  std::uniform_int_distribution<int> qubit(0, n_qubits - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GateSpec> gates;
  for (int k = 0; k < n_params; ++k) {
    const auto ax = static_cast<PauliAxis>(axis(rng));
    const int t = qubit(rng);
    if (n_qubits > 1 && unit(rng) < controlled_fraction) {
      int c = qubit(rng);
      while (c == t) c = qubit(rng);
      gates.push_back(GateSpec::controlled(ax, c, t, k));
    } else {
      gates.push_back(GateSpec::rotation(ax, t, k));
    }
  }
  return Ansatz(n_qubits, std::move(gates));
}

template <typename Rng>
RealVector random_angles(int n, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  RealVector theta(n);
  for (int i = 0; i < n; ++i) theta(i) = angle(rng);
  return theta;
}

}  // namespace qprop
