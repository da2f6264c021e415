#pragma once

// Dense linear algebra for small (dim <= 64) complex and real matrices.
// Everything here is a pure function of its inputs.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace qprop {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Raised when operands have incompatible shapes.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input violates a numeric precondition (non-Hermitian,
/// non-unitary, probabilities out of range, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces a non-finite or internally
/// inconsistent result.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace linalg {

enum class NormKind { frobenius, spectral };

inline const char* to_string(NormKind kind) {
  return kind == NormKind::frobenius ? "frobenius" : "spectral";
}

inline NormKind parse_norm_kind(const std::string& s) {
  if (s == "frobenius") return NormKind::frobenius;
  if (s == "spectral") return NormKind::spectral;
  throw DomainError("unknown norm kind '" + s + "'");
}

/// sigma_min / sigma_max below this ratio counts as singular.
inline constexpr double kSingularRatio = 1e-12;

template <typename Derived>
double frobenius_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) throw DimensionError("frobenius_norm: empty matrix");
  return a.norm();
}

template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(a.eval());
  return svd.singularValues();
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) throw DimensionError("spectral_norm: empty matrix");
  return singular_values(a)(0);
}

template <typename Derived>
double matrix_norm(const Eigen::MatrixBase<Derived>& a, NormKind kind) {
  return kind == NormKind::frobenius ? frobenius_norm(a) : spectral_norm(a);
}

/// ||A|| * ||A^-1|| in the chosen norm; +infinity for (numerically)
/// singular A.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived>& a,
                        NormKind kind = NormKind::frobenius) {
  if (a.rows() != a.cols() || a.size() == 0) {
    throw DimensionError("condition_number: matrix must be square and nonempty");
  }
  const Eigen::VectorXd s = singular_values(a);
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin / smax < kSingularRatio) {
    return std::numeric_limits<double>::infinity();
  }
  if (kind == NormKind::spectral) return smax / smin;
  return std::sqrt(s.squaredNorm()) * std::sqrt(s.cwiseInverse().squaredNorm());
}

/// Minimum-norm least-squares solution of M x = b. Singular values at or
/// below svd_cutoff * sigma_max are treated as zero; exact zeros are always
/// dropped.
inline RealVector solve_regularized(const RealMatrix& m, const RealVector& b,
                                    double svd_cutoff) {
  if (m.rows() != m.cols()) throw DimensionError("solve_regularized: M must be square");
  if (m.rows() != b.size()) throw DimensionError("solve_regularized: b does not match M");
  if (!(svd_cutoff >= 0.0)) throw DomainError("solve_regularized: svd_cutoff must be >= 0");
  RealVector x = RealVector::Zero(m.cols());
  if (m.size() == 0) return x;

  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double threshold = svd_cutoff * s(0);
  const RealVector utb = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold && s(i) > 0.0) {
      x += (utb(i) / s(i)) * svd.matrixV().col(i);
    }
  }
  return x;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// f(H) for Hermitian H through its eigendecomposition.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f, double tol = 1e-10) {
  if (h.rows() != h.cols()) throw DimensionError("hermitian_function: matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (!is_hermitian(h, tol * scale)) {
    throw DomainError("hermitian_function: input is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  const Eigen::VectorXd& w = eig.eigenvalues();
  Eigen::VectorXcd fw(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) fw(i) = f(w(i));
  return eig.eigenvectors() * fw.asDiagonal() * eig.eigenvectors().adjoint();
}

/// e^{sH} for Hermitian H.
inline ComplexMatrix hermitian_exp(const ComplexMatrix& h, double s) {
  return hermitian_function(h, [s](double w) { return Complex(std::exp(s * w), 0.0); });
}

/// e^{-iHt} for Hermitian H.
inline ComplexMatrix unitary_propagator(const ComplexMatrix& h, double t) {
  return hermitian_function(h, [t](double w) { return std::exp(Complex(0.0, -w * t)); });
}

/// Principal square root of a Hermitian PSD matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  return hermitian_function(
      a, [](double w) { return Complex(std::sqrt(std::max(w, 0.0)), 0.0); }, 1e-8);
}

inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (h + h.adjoint()),
                                                   Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

/// Kronecker product a (x) b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Tr[A^dagger B] without forming the product.
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

/// Tr[A B] without forming the product.
inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.transpose().cwiseProduct(b)).sum();
}

}  // namespace linalg
}  // namespace qprop
