#pragma once

// Closed-form error bounds for noisy variational evolution.

#include "qprop/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace qprop {

/// A bound that may be undefined (invalid) or infinite (divergent).
class BoundValue {
 public:
  enum class Status { finite, divergent, invalid };

  static BoundValue finite(double v) { return BoundValue(Status::finite, v); }
  static BoundValue divergent() { return BoundValue(Status::divergent, std::numeric_limits<double>::infinity()); }
  static BoundValue invalid() { return BoundValue(Status::invalid, std::numeric_limits<double>::quiet_NaN()); }

  Status status() const { return status_; }
  bool is_finite() const { return status_ == Status::finite; }

  /// Throws DomainError unless finite.
  double value() const {
    if (status_ != Status::finite) throw DomainError("bound is " + std::string(status_name()));
    return value_;
  }
  double value_or(double fallback) const { return is_finite() ? value_ : fallback; }

  const char* status_name() const {
    switch (status_) {
      case Status::finite: return "finite";
      case Status::divergent: return "inf";
      case Status::invalid: return "invalid";
    }
    return "invalid";
  }

 private:
  BoundValue(Status s, double v) : status_(s), value_(v) {}
  Status status_;
  double value_;
};

namespace bounds {

namespace detail {

inline void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("noise probability must lie in [0, 1]");
}

inline void check_count(int n) {
  if (n < 1) throw DomainError("parameter count must be >= 1");
}

/// 1 - (1-p)^k, accurate for small p.
inline double survival_loss(double p, int k) { return -std::expm1(k * std::log1p(-p)); }

}  // namespace detail

/// Relative-error bound on ||M^err - M|| / ||M||.
inline double relative_M_bound(double norm_M, int n, double p) {
  return detail::survival_loss(p, 2 * n) * (1.0 + n / (2.0 * norm_M));
}

/// Relative-error bound on ||Y^err - Y|| / ||Y||.
inline double relative_Y_bound(double norm_Y, int n, double p) {
  return detail::survival_loss(p, n) * (1.0 + std::sqrt(static_cast<double>(n)) / std::sqrt(2.0 * norm_Y));
}

inline double theorem1_bound(double cond_M, double norm_M, double norm_Y, int n, double p) {
  detail::check_probability(p);
  detail::check_count(n);
  if (!(cond_M >= 1.0)) throw DomainError("theorem1_bound: cond(M) must be >= 1");
  if (!(norm_M > 0.0) || !(norm_Y > 0.0)) throw DomainError("theorem1_bound: norms must be positive");
  if (p == 0.0) return 0.0;
  return cond_M * (relative_M_bound(norm_M, n, p) + relative_Y_bound(norm_Y, n, p));
}

/// Largest admissible p; invalid when 2 N^2 delta >= N + 2 ||M||.
inline BoundValue theorem1_pmax(double norm_M, int n, double delta) {
  detail::check_count(n);
  if (!(delta > 0.0)) throw DomainError("theorem1_pmax: delta must be positive");
  if (!(norm_M > 0.0)) throw DomainError("theorem1_pmax: ||M|| must be positive");
  const double radicand = 1.0 - 2.0 * n * n * delta / (n + 2.0 * norm_M);
  if (!(radicand > 0.0)) return BoundValue::invalid();
  return BoundValue::finite(-std::expm1(std::log(radicand) / (2.0 * n)));
}

/// (1 - (1-p)^N) / (1-p)^N; divergent at p = 1.
inline BoundValue theorem2_relative_error(int n, double p) {
  detail::check_probability(p);
  detail::check_count(n);
  if (p == 1.0) return BoundValue::divergent();
  const double keep = std::pow(1.0 - p, n);
  return BoundValue::finite(detail::survival_loss(p, n) / keep);
}

/// cond / (1 - cond rel_dM) (rel_dM + rel_dY); invalid when cond rel_dM >= 1.
inline BoundValue higham_bound(double cond_M, double rel_dM, double rel_dY) {
  if (!(cond_M >= 1.0)) throw DomainError("higham_bound: cond(M) must be >= 1");
  if (!(rel_dM >= 0.0) || !(rel_dY >= 0.0)) throw DomainError("higham_bound: relative perturbations must be >= 0");
  const double denom = 1.0 - cond_M * rel_dM;
  if (!(denom > 0.0)) return BoundValue::invalid();
  return BoundValue::finite(cond_M / denom * (rel_dM + rel_dY));
}

/// The Higham inequality fed with the general-noise relative bounds.
inline BoundValue loose_theorem1_bound(double cond_M, double norm_M, double norm_Y, int n, double p) {
  detail::check_probability(p);
  detail::check_count(n);
  if (!(norm_M > 0.0) || !(norm_Y > 0.0)) throw DomainError("loose_theorem1_bound: norms must be positive");
  return higham_bound(cond_M, relative_M_bound(norm_M, n, p), relative_Y_bound(norm_Y, n, p));
}

/// Largest cond(M) for which the loose bound is defined.
inline BoundValue loose_condition_cap(double norm_M, int n, double p) {
  detail::check_probability(p);
  detail::check_count(n);
  if (p == 0.0) return BoundValue::divergent();
  return BoundValue::finite(2.0 * norm_M / (detail::survival_loss(p, 2 * n) * (n + 2.0 * norm_M)));
}

struct ElementwiseCaps {
  double M;
  double Y;
};

inline ElementwiseCaps elementwise_caps(int n, double p) {
  detail::check_probability(p);
  detail::check_count(n);
  return {0.5 * detail::survival_loss(p, 2 * n), detail::survival_loss(p, n) / std::sqrt(2.0)};
}

/// (-1)^j C(n+1, j+1) for j = 0..n.
inline std::vector<std::int64_t> pascal_coefficients(int n) {
  if (n < 0) throw DomainError("pascal_coefficients: n must be >= 0");
  if (n > 60) throw DomainError("pascal_coefficients: n too large for 64-bit coefficients");
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  std::int64_t c = 1;  // C(n+1, 0)
  for (int j = 0; j <= n; ++j) {
    // C(n+1, j+1) = C(n+1, j) (n+1-j) / (j+1); exact in 128-bit.
    c = static_cast<std::int64_t>(static_cast<__int128>(c) * (n + 1 - j) / (j + 1));
    out.push_back(j % 2 == 0 ? c : -c);
  }
  return out;
}

}  // namespace bounds

struct BoundReport {
  double p = 0.0;
  int N = 1;
  double cond_M = 1.0;
  double norm_M = 1.0;
  double norm_Y = 1.0;
  double delta = 0.04;
  BoundValue theorem1 = BoundValue::invalid();
  BoundValue theorem1_pmax = BoundValue::invalid();
  BoundValue theorem2 = BoundValue::invalid();
  BoundValue loose = BoundValue::invalid();
};

/// theorem1 is only filled in when p <= theorem1_pmax.
inline BoundReport make_bound_report(double cond_M, double norm_M, double norm_Y, int n, double p, double delta) {
  BoundReport r;
  r.p = p;
  r.N = n;
  r.cond_M = cond_M;
  r.norm_M = norm_M;
  r.norm_Y = norm_Y;
  r.delta = delta;
  r.theorem1_pmax = bounds::theorem1_pmax(norm_M, n, delta);
  if (r.theorem1_pmax.is_finite() && p <= r.theorem1_pmax.value()) {
    r.theorem1 = BoundValue::finite(bounds::theorem1_bound(cond_M, norm_M, norm_Y, n, p));
  }
  r.theorem2 = bounds::theorem2_relative_error(n, p);
  r.loose = bounds::loose_theorem1_bound(cond_M, norm_M, norm_Y, n, p);
  return r;
}

}  // namespace qprop
