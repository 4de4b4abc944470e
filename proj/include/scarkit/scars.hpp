#pragma once

// Energy expectations, variances and lifetime bounds for W-family states.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "scarkit/canonical.hpp"
#include "scarkit/fit.hpp"
#include "scarkit/opspace.hpp"
#include "scarkit/states.hpp"

namespace scarkit {

inline void require_hermitian(const LocalOperator& h, const char* who) {
  if (!is_hermitian(h)) throw precondition_error(std::string(who) + ": operator is not Hermitian");
}

/// <psi|G|psi> for any G (no Hermiticity requirement).
inline cplx bilinear(const LocalOperator& g, const StateVector& psi) { return psi.dot(apply(g, psi)); }

inline double expectation(const LocalOperator& h, const StateVector& psi) {
  require_hermitian(h, "expectation");
  return bilinear(h, psi).real();
}

/// <H^2> - <H>^2 computed as ||H psi||^2 - <H>^2.
inline double variance(const LocalOperator& h, const StateVector& psi) {
  require_hermitian(h, "variance");
  const Vec hp = apply(h, psi);
  const double e = psi.dot(hp).real();
  return hp.squaredNorm() - e * e;
}

/// Heisenberg bound 1 / (2 sqrt(var)) with hbar = 1.
inline double lifetime_bound(double var) {
  if (var < -1e-12) throw precondition_error("lifetime_bound: negative variance");
  if (var <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * std::sqrt(var));
}

struct ScanPoint {
  double control;
  double expectation;
  double variance;
};

struct VarianceScan {
  std::vector<ScanPoint> points;
  PowerFit fit{};
  bool fitted = false;

  /// Fit variance against control over points with lo <= control <= hi.
  PowerFit fit_variance(double lo, double hi) const { return fit_column(lo, hi, [](const ScanPoint& p) { return p.variance; }); }

  PowerFit fit_column(double lo, double hi, const std::function<double(const ScanPoint&)>& column) const {
    std::vector<double> x, y;
    for (const auto& p : points)
      if (p.control >= lo && p.control <= hi) {
        x.push_back(p.control);
        y.push_back(column(p));
      }
    return power_fit(x, y);
  }
};

using HamiltonianBuilder = std::function<LocalOperator(int)>;

namespace detail {

inline void require_w_parent(const LocalOperator& h) {
  auto [e, res] = w_eigen_residual(h);
  (void)e;
  if (res > 1e-10 * std::max(hs_norm(h), 1.0))
    throw classification_error("variance scan: |W> is not an eigenstate", res);
}

}  // namespace detail

/// Variance of w_q(N, m) for each m; control is q = 2 pi m / N.
inline VarianceScan variance_scan_q(const HamiltonianBuilder& build, int n, const std::vector<int>& m_list) {
  const LocalOperator h = build(n);
  require_hermitian(h, "variance_scan_q");
  detail::require_w_parent(h);
  VarianceScan out;
  for (int m : m_list) {
    const StateVector psi = w_q(n, m);
    out.points.push_back({2.0 * std::numbers::pi * m / n, expectation(h, psi), std::max(variance(h, psi), 0.0)});
  }
  return out;
}

/// Variance of w_q(N, m) at fixed m across chain sizes; control is q = 2 pi m / N.
inline VarianceScan variance_scan_q_sizes(const HamiltonianBuilder& build, const std::vector<int>& n_list, int m = 1) {
  VarianceScan out;
  for (int n : n_list) {
    auto s = variance_scan_q(build, n, {m});
    out.points.push_back(s.points.front());
  }
  return out;
}

/// Variance of w_p(N, p) across chain sizes; control is N.
inline VarianceScan variance_scan_N(const HamiltonianBuilder& build, int p, const std::vector<int>& n_list) {
  VarianceScan out;
  for (int n : n_list) {
    if (n > kMaxDenseSites) throw capacity_error("variance_scan_N: limited to N <= 14");
    const LocalOperator h = build(n);
    require_hermitian(h, "variance_scan_N");
    detail::require_w_parent(h);
    const StateVector psi = w_p(n, p);
    out.points.push_back({static_cast<double>(n), expectation(h, psi), std::max(variance(h, psi), 0.0)});
  }
  return out;
}

/// Seeded translation-invariant random type-I Hamiltonian with fixed local pattern.
inline HamiltonianBuilder random_type1_builder(std::uint64_t seed, int range = 3, double t_im = 0.0, double omega = 0.0) {
  return [=](int n) {
    std::mt19937_64 rng(seed);
    LocalOperator h = random_type1(n, range, rng, true);
    if (t_im != 0.0) h += t_im * h_imhop(n);
    if (omega != 0.0) h += omega * n_tot(n);
    return h;
  };
}

}  // namespace scarkit
