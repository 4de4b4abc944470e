#pragma once

// Dense states over the 2^N computational basis (site 0 = least significant bit).

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "scarkit/opspace.hpp"

namespace scarkit {

using StateVector = Vec;

inline void check_state_sites(int n) {
  if (n < 1 || n > kMaxStateSites) throw capacity_error("dense states need 1 <= N <= 26");
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k));
}

inline StateVector basis_state(int n, std::uint64_t bits) {
  check_state_sites(n);
  StateVector v = StateVector::Zero(Eigen::Index{1} << n);
  v[static_cast<Eigen::Index>(bits)] = 1.0;
  return v;
}

inline StateVector vacuum(int n) { return basis_state(n, 0); }

/// Uniform superposition of all p-particle configurations on the given sites.
inline StateVector dicke_on(int n, const std::vector<int>& sites, int p) {
  check_state_sites(n);
  const int m = static_cast<int>(sites.size());
  if (p < 0 || p > m) throw precondition_error("w_p: p out of range");
  StateVector v = StateVector::Zero(Eigen::Index{1} << n);
  const double amp = 1.0 / std::sqrt(binom(m, p));
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << m); ++sub) {
    if (std::popcount(sub) != p) continue;
    std::uint64_t bits = 0;
    for (int k = 0; k < m; ++k)
      if (sub >> k & 1) bits |= std::uint64_t{1} << sites[static_cast<std::size_t>(k)];
    v[static_cast<Eigen::Index>(bits)] = amp;
  }
  return v;
}

inline std::vector<int> all_sites(int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = j;
  return s;
}

inline StateVector w_p(int n, int p) {
  if (p < 0 || p > n) throw precondition_error("w_p: need 0 <= p <= N");
  return dicke_on(n, all_sites(n), p);
}

inline StateVector w_state(int n) { return w_p(n, 1); }

/// Boosted W state with amplitude sign * i q j on site j, q = 2 pi m / N.
/// The default sign -1 gives e^{-iqj}.
inline StateVector w_q(int n, int m, int sign = -1) {
  check_state_sites(n);
  StateVector v = StateVector::Zero(Eigen::Index{1} << n);
  const double q = 2.0 * std::numbers::pi * ring_mod(m, n) / n;
  for (int j = 0; j < n; ++j)
    v[Eigen::Index{1} << j] = std::polar(1.0 / std::sqrt(static_cast<double>(n)), sign * q * j);
  return v;
}

/// |W^p> on the M sites first, first+1, ..., times vacuum elsewhere.
inline StateVector droplet(int n, int m, int p, int first = 0) {
  if (m < 1 || m > n) throw precondition_error("droplet: need 1 <= M <= N");
  if (p < 0 || p > m) throw precondition_error("droplet: need 0 <= p <= M");
  std::vector<int> s;
  for (int k = 0; k < m; ++k) s.push_back(ring_mod(first + k, n));
  return dicke_on(n, s, p);
}

inline StateVector product_state(int n, std::uint64_t occupied_bits) { return basis_state(n, occupied_bits); }

/// Translation by `shift` sites: amplitude of configuration b moves to b shifted.
inline StateVector translate(const StateVector& psi, int shift) {
  const int n = sites_for_dimension(psi.size());
  if (n < 0) throw dimension_error("translate: not a qubit-chain vector");
  shift = ring_mod(shift, n);
  StateVector out = StateVector::Zero(psi.size());
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t b = 0; b <= full; ++b) {
    const std::uint64_t t = shift == 0 ? b : (((b << shift) | (b >> (n - shift))) & full);
    out[static_cast<Eigen::Index>(t)] = psi[static_cast<Eigen::Index>(b)];
  }
  return out;
}

struct SchmidtTerm {
  double weight;
  std::string left;
  std::string right;
  int particles_left;
};

struct SchmidtSplit {
  Region region;
  std::vector<SchmidtTerm> coefficients;
};

/// Exact Schmidt split of |W^p> across `region` | complement.
/// The term with l particles in the region has weight sqrt(C(|X|,l) C(N-|X|,p-l) / C(N,p));
/// terms with l > |X| or p - l > N - |X| are absent.
inline SchmidtSplit schmidt_w_family(int n, int p, const Region& region) {
  if (region.n_sites() != n) throw dimension_error("schmidt_w_family: region on a different chain");
  if (p < 0 || p > n) throw precondition_error("schmidt_w_family: need 0 <= p <= N");
  const int x = region.length();
  SchmidtSplit out{region, {}};
  const double total = binom(n, p);
  for (int l = std::max(0, p - (n - x)); l <= std::min(p, x); ++l) {
    const double w = std::sqrt(binom(x, l) * binom(n - x, p - l) / total);
    out.coefficients.push_back({w, "W^" + std::to_string(l) + "_X", "W^" + std::to_string(p - l) + "_Xc", l});
  }
  return out;
}

/// Amplitude matrix psi[(bits in region), (bits in complement)].
inline Mat reshape_bipartite(const StateVector& psi, const Region& region) {
  const int n = sites_for_dimension(psi.size());
  if (n != region.n_sites()) throw dimension_error("reshape_bipartite: size mismatch");
  const std::vector<int> a = region.sites();
  const std::vector<int> b = region.complement().sites();
  Mat m(Eigen::Index{1} << a.size(), Eigen::Index{1} << b.size());
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << a.size()); ++i) {
    std::uint64_t base = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (i >> k & 1) base |= std::uint64_t{1} << a[k];
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << b.size()); ++j) {
      std::uint64_t bits = base;
      for (std::size_t k = 0; k < b.size(); ++k)
        if (j >> k & 1) bits |= std::uint64_t{1} << b[k];
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = psi[static_cast<Eigen::Index>(bits)];
    }
  }
  return m;
}

/// Schmidt weights from a dense SVD, descending.
inline std::vector<double> schmidt_dense(const StateVector& psi, const Region& region) {
  Eigen::JacobiSVD<Mat> svd(reshape_bipartite(psi, region));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

}  // namespace scarkit
