#pragma once

// Builtin operators and the canonical decomposition of W-parent Hamiltonians
//   H = Omega 1 + omega N_tot + t H_ImHop + sum_X h_X,  h_X |W> = h_X |0..0> = 0.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scarkit/opspace.hpp"

namespace scarkit {

namespace detail {

inline std::uint64_t bit(int site) { return std::uint64_t{1} << site; }

/// Normal-ordered s^dagger_C s_A in the boson basis.
inline OperatorString normal_ordered(std::uint64_t create, std::uint64_t annihilate, int n) {
  std::vector<Factor> f;
  for (int j = 0; j < n; ++j) {
    const bool c = create >> j & 1;
    const bool a = annihilate >> j & 1;
    if (c && a) f.push_back({j, SiteOp::N});
    else if (c) f.push_back({j, SiteOp::Sd});
    else if (a) f.push_back({j, SiteOp::S});
  }
  return OperatorString(f);
}

inline std::uint64_t create_mask(const OperatorString& s) {
  std::uint64_t m = 0;
  for (const auto& f : s.factors())
    if (f.op == SiteOp::Sd || f.op == SiteOp::N) m |= bit(f.site);
  return m;
}

inline std::uint64_t annihilate_mask(const OperatorString& s) {
  std::uint64_t m = 0;
  for (const auto& f : s.factors())
    if (f.op == SiteOp::S || f.op == SiteOp::N) m |= bit(f.site);
  return m;
}

inline void require_sites(int n, int range, const std::string& name) {
  if (n < range) throw precondition_error(name + ": chain of " + std::to_string(n) + " sites is shorter than range " +
                                          std::to_string(range));
}

}  // namespace detail

inline LocalOperator hop(int n, int j, int k, cplx c = 1.0) {
  return LocalOperator::product(n, {{ring_mod(j, n), SiteOp::Sd}, {ring_mod(k, n), SiteOp::S}}, c);
}

inline LocalOperator n_tot(int n) {
  LocalOperator h(n);
  for (int j = 0; j < n; ++j) h += site_op(n, j, SiteOp::N);
  return h;
}

inline LocalOperator h_rehop(int n) {
  detail::require_sites(n, 2, "h_rehop");
  LocalOperator h(n);
  for (int j = 0; j < n; ++j) {
    h += site_op(n, j, SiteOp::N, 0.5) + site_op(n, j + 1, SiteOp::N, 0.5);
    h -= hop(n, j, j + 1, 0.5) + hop(n, j + 1, j, 0.5);
  }
  return h;
}

inline LocalOperator h_imhop(int n) {
  detail::require_sites(n, 2, "h_imhop");
  const cplx half_i(0.0, 0.5);
  LocalOperator h(n);
  for (int j = 0; j < n; ++j) h += hop(n, j, j + 1, half_i) - hop(n, j + 1, j, half_i);
  return h;
}

/// Correlated hop s^dagger_j ... s^dagger_{j+p-1} s_{j+1} ... s_{j+p} at anchor j.
inline LocalOperator correlated_hop(int n, int j, int p, cplx c = 1.0) {
  std::vector<Factor> f{{ring_mod(j, n), SiteOp::Sd}};
  for (int k = 1; k < p; ++k) f.push_back({ring_mod(j + k, n), SiteOp::N});
  f.push_back({ring_mod(j + p, n), SiteOp::S});
  return LocalOperator::product(n, f, c);
}

/// i sum_j (s^dagger_j..s^dagger_{j+p-1} s_{j+1}..s_{j+p} - h.c.); note no factor 1/2.
inline LocalOperator h_imhop_p(int n, int p) {
  if (p < 1) throw precondition_error("h_imhop_p: p must be >= 1");
  detail::require_sites(n, p + 1, "h_imhop_p");
  LocalOperator h(n);
  for (int j = 0; j < n; ++j) {
    LocalOperator l = correlated_hop(n, j, p, cplx(0.0, 1.0));
    h += l + dagger(l);
  }
  return h;
}

/// (i/2) sum_j (s^dagger_j n_{j+1} s_{j+2} - h.c.).
inline LocalOperator h_imhop2(int n) { return 0.5 * h_imhop_p(n, 2); }

inline LocalOperator h_heis(int n) {
  LocalOperator h = h_rehop(n);
  for (int j = 0; j < n; ++j) h -= LocalOperator::product(n, {{j, SiteOp::N}, {ring_mod(j + 1, n), SiteOp::N}});
  return h;
}

/// sum_j (S_j x S_{j+1}) . axis with S = sigma / 2.
inline LocalOperator h_dmi(int n, char axis = 'z') {
  detail::require_sites(n, 2, "h_dmi");
  SiteOp a = SiteOp::X, b = SiteOp::Y;
  if (axis == 'x') { a = SiteOp::Y; b = SiteOp::Z; }
  else if (axis == 'y') { a = SiteOp::Z; b = SiteOp::X; }
  else if (axis != 'z') throw precondition_error("h_dmi: axis must be x, y or z");
  LocalOperator h(n);
  for (int j = 0; j < n; ++j) {
    const int k = ring_mod(j + 1, n);
    h += LocalOperator::product(n, {{j, a}, {k, b}}, 0.25);
    h -= LocalOperator::product(n, {{j, b}, {k, a}}, 0.25);
  }
  return h;
}

/// s^dagger_j s_{j+a} + s^dagger_{j+a} s_j - n_j - n_{j+a}.
inline LocalOperator p_re(int n, int j, int alpha) {
  LocalOperator h = hop(n, j, j + alpha) + hop(n, j + alpha, j);
  h -= site_op(n, j, SiteOp::N) + site_op(n, j + alpha, SiteOp::N);
  return h;
}

/// i s^dagger_j s_{j+a} - i sum_{m=1..a} s^dagger_{j-1+m} s_{j+m} + h.c.
inline LocalOperator p_im(int n, int j, int alpha) {
  const cplx I(0.0, 1.0);
  LocalOperator l = hop(n, j, j + alpha, I);
  for (int m = 1; m <= alpha; ++m) l -= hop(n, j - 1 + m, j + m, I);
  return l + dagger(l);
}

/// (i/2)(s^dagger_j s_{j+1} - s^dagger_{j+1} s_j - n_j + n_{j+1}); annihilates |W> and the vacuum.
inline LocalOperator p_nonherm(int n, int j) {
  const cplx half_i(0.0, 0.5);
  LocalOperator h = hop(n, j, j + 1, half_i) - hop(n, j + 1, j, half_i);
  h += site_op(n, j + 1, SiteOp::N, half_i) - site_op(n, j, SiteOp::N, half_i);
  return h;
}

inline LocalOperator h_chop(int n, double alpha, double beta) {
  return alpha * h_rehop(n) + beta * h_imhop(n);
}

using Params = std::map<std::string, double>;

inline double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

/// Named operator lookup used by the CLI and config files.
inline LocalOperator builtin(const std::string& name, int n, const Params& p = {}) {
  const int j = static_cast<int>(param(p, "j", 0));
  const int alpha = static_cast<int>(param(p, "alpha", 1));
  if (name == "n_tot") return n_tot(n);
  if (name == "identity") return LocalOperator::identity(n);
  if (name == "h_rehop") return h_rehop(n);
  if (name == "h_imhop") return h_imhop(n);
  if (name == "h_imhop2") return h_imhop2(n);
  if (name == "h_imhop_p") return h_imhop_p(n, static_cast<int>(param(p, "p", 2)));
  if (name == "h_heis") return h_heis(n);
  if (name == "h_dmi") {
    const int ax = static_cast<int>(param(p, "axis", 2));
    return h_dmi(n, ax == 0 ? 'x' : ax == 1 ? 'y' : 'z');
  }
  if (name == "h_chop") return h_chop(n, param(p, "a", 0.5), param(p, "b", 0.5));
  if (name == "p_re") return p_re(n, j, alpha);
  if (name == "p_im") return p_im(n, j, static_cast<int>(param(p, "alpha", 2)));
  if (name == "p_nonherm") return p_nonherm(n, j);
  throw precondition_error("unknown builtin operator '" + name + "'");
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"n_tot", "identity", "h_rehop", "h_imhop", "h_imhop2", "h_imhop_p",
                                              "h_heis", "h_dmi", "h_chop", "p_re", "p_im", "p_nonherm"};
  return names;
}

// ---------------------------------------------------------------------------
// Hermitian generators that annihilate |W> and the vacuum (the strictly local building blocks).

/// All generators with support inside [j, j+range-1] that touch site j.
inline std::vector<LocalOperator> annihilator_generators(int n, int j, int range) {
  using detail::bit;
  const cplx I(0.0, 1.0);
  std::vector<LocalOperator> out;
  for (int a = 1; a < range; ++a) out.push_back(p_re(n, j, a));
  for (int a = 2; a < range; ++a) out.push_back(p_im(n, j, a));
  std::vector<std::uint64_t> subsets;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << range); ++s)
    if (std::popcount(s) >= 2) subsets.push_back(s);
  auto place = [&](std::uint64_t local) {
    std::uint64_t m = 0;
    for (int k = 0; k < range; ++k)
      if (local >> k & 1) m |= bit(ring_mod(j + k, n));
    return m;
  };
  auto add_pair = [&](const LocalOperator& l) {
    out.push_back(l + dagger(l));
    out.push_back(I * l - I * dagger(l));
  };
  // s^dagger_C (s_k - s_j) + h.c., |C| >= 2
  for (std::uint64_t c : subsets) {
    for (int k = 1; k < range; ++k) {
      LocalOperator l(n);
      l.add(detail::normal_ordered(place(c), place(std::uint64_t{1} << k), n), 1.0);
      l.add(detail::normal_ordered(place(c), place(1), n), -1.0);
      add_pair(l);
    }
  }
  // s^dagger_C s_A + h.c., |C|, |A| >= 2, anchored at j
  for (std::size_t x = 0; x < subsets.size(); ++x) {
    for (std::size_t y = x; y < subsets.size(); ++y) {
      if (((subsets[x] | subsets[y]) & 1) == 0) continue;
      LocalOperator l(n);
      l.add(detail::normal_ordered(place(subsets[x]), place(subsets[y]), n), 1.0);
      if (x == y) out.push_back(l);
      else add_pair(l);
    }
  }
  return out;
}

/// Random Hermitian sum of generators of range <= `range`, coefficients uniform in [-1, 1].
/// With translation_invariant the same coefficients are used at every anchor.
template <class Rng>
LocalOperator random_type1(int n, int range, Rng& rng, bool translation_invariant = false) {
  if (n <= 2 * range) throw precondition_error("random_type1: need N > 2 * range");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LocalOperator h(n);
  std::vector<double> coeffs;
  for (int j = 0; j < n; ++j) {
    const auto gens = annihilator_generators(n, j, range);
    if (!translation_invariant || coeffs.empty()) {
      coeffs.clear();
      for (std::size_t k = 0; k < gens.size(); ++k) coeffs.push_back(u(rng));
    }
    for (std::size_t k = 0; k < gens.size(); ++k) h += coeffs[k] * gens[k];
  }
  return h;
}

// ---------------------------------------------------------------------------

struct TableCondition {
  std::string cls;
  bool satisfied = true;
  std::vector<std::string> violating_terms;
  std::optional<cplx> lambda;
};

namespace detail {

inline std::string describe(const OperatorString& s, cplx c) {
  LocalOperator tmp(1 + (s.factors().empty() ? 0 : s.factors().back().site));
  tmp.add(s, c);
  return trim(to_string(tmp));
}

inline double coeff_scale(const LocalOperator& op) {
  double m = 0.0;
  for (const auto& [s, c] : op.terms()) m = std::max(m, std::abs(c));
  return std::max(m, 1.0);
}

}  // namespace detail

/// Coefficient conditions for G |W> = lambda |W>, one entry per (n, m) class.
/// The returned lambda excludes the identity coefficient.
inline std::vector<TableCondition> verify_table(const LocalOperator& g, double tol = 1e-10) {
  const int n = g.n_sites();
  const LocalOperator b = to_boson_basis(g);
  const double scale = detail::coeff_scale(b) * tol;
  TableCondition c10{"n>=1,m=0", true, {}, {}}, c01{"n=0,m=1", true, {}, {}}, c21{"n>=2,m=1", true, {}, {}},
      c11{"n=1,m=1", true, {}, {}}, c2{"m>=2", true, {}, {}};
  std::vector<cplx> rows(static_cast<std::size_t>(n), 0.0);
  cplx sum01 = 0.0;
  std::map<std::uint64_t, cplx> sum21;
  for (const auto& [s, c] : b.terms()) {
    const int cr = s.creations();
    const int an = s.annihilations();
    if (an == 0 && cr >= 1) {
      if (std::abs(c) > scale) {
        c10.satisfied = false;
        c10.violating_terms.push_back(detail::describe(s, c));
      }
    } else if (an == 1 && cr == 0) {
      sum01 += c;
    } else if (an == 1 && cr == 1) {
      const auto cm = detail::create_mask(s);
      rows[static_cast<std::size_t>(std::countr_zero(cm))] += c;
    } else if (an == 1 && cr >= 2) {
      sum21[detail::create_mask(s)] += c;
    }
  }
  if (std::abs(sum01) > scale) {
    c01.satisfied = false;
    c01.violating_terms.push_back("sum of s_k coefficients = " + format_coeff(sum01));
  }
  for (const auto& [cm, v] : sum21) {
    if (std::abs(v) > scale) {
      c21.satisfied = false;
      c21.violating_terms.push_back("row sum " + format_coeff(v) + " for creation set mask " + std::to_string(cm));
    }
  }
  const cplx lam = rows.empty() ? cplx(0.0) : rows[0];
  for (int j = 0; j < n; ++j) {
    if (std::abs(rows[static_cast<std::size_t>(j)] - lam) > scale) {
      c11.satisfied = false;
      c11.violating_terms.push_back("row " + std::to_string(j) + " sum " + format_coeff(rows[static_cast<std::size_t>(j)]));
    }
  }
  if (c11.satisfied) c11.lambda = lam;
  return {c10, c01, c21, c11, c2};
}

inline bool table_satisfied(const std::vector<TableCondition>& t) {
  return std::all_of(t.begin(), t.end(), [](const TableCondition& c) { return c.satisfied; });
}

inline SparseState sparse_w(int n) {
  SparseState w;
  for (int j = 0; j < n; ++j) w[detail::bit(j)] = 1.0 / std::sqrt(static_cast<double>(n));
  return w;
}

inline double sparse_norm(const SparseState& s) {
  double acc = 0.0;
  for (const auto& [b, a] : s) acc += std::norm(a);
  return std::sqrt(acc);
}

/// <W|H|W> and ||(H - E)|W>|| on any chain length (sparse evaluation).
inline std::pair<cplx, double> w_eigen_residual(const LocalOperator& h) {
  const SparseState w = sparse_w(h.n_sites());
  SparseState hw = apply(h, w);
  cplx e = 0.0;
  for (const auto& [b, a] : w) {
    auto it = hw.find(b);
    if (it != hw.end()) e += std::conj(a) * it->second;
  }
  for (const auto& [b, a] : w) hw[b] -= e * a;
  return {e, sparse_norm(hw)};
}

struct CanonicalForm {
  cplx omega_id = 0.0;
  double omega_n = 0.0;
  double t_im = 0.0;
  std::vector<LocalOperator> annihilators;
  double residual_norm = 0.0;
  double energy_w = 0.0;

  LocalOperator reconstruct(int n) const {
    LocalOperator h = LocalOperator::identity(n, omega_id) + omega_n * n_tot(n) + t_im * h_imhop(n);
    for (const auto& x : annihilators) h += x;
    return h;
  }
};

namespace detail {

inline void check_w_parent(const LocalOperator& h, double rel_tol) {
  const int r = h.range();
  if (h.n_sites() <= 2 * r)
    throw precondition_error("decompose: need N > 2R (N=" + std::to_string(h.n_sites()) + ", R=" + std::to_string(r) +
                             ")");
  auto [e, res] = w_eigen_residual(h);
  const double scale = std::max(hs_norm(h), 1.0);
  if (res > rel_tol * scale)
    throw classification_error("decompose: |W> is not an eigenstate, ||(H-E)W|| = " + format_real(res), res);
}

/// Groups every string outside the identity and hopping classes into families of W- and vacuum-annihilating generators.
/// Key: (kind, mask a, mask b). Hermitian grouping pairs each string with its conjugate.
inline std::map<std::tuple<int, std::uint64_t, std::uint64_t>, LocalOperator> group_rest(const LocalOperator& b,
                                                                                         bool hermitian) {
  std::map<std::tuple<int, std::uint64_t, std::uint64_t>, LocalOperator> groups;
  const int n = b.n_sites();
  for (const auto& [s, c] : b.terms()) {
    const int cr = s.creations();
    const int an = s.annihilations();
    if ((cr == 0 && an == 0) || (cr == 1 && an == 1)) continue;
    const std::uint64_t cm = create_mask(s);
    const std::uint64_t am = annihilate_mask(s);
    std::tuple<int, std::uint64_t, std::uint64_t> key;
    if (an == 1 && cr >= 2) key = {0, cm, 0};
    else if (cr == 1 && an >= 2) key = hermitian ? std::tuple<int, std::uint64_t, std::uint64_t>{0, am, 0}
                                               : std::tuple<int, std::uint64_t, std::uint64_t>{1, cm, am};
    else if (cr == 0 && an == 1 && !hermitian) key = {2, 0, 0};
    else if (hermitian) key = {1, std::min(cm, am), std::max(cm, am)};
    else key = {1, cm, am};
    auto [it, ins] = groups.try_emplace(key, LocalOperator(n));
    it->second.add(s, c);
  }
  return groups;
}

}  // namespace detail

/// Canonical form of a Hermitian Hamiltonian with |W> as an eigenstate.
/// Hopping cleanup removes range-R couplings first and descends to range 2.
inline CanonicalForm decompose(const LocalOperator& h, double rel_tol = 1e-10) {
  const int n = h.n_sites();
  if (!is_hermitian(h)) throw precondition_error("decompose: operator is not Hermitian");
  detail::check_w_parent(h, rel_tol);
  const int r = h.range();
  const LocalOperator b = to_boson_basis(h);
  CanonicalForm out;
  out.omega_id = b.coefficient(OperatorString());

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [s, c] : b.terms()) {
    if (s.creations() != 1 || s.annihilations() != 1) continue;
    const int j = std::countr_zero(detail::create_mask(s));
    const int k = std::countr_zero(detail::annihilate_mask(s));
    a(j, k) = c.real();
    im(j, k) = c.imag();
  }
  // symmetric part: a_jk P^Re_jk plus the row sums on the diagonal
  double omega = 0.0;
  for (int j = 0; j < n; ++j) {
    omega += a.row(j).sum();
    for (int k = j + 1; k < n; ++k)
      if (std::abs(a(j, k)) > kDropTol) out.annihilators.push_back(a(j, k) * p_re(n, j, k - j));
  }
  out.omega_n = omega / n;
  // antisymmetric part: strip range alpha >= 2 with P^Im, the rest is uniform nearest-neighbour
  for (int alpha = r - 1; alpha >= 2; --alpha) {
    for (int j = 0; j < n; ++j) {
      const int k = ring_mod(j + alpha, n);
      const double x = im(j, k);
      if (std::abs(x) <= kDropTol) continue;
      out.annihilators.push_back(x * p_im(n, j, alpha));
      im(j, k) -= x;
      im(k, j) += x;
      for (int m = 1; m <= alpha; ++m) {
        const int p = ring_mod(j - 1 + m, n), q = ring_mod(j + m, n);
        im(p, q) += x;
        im(q, p) -= x;
      }
    }
  }
  double beta = 0.0;
  for (int j = 0; j < n; ++j) beta += im(j, ring_mod(j + 1, n));
  out.t_im = 2.0 * beta / n;

  for (auto& [key, g] : detail::group_rest(b, true)) out.annihilators.push_back(std::move(g));

  out.energy_w = (out.omega_id + out.omega_n).real();
  out.residual_norm = hs_norm(out.reconstruct(n) - h);
  return out;
}

struct GeneralForm {
  cplx omega_id = 0.0;
  cplx omega_n = 0.0;
  std::vector<LocalOperator> annihilators;
  double residual_norm = 0.0;

  LocalOperator reconstruct(int n) const {
    LocalOperator g = LocalOperator::identity(n, omega_id) + omega_n * n_tot(n);
    for (const auto& x : annihilators) g += x;
    return g;
  }
};

/// G = Omega 1 + omega N_tot + sum_X g_X for an operator with |W> as an eigenstate (no Hermiticity).
inline GeneralForm decompose_general(const LocalOperator& g, double rel_tol = 1e-10) {
  const int n = g.n_sites();
  detail::check_w_parent(g, rel_tol);
  const LocalOperator b = to_boson_basis(g);
  GeneralForm out;
  out.omega_id = b.coefficient(OperatorString());
  Mat c = Mat::Zero(n, n);
  for (const auto& [s, v] : b.terms()) {
    if (s.creations() != 1 || s.annihilations() != 1) continue;
    c(std::countr_zero(detail::create_mask(s)), std::countr_zero(detail::annihilate_mask(s))) = v;
  }
  out.omega_n = c.sum() / static_cast<double>(n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k || std::abs(c(j, k)) <= kDropTol) continue;
      out.annihilators.push_back(hop(n, j, k, c(j, k)) - site_op(n, j, SiteOp::N, c(j, k)));
    }
  }
  for (auto& [key, x] : detail::group_rest(b, false)) out.annihilators.push_back(std::move(x));
  out.residual_norm = hs_norm(out.reconstruct(n) - g);
  return out;
}

}  // namespace scarkit
