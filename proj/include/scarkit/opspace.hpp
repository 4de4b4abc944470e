#pragma once

// Operator strings on a periodic ring of qubits.
//
// Conventions used throughout the library:
//   * basis index bit j is the occupation of site j (site 0 is the least significant bit);
//   * |0> is the sigma^z = +1 state, |1> = sd|0>, so n = (1 - z) / 2;
//   * sd = (x - i y) / 2, s = (x + i y) / 2.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scarkit/errors.hpp"

namespace scarkit {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kDropTol = 1e-14;
inline constexpr double kHermTol = 1e-12;
inline constexpr int kMaxDenseSites = 14;
inline constexpr int kMaxStateSites = 26;

enum class SiteOp : std::uint8_t { I, Sd, S, N, X, Y, Z };
enum class Basis { Pauli, Boson };

inline const char* site_name(SiteOp op) {
  switch (op) {
    case SiteOp::I: return "id";
    case SiteOp::Sd: return "sd";
    case SiteOp::S: return "s";
    case SiteOp::N: return "n";
    case SiteOp::X: return "x";
    case SiteOp::Y: return "y";
    case SiteOp::Z: return "z";
  }
  return "?";
}

inline std::optional<SiteOp> parse_site_op(std::string_view s) {
  if (s == "id" || s == "1") return SiteOp::I;
  if (s == "sd") return SiteOp::Sd;
  if (s == "s") return SiteOp::S;
  if (s == "n") return SiteOp::N;
  if (s == "x") return SiteOp::X;
  if (s == "y") return SiteOp::Y;
  if (s == "z") return SiteOp::Z;
  return std::nullopt;
}

inline const char* basis_name(Basis b) { return b == Basis::Pauli ? "pauli" : "boson"; }

inline bool in_basis(SiteOp op, Basis b) {
  if (op == SiteOp::I) return true;
  if (b == Basis::Boson) return op == SiteOp::Sd || op == SiteOp::S || op == SiteOp::N;
  return op == SiteOp::X || op == SiteOp::Y || op == SiteOp::Z;
}

/// Matrix in the ordered basis (|0>, |1>).
inline Eigen::Matrix2cd site_matrix(SiteOp op) {
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (op) {
    case SiteOp::I: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case SiteOp::Sd: m(1, 0) = 1.0; break;
    case SiteOp::S: m(0, 1) = 1.0; break;
    case SiteOp::N: m(1, 1) = 1.0; break;
    case SiteOp::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case SiteOp::Y: m(0, 1) = -I; m(1, 0) = I; break;
    case SiteOp::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
  }
  return m;
}

inline SiteOp site_dagger(SiteOp op) {
  if (op == SiteOp::Sd) return SiteOp::S;
  if (op == SiteOp::S) return SiteOp::Sd;
  return op;
}

/// Coefficients of a 2x2 matrix on the four elements of `b`, identity first.
inline std::array<std::pair<SiteOp, cplx>, 4> expand_site(const Eigen::Matrix2cd& m, Basis b) {
  const cplx I(0.0, 1.0);
  if (b == Basis::Boson) {
    return {{{SiteOp::I, m(0, 0)},
             {SiteOp::Sd, m(1, 0)},
             {SiteOp::S, m(0, 1)},
             {SiteOp::N, m(1, 1) - m(0, 0)}}};
  }
  return {{{SiteOp::I, 0.5 * (m(0, 0) + m(1, 1))},
           {SiteOp::X, 0.5 * (m(0, 1) + m(1, 0))},
           {SiteOp::Y, 0.5 * (I * m(0, 1) - I * m(1, 0))},
           {SiteOp::Z, 0.5 * (m(0, 0) - m(1, 1))}}};
}

inline int ring_mod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

/// Smallest contiguous arc on a ring of `n` sites covering all `sites` (sorted, distinct).
/// Ties go to the smallest start.
inline std::pair<int, int> covering_arc(const std::vector<int>& sites, int n) {
  if (sites.empty()) return {0, 0};
  if (sites.size() == 1) return {sites[0], 1};
  int best_start = 0;
  int best_len = n + 1;
  const int k = static_cast<int>(sites.size());
  for (int i = 0; i < k; ++i) {
    // arc starts at sites[i] and ends at sites[i-1]
    const int start = sites[i];
    const int end = sites[(i + k - 1) % k];
    const int len = ring_mod(end - start, n) + 1;
    if (len < best_len || (len == best_len && start < best_start)) {
      best_len = len;
      best_start = start;
    }
  }
  return {best_start, best_len};
}

struct Factor {
  int site = 0;
  SiteOp op = SiteOp::I;
  auto operator<=>(const Factor&) const = default;
};

/// Product of single-site operators, at most one per site, identities omitted.
class OperatorString {
 public:
  OperatorString() = default;

  explicit OperatorString(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::erase_if(factors_, [](const Factor& f) { return f.op == SiteOp::I; });
    std::sort(factors_.begin(), factors_.end());
    for (std::size_t i = 1; i < factors_.size(); ++i) {
      if (factors_[i].site == factors_[i - 1].site)
        throw precondition_error("OperatorString: repeated site " + std::to_string(factors_[i].site));
    }
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_identity() const { return factors_.empty(); }

  std::vector<int> sites() const {
    std::vector<int> s;
    s.reserve(factors_.size());
    for (const auto& f : factors_) s.push_back(f.site);
    return s;
  }

  int start(int n_sites) const { return covering_arc(sites(), n_sites).first; }
  int length(int n_sites) const { return covering_arc(sites(), n_sites).second; }

  /// Site operators along the covering arc, first and last non-identity.
  std::vector<SiteOp> ops(int n_sites) const {
    auto [st, len] = covering_arc(sites(), n_sites);
    std::vector<SiteOp> out(static_cast<std::size_t>(len), SiteOp::I);
    for (const auto& f : factors_) out[static_cast<std::size_t>(ring_mod(f.site - st, n_sites))] = f.op;
    return out;
  }

  SiteOp at(int site) const {
    for (const auto& f : factors_)
      if (f.site == site) return f.op;
    return SiteOp::I;
  }

  /// Number of creation-type factors (sd or n); only meaningful in the boson basis.
  int creations() const {
    int c = 0;
    for (const auto& f : factors_) c += (f.op == SiteOp::Sd || f.op == SiteOp::N);
    return c;
  }
  int annihilations() const {
    int c = 0;
    for (const auto& f : factors_) c += (f.op == SiteOp::S || f.op == SiteOp::N);
    return c;
  }

  bool in(Basis b) const {
    return std::all_of(factors_.begin(), factors_.end(), [b](const Factor& f) { return in_basis(f.op, b); });
  }

  OperatorString dagger() const {
    std::vector<Factor> f = factors_;
    for (auto& x : f) x.op = site_dagger(x.op);
    return OperatorString(std::move(f));
  }

  OperatorString translated(int shift, int n_sites) const {
    std::vector<Factor> f = factors_;
    for (auto& x : f) x.site = ring_mod(x.site + shift, n_sites);
    return OperatorString(std::move(f));
  }

  auto operator<=>(const OperatorString&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// Finite linear combination of operator strings on a ring of `n_sites` qubits.
class LocalOperator {
 public:
  using TermMap = std::map<OperatorString, cplx>;

  LocalOperator() = default;
  explicit LocalOperator(int n_sites) : n_(n_sites) {
    if (n_sites < 1 || n_sites > 62) throw precondition_error("LocalOperator: n_sites must be in [1, 62]");
  }

  static LocalOperator identity(int n_sites, cplx c = 1.0) {
    LocalOperator op(n_sites);
    op.add(OperatorString(), c);
    return op;
  }

  /// Product of the listed factors times `c`; repeated sites are multiplied out.
  /// A site whose factors are all boson (Pauli) type is re-expanded in the boson (Pauli) basis.
  static LocalOperator product(int n_sites, const std::vector<Factor>& factors, cplx c = 1.0) {
    LocalOperator out(n_sites);
    std::map<int, std::vector<SiteOp>> by_site;
    for (const auto& f : factors) {
      if (f.site < 0 || f.site >= n_sites)
        throw precondition_error("site " + std::to_string(f.site) + " outside chain of " + std::to_string(n_sites));
      by_site[f.site].push_back(f.op);
    }
    std::vector<std::pair<int, std::array<std::pair<SiteOp, cplx>, 4>>> expansions;
    for (const auto& [site, ops] : by_site) {
      Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
      bool boson = true;
      for (SiteOp op : ops) {
        m = m * site_matrix(op);
        if (op != SiteOp::I && !in_basis(op, Basis::Boson)) boson = false;
      }
      expansions.emplace_back(site, expand_site(m, boson ? Basis::Boson : Basis::Pauli));
    }
    std::vector<Factor> cur;
    auto rec = [&](auto&& self, std::size_t k, cplx w) -> void {
      if (std::abs(w) == 0.0) return;
      if (k == expansions.size()) {
        out.add(OperatorString(cur), w);
        return;
      }
      for (const auto& [op, a] : expansions[k].second) {
        if (a == cplx(0.0)) continue;
        cur.push_back({expansions[k].first, op});
        self(self, k + 1, w * a);
        cur.pop_back();
      }
    };
    rec(rec, 0, c);
    return out;
  }

  int n_sites() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  cplx coefficient(const OperatorString& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  /// Longest covering arc among the terms.
  int range() const {
    int r = 0;
    for (const auto& [s, c] : terms_) r = std::max(r, s.length(n_));
    return r;
  }

  bool in(Basis b) const {
    return std::all_of(terms_.begin(), terms_.end(), [b](const auto& kv) { return kv.first.in(b); });
  }

  void add(const OperatorString& s, cplx c) {
    for (const auto& f : s.factors())
      if (f.site < 0 || f.site >= n_) throw precondition_error("string site outside chain");
    auto [it, inserted] = terms_.try_emplace(s, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kDropTol) terms_.erase(it);
  }

  LocalOperator& operator+=(const LocalOperator& o) {
    check_same(o);
    for (const auto& [s, c] : o.terms_) add(s, c);
    return *this;
  }
  LocalOperator& operator-=(const LocalOperator& o) {
    check_same(o);
    for (const auto& [s, c] : o.terms_) add(s, -c);
    return *this;
  }
  LocalOperator& operator*=(cplx a) {
    if (std::abs(a) == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= a;
      if (std::abs(it->second) < kDropTol) it = terms_.erase(it);
      else ++it;
    }
    return *this;
  }

  friend LocalOperator operator+(LocalOperator a, const LocalOperator& b) { return a += b; }
  friend LocalOperator operator-(LocalOperator a, const LocalOperator& b) { return a -= b; }
  friend LocalOperator operator*(cplx a, LocalOperator b) { return b *= a; }
  friend LocalOperator operator*(LocalOperator b, cplx a) { return b *= a; }
  friend LocalOperator operator*(double a, LocalOperator b) { return b *= cplx(a); }
  LocalOperator operator-() const { return cplx(-1.0) * *this; }

  LocalOperator translated(int shift) const {
    LocalOperator out(n_);
    for (const auto& [s, c] : terms_) out.add(s.translated(shift, n_), c);
    return out;
  }

  void check_same(const LocalOperator& o) const {
    if (o.n_ != n_)
      throw dimension_error("operators on chains of " + std::to_string(n_) + " and " + std::to_string(o.n_) +
                            " sites");
  }

 private:
  int n_ = 1;
  TermMap terms_;
};

inline LocalOperator site_op(int n_sites, int site, SiteOp op, cplx c = 1.0) {
  return LocalOperator::product(n_sites, {{ring_mod(site, n_sites), op}}, c);
}

inline LocalOperator dagger(const LocalOperator& op) {
  LocalOperator out(op.n_sites());
  for (const auto& [s, c] : op.terms()) out.add(s.dagger(), std::conj(c));
  return out;
}

/// Exact re-expansion of every term in the chosen fixed basis.
inline LocalOperator to_basis(const LocalOperator& op, Basis b) {
  LocalOperator out(op.n_sites());
  for (const auto& [s, c] : op.terms()) {
    if (s.in(b)) {
      out.add(s, c);
      continue;
    }
    std::vector<std::pair<int, std::array<std::pair<SiteOp, cplx>, 4>>> ex;
    for (const auto& f : s.factors()) ex.emplace_back(f.site, expand_site(site_matrix(f.op), b));
    std::vector<Factor> cur;
    auto rec = [&](auto&& self, std::size_t k, cplx w) -> void {
      if (k == ex.size()) {
        out.add(OperatorString(cur), w);
        return;
      }
      for (const auto& [o, a] : ex[k].second) {
        if (a == cplx(0.0)) continue;
        cur.push_back({ex[k].first, o});
        self(self, k + 1, w * a);
        cur.pop_back();
      }
    };
    rec(rec, 0, c);
  }
  return out;
}

inline LocalOperator to_pauli_basis(const LocalOperator& op) { return to_basis(op, Basis::Pauli); }
inline LocalOperator to_boson_basis(const LocalOperator& op) { return to_basis(op, Basis::Boson); }

/// Operator product a*b, expanded in `b_out`.
inline LocalOperator multiply(const LocalOperator& a, const LocalOperator& b, Basis b_out = Basis::Pauli) {
  a.check_same(b);
  LocalOperator out(a.n_sites());
  for (const auto& [sa, ca] : a.terms()) {
    for (const auto& [sb, cb] : b.terms()) {
      std::vector<Factor> f = sa.factors();
      f.insert(f.end(), sb.factors().begin(), sb.factors().end());
      // product() multiplies in list order per site, so a's factor precedes b's.
      out += to_basis(LocalOperator::product(a.n_sites(), f, ca * cb), b_out);
    }
  }
  return out;
}

inline LocalOperator commutator(const LocalOperator& a, const LocalOperator& b) {
  return multiply(a, b) - multiply(b, a);
}

/// Hilbert-Schmidt inner product tr(a^dagger b) / 2^N.
inline cplx hs_inner(const LocalOperator& a, const LocalOperator& b) {
  a.check_same(b);
  const LocalOperator pa = to_pauli_basis(a);
  const LocalOperator pb = to_pauli_basis(b);
  cplx acc = 0.0;
  for (const auto& [s, c] : pa.terms()) acc += std::conj(c) * pb.coefficient(s);
  return acc;
}

inline double hs_norm(const LocalOperator& a) {
  double acc = 0.0;
  const LocalOperator p = to_pauli_basis(a);
  for (const auto& [s, c] : p.terms()) acc += std::norm(c);
  return std::sqrt(acc);
}

inline double max_coeff_diff(const LocalOperator& a, const LocalOperator& b) {
  double m = 0.0;
  const LocalOperator p = to_pauli_basis(a - b);
  for (const auto& [s, c] : p.terms()) m = std::max(m, std::abs(c));
  return m;
}

inline bool approx_equal(const LocalOperator& a, const LocalOperator& b, double tol = kHermTol) {
  return max_coeff_diff(a, b) <= tol;
}

inline bool is_hermitian(const LocalOperator& op, double tol = kHermTol) {
  const LocalOperator p = to_pauli_basis(op);
  for (const auto& [s, c] : p.terms())
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

/// Contiguous interval [left .. right] on the ring, walking left to right in increasing site order.
class Region {
 public:
  Region(int left, int right, int n_sites) : left_(ring_mod(left, n_sites)), n_(n_sites) {
    length_ = ring_mod(right - left, n_sites) + 1;
    if (length_ < 1 || length_ > n_sites - 1)
      throw precondition_error("Region: length must be in [1, N-1]");
  }
  static Region from_length(int left, int length, int n_sites) { return Region(left, left + length - 1, n_sites); }

  int left() const { return left_; }
  int right() const { return ring_mod(left_ + length_ - 1, n_); }
  int length() const { return length_; }
  int n_sites() const { return n_; }
  bool contains(int site) const { return ring_mod(site - left_, n_) < length_; }

  /// Sites in walking order.
  std::vector<int> sites() const {
    std::vector<int> s;
    for (int k = 0; k < length_; ++k) s.push_back(ring_mod(left_ + k, n_));
    return s;
  }
  Region complement() const { return Region(right() + 1, left_ - 1, n_); }

 private:
  int left_;
  int length_ = 1;
  int n_;
};

/// Keep the strings of the `b` expansion that lie entirely inside `lam`.
/// The identity string has empty support and is always kept.
inline LocalOperator truncate(const LocalOperator& op, const Region& lam, Basis b,
                              std::optional<int> declared_range = std::nullopt) {
  if (lam.n_sites() != op.n_sites()) throw dimension_error("truncate: region on a different chain");
  const int r = declared_range.value_or(op.range());
  if (lam.length() <= 2 * r)
    throw precondition_error("truncate: region length " + std::to_string(lam.length()) +
                             " must exceed twice the operator range " + std::to_string(r));
  LocalOperator out(op.n_sites());
  const LocalOperator expanded = to_basis(op, b);
  for (const auto& [s, c] : expanded.terms()) {
    const auto& f = s.factors();
    if (std::all_of(f.begin(), f.end(), [&](const Factor& x) { return lam.contains(x.site); })) out.add(s, c);
  }
  return out;
}

/// Bit-mask form of a string; every supported string is a monomial matrix.
struct CompiledString {
  std::uint64_t flip = 0;
  std::uint64_t req_mask = 0;
  std::uint64_t req_val = 0;
  std::uint64_t y_mask = 0;
  std::uint64_t z_mask = 0;
  cplx coeff = 1.0;

  CompiledString(const OperatorString& s, cplx c) : coeff(c) {
    for (const auto& f : s.factors()) {
      const std::uint64_t bit = std::uint64_t{1} << f.site;
      switch (f.op) {
        case SiteOp::I: break;
        case SiteOp::Sd: flip |= bit; req_mask |= bit; break;
        case SiteOp::S: flip |= bit; req_mask |= bit; req_val |= bit; break;
        case SiteOp::N: req_mask |= bit; req_val |= bit; break;
        case SiteOp::X: flip |= bit; break;
        case SiteOp::Y: flip |= bit; y_mask |= bit; break;
        case SiteOp::Z: z_mask |= bit; break;
      }
    }
  }

  bool acts(std::uint64_t b) const { return (b & req_mask) == req_val; }

  /// Amplitude of the image of basis state b (valid when acts(b)).
  cplx amplitude(std::uint64_t b) const {
    static const cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int k = std::popcount(y_mask & ~b) + 3 * std::popcount(y_mask & b) + 2 * std::popcount(z_mask & b);
    return coeff * kPow[k & 3];
  }
};

inline std::vector<CompiledString> compile(const LocalOperator& op) {
  std::vector<CompiledString> out;
  out.reserve(op.size());
  for (const auto& [s, c] : op.terms()) out.emplace_back(s, c);
  return out;
}

inline int sites_for_dimension(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return (Eigen::Index{1} << n) == dim ? n : -1;
}

/// op |psi> for a dense amplitude vector of length 2^N.
inline Vec apply(const LocalOperator& op, const Vec& psi) {
  const int n = op.n_sites();
  if (n > kMaxStateSites) throw capacity_error("apply: dense states limited to 26 sites");
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (static_cast<std::uint64_t>(psi.size()) != dim)
    throw dimension_error("apply: operator on " + std::to_string(n) + " sites, vector of size " +
                          std::to_string(psi.size()));
  Vec out = Vec::Zero(psi.size());
  for (const auto& cs : compile(op)) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      if (!cs.acts(b)) continue;
      const cplx a = psi[static_cast<Eigen::Index>(b)];
      if (a == cplx(0.0)) continue;
      out[static_cast<Eigen::Index>(b ^ cs.flip)] += cs.amplitude(b) * a;
    }
  }
  return out;
}

/// Sparse state: basis index -> amplitude. Lets W-type checks run on long chains.
using SparseState = std::map<std::uint64_t, cplx>;

inline SparseState apply(const LocalOperator& op, const SparseState& psi) {
  SparseState out;
  for (const auto& cs : compile(op)) {
    for (const auto& [b, a] : psi) {
      if (!cs.acts(b)) continue;
      out[b ^ cs.flip] += cs.amplitude(b) * a;
    }
  }
  std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) == 0.0; });
  return out;
}

inline Mat to_matrix(const LocalOperator& op) {
  const int n = op.n_sites();
  if (n > kMaxDenseSites) throw capacity_error("to_matrix: N must be <= 14");
  const std::uint64_t dim = std::uint64_t{1} << n;
  Mat m = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& cs : compile(op))
    for (std::uint64_t b = 0; b < dim; ++b)
      if (cs.acts(b)) m(static_cast<Eigen::Index>(b ^ cs.flip), static_cast<Eigen::Index>(b)) += cs.amplitude(b);
  return m;
}

// ---------------------------------------------------------------------------
// Text format: one term per line (or ';' separated), `coeff * op@site op@site ...`

inline std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string format_coeff(cplx c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0) return format_real(c.imag()) + "i";
  std::string im = format_real(c.imag());
  if (im[0] != '-') im = "+" + im;
  return "(" + format_real(c.real()) + im + "i)";
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw precondition_error("bad number '" + s + "'");
  }
  if (pos != s.size()) throw precondition_error("bad number '" + s + "'");
  return v;
}

inline cplx parse_coeff(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '(' && ch != ')') s += ch;
  if (s.empty()) throw precondition_error("empty coefficient");
  if (s.back() != 'i' && s.back() != 'j') return parse_real(s);
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string::npos) return {0.0, imag_of(s)};
  return {parse_real(s.substr(0, split)), imag_of(s.substr(split))};
}

inline std::string to_string(const LocalOperator& op) {
  std::ostringstream os;
  for (const auto& [s, c] : op.terms()) {
    os << format_coeff(c) << " *";
    if (s.is_identity()) os << " id@0";
    for (const auto& f : s.factors()) os << ' ' << site_name(f.op) << '@' << f.site;
    os << '\n';
  }
  return os.str();
}

inline LocalOperator parse_operator(std::string_view text, int n_sites) {
  LocalOperator out(n_sites);
  std::string buf(text);
  for (char& ch : buf)
    if (ch == ';') ch = '\n';
  std::istringstream lines(buf);
  std::string line;
  while (std::getline(lines, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    cplx c = 1.0;
    std::string ops = line;
    if (auto star = line.find('*'); star != std::string::npos) {
      c = parse_coeff(line.substr(0, star));
      ops = line.substr(star + 1);
    } else if (line.find('@') == std::string::npos) {
      c = parse_coeff(line);
      ops.clear();
    }
    std::vector<Factor> factors;
    std::istringstream tok(ops);
    std::string t;
    while (tok >> t) {
      const auto at = t.find('@');
      if (at == std::string::npos) throw precondition_error("expected op@site, got '" + t + "'");
      auto kind = parse_site_op(t.substr(0, at));
      if (!kind) throw precondition_error("unknown site operator '" + t.substr(0, at) + "'");
      const int site = static_cast<int>(parse_real(t.substr(at + 1)));
      factors.push_back({site, *kind});
    }
    out += LocalOperator::product(n_sites, factors, c);
  }
  return out;
}

}  // namespace scarkit
