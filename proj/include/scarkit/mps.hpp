#pragma once

// Translation-invariant MPS |psi> = sum Tr[A^{s_1} ... A^{s_N}] |s_1 ... s_N>,
// transfer matrices, push-through symmetry data and boundary operators.
// Dense qudit vectors use site 0 as the least-significant base-d digit.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "scarkit/boundary.hpp"
#include "scarkit/errors.hpp"
#include "scarkit/opspace.hpp"

namespace scarkit {

struct MPSTensor {
  int d = 1;
  int bond = 1;
  std::vector<Mat> a;  // a[s] is bond x bond

  MPSTensor() = default;
  explicit MPSTensor(std::vector<Mat> mats) : a(std::move(mats)) {
    if (a.empty()) throw precondition_error("MPSTensor: no physical components");
    d = static_cast<int>(a.size());
    bond = static_cast<int>(a[0].rows());
    for (const auto& m : a)
      if (m.rows() != bond || m.cols() != bond) throw dimension_error("MPSTensor: components must be square and equal");
  }
};

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

/// E = sum_s A^s (x) conj(A^s).
inline Mat transfer_matrix(const MPSTensor& t) {
  Mat e = Mat::Zero(t.bond * t.bond, t.bond * t.bond);
  for (const auto& m : t.a) e += kron(m, m.conjugate());
  return e;
}

/// Eigenvalues sorted by decreasing magnitude (ties by decreasing real part).
inline std::vector<cplx> transfer_spectrum(const MPSTensor& t) {
  Eigen::ComplexEigenSolver<Mat> es(transfer_matrix(t), false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    if (std::abs(std::abs(x) - std::abs(y)) > 1e-12) return std::abs(x) > std::abs(y);
    return x.real() > y.real();
  });
  return ev;
}

/// Full rank when the smallest singular value exceeds 1e-10 of the largest.
inline bool transfer_full_rank(const MPSTensor& t, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Mat> svd(transfer_matrix(t));
  const auto& s = svd.singularValues();
  return s[s.size() - 1] > rel_tol * s[0];
}

/// All k-site products A^{s_0} ... A^{s_{k-1}}, indexed by s_0 + d s_1 + ... .
inline std::vector<Mat> blocked(const MPSTensor& t, int k) {
  std::vector<Mat> cur{Mat::Identity(t.bond, t.bond)};
  for (int site = 0; site < k; ++site) {
    std::vector<Mat> next(cur.size() * static_cast<std::size_t>(t.d));
    for (int s = 0; s < t.d; ++s)
      for (std::size_t i = 0; i < cur.size(); ++i)
        next[i + cur.size() * static_cast<std::size_t>(s)] = cur[i] * t.a[static_cast<std::size_t>(s)];
    cur = std::move(next);
  }
  return cur;
}

/// Columns vec(B^s) of the blocked tensor.
inline Mat blocked_matrix(const std::vector<Mat>& b) {
  const Eigen::Index dd = b[0].size();
  Mat out(dd, static_cast<Eigen::Index>(b.size()));
  for (std::size_t s = 0; s < b.size(); ++s) out.col(static_cast<Eigen::Index>(s)) = b[s].reshaped();
  return out;
}

inline int numeric_rank(const Mat& m, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  while (r < s.size() && s[r] > rel_tol * s[0]) ++r;
  return r;
}

/// Smallest k whose blocked span is all bond x bond matrices; nullopt when none up to max_block.
inline std::optional<int> injectivity_length(const MPSTensor& t, int max_block = 6) {
  if (max_block < 1 || max_block > 6) throw precondition_error("injectivity_length: max_block must be in [1, 6]");
  for (int k = 1; k <= max_block; ++k)
    if (numeric_rank(blocked_matrix(blocked(t, k))) == t.bond * t.bond) return k;
  return std::nullopt;
}

/// exp(i theta L) for Hermitian L.
inline Mat unitary_exp(const Mat& l, double theta) {
  if ((l - l.adjoint()).norm() > 1e-12 * std::max(1.0, l.norm())) throw precondition_error("unitary_exp: generator not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(l);
  Vec ph(l.rows());
  for (Eigen::Index i = 0; i < l.rows(); ++i) ph[i] = std::polar(1.0, theta * es.eigenvalues()[i]);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline std::vector<Mat> twisted(const MPSTensor& t, const Mat& u) {
  std::vector<Mat> out(t.a.size(), Mat::Zero(t.bond, t.bond));
  for (int s = 0; s < t.d; ++s)
    for (int sp = 0; sp < t.d; ++sp) out[static_cast<std::size_t>(s)] += u(s, sp) * t.a[static_cast<std::size_t>(sp)];
  return out;
}

struct PushThrough {
  std::optional<Mat> v;  // present when the push-through residual is below tol
  Mat v_candidate;
  double phi = 0.0;
  double residual = 0.0;
  double unitarity_defect = 0.0;
};

namespace detail {

/// Dominant eigenvector of X -> sum_s B^s X A^{s dagger} as a bond x bond matrix.
inline std::pair<cplx, Mat> dominant_mixed(const std::vector<Mat>& b, const std::vector<Mat>& a) {
  const Eigen::Index dd = a[0].rows();
  Mat m = Mat::Zero(dd * dd, dd * dd);
  for (std::size_t s = 0; s < a.size(); ++s) m += kron(a[s].conjugate(), b[s]);
  Eigen::ComplexEigenSolver<Mat> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best]) + 1e-12) best = i;
  return {es.eigenvalues()[best], es.eigenvectors().col(best).reshaped(dd, dd)};
}

}  // namespace detail

/// Solves sum_s' U_{ss'} A^{s'} = e^{i phi} V A^s V^dagger by the twisted-transfer fixed point V = X rho^{-1}.
/// Gauge: det V = 1, then the D-th root of unity with the largest Re tr V.
inline PushThrough push_through_check(const MPSTensor& t, const Mat& l, double theta, double tol = 1e-10) {
  if (l.rows() != t.d || l.cols() != t.d) throw dimension_error("push_through_check: generator does not match d");
  const Mat u = unitary_exp(l, theta);
  const auto at = twisted(t, u);
  auto [lam0, rho] = detail::dominant_mixed(t.a, t.a);
  auto [lam, x] = detail::dominant_mixed(at, t.a);
  (void)lam0;
  (void)lam;
  PushThrough out;
  const Eigen::Index dd = t.bond;
  Mat v;
  Eigen::PartialPivLU<Mat> lu(rho);
  if (std::abs(lu.determinant()) < 1e-14) {
    out.residual = 1.0;
    out.v_candidate = Mat::Identity(dd, dd);
    return out;
  }
  v = x * lu.inverse();
  const cplx det = v.determinant();
  if (std::abs(det) < 1e-300) {
    out.residual = 1.0;
    out.v_candidate = Mat::Identity(dd, dd);
    return out;
  }
  v /= std::pow(det, 1.0 / static_cast<double>(dd));
  double best_re = -1e300;
  Mat best = v;
  for (Eigen::Index k = 0; k < dd; ++k) {
    const Mat cand = std::polar(1.0, 2.0 * std::numbers::pi * k / dd) * v;
    if (cand.trace().real() > best_re + 1e-12) {
      best_re = cand.trace().real();
      best = cand;
    }
  }
  v = best;
  cplx num = 0.0;
  double den = 0.0, scale = 0.0;
  for (int s = 0; s < t.d; ++s) {
    const Mat p = v * t.a[static_cast<std::size_t>(s)] * v.adjoint();
    num += (p.adjoint() * at[static_cast<std::size_t>(s)]).trace();
    den += p.squaredNorm();
    scale = std::max(scale, t.a[static_cast<std::size_t>(s)].norm());
  }
  const cplx phase = std::abs(num) > 0 ? num / std::abs(num) : cplx(1.0);
  out.phi = std::arg(phase);
  double res = 0.0;
  for (int s = 0; s < t.d; ++s)
    res = std::max(res, (at[static_cast<std::size_t>(s)] - phase * v * t.a[static_cast<std::size_t>(s)] * v.adjoint()).norm());
  out.residual = res / std::max(scale, 1e-300);
  out.unitarity_defect = (v * v.adjoint() - Mat::Identity(dd, dd)).norm();
  out.v_candidate = v;
  if (out.residual < tol) out.v = v;
  return out;
}

struct BoundaryOperators {
  Mat left;   // d^R x d^R, acts on sites l .. l+R-1
  Mat right;  // acts on sites r-R+1 .. r
  int r_inj = 1;
  double fit_residual = 0.0;
};

/// Physical operators W, W~ with V B^s = sum c B^{s'} and B^s V^dagger = sum c~ B^{s'} on R_inj-site blocks.
inline BoundaryOperators boundary_operators(const MPSTensor& t, const Mat& v, int r_inj) {
  const auto inj = injectivity_length(t, std::min(6, std::max(1, r_inj)));
  if (!inj || *inj > r_inj) throw precondition_error("boundary_operators: tensor not injective at the given block length");
  const auto b = blocked(t, r_inj);
  const Mat bm = blocked_matrix(b);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(bm);
  const Eigen::Index k = static_cast<Eigen::Index>(b.size());
  BoundaryOperators out;
  out.r_inj = r_inj;
  out.left = Mat(k, k);
  out.right = Mat(k, k);
  double res = 0.0;
  for (Eigen::Index s = 0; s < k; ++s) {
    const Vec tl = (v * b[static_cast<std::size_t>(s)]).reshaped();
    const Vec tr = (b[static_cast<std::size_t>(s)] * v.adjoint()).reshaped();
    const Vec cl = cod.solve(tl);
    const Vec cr = cod.solve(tr);
    res = std::max({res, (bm * cl - tl).norm(), (bm * cr - tr).norm()});
    // W_{s, s'} = c^s_{s'}
    out.left.row(s) = cl.transpose();
    out.right.row(s) = cr.transpose();
  }
  out.fit_residual = res;
  return out;
}

// ---------------------------------------------------------------------------
// Dense qudit chains

inline Eigen::Index ipow(int d, int n) {
  Eigen::Index r = 1;
  for (int i = 0; i < n; ++i) r *= d;
  return r;
}

/// Normalised dense vector of the PBC MPS on N sites.
inline Vec mps_to_dense(const MPSTensor& t, int n) {
  if (ipow(t.d, n) > (Eigen::Index{1} << 22)) throw capacity_error("mps_to_dense: vector too large");
  const Eigen::Index dim = ipow(t.d, n);
  Vec out(dim);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index r = idx;
    Mat p = Mat::Identity(t.bond, t.bond);
    for (int j = 0; j < n; ++j) {
      p = p * t.a[static_cast<std::size_t>(r % t.d)];
      r /= t.d;
    }
    out[idx] = p.trace();
  }
  const double nrm = out.norm();
  if (nrm < 1e-300) throw precondition_error("mps_to_dense: state vanishes on this chain length");
  return out / nrm;
}

/// Applies a d^k x d^k operator on sites first, first+1, ..., first+k-1 (mod N).
inline Vec apply_window(const Vec& psi, int d, int n, const Mat& op, int first) {
  int k = 0;
  while (ipow(d, k) < op.rows()) ++k;
  if (ipow(d, k) != op.rows() || op.rows() != op.cols()) throw dimension_error("apply_window: operator size is not d^k");
  if (k > n) throw dimension_error("apply_window: window longer than chain");
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) stride[static_cast<std::size_t>(i)] = ipow(d, ring_mod(first + i, n));
  Vec out = Vec::Zero(psi.size());
  const Eigen::Index wd = op.rows();
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    const cplx a = psi[idx];
    if (a == cplx(0.0)) continue;
    Eigen::Index local = 0, rest = idx;
    for (int i = k - 1; i >= 0; --i) {
      const Eigen::Index digit = (idx / stride[static_cast<std::size_t>(i)]) % d;
      local = local * d + digit;
      rest -= digit * stride[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index lp = 0; lp < wd; ++lp) {
      const cplx m = op(lp, local);
      if (m == cplx(0.0)) continue;
      Eigen::Index target = rest, code = lp;
      for (int i = 0; i < k; ++i) {
        target += (code % d) * stride[static_cast<std::size_t>(i)];
        code /= d;
      }
      out[target] += m * a;
    }
  }
  return out;
}

/// prod_{j in [l, l+len-1]} U_j psi.
inline Vec apply_truncated_symmetry(const Vec& psi, int d, int n, const Mat& u, int l, int len) {
  Vec out = psi;
  for (int j = 0; j < len; ++j) out = apply_window(out, d, n, u, l + j);
  return out;
}

/// || U_Lambda psi - e^{i phi |Lambda|} W_l W~_r psi || on a dense chain.
inline double boundary_action_error(const MPSTensor& t, const Mat& l_gen, double theta, const Mat& w_left,
                                    const Mat& w_right, double phi, int n, int first, int len) {
  int r = 0;
  while (ipow(t.d, r) < w_left.rows()) ++r;
  if (len < 2 * r) throw precondition_error("boundary_action_error: patch shorter than both windows");
  const Vec psi = mps_to_dense(t, n);
  const Mat u = unitary_exp(l_gen, theta);
  const Vec lhs = apply_truncated_symmetry(psi, t.d, n, u, first, len);
  Vec rhs = apply_window(psi, t.d, n, w_right, first + len - r);
  rhs = apply_window(rhs, t.d, n, w_left, first);
  rhs *= std::polar(1.0, phi * len);
  return (lhs - rhs).norm();
}

namespace detail {

/// Hermitian matrix units: E_ii, E_ij + E_ji, i(E_ij - E_ji).
inline std::vector<Mat> hermitian_matrix_basis(Eigen::Index k) {
  std::vector<Mat> out;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      Mat e = Mat::Zero(k, k);
      if (i == j) {
        e(i, i) = 1.0;
        out.push_back(e);
      } else {
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        out.push_back(e);
        Mat f = Mat::Zero(k, k);
        f(i, j) = cplx(0, 1);
        f(j, i) = cplx(0, -1);
        out.push_back(f);
      }
    }
  return out;
}

}  // namespace detail

struct QuditBoundaryFit {
  double residual = 0.0;  // relative to the HS norm of G_Lambda
  bool hermitian = true;
};

/// Least-squares fit of G_Lambda psi = (A_l + B_r + f) psi with A, B on `window`-site blocks at the patch edges.
inline QuditBoundaryFit qudit_boundary_fit(const Vec& psi, int d, int n, const Mat& l_gen, int first, int len, int window,
                                           bool hermitian) {
  if (len < 2 * window) throw precondition_error("qudit_boundary_fit: windows overlap");
  Vec g = Vec::Zero(psi.size());
  for (int j = 0; j < len; ++j) g += apply_window(psi, d, n, l_gen, first + j);
  const Eigen::Index wd = ipow(d, window);
  std::vector<Mat> basis;
  if (hermitian) {
    basis = detail::hermitian_matrix_basis(wd);
  } else {
    for (Eigen::Index i = 0; i < wd; ++i)
      for (Eigen::Index j = 0; j < wd; ++j) {
        Mat e = Mat::Zero(wd, wd);
        e(i, j) = 1.0;
        basis.push_back(e);
      }
  }
  const Eigen::Index nb = static_cast<Eigen::Index>(basis.size());
  Mat a(psi.size(), 2 * nb + 1);
  for (Eigen::Index mu = 0; mu < nb; ++mu) {
    a.col(mu) = apply_window(psi, d, n, basis[static_cast<std::size_t>(mu)], first);
    a.col(nb + mu) = apply_window(psi, d, n, basis[static_cast<std::size_t>(mu)], first + len - window);
  }
  a.col(2 * nb) = psi;
  const double res = detail::projection_residual(a, g, hermitian);
  // HS norm of sum_j L_j on the chain
  const double tr_l = l_gen.trace().real() / d;
  const double tr_l2 = (l_gen.adjoint() * l_gen).trace().real() / d;
  const double hs = std::sqrt(len * tr_l2 + static_cast<double>(len) * (len - 1) * tr_l * tr_l);
  return {res / std::max(hs, 1e-300), hermitian};
}

struct SymmetryReport {
  TypeValue type = TypeValue::Indeterminate;
  bool full_rank = false;
  std::optional<int> injectivity;
  std::vector<double> thetas;
  std::vector<double> push_residuals;
  std::vector<double> v_nontrivial;  // || V - (tr V / D) 1 ||
  double hermitian_residual = -1.0;  // dense Hermitian-feasibility residual (-1 when not run)
  bool symmetric = true;
};

struct SymmetryOptions {
  std::vector<double> thetas = {0.3, 0.7, 1.1};
  int dense_sites = 6;
  Thresholds thresholds{};
};

/// Type of sum_j L_j for a symmetric injective MPS: II when E is full rank and V is not a phase,
/// I when a Hermitian boundary fit succeeds on a dense chain, otherwise Indeterminate. Never III.
inline SymmetryReport classify_symmetry_generator(const MPSTensor& t, const Mat& l_gen, const SymmetryOptions& opt = {}) {
  SymmetryReport rep;
  rep.full_rank = transfer_full_rank(t);
  rep.injectivity = injectivity_length(t, 6);
  if (!rep.injectivity) throw precondition_error("classify_symmetry_generator: tensor is not injective");
  bool nontrivial_all = true, trivial_all = true;
  for (double th : opt.thetas) {
    const auto pt = push_through_check(t, l_gen, th);
    rep.thetas.push_back(th);
    rep.push_residuals.push_back(pt.residual);
    const Mat& v = pt.v_candidate;
    const double dev = (v - (v.trace() / static_cast<double>(t.bond)) * Mat::Identity(t.bond, t.bond)).norm();
    rep.v_nontrivial.push_back(dev);
    if (!pt.v) rep.symmetric = false;
    nontrivial_all = nontrivial_all && dev > 1e-8;
    trivial_all = trivial_all && dev <= 1e-8;
  }
  if (!rep.symmetric) throw precondition_error("classify_symmetry_generator: state is not symmetric under the generator");

  const int window = *rep.injectivity;
  const int n = std::max(opt.dense_sites, 2 * window + 2);
  const Vec psi = mps_to_dense(t, n);
  double herm = 0.0;
  for (int len = 2 * window; len <= n - 1; ++len)
    herm = std::max(herm, qudit_boundary_fit(psi, t.d, n, l_gen, 0, len, window, true).residual);
  rep.hermitian_residual = herm;

  if (trivial_all) {
    rep.type = TypeValue::I;
  } else if (rep.full_rank && nontrivial_all) {
    rep.type = TypeValue::II;
  } else if (verdict(herm, opt.thresholds) == FitVerdict::Accepted) {
    rep.type = TypeValue::I;
  } else {
    rep.type = TypeValue::Indeterminate;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Builtins

/// AKLT tensor in the basis (-, 0, +).
inline MPSTensor builtin_aklt() {
  Mat sp = Mat::Zero(2, 2), sm = Mat::Zero(2, 2), sz = Mat::Zero(2, 2);
  sp(0, 1) = 1.0;
  sm(1, 0) = 1.0;
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  const double a = std::sqrt(2.0 / 3.0), b = 1.0 / std::sqrt(3.0);
  return MPSTensor({-a * sm, -b * sz, a * sp});
}

/// Bosonic SSH tensor; physical index s = 2 alpha + beta with up = 0, down = 1.
inline MPSTensor builtin_ssh() {
  const double c = 1.0 / std::sqrt(2.0);
  std::vector<Mat> a(4, Mat::Zero(2, 2));
  a[2](0, 0) = c;   // |down up>
  a[3](0, 1) = c;   // |down down>
  a[0](1, 0) = -c;  // |up up>
  a[1](1, 1) = -c;  // |up down>
  return MPSTensor(a);
}

/// D = 1 product tensor with amplitudes `amps`.
inline MPSTensor product_tensor(const std::vector<cplx>& amps) {
  std::vector<Mat> a;
  for (cplx x : amps) a.push_back(Mat::Constant(1, 1, x));
  return MPSTensor(a);
}

/// Spin-1 matrices in the basis (-, 0, +).
inline Mat spin1(char axis) {
  Mat m = Mat::Zero(3, 3);
  const double r = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case 'z': m(0, 0) = -1.0; m(2, 2) = 1.0; break;
    case 'x': m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = r; break;
    case 'y':
      // S^y = (S^+ - S^-) / 2i with S^+ |-> = sqrt2 |0>, S^+ |0> = sqrt2 |+>
      m(1, 0) = cplx(0, -r);
      m(0, 1) = cplx(0, r);
      m(2, 1) = cplx(0, -r);
      m(1, 2) = cplx(0, r);
      break;
    default: throw precondition_error("spin1: axis must be x, y or z");
  }
  return m;
}

/// sigma^z_alpha + sigma^z_beta on one SSH unit cell.
inline Mat ssh_sz() {
  Mat m = Mat::Zero(4, 4);
  for (int s = 0; s < 4; ++s) {
    const int alpha = s >> 1, beta = s & 1;
    m(s, s) = (alpha ? -1.0 : 1.0) + (beta ? -1.0 : 1.0);
  }
  return m;
}

}  // namespace scarkit
