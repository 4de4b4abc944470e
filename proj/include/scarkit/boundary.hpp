#pragma once

// Boundary-action test for truncated Hamiltonians.
//
// For a patch Lambda = [l, r] and windows X_l = [l, l+R-1], X_r = [r-R+1, r] we minimise
//   sum_n || (H_Lambda - A_l - B_r - f_n) psi_n ||^2
// over operators A_l, B_r on the windows and per-state constants f_n.

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "scarkit/nullspace.hpp"
#include "scarkit/opspace.hpp"
#include "scarkit/states.hpp"

namespace scarkit {

enum class TypeValue { I, II, III, Indeterminate };

inline const char* type_name(TypeValue t) {
  switch (t) {
    case TypeValue::I: return "I";
    case TypeValue::II: return "II";
    case TypeValue::III: return "III";
    default: return "Indeterminate";
  }
}

struct Thresholds {
  double accept = 1e-8;
  double reject = 1e-3;
};

enum class FitVerdict { Accepted, Rejected, Indeterminate };

inline FitVerdict verdict(double rel_residual, const Thresholds& th) {
  if (rel_residual < th.accept) return FitVerdict::Accepted;
  if (rel_residual > th.reject) return FitVerdict::Rejected;
  return FitVerdict::Indeterminate;
}

struct BoundarySolve {
  LocalOperator left_op;
  LocalOperator right_op;
  std::vector<cplx> constants;
  double residual = 0.0;      // ||r|| / ||H_Lambda||_HS
  double abs_residual = 0.0;  // ||r||
  double scale = 0.0;
  bool hermitian_constrained = false;
  Region lam{0, 0, 2};
  int r_max = 0;
};

namespace detail {

inline void check_boundary_inputs(const LocalOperator& h, const std::vector<StateVector>& states, const Region& lam,
                                  int r_max) {
  if (states.empty()) throw precondition_error("boundary_solve: no states");
  if (r_max < 1) throw precondition_error("boundary_solve: R_max must be >= 1");
  if (lam.length() < 2 * r_max + 2)
    throw precondition_error("boundary_solve: windows of width " + std::to_string(r_max) + " overlap in a patch of " +
                             std::to_string(lam.length()) + " sites");
  if (h.n_sites() > 12) throw capacity_error("boundary_solve: dense solve limited to N <= 12");
  if (lam.n_sites() != h.n_sites()) throw dimension_error("boundary_solve: region on a different chain");
  for (const auto& s : states)
    if (sites_for_dimension(s.size()) != h.n_sites()) throw dimension_error("boundary_solve: state size mismatch");
}

struct BoundarySystem {
  OperatorBasis left, right;
  Mat a;  // columns: left basis, right basis, per-state constants
  Vec b;
  double scale = 0.0;
};

inline Vec stack_images(const LocalOperator& op, const std::vector<StateVector>& states) {
  const Eigen::Index dim = states[0].size();
  Vec out(dim * static_cast<Eigen::Index>(states.size()));
  for (std::size_t n = 0; n < states.size(); ++n)
    out.segment(static_cast<Eigen::Index>(n) * dim, dim) = apply(op, states[n]);
  return out;
}

inline BoundarySystem boundary_system(const LocalOperator& h_lam, const std::vector<StateVector>& states,
                                      const Region& lam, int r_max) {
  const int n = h_lam.n_sites();
  BoundarySystem sys;
  sys.left = pauli_basis(Region::from_length(lam.left(), r_max, n));
  sys.right = pauli_basis(Region(lam.right() - r_max + 1, lam.right(), n));
  const Eigen::Index dim = states[0].size();
  const Eigen::Index k = static_cast<Eigen::Index>(states.size());
  const Eigen::Index nl = static_cast<Eigen::Index>(sys.left.elements.size());
  const Eigen::Index nr = static_cast<Eigen::Index>(sys.right.elements.size());
  sys.a = Mat::Zero(dim * k, nl + nr + k);
  for (Eigen::Index mu = 0; mu < nl; ++mu) sys.a.col(mu) = stack_images(sys.left.elements[mu], states);
  for (Eigen::Index mu = 0; mu < nr; ++mu) sys.a.col(nl + mu) = stack_images(sys.right.elements[mu], states);
  for (Eigen::Index s = 0; s < k; ++s) sys.a.col(nl + nr + s).segment(s * dim, dim) = states[static_cast<std::size_t>(s)];
  sys.b = stack_images(h_lam, states);
  sys.scale = std::max(hs_norm(h_lam), 1e-300);
  return sys;
}

/// Minimum-norm least squares; real unknowns when `real_unknowns`.
inline Vec solve_min_norm(const Mat& a, const Vec& b, bool real_unknowns) {
  if (real_unknowns) {
    Eigen::MatrixXd ar(2 * a.rows(), a.cols());
    ar << a.real(), a.imag();
    Eigen::VectorXd br(2 * b.size());
    br << b.real(), b.imag();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ar);
    cod.setThreshold(1e-12);
    return cod.compute(ar).solve(br).cast<cplx>();
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod;
  cod.setThreshold(1e-12);
  return cod.compute(a).solve(b);
}

/// Residual norm of the projection of b off the column span of a (real or complex span).
inline double projection_residual(const Mat& a, const Vec& b, bool real_unknowns) {
  return (a * solve_min_norm(a, b, real_unknowns) - b).norm();
}

}  // namespace detail

/// Truncation used by the boundary test: Pauli basis, declared range of the full operator.
inline LocalOperator truncate_for_boundary(const LocalOperator& h, const Region& lam) {
  return truncate(h, lam, Basis::Pauli, h.range());
}

inline BoundarySolve boundary_solve(const LocalOperator& h, const std::vector<StateVector>& states, const Region& lam,
                                    int r_max, bool hermitian) {
  detail::check_boundary_inputs(h, states, lam, r_max);
  const int n = h.n_sites();
  const LocalOperator h_lam = truncate_for_boundary(h, lam);
  if (hermitian && !is_hermitian(h_lam))
    throw precondition_error("boundary_solve: Hermitian fit needs a Hermitian truncation");
  const detail::BoundarySystem sys = detail::boundary_system(h_lam, states, lam, r_max);
  const Vec x = detail::solve_min_norm(sys.a, sys.b, hermitian);

  BoundarySolve out;
  out.hermitian_constrained = hermitian;
  out.lam = lam;
  out.r_max = r_max;
  out.scale = sys.scale;
  out.abs_residual = (sys.a * x - sys.b).norm();
  out.residual = out.abs_residual / sys.scale;
  out.left_op = LocalOperator(n);
  out.right_op = LocalOperator(n);
  const Eigen::Index nl = static_cast<Eigen::Index>(sys.left.elements.size());
  const Eigen::Index nr = static_cast<Eigen::Index>(sys.right.elements.size());
  out.left_op = recombine(sys.left, x.head(nl));
  out.right_op = recombine(sys.right, x.segment(nl, nr));
  for (std::size_t s = 0; s < states.size(); ++s) out.constants.push_back(x[nl + nr + static_cast<Eigen::Index>(s)]);

  // gauge: <0..0| A |0..0> = <0..0| B |0..0> = 0
  const Vec vac = vacuum(n);
  for (LocalOperator* op : {&out.left_op, &out.right_op}) {
    const cplx c0 = vac.dot(scarkit::apply(*op, vac));
    if (std::abs(c0) < kDropTol) continue;
    *op -= LocalOperator::identity(n, c0);
    for (auto& f : out.constants) f += c0;
  }
  return out;
}

/// max_n || (A + B - T) psi_n - c_n psi_n || with c_n the best constant for each state.
inline double action_distance(const LocalOperator& fitted, const LocalOperator& expected,
                              const std::vector<StateVector>& states) {
  const LocalOperator d = fitted - expected;
  double worst = 0.0;
  for (const auto& psi : states) {
    const Vec img = apply(d, psi);
    worst = std::max(worst, (img - psi.dot(img) * psi).norm());
  }
  return worst;
}

struct Evidence {
  Region lam;
  int r_max;
  double hermitian_residual;
  double general_residual;
};

struct TypeLabel {
  TypeValue value = TypeValue::Indeterminate;
  std::vector<Evidence> evidence;
  double independence_residual = 0.0;  // spread of the left boundary action over right-edge positions
  std::vector<std::pair<int, TypeValue>> per_r_max;
};

struct SweepOptions {
  std::vector<int> anchors = {0, 1};
  int min_length = 0;  // 0: 2 R_max + 2 (raised to exceed twice the operator range)
  int max_length = 0;  // 0: N - 2
  Thresholds thresholds{};
};

inline std::vector<Region> patch_sweep(int n, int r_max, int op_range, const SweepOptions& opt) {
  int lo = opt.min_length > 0 ? opt.min_length : 2 * r_max + 2;
  lo = std::max({lo, 2 * r_max + 2, 2 * op_range + 1});
  const int hi = opt.max_length > 0 ? opt.max_length : n - 2;
  std::vector<Region> out;
  for (int a : opt.anchors)
    for (int len = lo; len <= hi; ++len) out.push_back(Region::from_length(a, len, n));
  return out;
}

namespace detail {

inline TypeValue label_from(const std::vector<Evidence>& ev, const Thresholds& th) {
  if (ev.empty()) return TypeValue::Indeterminate;
  bool herm_all = true, gen_all = true, herm_rej = false, gen_rej = false;
  for (const auto& e : ev) {
    const FitVerdict vh = verdict(e.hermitian_residual, th);
    const FitVerdict vg = verdict(e.general_residual, th);
    herm_all = herm_all && vh == FitVerdict::Accepted;
    gen_all = gen_all && vg == FitVerdict::Accepted;
    herm_rej = herm_rej || vh == FitVerdict::Rejected;
    gen_rej = gen_rej || vg == FitVerdict::Rejected;
  }
  if (herm_all) return TypeValue::I;
  if (gen_all && herm_rej) return TypeValue::II;
  if (gen_rej) return TypeValue::III;
  return TypeValue::Indeterminate;
}

}  // namespace detail

/// Runs the patch sweep for each R_max; the largest R_max decides, smaller ones are kept as evidence.
inline TypeLabel classify(const LocalOperator& h, const std::vector<StateVector>& states,
                          std::vector<int> r_max_list, const SweepOptions& opt = {}) {
  if (r_max_list.empty()) throw precondition_error("classify: empty R_max list");
  std::sort(r_max_list.begin(), r_max_list.end());
  const int n = h.n_sites();
  const int range = h.range();
  TypeLabel out;
  for (int rm : r_max_list) {
    std::vector<Evidence> ev;
    for (const Region& lam : patch_sweep(n, rm, range, opt)) {
      const double rh = boundary_solve(h, states, lam, rm, true).residual;
      const double rg = boundary_solve(h, states, lam, rm, false).residual;
      ev.push_back({lam, rm, rh, rg});
    }
    if (ev.empty())
      throw precondition_error("classify: no admissible patch for R_max = " + std::to_string(rm) + " at N = " +
                               std::to_string(n));
    out.per_r_max.emplace_back(rm, detail::label_from(ev, opt.thresholds));
    out.evidence.insert(out.evidence.end(), ev.begin(), ev.end());
  }
  out.value = out.per_r_max.back().second;

  // left boundary at fixed l against the right edge position
  const int rm = r_max_list.back();
  const auto patches = patch_sweep(n, rm, range, {{opt.anchors.front()}, opt.min_length, opt.max_length, opt.thresholds});
  if (out.value != TypeValue::III && patches.size() >= 2) {
    const bool herm = out.value == TypeValue::I;
    const LocalOperator ref = boundary_solve(h, states, patches.front(), rm, herm).left_op;
    for (std::size_t k = 1; k < patches.size(); ++k)
      out.independence_residual = std::max(
          out.independence_residual, action_distance(boundary_solve(h, states, patches[k], rm, herm).left_op, ref, states));
  }
  return out;
}

enum class Equivalence { SameClass, Different, Indeterminate };

inline const char* equivalence_name(Equivalence e) {
  switch (e) {
    case Equivalence::SameClass: return "same-class";
    case Equivalence::Different: return "different";
    default: return "indeterminate";
  }
}

struct EquivalenceResult {
  Equivalence outcome = Equivalence::Indeterminate;
  double alpha = 0.0;  // witness for the normalised operators H / ||H||_HS
  double beta = 0.0;
  double residual = 0.0;
};

/// Looks for real (alpha, beta) on the unit circle with alpha H_A - beta H_B Hermitian-feasible on every patch.
/// The stacked residual is linear in (alpha, beta); its lowest right singular vector is the witness.
inline EquivalenceResult equivalence_test(const LocalOperator& ha, const LocalOperator& hb,
                                          const std::vector<StateVector>& states, int r_max,
                                          const SweepOptions& opt = {}) {
  ha.check_same(hb);
  const int n = ha.n_sites();
  const double na = hs_norm(ha), nb = hs_norm(hb);
  if (na == 0.0 || nb == 0.0) throw precondition_error("equivalence_test: zero operator");
  const LocalOperator a_op = (1.0 / na) * ha;
  const LocalOperator b_op = (1.0 / nb) * hb;
  const int range = std::max(ha.range(), hb.range());
  std::vector<Eigen::VectorXd> cols_a, cols_b;
  double norm2 = 0.0;
  for (const Region& lam : patch_sweep(n, r_max, range, opt)) {
    detail::check_boundary_inputs(ha, states, lam, r_max);
    const LocalOperator ta = truncate(a_op, lam, Basis::Pauli, range);
    const LocalOperator tb = truncate(b_op, lam, Basis::Pauli, range);
    const auto sys = detail::boundary_system(ta, states, lam, r_max);
    const Vec va = sys.b;
    const Vec vb = -detail::stack_images(tb, states);
    const Vec ra = sys.a * detail::solve_min_norm(sys.a, va, true) - va;
    const Vec rb = sys.a * detail::solve_min_norm(sys.a, vb, true) - vb;
    Eigen::VectorXd xa(2 * ra.size()), xb(2 * rb.size());
    xa << ra.real(), ra.imag();
    xb << rb.real(), rb.imag();
    cols_a.push_back(std::move(xa));
    cols_b.push_back(std::move(xb));
    norm2 += 0.5 * (va.squaredNorm() + vb.squaredNorm());
  }
  Eigen::Index rows = 0;
  for (const auto& c : cols_a) rows += c.size();
  Eigen::MatrixXd r(rows, 2);
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < cols_a.size(); ++k) {
    r.block(at, 0, cols_a[k].size(), 1) = cols_a[k];
    r.block(at, 1, cols_b[k].size(), 1) = cols_b[k];
    at += cols_a[k].size();
  }
  // residual of alpha A - beta B is r * (alpha, beta)
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinV);
  EquivalenceResult out;
  out.alpha = svd.matrixV()(0, 1);
  out.beta = svd.matrixV()(1, 1);
  if (out.alpha < 0 || (out.alpha == 0 && out.beta < 0)) {
    out.alpha = -out.alpha;
    out.beta = -out.beta;
  }
  out.residual = svd.singularValues()[1] / std::sqrt(std::max(norm2, 1e-300));
  switch (verdict(out.residual, opt.thresholds)) {
    case FitVerdict::Accepted: out.outcome = Equivalence::SameClass; break;
    case FitVerdict::Rejected: out.outcome = Equivalence::Different; break;
    default: out.outcome = Equivalence::Indeterminate;
  }
  return out;
}

}  // namespace scarkit
