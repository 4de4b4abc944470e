#pragma once

// Correlation matrices over an operator basis and the equivalence-class counts built from them.
//
// For a basis {V_mu} and states {psi_n} the columns a_mu = (V_mu - e_mu^n) psi_n stacked over n give
//   C^G = A^dagger A,   C^H = Re(A^dagger A),
// with e_mu^n = <psi_n|V_mu|psi_n>. In degenerate mode every state shares e_mu = (1/K) sum_n <V_mu>_n,
// which is the rank-one corrected C that enforces a common eigenvalue.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <map>
#include <string>
#include <vector>

#include "scarkit/opspace.hpp"
#include "scarkit/states.hpp"

namespace scarkit {

enum class CorrKind { H, G };

struct OperatorBasis {
  std::vector<LocalOperator> elements;
  bool orthogonal = true;
  std::string scope;
};

namespace detail {

/// All Pauli strings on the listed sites; when `anchor_first`, sites[0] must carry a non-identity.
inline std::vector<OperatorString> pauli_strings_on(const std::vector<int>& sites, bool anchor_first) {
  static const SiteOp kOps[4] = {SiteOp::I, SiteOp::X, SiteOp::Y, SiteOp::Z};
  std::vector<OperatorString> out;
  const std::size_t k = sites.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 4;
  for (std::uint64_t code = 1; code < total; ++code) {
    if (anchor_first && (code & 3) == 0) continue;
    std::vector<Factor> f;
    std::uint64_t c = code;
    for (std::size_t i = 0; i < k; ++i, c >>= 2)
      if ((c & 3) != 0) f.push_back({sites[i], kOps[c & 3]});
    out.emplace_back(f);
  }
  return out;
}

}  // namespace detail

/// Non-identity Pauli strings supported inside `region` (strictly local scope).
inline OperatorBasis pauli_basis(const Region& region) {
  OperatorBasis b{{}, true, "strictly-local " + std::to_string(region.left()) + ".." + std::to_string(region.right())};
  for (const auto& s : detail::pauli_strings_on(region.sites(), false)) {
    LocalOperator op(region.n_sites());
    op.add(s, 1.0);
    b.elements.push_back(std::move(op));
  }
  return b;
}

/// Non-identity Pauli strings of range <= R at every position (extensive-local scope).
inline std::vector<OperatorString> pauli_strings_range(int n, int r) {
  std::map<OperatorString, int> seen;
  std::vector<OperatorString> out;
  for (int j = 0; j < n; ++j) {
    std::vector<int> w;
    for (int k = 0; k < r; ++k) w.push_back(ring_mod(j + k, n));
    for (auto& s : detail::pauli_strings_on(w, true))
      if (seen.try_emplace(s, 0).second) out.push_back(s);
  }
  return out;
}

inline OperatorBasis pauli_basis_range(int n, int r) {
  OperatorBasis b{{}, true, "extensive-local range " + std::to_string(r)};
  for (const auto& s : pauli_strings_range(n, r)) {
    LocalOperator op(n);
    op.add(s, 1.0);
    b.elements.push_back(std::move(op));
  }
  return b;
}

struct CorrelationMatrix {
  Mat entries;
  CorrKind kind = CorrKind::H;
  int n_states = 0;
  bool degenerate = false;
};

/// Stacked state-action matrix A (rows: state-major amplitudes, columns: basis elements).
inline Mat state_action_matrix(const OperatorBasis& basis, const std::vector<StateVector>& states, bool degenerate) {
  if (states.empty()) throw precondition_error("build_correlation: no states");
  const Eigen::Index dim = states[0].size();
  for (const auto& s : states)
    if (s.size() != dim) throw dimension_error("build_correlation: states of different size");
  const Eigen::Index k = static_cast<Eigen::Index>(states.size());
  Mat a(dim * k, static_cast<Eigen::Index>(basis.elements.size()));
  for (std::size_t mu = 0; mu < basis.elements.size(); ++mu) {
    std::vector<Vec> images;
    cplx mean = 0.0;
    for (const auto& psi : states) {
      images.push_back(apply(basis.elements[mu], psi));
      mean += psi.dot(images.back());
    }
    mean /= static_cast<double>(k);
    for (Eigen::Index n = 0; n < k; ++n) {
      const auto& psi = states[static_cast<std::size_t>(n)];
      const cplx e = degenerate ? mean : psi.dot(images[static_cast<std::size_t>(n)]);
      a.col(static_cast<Eigen::Index>(mu)).segment(n * dim, dim) = images[static_cast<std::size_t>(n)] - e * psi;
    }
  }
  return a;
}

inline CorrelationMatrix build_correlation(const OperatorBasis& basis, const std::vector<StateVector>& states,
                                           CorrKind kind, bool degenerate = false) {
  for (const auto& e : basis.elements) {
    if (!states.empty() && e.n_sites() != sites_for_dimension(states[0].size()))
      throw dimension_error("build_correlation: basis and states on different chains");
    if (kind == CorrKind::H && !is_hermitian(e))
      throw precondition_error("build_correlation: kind H needs Hermitian basis elements");
  }
  const Mat a = state_action_matrix(basis, states, degenerate);
  Mat c = a.adjoint() * a;
  if (kind == CorrKind::H) c = c.real().cast<cplx>();
  return {c, kind, static_cast<int>(states.size()), degenerate};
}

struct SubspaceReport {
  Mat basis;  // orthonormal columns
  int dim = 0;
  double tolerance = 1e-10;
  double lambda_max = 0.0;
  double gap = 0.0;  // smallest eigenvalue above the cutoff, relative to lambda_max
};

/// Eigenvectors with eigenvalue <= tol * lambda_max. Kind-H matrices yield real vectors.
inline SubspaceReport null_space(const CorrelationMatrix& c, double tol = 1e-10) {
  SubspaceReport rep;
  rep.tolerance = tol;
  const Eigen::Index m = c.entries.rows();
  if (m == 0) return rep;
  Eigen::VectorXd evals;
  Mat evecs;
  if (c.kind == CorrKind::H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries.real());
    evals = es.eigenvalues();
    evecs = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(c.entries);
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }
  rep.lambda_max = std::max(evals.maxCoeff(), 0.0);
  const double cut = tol * rep.lambda_max;
  Eigen::Index k = 0;
  while (k < m && evals[k] <= cut) ++k;
  rep.dim = static_cast<int>(k);
  rep.basis = evecs.leftCols(k);
  rep.gap = k < m ? (rep.lambda_max > 0 ? evals[k] / rep.lambda_max : 0.0) : 0.0;
  return rep;
}

/// Operator sum_mu v_mu V_mu.
inline LocalOperator recombine(const OperatorBasis& basis, const Eigen::Ref<const Vec>& v) {
  if (basis.elements.empty()) throw precondition_error("recombine: empty basis");
  LocalOperator op(basis.elements[0].n_sites());
  for (Eigen::Index mu = 0; mu < v.size(); ++mu)
    if (std::abs(v[mu]) > kDropTol) op += v[mu] * basis.elements[static_cast<std::size_t>(mu)];
  return op;
}

/// Largest ||(V - <V>) psi_n|| over states for a recombined operator.
inline double eigen_defect(const LocalOperator& op, const std::vector<StateVector>& states) {
  double worst = 0.0;
  for (const auto& psi : states) {
    const Vec img = apply(op, psi);
    worst = std::max(worst, (img - psi.dot(img) * psi).norm());
  }
  return worst;
}

/// Orthonormal basis of a growing span in a fixed coordinate space.
class SpanAccumulator {
 public:
  explicit SpanAccumulator(Eigen::Index ambient, double tol = 1e-10) : q_(ambient, 0), tol_(tol) {}

  /// Adds the columns of y (need not be orthonormal); returns the number of new directions.
  int add(const Mat& y) {
    if (y.cols() == 0) return 0;
    Mat r = y;
    for (Eigen::Index c = 0; c < r.cols(); ++c) {
      const double nrm = r.col(c).norm();
      if (nrm > 0) r.col(c) /= nrm;
    }
    if (q_.cols() > 0) {
      r -= q_ * (q_.adjoint() * r);
      r -= q_ * (q_.adjoint() * r);
    }
    Eigen::JacobiSVD<Mat, Eigen::ColPivHouseholderQRPreconditioner> svd(r, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int keep = 0;
    while (keep < s.size() && s[keep] > tol_) ++keep;
    if (keep < s.size()) max_dropped_ = std::max(max_dropped_, s[keep]);
    if (keep > 0) min_kept_ = std::min(min_kept_, s[keep - 1]);
    if (keep == 0) return 0;
    Mat nq(q_.rows(), q_.cols() + keep);
    nq << q_, svd.matrixU().leftCols(keep);
    q_ = std::move(nq);
    return keep;
  }

  int dim() const { return static_cast<int>(q_.cols()); }
  const Mat& basis() const { return q_; }
  double min_kept() const { return min_kept_; }
  double max_dropped() const { return max_dropped_; }

 private:
  Mat q_;
  double tol_;
  double min_kept_ = 1.0;
  double max_dropped_ = 0.0;
};

struct ClassCounts {
  int n_ii = 0;
  int n_iii = 0;
  std::map<std::string, int> dims;
  std::map<std::string, double> diagnostics;
  double tol = 1e-10;
};

/// N^III = dim(Z^H_glo,R + Z^G_loc,R') - dim Z^G_loc,R'
/// N^II  = dim(Z^H_glo,R + Z^H_loc,R') - dim(Z^H_glo,R + Z^G_loc,R') + dim Z^G_loc,R' - dim Z^H_loc,R'
/// All subspaces are embedded in the coefficient space of Pauli strings of range <= R'.
inline ClassCounts count_type_classes(int n, int r, int rp, const std::vector<StateVector>& states,
                                      bool degenerate = false, double tol = 1e-10) {
  if (rp < r) throw precondition_error("count_type_classes: need R' >= R");
  if (r < 1) throw precondition_error("count_type_classes: need R >= 1");
  if (n < 2 * rp) throw precondition_error("count_type_classes: need N >= 2R'");
  if (n > 12) throw capacity_error("count_type_classes: global scan limited to N <= 12");
  for (const auto& s : states)
    if (sites_for_dimension(s.size()) != n) throw dimension_error("count_type_classes: state size mismatch");

  const std::vector<OperatorString> global = pauli_strings_range(n, rp);
  std::map<OperatorString, Eigen::Index> index;
  for (std::size_t i = 0; i < global.size(); ++i) index[global[i]] = static_cast<Eigen::Index>(i);
  const Eigen::Index ambient = static_cast<Eigen::Index>(global.size());

  auto embed = [&](const OperatorBasis& b, const Mat& v) {
    Mat out = Mat::Zero(ambient, v.cols());
    for (std::size_t mu = 0; mu < b.elements.size(); ++mu) {
      const OperatorString& s = b.elements[mu].terms().begin()->first;
      out.row(index.at(s)) = v.row(static_cast<Eigen::Index>(mu));
    }
    return out;
  };

  ClassCounts out;
  out.tol = tol;
  const OperatorBasis glo_basis = pauli_basis_range(n, r);
  const SubspaceReport glo = null_space(build_correlation(glo_basis, states, CorrKind::H, degenerate), tol);
  const Mat glo_vecs = embed(glo_basis, glo.basis);
  out.dims["glo_H"] = glo.dim;
  out.diagnostics["glo_H_gap"] = glo.gap;

  SpanAccumulator loc_g(ambient, tol), loc_h(ambient, tol);
  double min_gap_g = 1.0, min_gap_h = 1.0;
  for (int j = 0; j < n; ++j) {
    const OperatorBasis wb = pauli_basis(Region::from_length(j, rp, n));
    const Mat a = state_action_matrix(wb, states, degenerate);
    const Mat cg = a.adjoint() * a;
    CorrelationMatrix corr_g{cg, CorrKind::G, static_cast<int>(states.size()), degenerate};
    CorrelationMatrix corr_h{cg.real().cast<cplx>(), CorrKind::H, static_cast<int>(states.size()), degenerate};
    const SubspaceReport zg = null_space(corr_g, tol);
    const SubspaceReport zh = null_space(corr_h, tol);
    min_gap_g = std::min(min_gap_g, zg.gap);
    min_gap_h = std::min(min_gap_h, zh.gap);
    loc_g.add(embed(wb, zg.basis));
    loc_h.add(embed(wb, zh.basis));
  }
  out.dims["loc_G"] = loc_g.dim();
  out.dims["loc_H"] = loc_h.dim();
  out.diagnostics["loc_G_gap"] = min_gap_g;
  out.diagnostics["loc_H_gap"] = min_gap_h;

  SpanAccumulator u_g = loc_g;
  u_g.add(glo_vecs);
  SpanAccumulator u_h = loc_h;
  u_h.add(glo_vecs);
  out.dims["glo_H+loc_G"] = u_g.dim();
  out.dims["glo_H+loc_H"] = u_h.dim();
  out.diagnostics["union_min_kept"] = std::min(u_g.min_kept(), u_h.min_kept());
  out.diagnostics["union_max_dropped"] = std::max(u_g.max_dropped(), u_h.max_dropped());

  out.n_iii = u_g.dim() - loc_g.dim();
  out.n_ii = u_h.dim() - u_g.dim() + loc_g.dim() - loc_h.dim();
  return out;
}

}  // namespace scarkit
