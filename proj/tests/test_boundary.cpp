#include <gtest/gtest.h>

#include "scarkit/boundary.hpp"
#include "scarkit/canonical.hpp"

using namespace scarkit;

namespace {

struct Bands {
  double herm_lo = 1e9, herm_hi = 0.0, gen_lo = 1e9, gen_hi = 0.0;
};

Bands sweep(const LocalOperator& h, const std::vector<StateVector>& st, int r_max) {
  Bands b;
  for (const auto& lam : patch_sweep(h.n_sites(), r_max, h.range(), {})) {
    const double rh = boundary_solve(h, st, lam, r_max, true).residual;
    const double rg = boundary_solve(h, st, lam, r_max, false).residual;
    b.herm_lo = std::min(b.herm_lo, rh);
    b.herm_hi = std::max(b.herm_hi, rh);
    b.gen_lo = std::min(b.gen_lo, rg);
    b.gen_hi = std::max(b.gen_hi, rg);
  }
  return b;
}

std::vector<StateVector> vw(int n) { return {vacuum(n), w_state(n)}; }

}  // namespace

TEST(Boundary, ReHopIsTypeOne) {
  const int n = 10;
  const Bands b = sweep(h_rehop(n), vw(n), 2);
  EXPECT_LT(b.herm_hi, 1e-10);
  EXPECT_LT(b.gen_hi, 1e-10);
  EXPECT_EQ(classify(h_rehop(n), vw(n), {2}).value, TypeValue::I);
}

TEST(Boundary, ImHopIsTypeTwo) {
  const int n = 10;
  const Bands b = sweep(h_imhop(n), vw(n), 2);
  EXPECT_GT(b.herm_lo, 1e-2);
  EXPECT_LT(b.gen_hi, 1e-10);
  const auto t = classify(h_imhop(n), vw(n), {1, 2});
  EXPECT_EQ(t.value, TypeValue::II);
  EXPECT_LT(t.independence_residual, 1e-10);
  ASSERT_EQ(t.per_r_max.size(), 2u);
}

TEST(Boundary, NumberOperatorIsTypeThree) {
  const int n = 10;
  const Bands b = sweep(n_tot(n), vw(n), 2);
  EXPECT_GT(b.gen_lo, 1e-2);
  EXPECT_EQ(classify(n_tot(n), vw(n), {2}).value, TypeValue::III);
}

TEST(Boundary, HeisenbergIsTypeOne) {
  const int n = 10;
  EXPECT_EQ(classify(h_heis(n), vw(n), {2}).value, TypeValue::I);
}

TEST(Boundary, ImHopBoundaryAction) {
  const int n = 10;
  const Region lam(2, 8, n);
  const auto s = boundary_solve(h_imhop(n), vw(n), lam, 2, false);
  const cplx half_i(0.0, 0.5);
  const LocalOperator expected = site_op(n, 2, SiteOp::N, half_i) - site_op(n, 8, SiteOp::N, half_i);
  EXPECT_LT(action_distance(s.left_op + s.right_op, expected, vw(n)), 1e-10);
  EXPECT_GT(action_distance(s.left_op + s.right_op, -1.0 * expected, vw(n)), 0.1);
}

TEST(Boundary, ImHop2OnThreeDickeStates) {
  const int n = 10;
  const std::vector<StateVector> st{vacuum(n), w_state(n), w_p(n, 2)};
  EXPECT_EQ(classify(h_imhop2(n), st, {2}).value, TypeValue::II);
  const Region lam(1, 8, n);
  const auto s = boundary_solve(h_imhop2(n), st, lam, 2, false);
  const cplx half_i(0.0, 0.5);
  const LocalOperator expected =
      LocalOperator::product(n, {{1, SiteOp::N}, {2, SiteOp::N}}, half_i) -
      LocalOperator::product(n, {{7, SiteOp::N}, {8, SiteOp::N}}, half_i);
  EXPECT_LT(action_distance(s.left_op + s.right_op, expected, st), 1e-10);
}

TEST(Boundary, GaugeFixesVacuumExpectation) {
  const int n = 10;
  const auto s = boundary_solve(h_imhop(n), vw(n), Region(0, 7, n), 2, false);
  const Vec v = vacuum(n);
  EXPECT_LT(std::abs(v.dot(scarkit::apply(s.left_op, v))), 1e-12);
  EXPECT_LT(std::abs(v.dot(scarkit::apply(s.right_op, v))), 1e-12);
  EXPECT_EQ(s.constants.size(), 2u);
}

TEST(Boundary, ThresholdVerdicts) {
  const Thresholds th;
  EXPECT_EQ(verdict(1e-12, th), FitVerdict::Accepted);
  EXPECT_EQ(verdict(1e-5, th), FitVerdict::Indeterminate);
  EXPECT_EQ(verdict(0.5, th), FitVerdict::Rejected);
}

TEST(Boundary, Preconditions) {
  const int n = 10;
  EXPECT_THROW(classify(h_imhop(n), vw(n), {}), precondition_error);
  EXPECT_THROW(boundary_solve(h_imhop(n), vw(n), Region(0, 3, n), 2, false), precondition_error);
  EXPECT_THROW(boundary_solve(h_imhop(n), {vacuum(8)}, Region(0, 7, n), 2, false), precondition_error);
}

TEST(Boundary, EquivalenceIdentical) {
  const int n = 10;
  const auto e = equivalence_test(h_imhop(n), h_imhop(n), vw(n), 2);
  EXPECT_EQ(e.outcome, Equivalence::SameClass);
  EXPECT_NEAR(e.alpha, e.beta, 1e-10);
}

TEST(Boundary, EquivalenceModuloTypeOne) {
  const int n = 10;
  EXPECT_EQ(equivalence_test(h_imhop(n), h_imhop(n) + h_rehop(n), vw(n), 2).outcome, Equivalence::SameClass);
}

TEST(Boundary, ImHopAndImHop2Differ) {
  const int n = 10;
  const std::vector<StateVector> st{vacuum(n), w_state(n), w_p(n, 2)};
  EXPECT_EQ(equivalence_test(h_imhop(n), h_imhop2(n), st, 2).outcome, Equivalence::Different);
}
