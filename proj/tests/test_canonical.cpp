#include <gtest/gtest.h>

#include <random>

#include "scarkit/canonical.hpp"
#include "scarkit/states.hpp"

using namespace scarkit;

namespace {

const TableCondition& row(const std::vector<TableCondition>& t, const std::string& cls) {
  for (const auto& c : t)
    if (c.cls == cls) return c;
  throw std::runtime_error("no class " + cls);
}

}  // namespace

TEST(Canonical, ImHopAnnihilatesW) { EXPECT_LT(scarkit::apply(h_imhop(9), w_state(9)).norm(), 1e-14); }

TEST(Canonical, PImRowSumsVanish) {
  const int n = 9;
  const LocalOperator b = to_boson_basis(p_im(n, 2, 2));
  std::vector<cplx> rows(n, 0.0);
  for (const auto& [s, c] : b.terms())
    if (s.creations() == 1 && s.annihilations() == 1) rows[static_cast<std::size_t>(std::countr_zero(detail::create_mask(s)))] += c;
  for (cplx r : rows) EXPECT_LT(std::abs(r), 1e-14);
  EXPECT_TRUE(is_hermitian(p_im(n, 2, 2)));
}

TEST(Canonical, ImHopPAnnihilatesAllDickeStates) {
  const int n = 8;
  for (int m = 0; m <= n; ++m) EXPECT_LT(scarkit::apply(h_imhop_p(n, 2), w_p(n, m)).norm(), 1e-12) << "m = " << m;
}

TEST(Canonical, BuiltinLookup) {
  for (const auto& name : builtin_names()) EXPECT_NO_THROW(builtin(name, 10));
  EXPECT_THROW(builtin("nope", 10), precondition_error);
  EXPECT_TRUE(approx_equal(builtin("h_chop", 8, {{"a", 0.5}, {"b", 0.25}}), 0.5 * h_rehop(8) + 0.25 * h_imhop(8)));
}

TEST(Canonical, BuiltinsAreHermitianWParents) {
  for (const char* name : {"n_tot", "h_rehop", "h_imhop", "h_imhop2", "h_heis", "h_dmi", "p_re", "p_im"}) {
    const LocalOperator h = builtin(name, 10);
    EXPECT_TRUE(is_hermitian(h)) << name;
    EXPECT_LT(w_eigen_residual(h).second, 1e-12) << name;
    const Vec v = vacuum(10);
    const Vec hv = scarkit::apply(h, v);
    EXPECT_LT((hv - v.dot(hv) * v).norm(), 1e-12) << name;
  }
}

TEST(Canonical, TableForImHop) {
  const auto t = verify_table(h_imhop(9));
  EXPECT_TRUE(table_satisfied(t));
  ASSERT_TRUE(row(t, "n=1,m=1").lambda.has_value());
  EXPECT_LT(std::abs(*row(t, "n=1,m=1").lambda), 1e-14);
}

TEST(Canonical, TableForCreation) {
  const auto t = verify_table(site_op(9, 3, SiteOp::Sd));
  EXPECT_FALSE(row(t, "n>=1,m=0").satisfied);
  EXPECT_FALSE(row(t, "n>=1,m=0").violating_terms.empty());
}

TEST(Canonical, TableForNumber) {
  const auto t = verify_table(n_tot(9));
  EXPECT_TRUE(table_satisfied(t));
  EXPECT_NEAR(row(t, "n=1,m=1").lambda->real(), 1.0, 1e-14);
}

TEST(Canonical, TablePassImpliesVacuumEigenstate) {
  std::mt19937_64 rng(3);
  const int n = 8;
  for (int k = 0; k < 10; ++k) {
    const LocalOperator g = LocalOperator::identity(n, 0.7) + random_type1(n, 3, rng) + 0.3 * p_nonherm(n, k % n);
    ASSERT_TRUE(table_satisfied(verify_table(g)));
    const Vec v = vacuum(n);
    EXPECT_LT((scarkit::apply(g, v) - 0.7 * v).norm(), 1e-12);
  }
}

TEST(Canonical, DecomposeLinearCombination) {
  const int n = 10;
  const auto f = decompose(LocalOperator::identity(n, 3.0) + 2.0 * n_tot(n) + h_imhop(n));
  EXPECT_NEAR(f.omega_id.real(), 3.0, 1e-12);
  EXPECT_NEAR(f.omega_n, 2.0, 1e-12);
  EXPECT_NEAR(f.t_im, 1.0, 1e-12);
  EXPECT_TRUE(f.annihilators.empty());
  EXPECT_NEAR(f.energy_w, 5.0, 1e-12);
}

TEST(Canonical, DecomposeReHop) {
  const int n = 10;
  const auto f = decompose(h_rehop(n));
  EXPECT_NEAR(std::abs(f.omega_id), 0.0, 1e-14);
  EXPECT_NEAR(f.omega_n, 0.0, 1e-14);
  EXPECT_NEAR(f.t_im, 0.0, 1e-14);
  EXPECT_FALSE(f.annihilators.empty());
  EXPECT_LT(f.residual_norm, 1e-10);
}

TEST(Canonical, DecomposeHeisenberg) {
  const int n = 10;
  const auto f = decompose(h_heis(n));
  EXPECT_NEAR(f.omega_n, 0.0, 1e-14);
  EXPECT_NEAR(f.t_im, 0.0, 1e-14);
  EXPECT_LT(f.residual_norm, 1e-10);
  const std::vector<StateVector> st{vacuum(n), w_state(n)};
  for (const auto& x : f.annihilators) {
    EXPECT_TRUE(is_hermitian(x));
    for (const auto& psi : st) EXPECT_LT(scarkit::apply(x, psi).norm(), 1e-10);
  }
}

TEST(Canonical, AnnihilatorsKillWAndVacuum) {
  std::mt19937_64 rng(21);
  const int n = 10;
  const LocalOperator h = 1.5 * n_tot(n) - 0.4 * h_imhop(n) + random_type1(n, 3, rng);
  const auto f = decompose(h);
  for (const auto& x : f.annihilators) {
    EXPECT_TRUE(is_hermitian(x));
    EXPECT_LT(scarkit::apply(x, w_state(n)).norm(), 1e-10);
    EXPECT_LT(scarkit::apply(x, vacuum(n)).norm(), 1e-10);
    EXPECT_LE(x.range(), 2 * 3);
  }
  EXPECT_NEAR((f.omega_id + f.omega_n).real(), w_eigen_residual(h).first.real(), 1e-10);
}

TEST(Canonical, RandomRoundTrip) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst = 0.0, worst_res = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = k % 2 ? 8 : 10;
    const double g = u(rng), a = u(rng), b = u(rng);
    const LocalOperator h = LocalOperator::identity(n, g) + a * n_tot(n) + b * h_imhop(n) + random_type1(n, 3, rng);
    const auto f = decompose(h);
    worst = std::max({worst, std::abs(f.omega_id - g), std::abs(f.omega_n - a), std::abs(f.t_im - b)});
    worst_res = std::max(worst_res, f.residual_norm);
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_LT(worst_res, 1e-10);
}

TEST(Canonical, RejectsNonEigenstate) {
  const LocalOperator h = site_op(8, 0, SiteOp::X);
  try {
    decompose(h);
    FAIL() << "expected classification_error";
  } catch (const classification_error& e) {
    EXPECT_GT(e.residual(), 0.1);
  }
}

TEST(Canonical, RejectsNonHermitian) { EXPECT_THROW(decompose(p_nonherm(8, 0)), precondition_error); }

TEST(Canonical, RejectsShortChain) { EXPECT_THROW(decompose(correlated_hop(5, 0, 3) + dagger(correlated_hop(5, 0, 3))), precondition_error); }

TEST(Canonical, GeneralFormHasNoTTerm) {
  const int n = 9;
  std::mt19937_64 rng(4);
  const LocalOperator g = LocalOperator::identity(n, cplx(0.5, 0.2)) + cplx(1.0, -0.3) * n_tot(n) + h_imhop(n) +
                          2.0 * p_nonherm(n, 4) + random_type1(n, 2, rng);
  const auto f = decompose_general(g);
  EXPECT_NEAR(std::abs(f.omega_id - cplx(0.5, 0.2)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(f.omega_n - cplx(1.0, -0.3)), 0.0, 1e-12);
  EXPECT_LT(f.residual_norm, 1e-10);
  for (const auto& x : f.annihilators) EXPECT_LT(scarkit::apply(x, w_state(n)).norm(), 1e-10);
}

TEST(Canonical, AnnihilatorGeneratorsKillWAndVacuum) {
  const int n = 9;
  for (const auto& g : annihilator_generators(n, 2, 3)) {
    EXPECT_TRUE(is_hermitian(g));
    EXPECT_LT(scarkit::apply(g, w_state(n)).norm(), 1e-12);
    EXPECT_LT(scarkit::apply(g, vacuum(n)).norm(), 1e-12);
  }
}
