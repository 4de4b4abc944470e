#include <gtest/gtest.h>

#include <numbers>

#include "scarkit/dynamics.hpp"
#include "scarkit/states.hpp"

using namespace scarkit;

TEST(Dynamics, FqAtZeroMomentum) {
  EXPECT_NEAR(std::abs(fq(4, 16, 0.0)), std::sqrt(4.0 / 16.0), 1e-14);
  EXPECT_NEAR(std::abs(fq(1, 16, 1.3)), 0.25, 1e-14);
}

TEST(Dynamics, FqMatchesDftOfDroplet) {
  const int n = 12, m = 5;
  // droplet occupies sites 1..M; plane wave convention e^{-iqj} / sqrt(N)
  for (int k = 0; k < n; ++k) {
    const double q = momentum(k, n);
    cplx acc = 0.0;
    for (int j = 1; j <= m; ++j) acc += std::polar(1.0, -q * j) / std::sqrt(static_cast<double>(n) * m);
    EXPECT_NEAR(std::abs(acc - fq(m, n, q)), 0.0, 1e-13) << k;
  }
}

TEST(Dynamics, FqIsNormalised) {
  for (int m : {1, 7, 30}) {
    double s = 0.0;
    for (int k = 0; k < 64; ++k) s += std::norm(fq(m, 64, momentum(k, 64)));
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_THROW(fq(0, 10, 0.1), precondition_error);
}

TEST(Dynamics, InitialOccupations) {
  const DropletRun run(40, 7, Dispersion::rehop());
  const auto occ = occupations(run, 0.0);
  for (int j = 0; j < 40; ++j) EXPECT_NEAR(occ[static_cast<std::size_t>(j)], (j >= 1 && j <= 7) ? 1.0 / 7 : 0.0, 1e-12);
}

TEST(Dynamics, EvolutionIsUnitary) {
  for (const auto& d : {Dispersion::rehop(), Dispersion::imhop(), Dispersion::chop(0.3, 0.7)}) {
    const DropletRun run(101, 21, d);
    for (double t : {0.7, 13.0, 55.5}) {
      double s = 0.0;
      for (double x : occupations(run, t)) s += x;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Dynamics, ImHopDropletMovesAtUnitSpeed) {
  const DropletRun run(201, 51, Dispersion::imhop());
  EXPECT_NEAR(center_of_mass(run, 20.0) - center_of_mass(run, 0.0), 20.0, 0.5);
  const DropletRun slow(201, 51, Dispersion::imhop(0.5));
  EXPECT_NEAR(center_of_mass(slow, 20.0) - center_of_mass(slow, 0.0), 10.0, 0.5);
}

TEST(Dynamics, ReHopDropletDoesNotDrift) {
  const DropletRun run(201, 51, Dispersion::rehop());
  EXPECT_NEAR(center_of_mass(run, 30.0), center_of_mass(run, 0.0), 1e-8);
}

TEST(Dynamics, OverlapLossStartsAtZero) {
  const DropletRun run(60, 9, Dispersion::imhop());
  EXPECT_NEAR(std::abs(upsilon_finite(run, 0.0, 0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(upsilon_thermo(Dispersion::rehop(), 9, 0.0, 0)), 0.0, 1e-12);
}

TEST(Dynamics, UpsilonMatchesManyBodyOverlap) {
  // 1 - <W_M| e^{-iHt} T^G |W_M> for a single-particle droplet at N = 10
  const int n = 10, m = 3;
  const Dispersion d = Dispersion::imhop();
  const DropletRun run(n, m, d);
  const Mat h = single_particle_hamiltonian(d, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const double t = 1.7;
  const Mat u = es.eigenvectors() * (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp().matrix().asDiagonal() *
                es.eigenvectors().adjoint();
  Vec psi = Vec::Zero(n);
  for (int j = 1; j <= m; ++j) psi[j] = 1.0 / std::sqrt(static_cast<double>(m));
  for (int g : {0, 1, 2}) {
    Vec shifted = Vec::Zero(n);
    for (int j = 0; j < n; ++j) shifted[(j + g) % n] = psi[j];
    const cplx ov = shifted.dot(u * psi);
    EXPECT_NEAR(std::abs(1.0 - ov - upsilon_finite(run, t, g)), 0.0, 1e-12) << g;
  }
}

TEST(Dynamics, ChopReducesToPureKinds) {
  const DropletRun a(80, 11, Dispersion::chop(1.0, 0.0)), b(80, 11, Dispersion::rehop());
  const DropletRun c(80, 11, Dispersion::chop(0.0, 1.0)), d(80, 11, Dispersion::imhop());
  for (double t : {1.0, 9.0}) {
    EXPECT_NEAR(std::abs(upsilon_finite(a, t, 2) - upsilon_finite(b, t, 2)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(upsilon_finite(c, t, 2) - upsilon_finite(d, t, 2)), 0.0, 1e-13);
  }
}

TEST(Dynamics, ConstantShiftOnlyChangesPhase) {
  Dispersion d = Dispersion::rehop();
  d.shift = 0.9;
  const DropletRun a(80, 11, d), b(80, 11, Dispersion::rehop());
  const double t = 4.0;
  const cplx oa = 1.0 - upsilon_finite(a, t, 0), ob = 1.0 - upsilon_finite(b, t, 0);
  EXPECT_NEAR(std::abs(oa), std::abs(ob), 1e-13);
  EXPECT_NEAR(std::abs(oa - ob * std::polar(1.0, -0.9 * t)), 0.0, 1e-13);
  const auto na = occupations(a, t), nb = occupations(b, t);
  for (std::size_t j = 0; j < na.size(); ++j) EXPECT_NEAR(na[j], nb[j], 1e-13);
}

TEST(Dynamics, ThermoLimitMatchesLargeRing) {
  for (const auto& d : {Dispersion::rehop(), Dispersion::imhop(), Dispersion::chop(0.5, 0.5)})
    for (double t : {0.5, 6.0, 20.0}) {
      const DropletRun run(800, 25, d);
      EXPECT_NEAR(std::abs(upsilon_thermo(d, 25, t, 3) - upsilon_finite(run, t, 3)), 0.0, 1e-10);
    }
}

TEST(Dynamics, EarlyTimeExpansion) {
  const double t = 0.01;
  for (const auto& d : {Dispersion::rehop(), Dispersion::imhop(), Dispersion::chop(0.4, 0.8)})
    EXPECT_NEAR(std::abs(early_time(d, 20, t) - upsilon_thermo(d, 20, t, 0)), 0.0, 1e-6) << d.name();
  EXPECT_THROW(early_time(Dispersion::from_function([](double q) { return q * q; }, 7.0), 20, t), precondition_error);
}

TEST(Dynamics, SyntheticPowerLaw) {
  std::vector<double> t;
  std::vector<cplx> v;
  for (int i = 1; i <= 20; ++i) {
    t.push_back(i);
    v.push_back(3.0 * i * i);
  }
  const auto f = scaling_fit(t, v, 1, 20);
  EXPECT_NEAR(f.exponent, 2.0, 1e-12);
  EXPECT_NEAR(f.amplitude, 3.0, 1e-10);
  EXPECT_NEAR(std::abs(f.prefactor - 3.0), 0.0, 1e-10);
  EXPECT_THROW(scaling_fit(t, v, 1, 3), precondition_error);
}

TEST(Dynamics, ReHopLeakageGrowsAsSquareRoot) {
  const DropletRun run(400, 80, Dispersion::rehop());
  std::vector<double> t, y;
  for (double x : log_times(5, 100, 12)) {
    t.push_back(x);
    y.push_back(leakage(run, x, 0));
  }
  EXPECT_NEAR(power_fit(t, y).exponent, 0.5, 0.1);
}

TEST(Dynamics, ImHopComovingLeakageIsSlower) {
  const DropletRun run(400, 80, Dispersion::imhop());
  std::vector<double> t, y;
  for (double x : snapped_times(5, 100, 1.0, 5)) {
    t.push_back(x);
    y.push_back(leakage(run, x, static_cast<int>(std::lround(x))));
  }
  EXPECT_NEAR(power_fit(t, y).exponent, 1.0 / 3.0, 0.1);
}

TEST(Dynamics, BecOverlap) {
  const DropletRun run(120, 20, Dispersion::rehop());
  const auto b = bec_overlap(run, 3.0, 0, 1);
  EXPECT_NEAR(std::abs(b.overlap - (1.0 - upsilon_finite(run, 3.0, 0))), 0.0, 1e-14);
  const auto b4 = bec_overlap(run, 3.0, 0, 4);
  EXPECT_NEAR(std::abs(b4.overlap - std::pow(b.overlap, 4)), 0.0, 1e-13);
  EXPECT_THROW(bec_overlap(run, 1.0, 0, 0), precondition_error);
}

TEST(Dynamics, CurrentsSatisfyContinuity) {
  const DropletRun run(101, 21, Dispersion::imhop());
  const auto j = bond_currents(run, 3.0);
  const double h = 1e-5;
  const auto up = occupations(run, 3.0 + h), dn = occupations(run, 3.0 - h);
  for (int s = 0; s < 101; ++s) {
    const double dndt = (up[static_cast<std::size_t>(s)] - dn[static_cast<std::size_t>(s)]) / (2 * h);
    EXPECT_NEAR(dndt, j[static_cast<std::size_t>((s + 100) % 101)] - j[static_cast<std::size_t>(s)], 1e-7);
  }
}

TEST(Dynamics, ImHopCurrentOnPlaneWave) {
  // <J> on a plane wave equals the group velocity / N on every bond
  const int n = 10;
  for (int m : {1, 2, 3}) {
    const double q = momentum(m, n);
    const double e = w_q(n, m).dot(scarkit::apply(current_imhop(n, 3), w_q(n, m))).real();
    EXPECT_NEAR(std::abs(e), std::abs(std::cos(q)) / n, 1e-12);
  }
}

TEST(Dynamics, TimeGrids) {
  const auto a = log_times(1, 100, 3);
  EXPECT_NEAR(a[1], 10.0, 1e-12);
  const auto b = snapped_times(5, 10, 0.5, 1);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b.front(), 6.0);
  EXPECT_THROW(log_times(0, 1, 3), precondition_error);
}
