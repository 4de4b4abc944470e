// Acceptance runner: one block per criterion, PASS/FAIL per sub-check.
// Usage: acceptance [--only K]   (exit status 1 when any selected check fails)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scarkit/scarkit.hpp"

using namespace scarkit;

namespace {

int g_failed = 0;

void check(bool ok, const std::string& what) {
  std::printf("  [%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) ++g_failed;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion1() {
  const int n = 8;
  const std::vector<StateVector> st{vacuum(n), w_state(n)};
  for (int rp : {2, 3, 4}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = count_type_classes(n, 2, rp, st);
    const double dt = seconds_since(t0);
    check(c.n_ii == 1 && c.n_iii == 1,
          "N=8 R=2 R'=" + std::to_string(rp) + " {vac, W}: N_II=" + std::to_string(c.n_ii) + " N_III=" +
              std::to_string(c.n_iii) + " (want 1, 1)");
    check(dt < 60.0, "  runtime " + num(dt) + " s < 60 s");
  }
  for (int rp : {2, 3}) {
    const auto c = count_type_classes(n, 2, rp, {vacuum(n)});
    check(c.n_ii == 0 && c.n_iii == 0, "product state only, R'=" + std::to_string(rp) + ": (" +
                                           std::to_string(c.n_ii) + ", " + std::to_string(c.n_iii) + ") (want 0, 0)");
  }
}

void criterion2() {
  std::mt19937_64 rng(11);
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
  check(worst < 1e-9, "200 random Hamiltonians: max |(gamma, alpha, beta) error| = " + num(worst) + " < 1e-9");
  check(worst_res < 1e-10, "max reconstruction residual " + num(worst_res) + " < 1e-10");
}

void criterion3() {
  const int n = 10;
  const std::vector<StateVector> st{vacuum(n), w_state(n)};
  const std::vector<StateVector> st3{vacuum(n), w_state(n), w_p(n, 2)};
  const cplx half_i(0.0, 0.5);
  double im_gen = 0, im_herm = 1e9, nt_gen = 1e9, dist = 0, dist2 = 0;
  for (const auto& lam : patch_sweep(n, 2, 1, {})) {
    const auto s = boundary_solve(h_imhop(n), st, lam, 2, false);
    im_gen = std::max(im_gen, s.residual);
    im_herm = std::min(im_herm, boundary_solve(h_imhop(n), st, lam, 2, true).residual);
    nt_gen = std::min(nt_gen, boundary_solve(n_tot(n), st, lam, 2, false).residual);
    const LocalOperator expected =
        site_op(n, lam.left(), SiteOp::N, half_i) - site_op(n, lam.right(), SiteOp::N, half_i);
    dist = std::max(dist, action_distance(s.left_op + s.right_op, expected, st));
  }
  check(im_gen < 1e-10, "ImHop unconstrained residual (max over patches) " + num(im_gen) + " < 1e-10");
  check(dist < 1e-10, "ImHop boundary action matches (i/2)(n_l - n_r): distance " + num(dist));
  check(im_herm > 1e-3, "ImHop Hermitian-constrained residual (min) " + num(im_herm) + " > 1e-3");
  check(nt_gen > 1e-3, "N_tot unconstrained residual (min) " + num(nt_gen) + " > 1e-3");

  const auto t2 = classify(h_imhop2(n), st3, {2});
  check(t2.value == TypeValue::II, std::string("ImHop2 on {vac, W, W^2} classified ") + type_name(t2.value));
  for (const auto& lam : patch_sweep(n, 2, h_imhop2(n).range(), {})) {
    const auto s = boundary_solve(h_imhop2(n), st3, lam, 2, false);
    const int l = lam.left(), r = lam.right();
    const LocalOperator expected = LocalOperator::product(n, {{l, SiteOp::N}, {ring_mod(l + 1, n), SiteOp::N}}, half_i) -
                                   LocalOperator::product(n, {{ring_mod(r - 1, n), SiteOp::N}, {r, SiteOp::N}}, half_i);
    dist2 = std::max(dist2, action_distance(s.left_op + s.right_op, expected, st3));
  }
  check(dist2 < 1e-10, "ImHop2 boundary action matches (i/2)(n_l n_l+1 - n_r-1 n_r): distance " + num(dist2));
  const auto e = equivalence_test(h_imhop(n), h_imhop2(n), st3, 2);
  check(e.outcome == Equivalence::Different,
        std::string("equivalence(ImHop, ImHop2) -> ") + equivalence_name(e.outcome) + " (residual " + num(e.residual) + ")");
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto build = random_type1_builder(1, 3, 1.0);
  const std::vector<int> sizes{8, 9, 10, 11, 12, 13, 14};
  const auto sq = variance_scan_q_sizes(build, sizes, 1);
  const double eq = sq.fit_variance(0.0, 10.0).exponent;
  check(std::abs(eq - 2.0) <= 0.1, "W_q variance exponent in q, N=8..14, seed 1: " + num(eq) + " (want 2.0 +- 0.1)");
  const auto sn = variance_scan_N(build, 2, sizes);
  const double en = sn.fit_variance(8, 14).exponent;
  check(std::abs(en + 1.0) <= 0.2, "W^2 variance exponent in N: " + num(en) + " (want -1.0 +- 0.2)");
  std::vector<double> x, y;
  for (const auto& p : sn.points) {
    const auto f = decompose(build(static_cast<int>(p.control)));
    x.push_back(p.control);
    y.push_back(std::abs(p.expectation - f.omega_id.real() - 2.0 * f.omega_n));
  }
  const double ee = power_fit(x, y).exponent;
  check(std::abs(ee + 1.0) <= 0.3, "<W^2|H|W^2> - 2 omega exponent: " + num(ee) + " (want -1.0 +- 0.3)");
  const double dt = seconds_since(t0);
  check(dt < 300.0, "runtime " + num(dt) + " s < 300 s");
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 200;
  struct Case {
    const char* name;
    Dispersion d;
    int z;
    double speed;
    double exponent;
    std::optional<cplx> prefactor;
  };
  const double rp = std::sqrt(1.0 / std::numbers::pi);
  const std::vector<Case> cases{
      {"ReHop G=0", Dispersion::rehop(), 2, 0.0, 0.5, cplx(rp, rp)},
      {"ImHop G=0", Dispersion::imhop(), 1, 0.0, 1.0, std::nullopt},
      {"ImHop G=wt", Dispersion::imhop(), 3, 1.0, 1.0 / 3.0, cplx(0.411, 0.0)},
      {"CHop(0.5,0.5) G=bwt", Dispersion::chop(0.5, 0.5), 2, 0.5, 0.5, std::nullopt},
  };
  for (const auto& c : cases)
    for (int m : {20, 50, 80}) {
      const double hi = std::min(std::pow(m, c.z) / 3.0, n / 2.0);
      const auto ts = c.speed > 0 ? snapped_times(5, hi, c.speed) : log_times(5, hi, 30);
      const DropletRun run(n, m, c.d);
      std::vector<cplx> v;
      for (double t : ts) v.push_back(static_cast<double>(m) * upsilon_finite(run, t, static_cast<int>(std::lround(c.speed * t))));
      const auto f = scaling_fit(ts, v, 5, hi);
      const std::string tag = std::string(c.name) + " M=" + std::to_string(m) + " window [5, " + num(hi) + "]";
      check(std::abs(f.exponent - c.exponent) <= 0.05,
            tag + ": exponent " + num(f.exponent) + " (want " + num(c.exponent) + " +- 0.05)");
      if (c.prefactor) {
        const double rel = std::abs(f.prefactor - *c.prefactor) / std::abs(*c.prefactor);
        check(rel <= 0.1, tag + ": prefactor " + num(f.prefactor.real()) + (f.prefactor.imag() < 0 ? "" : "+") +
                              num(f.prefactor.imag()) + "i, relative deviation " + num(rel) + " <= 0.1");
      }
    }
  const double dt = seconds_since(t0);
  check(dt < 120.0, "runtime " + num(dt) + " s < 120 s");
}

void criterion6() {
  for (const auto& d : {Dispersion::rehop(), Dispersion::imhop(), Dispersion::chop(0.5, 0.5)}) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double t = 0.5 + i * 4.7;
      const int g = (i * 3) % 11 - 5;
      const int m = 20 + i;
      const DropletRun run(800, m, d);
      worst = std::max(worst, std::abs(upsilon_thermo(d, m, t, g) - upsilon_finite(run, t, g)));
    }
    check(worst < 1e-6, d.name() + ": max |thermo - finite(N=800)| over 20 (t, G) samples = " + num(worst));
  }
}

void criterion7() {
  auto spectrum_ok = [](const MPSTensor& t, cplx second) {
    auto ev = transfer_spectrum(t);
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
    double err = std::abs(ev[0] - 1.0);
    for (std::size_t k = 1; k < ev.size(); ++k) err = std::max(err, std::abs(ev[k] - second));
    return err;
  };
  const auto aklt = builtin_aklt(), ssh = builtin_ssh();
  const double ea = spectrum_ok(aklt, -1.0 / 3.0), es = spectrum_ok(ssh, 0.0);
  check(ea < 1e-12, "AKLT transfer spectrum {1, -1/3 x3}: error " + num(ea));
  check(es < 1e-12, "SSH transfer spectrum {1, 0 x3}: error " + num(es));
  check(injectivity_length(aklt) == 2, "AKLT injectivity length " + std::to_string(injectivity_length(aklt).value_or(-1)));
  const auto rz = classify_symmetry_generator(aklt, spin1('z'));
  const auto rx = classify_symmetry_generator(aklt, spin1('x'));
  const auto rs = classify_symmetry_generator(ssh, ssh_sz());
  check(rz.type == TypeValue::II, std::string("(AKLT, S^z) -> ") + type_name(rz.type));
  check(rx.type == TypeValue::II, std::string("(AKLT, S^x) -> ") + type_name(rx.type));
  check(rs.type == TypeValue::I, std::string("(SSH, S^z) -> ") + type_name(rs.type));
  for (char ax : {'z', 'x'}) {
    const double th = 0.3;
    const auto pt = push_through_check(aklt, spin1(ax), th);
    const auto bo = boundary_operators(aklt, *pt.v, 2);
    double worst = 0.0;
    for (int n : {6, 8})
      for (int len = 4; len < n; ++len)
        worst = std::max(worst, boundary_action_error(aklt, spin1(ax), th, bo.left, bo.right, pt.phi, n, 1, len));
    check(worst < 1e-9, std::string("AKLT S^") + ax + " boundary operators reproduce U_Lambda on N=6,8: error " + num(worst));
  }
}

void criterion8() {
  // unitarity
  double norm_err = 0.0;
  for (const auto& d : {Dispersion::rehop(), Dispersion::imhop(), Dispersion::chop(0.5, 0.5)})
    for (double t : {0.0, 3.3, 47.0}) {
      double s = 0.0;
      for (double x : occupations(DropletRun(201, 51, d), t)) s += x;
      norm_err = std::max(norm_err, std::abs(s - 1.0));
    }
  check(norm_err < 1e-12, "sum_j n_j(t) = 1: max deviation " + num(norm_err));

  // truncation linearity and idempotence
  std::mt19937_64 rng(8);
  const int n = 10;
  const LocalOperator a = random_type1(n, 2, rng), b = h_imhop(n) + 0.3 * h_rehop(n);
  const Region lam(1, 7, n);
  double lin = 0.0, idem = 0.0;
  for (Basis bs : {Basis::Pauli, Basis::Boson}) {
    const LocalOperator ta = truncate(a, lam, bs, 2), tb = truncate(b, lam, bs, 2);
    lin = std::max(lin, max_coeff_diff(to_pauli_basis(truncate(0.7 * a - 1.9 * b, lam, bs, 2)),
                                       to_pauli_basis(0.7 * ta - 1.9 * tb)));
    idem = std::max(idem, max_coeff_diff(to_pauli_basis(truncate(ta, lam, bs, 2)), to_pauli_basis(ta)));
  }
  check(lin < 1e-12, "truncation linearity: " + num(lin));
  check(idem < 1e-12, "truncation idempotence: " + num(idem));

  // null-space vectors as eigen-operators
  const int nn = 6;
  const std::vector<StateVector> st{vacuum(nn), w_state(nn)};
  double defect = 0.0;
  int dims = 0;
  for (CorrKind kind : {CorrKind::H, CorrKind::G}) {
    const OperatorBasis basis = pauli_basis(Region(0, 2, nn));
    const auto rep = null_space(build_correlation(basis, st, kind));
    dims += rep.dim;
    for (Eigen::Index k = 0; k < rep.basis.cols(); ++k)
      defect = std::max(defect, eigen_defect(recombine(basis, rep.basis.col(k)), st));
  }
  check(dims > 0 && defect < 1e-8, "null-space vectors (" + std::to_string(dims) + ") are eigen-operators: defect " + num(defect));

  // Schmidt weights
  double sch = 0.0;
  for (int p : {1, 2, 3})
    for (const Region& r : {Region(0, 3, 10), Region(2, 8, 10), Region(7, 1, 10)}) {
      const auto exact = schmidt_w_family(10, p, r);
      auto dense = schmidt_dense(w_p(10, p), r);
      std::vector<double> w;
      for (const auto& c : exact.coefficients) w.push_back(c.weight);
      std::sort(w.begin(), w.end(), std::greater<>());
      for (std::size_t k = 0; k < dense.size(); ++k) sch = std::max(sch, std::abs(dense[k] - (k < w.size() ? w[k] : 0.0)));
    }
  check(sch < 1e-10, "Schmidt weights vs dense SVD: " + num(sch));

  // Pauli / boson round trip
  double rt = 0.0;
  for (const LocalOperator& op : {a, b, p_nonherm(n, 3), h_imhop2(n), h_dmi(n)}) {
    rt = std::max(rt, max_coeff_diff(to_pauli_basis(to_boson_basis(op)), to_pauli_basis(op)));
    rt = std::max(rt, max_coeff_diff(to_boson_basis(to_pauli_basis(op)), to_boson_basis(op)));
  }
  check(rt < 1e-12, "Pauli/boson round trip: " + num(rt));
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  const std::vector<std::pair<const char*, std::function<void()>>> criteria{
      {"class counts", criterion1},          {"canonical round trip", criterion2}, {"boundary actions", criterion3},
      {"variance scalings", criterion4},     {"droplet scalings", criterion5},     {"thermodynamic quadrature", criterion6},
      {"MPS symmetry generators", criterion7}, {"property suites", criterion8},
  };
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && only != static_cast<int>(k + 1)) continue;
    std::printf("criterion %zu: %s\n", k + 1, criteria[k].first);
    const int before = g_failed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second();
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    std::printf("  => %s (%.2f s)\n", g_failed == before ? "PASS" : "FAIL", seconds_since(t0));
  }
  return g_failed == 0 ? 0 : 1;
}
