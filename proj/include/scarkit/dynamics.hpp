#pragma once

// Single-particle droplet quench on a ring of N sites, simulated in momentum space.
//
//   phi_j(t) = (1/sqrt N) sum_q f_q e^{iqj} e^{-i eps_q t},   q = 2 pi k / N,
//   Upsilon_G(t) = 1 - sum_q |f_q|^2 e^{i(qG - eps_q t)},     upsilon = M Upsilon.
// The droplet occupies sites 1..M at t = 0.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "scarkit/canonical.hpp"
#include "scarkit/errors.hpp"
#include "scarkit/fit.hpp"
#include "scarkit/opspace.hpp"

namespace scarkit {

enum class DispersionKind { ReHop, ImHop, CHop, Custom };

struct Dispersion {
  DispersionKind kind = DispersionKind::ReHop;
  double w = 1.0;
  double alpha = 0.0;  // CHop weights
  double beta = 0.0;
  double shift = 0.0;  // constant offset, e.g. from omega N_tot
  std::function<double(double)> custom;
  double custom_max_slope = 1.0;

  static Dispersion make(DispersionKind k, double w, double a = 0.0, double b = 0.0) {
    Dispersion d;
    d.kind = k;
    d.w = w;
    d.alpha = a;
    d.beta = b;
    return d;
  }
  static Dispersion rehop(double w = 1.0) { return make(DispersionKind::ReHop, w); }
  static Dispersion imhop(double w = 1.0) { return make(DispersionKind::ImHop, w); }
  static Dispersion chop(double a, double b, double w = 1.0) { return make(DispersionKind::CHop, w, a, b); }
  static Dispersion from_function(std::function<double(double)> f, double max_slope) {
    Dispersion d = make(DispersionKind::Custom, 1.0);
    d.custom = std::move(f);
    d.custom_max_slope = max_slope;
    return d;
  }

  double operator()(double q) const {
    switch (kind) {
      case DispersionKind::ReHop: return w * (1.0 - std::cos(q)) + shift;
      case DispersionKind::ImHop: return w * std::sin(q) + shift;
      case DispersionKind::CHop: return w * (alpha * (1.0 - std::cos(q)) + beta * std::sin(q)) + shift;
      default: return custom(q) + shift;
    }
  }

  /// Upper bound on |d eps / dq|.
  double max_slope() const {
    switch (kind) {
      case DispersionKind::ReHop:
      case DispersionKind::ImHop: return std::abs(w);
      case DispersionKind::CHop: return std::abs(w) * std::hypot(alpha, beta);
      default: return custom_max_slope;
    }
  }

  std::string name() const {
    switch (kind) {
      case DispersionKind::ReHop: return "rehop";
      case DispersionKind::ImHop: return "imhop";
      case DispersionKind::CHop: return "chop";
      default: return "custom";
    }
  }
};

inline double momentum(int k, int n) { return 2.0 * std::numbers::pi * k / n; }

/// Dirichlet factor F(q) = sin^2(qM/2) / sin^2(q/2), with F(0) = M^2.
inline double dirichlet_sq(int m, double q) {
  const double s = std::sin(q / 2);
  if (std::abs(s) < 1e-9) {
    // F(q) = M^2 (1 - (M^2 - 1) q^2 / 12 + ...)
    return static_cast<double>(m) * m * (1.0 - (static_cast<double>(m) * m - 1.0) * q * q / 12.0);
  }
  const double r = std::sin(q * m / 2) / s;
  return r * r;
}

/// Plane-wave amplitude of the droplet on sites 1..M.
inline cplx fq(int m, int n, double q) {
  if (m < 1 || m > n) throw precondition_error("fq: need 1 <= M <= N");
  const double s = std::sin(q / 2);
  const double ratio = std::abs(s) < 1e-12 ? static_cast<double>(m) : std::sin(q * m / 2) / s;
  return ratio / std::sqrt(static_cast<double>(m) * n) * std::polar(1.0, -q * (m + 1) / 2.0);
}

struct DropletRun {
  int n = 201;
  int m = 51;
  Dispersion dispersion = Dispersion::rehop();

  DropletRun() = default;
  DropletRun(int n_sites, int width, Dispersion d) : n(n_sites), m(width), dispersion(std::move(d)) {
    if (width < 1 || width > n_sites) throw precondition_error("DropletRun: need 1 <= M <= N");
  }

  double center() const { return (m + 1) / 2.0; }

  std::vector<cplx> f() const {
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = fq(m, n, momentum(k, n));
    return out;
  }

  /// Real-space amplitudes phi_j(t), j = 0..N-1.
  std::vector<cplx> amplitudes(double t) const {
    const auto f0 = f();
    std::vector<cplx> fk(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      fk[static_cast<std::size_t>(k)] = f0[static_cast<std::size_t>(k)] * std::polar(1.0, -dispersion(momentum(k, n)) * t);
    std::vector<cplx> out(static_cast<std::size_t>(n));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += fk[static_cast<std::size_t>(k)] * std::polar(1.0, momentum(static_cast<int>((static_cast<long>(k) * j) % n), n));
      out[static_cast<std::size_t>(j)] = norm * acc;
    }
    return out;
  }
};

inline std::vector<double> occupations(const DropletRun& run, double t) {
  const auto a = run.amplitudes(t);
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = std::norm(a[j]);
  return out;
}

/// Signed ring distance from x to site j, in (-N/2, N/2].
inline double ring_offset(double j, double x, int n) {
  double d = std::fmod(j - x, static_cast<double>(n));
  if (d > n / 2.0) d -= n;
  if (d <= -n / 2.0) d += n;
  return d;
}

/// Sum_j x_j n_j(t) with x_j the minimal-image position relative to the initial droplet center.
inline double center_of_mass(const DropletRun& run, double t) {
  const auto occ = occupations(run, t);
  double acc = 0.0;
  for (int j = 0; j < run.n; ++j) acc += (run.center() + ring_offset(j, run.center(), run.n)) * occ[static_cast<std::size_t>(j)];
  return acc;
}

inline cplx upsilon_finite(const DropletRun& run, double t, int g) {
  cplx overlap = 0.0;
  for (int k = 0; k < run.n; ++k) {
    const double q = momentum(k, run.n);
    overlap += dirichlet_sq(run.m, q) / (static_cast<double>(run.m) * run.n) *
               std::polar(1.0, q * g - run.dispersion(q) * t);
  }
  return 1.0 - overlap;
}

struct QuadratureOptions {
  double tol = 1e-12;
  int max_panels = 1 << 16;
};

/// Limit N -> infinity of Upsilon_G(t, M, N): int dq/2pi F(q)/M (1 - e^{i(qG - eps_q t)}).
inline cplx upsilon_thermo(const Dispersion& d, int m, double t, int g, const QuadratureOptions& opt = {}) {
  if (m < 1) throw precondition_error("upsilon_thermo: need M >= 1");
  auto integrand = [&](double q) {
    return dirichlet_sq(m, q) / m * (1.0 - std::polar(1.0, q * g - d(q) * t));
  };
  auto composite = [&](int panels) {
    const double h = 2.0 * std::numbers::pi / panels;
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = -std::numbers::pi + p * h;
      acc += boost::math::quadrature::gauss<double, 20>::integrate(integrand, a, a + h);
    }
    return acc / (2.0 * std::numbers::pi);
  };
  int panels = 8 + static_cast<int>(std::ceil((std::abs(t) * d.max_slope() + m + std::abs(g)) / 2));
  cplx prev = composite(panels);
  while (true) {
    if (2 * panels > opt.max_panels)
      throw convergence_error("upsilon_thermo: quadrature did not converge", std::abs(composite(panels) - prev));
    panels *= 2;
    const cplx cur = composite(panels);
    if (std::abs(cur - prev) < opt.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
}

/// Particle weight outside |j - center - G| <= M/2 (strict inequality counts as outside).
inline double leakage(const DropletRun& run, double t, int g) {
  const auto occ = occupations(run, t);
  double acc = 0.0;
  for (int j = 0; j < run.n; ++j)
    if (std::abs(ring_offset(j, run.center() + g, run.n)) > run.m / 2.0) acc += occ[static_cast<std::size_t>(j)];
  return acc;
}

/// Second-order small-t expansion of Upsilon_0(t, M) in the thermodynamic limit.
inline cplx early_time(const Dispersion& d, int m, double t) {
  if (m < 2) throw precondition_error("early_time: need M >= 2");
  const double w = d.w;
  const cplx I(0.0, 1.0);
  switch (d.kind) {
    case DispersionKind::ReHop: return I * w * t / double(m) + w * w * t * t / (2.0 * m);
    case DispersionKind::ImHop: return w * w * t * t / (2.0 * m);
    case DispersionKind::CHop:
      return I * d.alpha * w * t / double(m) + (d.alpha * d.alpha + d.beta * d.beta) * w * w * t * t / (2.0 * m);
    default: throw precondition_error("early_time: no closed form for custom dispersions");
  }
}

struct BecOverlap {
  cplx overlap;      // (1 - Upsilon)^p
  cplx exponential;  // e^{-rho upsilon} with rho = p / M
};

inline BecOverlap bec_overlap(const DropletRun& run, double t, int g, int p) {
  if (p < 1) throw precondition_error("bec_overlap: need p >= 1");
  const cplx u = upsilon_finite(run, t, g);
  return {std::pow(1.0 - u, p), std::exp(-static_cast<double>(p) * u)};
}

struct ScalingFit {
  double exponent = 0.0;
  double amplitude = 0.0;  // exp(intercept) of log|upsilon| vs log t
  cplx prefactor = 0.0;    // least-squares c in upsilon ~ c t^exponent
  double stderr_exponent = 0.0;
  int n_points = 0;
};

inline ScalingFit scaling_fit(const std::vector<double>& t, const std::vector<cplx>& v, double lo, double hi) {
  if (t.size() != v.size()) throw precondition_error("scaling_fit: length mismatch");
  std::vector<double> x, y;
  std::vector<cplx> vv;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= lo && t[i] <= hi) {
      if (std::abs(v[i]) <= 0.0) throw precondition_error("scaling_fit: zero value in window");
      x.push_back(t[i]);
      y.push_back(std::abs(v[i]));
      vv.push_back(v[i]);
    }
  if (x.size() < 6) throw precondition_error("scaling_fit: fewer than 6 points in the fit window");
  const PowerFit pf = power_fit(x, y, 6);
  ScalingFit out;
  out.exponent = pf.exponent;
  out.amplitude = pf.prefactor;
  out.stderr_exponent = pf.stderr_exponent;
  out.n_points = pf.n_points;
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ta = std::pow(x[i], out.exponent);
    num += vv[i] * ta;
    den += ta * ta;
  }
  out.prefactor = num / den;
  return out;
}

inline std::vector<double> log_times(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0) || !(hi > lo)) throw precondition_error("log_times: need 0 < lo < hi and count >= 2");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

/// Times in [lo, hi] at which speed * t is an integer, every `stride` lattice steps.
inline std::vector<double> snapped_times(double lo, double hi, double speed, int stride = 1) {
  if (!(speed > 0)) throw precondition_error("snapped_times: need speed > 0");
  std::vector<double> out;
  for (long g = static_cast<long>(std::ceil(lo * speed - 1e-9)); g <= static_cast<long>(std::floor(hi * speed + 1e-9)); ++g)
    if (g % stride == 0) out.push_back(g / speed);
  return out;
}

/// Dense single-particle Hamiltonian h_jk = (1/N) sum_q eps_q e^{iq(j-k)}.
inline Mat single_particle_hamiltonian(const Dispersion& d, int n) {
  Mat h(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      cplx acc = 0.0;
      for (int p = 0; p < n; ++p) acc += d(momentum(p, n)) * std::polar(1.0, momentum(p, n) * (j - k));
      h(j, k) = acc / static_cast<double>(n);
    }
  return h;
}

/// Bond currents J_j (j -> j+1) for nearest-neighbour dispersions: J_j = -2 Im(conj(phi_j) h_{j,j+1} phi_{j+1}).
/// Continuity: dn_j/dt = J_{j-1} - J_j.
inline std::vector<double> bond_currents(const DropletRun& run, double t) {
  const Mat h = single_particle_hamiltonian(run.dispersion, run.n);
  const auto a = run.amplitudes(t);
  std::vector<double> out(static_cast<std::size_t>(run.n));
  for (int j = 0; j < run.n; ++j) {
    const int k = (j + 1) % run.n;
    out[static_cast<std::size_t>(j)] = -2.0 * std::imag(std::conj(a[static_cast<std::size_t>(j)]) * h(j, k) * a[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Many-body current on bond (j, j+1) for eps = w (1 - cos q): -(i w / 2)(s_j^dag s_{j+1} - h.c.).
inline LocalOperator current_rehop(int n, int j, double w = 1.0) {
  const cplx c(0.0, -0.5 * w);
  return hop(n, j, j + 1, c) - hop(n, j + 1, j, c);
}

/// Many-body current on bond (j, j+1) for eps = w sin q on plane waves e^{iqj}: (w / 2)(s_j^dag s_{j+1} + h.c.).
inline LocalOperator current_imhop(int n, int j, double w = 1.0) {
  return hop(n, j, j + 1, 0.5 * w) + hop(n, j + 1, j, 0.5 * w);
}

}  // namespace scarkit
