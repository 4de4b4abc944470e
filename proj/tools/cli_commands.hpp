#pragma once

// Subcommands of the scarkit driver. run() returns the process exit code:
//   0 success, 2 precondition error, 3 indeterminate classification, 64 usage error.

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "scarkit/boundary.hpp"
#include "scarkit/canonical.hpp"
#include "scarkit/dynamics.hpp"
#include "scarkit/mps.hpp"
#include "scarkit/nullspace.hpp"
#include "scarkit/scars.hpp"
#include "scarkit/version.hpp"

namespace scarcli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitIndeterminate = 3;
inline constexpr int kExitUsage = 64;

struct Common {
  std::string out;
  std::uint64_t seed = 1;
};

inline json config_of(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "h") continue;
    std::vector<std::string> r = o->reduced_results();
    if (r.empty()) {
      const std::string d = o->get_default_str();
      if (d.empty()) continue;
      r = {d};
    }
    cfg[name] = r.size() == 1 ? json(r.front()) : json(r);
  }
  return cfg;
}

inline json envelope(const CLI::App& sub, const Common& c) {
  return json{{"schema", 1},
              {"version", std::string(scarkit::kVersion)},
              {"command", sub.get_name()},
              {"seed", c.seed},
              {"config", config_of(sub)}};
}

/// Writes to `path` or to `out` when path is empty or "-".
inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw precondition_error("cannot write '" + path + "'");
  f << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

// ---------------------------------------------------------------------------

struct DecomposeArgs {
  std::vector<std::string> ham;
  int n = 10;
  bool general = false;
  bool list = false;
};

inline int cmd_decompose(const CLI::App& sub, const Common& c, const DecomposeArgs& a, std::ostream& out) {
  const LocalOperator h = make_hamiltonian(a.ham, a.n, c.seed);
  json j = envelope(sub, c);
  json terms = json::array();
  if (a.general) {
    const GeneralForm g = decompose_general(h);
    j["form"] = "general";
    j["Omega"] = complex_json(g.omega_id);
    j["omega"] = complex_json(g.omega_n);
    j["annihilators"] = g.annihilators.size();
    j["residual"] = g.residual_norm;
    if (a.list)
      for (const auto& x : g.annihilators) terms.push_back(to_string(to_boson_basis(x)));
  } else {
    const CanonicalForm f = decompose(h);
    j["form"] = "hermitian";
    j["Omega"] = complex_json(f.omega_id);
    j["omega"] = f.omega_n;
    j["t"] = f.t_im;
    j["E_W"] = f.energy_w;
    j["annihilators"] = f.annihilators.size();
    j["residual"] = f.residual_norm;
    if (a.list)
      for (const auto& x : f.annihilators) terms.push_back(to_string(to_boson_basis(x)));
  }
  if (a.list) j["annihilator_terms"] = terms;
  write_text(c.out, dump(j), out);
  return kExitOk;
}

struct ClassifyArgs {
  std::vector<std::string> ham;
  std::vector<std::string> equiv;
  std::string states = "w,vacuum";
  int n = 10;
  std::string r_max = "2";
  double accept = 1e-8;
  double reject = 1e-3;
};

inline int cmd_classify(const CLI::App& sub, const Common& c, const ClassifyArgs& a, std::ostream& out) {
  const LocalOperator h = make_hamiltonian(a.ham, a.n, c.seed);
  const auto states = make_states(a.states, a.n);
  SweepOptions opt;
  opt.thresholds = {a.accept, a.reject};
  const auto r_list = parse_int_list(a.r_max);
  const TypeLabel label = classify(h, states, r_list, opt);
  json j = envelope(sub, c);
  j["type"] = type_name(label.value);
  json ev = json::array();
  for (const auto& e : label.evidence)
    ev.push_back({{"l", e.lam.left()},
                  {"r", e.lam.right()},
                  {"R_max", e.r_max},
                  {"hermitian_residual", e.hermitian_residual},
                  {"general_residual", e.general_residual}});
  j["evidence"] = ev;
  json per = json::object();
  for (const auto& [rm, t] : label.per_r_max) per[std::to_string(rm)] = type_name(t);
  j["per_R_max"] = per;
  j["independence_residual"] = label.independence_residual;
  if (!a.equiv.empty()) {
    const LocalOperator hb = make_hamiltonian(a.equiv, a.n, c.seed);
    const EquivalenceResult e = equivalence_test(h, hb, states, r_list.back(), opt);
    j["equivalence"] = {{"outcome", equivalence_name(e.outcome)},
                        {"alpha", e.alpha},
                        {"beta", e.beta},
                        {"residual", e.residual}};
  }
  write_text(c.out, dump(j), out);
  return label.value == TypeValue::Indeterminate ? kExitIndeterminate : kExitOk;
}

struct ScanArgs {
  int n = 8;
  int r = 2;
  int rp = 4;
  std::string states = "w,vacuum";
  bool degenerate = false;
  double tol = 1e-10;
};

inline int cmd_scan(const CLI::App& sub, const Common& c, const ScanArgs& a, std::ostream& out) {
  const auto states = make_states(a.states, a.n);
  const ClassCounts cc = count_type_classes(a.n, a.r, a.rp, states, a.degenerate, a.tol);
  json j = envelope(sub, c);
  j["N_II"] = cc.n_ii;
  j["N_III"] = cc.n_iii;
  j["dims"] = cc.dims;
  j["diagnostics"] = cc.diagnostics;
  j["tol"] = cc.tol;
  write_text(c.out, dump(j), out);
  return kExitOk;
}

struct VarianceArgs {
  std::string scan = "q";
  std::vector<std::string> ham{"random:range=3,t=1"};
  std::string sizes = "8..14";
  int p = 2;
  int m = 1;
  int fit_min = 8;
  std::string csv;
};

inline int cmd_variance(const CLI::App& sub, const Common& c, const VarianceArgs& a, std::ostream& out) {
  const auto sizes = parse_int_list(a.sizes);
  const std::uint64_t seed = c.seed;
  const std::vector<std::string> specs = a.ham;
  HamiltonianBuilder build = [specs, seed](int n) { return make_hamiltonian(specs, n, seed); };
  VarianceScan scan;
  std::vector<double> excess;
  if (a.scan == "q") {
    scan = variance_scan_q_sizes(build, sizes, a.m);
  } else if (a.scan == "N") {
    scan = variance_scan_N(build, a.p, sizes);
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const CanonicalForm f = decompose(build(sizes[k]));
      excess.push_back(scan.points[k].expectation - f.omega_id.real() - a.p * f.omega_n);
    }
  } else {
    throw precondition_error("variance: --scan must be q or N");
  }
  std::ostringstream csv;
  csv << "control,N,expectation,variance" << (excess.empty() ? "" : ",excess") << "\n";
  json pts = json::array();
  for (std::size_t k = 0; k < scan.points.size(); ++k) {
    const auto& pt = scan.points[k];
    csv << fmt(pt.control) << ',' << sizes[k] << ',' << fmt(pt.expectation) << ',' << fmt(pt.variance);
    json row{{"control", pt.control}, {"N", sizes[k]}, {"expectation", pt.expectation}, {"variance", pt.variance},
             {"lifetime_bound", lifetime_bound(pt.variance)}};
    if (!excess.empty()) {
      csv << ',' << fmt(excess[k]);
      row["excess"] = excess[k];
    }
    csv << "\n";
    pts.push_back(row);
  }
  // fits use sizes >= fit_min
  std::vector<double> x, y, ye;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < a.fit_min) continue;
    x.push_back(scan.points[k].control);
    y.push_back(scan.points[k].variance);
    if (!excess.empty()) ye.push_back(std::abs(excess[k]));
  }
  json j = envelope(sub, c);
  j["points"] = pts;
  if (x.size() >= 2) {
    const PowerFit f = power_fit(x, y);
    j["fit"] = {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"stderr", f.stderr_exponent}, {"points", f.n_points}};
    if (!ye.empty()) {
      const PowerFit fe = power_fit(x, ye);
      j["excess_fit"] = {{"exponent", fe.exponent}, {"prefactor", fe.prefactor}, {"stderr", fe.stderr_exponent}};
    }
  }
  if (!a.csv.empty()) write_text(a.csv, csv.str(), out);
  write_text(c.out, dump(j), out);
  return kExitOk;
}

struct DropletArgs {
  std::string dispersion = "rehop";
  int n = 201;
  int m = 51;
  int p = 1;
  std::string g = "0";
  std::string observable;
  double tmin = 0.0;
  double tmax = 100.0;
  int samples = 5;
  double fit_lo = 5.0;
  double fit_hi = 0.0;
  std::string emit_plot;
};

/// G as a function of time: an integer, "wt", "bwt" or "vt:v=...".
inline std::pair<double, int> parse_shift(const std::string& spec, const Dispersion& d) {
  const NamedSpec ns = parse_named(spec);
  if (ns.name == "wt") return {d.w, 0};
  if (ns.name == "bwt") return {d.w * d.beta, 0};
  if (ns.name == "vt") return {param(ns.params, "v", 1.0), 0};
  return {0.0, static_cast<int>(std::lround(parse_real(ns.name)))};
}

inline int cmd_droplet(const CLI::App& sub, const Common& c, const DropletArgs& a, std::ostream& out) {
  const Dispersion d = make_dispersion(a.dispersion);
  const DropletRun run(a.n, a.m, d);
  const auto [speed, g0] = parse_shift(a.g, d);
  if (speed < 0) throw precondition_error("droplet: shift speed must be non-negative");
  const bool g_given = sub.count("--G") > 0;
  const std::string obs = a.observable.empty() ? (g_given ? "upsilon" : "occupation") : a.observable;
  if (!(a.tmax > a.tmin) || a.tmin < 0) throw precondition_error("droplet: need 0 <= tmin < tmax");

  json j = envelope(sub, c);
  std::ostringstream csv, plot;
  auto shift_at = [&](double t) { return g0 + static_cast<int>(std::lround(speed * t)); };

  if (obs == "occupation" || obs == "current") {
    if (a.samples < 1) throw precondition_error("droplet: need --samples >= 1");
    csv << "t,j," << (obs == "occupation" ? "n_j" : "J_j") << "\n";
    for (int k = 0; k < a.samples; ++k) {
      const double t = a.samples == 1 ? a.tmax : a.tmin + (a.tmax - a.tmin) * k / (a.samples - 1);
      const auto v = obs == "occupation" ? occupations(run, t) : bond_currents(run, t);
      plot << "# t = " << fmt(t) << "\n";
      for (int s = 0; s < a.n; ++s) {
        csv << fmt(t) << ',' << s << ',' << fmt(v[static_cast<std::size_t>(s)]) << "\n";
        plot << s << ' ' << fmt(v[static_cast<std::size_t>(s)]) << "\n";
      }
      plot << "\n\n";
    }
  } else if (obs == "upsilon" || obs == "overlap") {
    std::vector<double> ts;
    if (speed > 0) ts = snapped_times(std::max(a.tmin, 1e-9), a.tmax, speed);
    else ts = log_times(std::max(a.tmin, 0.1), a.tmax, std::max(a.samples, 30));
    if (obs == "upsilon") csv << "t,G,re_upsilon,im_upsilon,abs_upsilon\n";
    else csv << "t,G,re_overlap,im_overlap,re_exp,im_exp\n";
    std::vector<cplx> vals;
    for (double t : ts) {
      const int g = shift_at(t);
      if (obs == "upsilon") {
        const cplx u = static_cast<double>(a.m) * upsilon_finite(run, t, g);
        vals.push_back(u);
        csv << fmt(t) << ',' << g << ',' << fmt(u.real()) << ',' << fmt(u.imag()) << ',' << fmt(std::abs(u)) << "\n";
        plot << fmt(t) << ' ' << fmt(std::abs(u)) << ' ' << fmt(u.real()) << ' ' << fmt(u.imag()) << "\n";
      } else {
        const BecOverlap b = bec_overlap(run, t, g, a.p);
        csv << fmt(t) << ',' << g << ',' << fmt(b.overlap.real()) << ',' << fmt(b.overlap.imag()) << ','
            << fmt(b.exponential.real()) << ',' << fmt(b.exponential.imag()) << "\n";
        plot << fmt(t) << ' ' << fmt(std::abs(b.overlap)) << ' ' << fmt(std::abs(b.exponential)) << "\n";
      }
    }
    if (obs == "upsilon") {
      const double hi = a.fit_hi > 0 ? a.fit_hi : a.tmax;
      try {
        const ScalingFit f = scaling_fit(ts, vals, a.fit_lo, hi);
        j["fit"] = {{"exponent", f.exponent},
                    {"amplitude", f.amplitude},
                    {"prefactor", complex_json(f.prefactor)},
                    {"stderr", f.stderr_exponent},
                    {"points", f.n_points},
                    {"window", {a.fit_lo, hi}}};
        plot << "\n\n";
        for (double t : ts)
          if (t >= a.fit_lo && t <= hi) plot << fmt(t) << ' ' << fmt(f.amplitude * std::pow(t, f.exponent)) << "\n";
      } catch (const precondition_error& e) {
        j["fit"] = {{"error", e.what()}};
      }
    }
  } else if (obs == "leakage") {
    csv << "t,G,leakage\n";
    for (double t : log_times(std::max(a.tmin, 0.1), a.tmax, std::max(a.samples, 30))) {
      const double v = leakage(run, t, shift_at(t));
      csv << fmt(t) << ',' << shift_at(t) << ',' << fmt(v) << "\n";
      plot << fmt(t) << ' ' << fmt(v) << "\n";
    }
  } else {
    throw precondition_error("droplet: unknown observable '" + obs + "'");
  }
  if (!a.emit_plot.empty()) write_text(a.emit_plot, "# " + obs + " " + d.name() + "\n" + plot.str(), out);

  std::string target = c.out, format = "csv";
  if (target == "csv" || target == "json") {
    format = target;
    target.clear();
  } else if (target.size() > 5 && target.substr(target.size() - 5) == ".json") {
    format = "json";
  }
  if (format == "json") {
    j["observable"] = obs;
    j["csv"] = csv.str();
    write_text(target, dump(j), out);
  } else {
    write_text(target, csv.str(), out);
  }
  return kExitOk;
}

struct MpsArgs {
  std::string tensor = "aklt";
  std::string generator = "sz";
  std::vector<double> thetas{0.3, 0.7, 1.1};
  int dense_sites = 6;
};

inline int cmd_mps(const CLI::App& sub, const Common& c, const MpsArgs& a, std::ostream& out) {
  const MPSTensor t = make_tensor(a.tensor);
  const Mat l = make_generator(a.generator);
  SymmetryOptions opt;
  opt.thetas = a.thetas;
  opt.dense_sites = a.dense_sites;
  const SymmetryReport rep = classify_symmetry_generator(t, l, opt);
  json j = envelope(sub, c);
  json spec = json::array();
  for (cplx e : transfer_spectrum(t)) spec.push_back(complex_json(e));
  j["spectrum"] = spec;
  j["rank_full"] = rep.full_rank;
  j["injectivity_length"] = rep.injectivity ? json(*rep.injectivity) : json(nullptr);
  j["type"] = type_name(rep.type);
  j["residuals"] = {{"thetas", rep.thetas},
                    {"push_through", rep.push_residuals},
                    {"v_nontrivial", rep.v_nontrivial},
                    {"hermitian_boundary", rep.hermitian_residual}};
  write_text(c.out, dump(j), out);
  return rep.type == TypeValue::Indeterminate ? kExitIndeterminate : kExitOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Parent-Hamiltonian classification and scar dynamics toolkit", "scarkit"};
  app.set_version_flag("--version", std::string(scarkit::kVersion));
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", common.out, "output path (default stdout)");
    s->add_option("--seed", common.seed, "random seed recorded in the report")->capture_default_str();
  };

  DecomposeArgs dec;
  auto* s_dec = app.add_subcommand("decompose", "canonical decomposition of a W-parent Hamiltonian");
  s_dec->add_option("--ham", dec.ham, "Hamiltonian spec, repeatable (summed)")->required();
  s_dec->add_option("--N", dec.n, "chain length")->capture_default_str();
  s_dec->add_flag("--general", dec.general, "drop Hermiticity (G form)");
  s_dec->add_flag("--list", dec.list, "include the annihilator terms");
  add_common(s_dec);

  ClassifyArgs cls;
  auto* s_cls = app.add_subcommand("classify", "type I/II/III label from patch truncations");
  s_cls->add_option("--ham", cls.ham, "Hamiltonian spec, repeatable (summed)")->required();
  s_cls->add_option("--states", cls.states, "target states, comma separated")->capture_default_str();
  s_cls->add_option("--N", cls.n, "chain length")->capture_default_str();
  s_cls->add_option("--Rmax", cls.r_max, "boundary window widths, e.g. 1,2")->capture_default_str();
  s_cls->add_option("--accept", cls.accept, "accept threshold")->capture_default_str();
  s_cls->add_option("--reject", cls.reject, "reject threshold")->capture_default_str();
  s_cls->add_option("--equiv", cls.equiv, "second Hamiltonian for the equivalence test");
  add_common(s_cls);

  ScanArgs scn;
  auto* s_scn = app.add_subcommand("scan-classes", "count type II / III equivalence classes");
  s_scn->add_option("--N", scn.n, "chain length")->capture_default_str();
  s_scn->add_option("--R", scn.r, "range of the global candidates")->capture_default_str();
  s_scn->add_option("--Rp", scn.rp, "range of the local terms")->capture_default_str();
  s_scn->add_option("--states", scn.states, "target states")->capture_default_str();
  s_scn->add_flag("--degenerate", scn.degenerate, "states share one eigenvalue");
  s_scn->add_option("--tol", scn.tol, "null-space tolerance")->capture_default_str();
  add_common(s_scn);

  VarianceArgs var;
  auto* s_var = app.add_subcommand("variance", "energy variance scans of W_q and W^p");
  s_var->add_option("--scan", var.scan, "q or N")->capture_default_str();
  s_var->add_option("--ham", var.ham, "Hamiltonian spec, repeatable (summed)")->capture_default_str();
  s_var->add_option("--sizes", var.sizes, "chain lengths, e.g. 8..14")->capture_default_str();
  s_var->add_option("--p", var.p, "particle number for --scan N")->capture_default_str();
  s_var->add_option("--m", var.m, "momentum index for --scan q")->capture_default_str();
  s_var->add_option("--fit-min", var.fit_min, "smallest N in the fit")->capture_default_str();
  s_var->add_option("--csv", var.csv, "write the series as CSV");
  add_common(s_var);

  DropletArgs drp;
  auto* s_drp = app.add_subcommand("droplet", "single-particle droplet quench");
  s_drp->add_option("--dispersion", drp.dispersion, "rehop, imhop or chop:a=..,b=..")->capture_default_str();
  s_drp->add_option("--N", drp.n, "ring length")->capture_default_str();
  s_drp->add_option("--M", drp.m, "droplet width")->capture_default_str();
  s_drp->add_option("--p", drp.p, "particle number for the overlap")->capture_default_str();
  s_drp->add_option("--G", drp.g, "shift: integer, wt, bwt or vt:v=..")->capture_default_str();
  s_drp->add_option("--observable", drp.observable, "occupation, current, upsilon, overlap or leakage");
  s_drp->add_option("--tmin", drp.tmin, "first time")->capture_default_str();
  s_drp->add_option("--tmax", drp.tmax, "last time")->capture_default_str();
  s_drp->add_option("--samples", drp.samples, "number of time samples")->capture_default_str();
  s_drp->add_option("--fit-lo", drp.fit_lo, "fit window start")->capture_default_str();
  s_drp->add_option("--fit-hi", drp.fit_hi, "fit window end (default tmax)")->capture_default_str();
  s_drp->add_option("--emit-plot", drp.emit_plot, "write gnuplot data blocks to this path");
  add_common(s_drp);

  MpsArgs mps;
  auto* s_mps = app.add_subcommand("mps", "symmetry-generator type for a translation-invariant MPS");
  s_mps->add_option("--tensor", mps.tensor, "aklt, ssh or a JSON tensor file")->capture_default_str();
  s_mps->add_option("--generator", mps.generator, "sz, sx, sy, ssh_sz or a JSON matrix file")->capture_default_str();
  s_mps->add_option("--theta", mps.thetas, "rotation angles")->capture_default_str();
  s_mps->add_option("--dense-sites", mps.dense_sites, "chain length of the dense check")->capture_default_str();
  add_common(s_mps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);  // --help, --version
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (s_dec->parsed()) return cmd_decompose(*s_dec, common, dec, out);
    if (s_cls->parsed()) return cmd_classify(*s_cls, common, cls, out);
    if (s_scn->parsed()) return cmd_scan(*s_scn, common, scn, out);
    if (s_var->parsed()) return cmd_variance(*s_var, common, var, out);
    if (s_drp->parsed()) return cmd_droplet(*s_drp, common, drp, out);
    if (s_mps->parsed()) return cmd_mps(*s_mps, common, mps, out);
  } catch (const scarkit::precondition_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const scarkit::classification_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace scarcli
