#pragma once

// Textual specs accepted on the command line:
//   hamiltonian  h_imhop | h_chop:a=0.5,b=0.5 | 2.5*n_tot | random:seed=1,range=3,t=1 | file.op | "0.5i * sd@3 s@4; ..."
//   state        vacuum | w | wq:m=3 | wp:p=2 | droplet:M=5,p=1,first=0 | product:bits=5
//   dispersion   rehop | imhop | chop:a=0.5,b=0.5   (each takes w=...)
//   tensor       aklt | ssh | path to JSON {"shape": [d, D, D], "data": [[re, im], ...]}
//   generator    sz | sx | sy | ssh_sz | path to JSON {"shape": [d, d], "data": [...]}

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scarkit/canonical.hpp"
#include "scarkit/dynamics.hpp"
#include "scarkit/mps.hpp"
#include "scarkit/scars.hpp"
#include "scarkit/states.hpp"

namespace scarcli {

using namespace scarkit;
using json = nlohmann::json;

struct NamedSpec {
  std::string name;
  Params params;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

/// "name:k=v,k=v" -> {name, {k: v}}.
inline NamedSpec parse_named(const std::string& text) {
  NamedSpec out;
  const auto colon = text.find(':');
  out.name = trim(text.substr(0, colon));
  if (colon == std::string::npos) return out;
  for (const auto& kv : split(text.substr(colon + 1), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw precondition_error("expected key=value in '" + text + "'");
    out.params[trim(kv.substr(0, eq))] = parse_real(trim(kv.substr(eq + 1)));
  }
  return out;
}

inline int int_param(const Params& p, const std::string& key, int fallback) {
  return static_cast<int>(std::lround(param(p, key, fallback)));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// `default_seed` is used by random:... specs that carry no seed of their own.
inline LocalOperator make_hamiltonian(const std::string& spec, int n, std::uint64_t default_seed = 0) {
  if (spec.find('@') != std::string::npos) return parse_operator(spec, n);
  if (std::filesystem::exists(spec)) return parse_operator(read_file(spec), n);
  cplx weight = 1.0;
  std::string rest = spec;
  if (auto star = spec.find('*'); star != std::string::npos) {
    weight = parse_coeff(spec.substr(0, star));
    rest = trim(spec.substr(star + 1));
  }
  const NamedSpec ns = parse_named(rest);
  if (ns.name == "random") {
    const auto seed = ns.params.count("seed") ? static_cast<std::uint64_t>(ns.params.at("seed")) : default_seed;
    const auto build = random_type1_builder(seed, int_param(ns.params, "range", 3), param(ns.params, "t", 0.0),
                                            param(ns.params, "omega", 0.0));
    return weight * build(n);
  }
  return weight * builtin(ns.name, n, ns.params);
}

/// Sum of several specs.
inline LocalOperator make_hamiltonian(const std::vector<std::string>& specs, int n, std::uint64_t default_seed = 0) {
  if (specs.empty()) throw precondition_error("no Hamiltonian given");
  LocalOperator h(n);
  for (const auto& s : specs) h += make_hamiltonian(s, n, default_seed);
  return h;
}

inline StateVector make_state(const std::string& spec, int n) {
  const NamedSpec ns = parse_named(spec);
  const Params& p = ns.params;
  if (ns.name == "vacuum") return vacuum(n);
  if (ns.name == "w") return w_state(n);
  if (ns.name == "wq") return w_q(n, int_param(p, "m", 1));
  if (ns.name == "wp") return w_p(n, int_param(p, "p", 2));
  if (ns.name == "droplet") return droplet(n, int_param(p, "M", 1), int_param(p, "p", 1), int_param(p, "first", 0));
  if (ns.name == "product") return product_state(n, static_cast<std::uint64_t>(param(p, "bits", 0)));
  throw precondition_error("unknown state '" + spec + "'");
}

inline std::vector<StateVector> make_states(const std::string& list, int n) {
  std::vector<StateVector> out;
  // commas also separate parameters, so split on names followed by ':' only at top level
  std::vector<std::string> items;
  std::string cur;
  for (const auto& tok : split(list, ',')) {
    if (tok.find('=') != std::string::npos && tok.find(':') == std::string::npos && !cur.empty()) {
      cur += "," + tok;
    } else {
      if (!cur.empty()) items.push_back(cur);
      cur = tok;
    }
  }
  if (!cur.empty()) items.push_back(cur);
  if (items.empty()) throw precondition_error("empty state list");
  for (const auto& s : items) out.push_back(make_state(s, n));
  return out;
}

inline Dispersion make_dispersion(const std::string& spec) {
  const NamedSpec ns = parse_named(spec);
  const double w = param(ns.params, "w", 1.0);
  if (ns.name == "rehop") return Dispersion::rehop(w);
  if (ns.name == "imhop") return Dispersion::imhop(w);
  if (ns.name == "chop") return Dispersion::chop(param(ns.params, "a", 0.5), param(ns.params, "b", 0.5), w);
  throw precondition_error("unknown dispersion '" + spec + "'");
}

inline cplx json_complex(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw precondition_error("complex entries must be numbers or [re, im] pairs");
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

/// Flat row-major data; tensors are indexed [s][a][b].
inline std::vector<cplx> json_data(const json& j, std::size_t expected) {
  if (!j.contains("data") || !j["data"].is_array()) throw precondition_error("JSON operand needs a 'data' array");
  std::vector<cplx> out;
  for (const auto& v : j["data"]) out.push_back(json_complex(v));
  if (out.size() != expected) throw dimension_error("JSON 'data' length does not match 'shape'");
  return out;
}

inline MPSTensor make_tensor(const std::string& spec) {
  if (spec == "aklt") return builtin_aklt();
  if (spec == "ssh") return builtin_ssh();
  const json j = json::parse(read_file(spec));
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 3 || shape[1] != shape[2]) throw dimension_error("tensor shape must be [d, D, D]");
  const auto data = json_data(j, static_cast<std::size_t>(shape[0]) * shape[1] * shape[2]);
  std::vector<Mat> a(static_cast<std::size_t>(shape[0]), Mat::Zero(shape[1], shape[2]));
  std::size_t at = 0;
  for (auto& m : a)
    for (int r = 0; r < shape[1]; ++r)
      for (int c = 0; c < shape[2]; ++c) m(r, c) = data[at++];
  return MPSTensor(std::move(a));
}

inline Mat make_generator(const std::string& spec) {
  if (spec == "sz" || spec == "sx" || spec == "sy") return spin1(spec[1]);
  if (spec == "ssh_sz") return ssh_sz();
  const json j = json::parse(read_file(spec));
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 2 || shape[0] != shape[1]) throw dimension_error("generator shape must be [d, d]");
  const auto data = json_data(j, static_cast<std::size_t>(shape[0]) * shape[1]);
  Mat m(shape[0], shape[1]);
  for (int r = 0; r < shape[0]; ++r)
    for (int c = 0; c < shape[1]; ++c) m(r, c) = data[static_cast<std::size_t>(r * shape[1] + c)];
  return m;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split(s, ',')) {
    if (auto dots = tok.find(".."); dots != std::string::npos) {
      const int lo = std::stoi(tok.substr(0, dots)), hi = std::stoi(tok.substr(dots + 2));
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    } else {
      out.push_back(std::stoi(tok));
    }
  }
  return out;
}

}  // namespace scarcli
