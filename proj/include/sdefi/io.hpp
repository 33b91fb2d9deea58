#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdefi/ito.hpp"

namespace sdefi {

using json = nlohmann::json;

/// A system file together with the optional extras it may carry.
struct SystemFile {
  SdeSystem system;
  std::map<std::string, LaurentPoly> candidates;  // named Phi to check
  std::vector<std::complex<double>> x0;           // default initial point for simulation
  std::string description;
};

namespace detail {

inline mpq_class json_rational(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_number()) {
    throw InputError(where + ": floating-point number " + v.dump() +
                     " is not accepted; give an exact rational string such as \"1/2\"");
  }
  throw InputError(where + ": expected a rational string");
}

inline CRational json_coefficient(const json& c, const std::string& where) {
  if (c.is_array()) {
    if (c.size() != 2) throw InputError(where + ": coefficient must be [re, im]");
    return {json_rational(c[0], where + ".re"), json_rational(c[1], where + ".im")};
  }
  return {json_rational(c, where), mpq_class(0)};
}

inline void add_json_term(LaurentPoly& p, const json& t, const std::string& where) {
  if (!t.is_object() || !t.contains("c") || !t.contains("e"))
    throw InputError(where + ": a term is an object {\"c\": [re, im], \"e\": [exponents]}");
  const json& e = t.at("e");
  if (!e.is_array() || e.size() != p.dim())
    throw DimensionError(where + ": exponent vector must have " + std::to_string(p.dim()) + " entries");
  ExpVec exps;
  for (const auto& v : e) {
    if (!v.is_number_integer()) throw InputError(where + ": exponents must be integers");
    exps.push_back(v.get<int>());
  }
  const CRational c = json_coefficient(t.at("c"), where + ".c");
  if (c.is_zero()) return;
  p.add_term(std::move(exps), c);
}

/// A polynomial is a term list, a single term object, or a string in the
/// textual grammar.
inline LaurentPoly json_poly(const json& v, const std::vector<std::string>& names, const std::string& where) {
  LaurentPoly p(names.size());
  if (v.is_string()) {
    try {
      return parse_poly(v.get<std::string>(), names);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (v.is_object()) {
    add_json_term(p, v, where);
    return p;
  }
  if (!v.is_array()) throw InputError(where + ": expected a term list");
  std::set<ExpVec> seen;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string w = where + "[" + std::to_string(k) + "]";
    if (v[k].is_object() && v[k].contains("e") && v[k]["e"].is_array()) {
      ExpVec e;
      for (const auto& x : v[k]["e"])
        if (x.is_number_integer()) e.push_back(x.get<int>());
      if (!seen.insert(e).second)
        throw InputError(w + ": duplicate exponent vector " + monomial_to_string(e, names) +
                         " (terms are not merged silently)");
    }
    add_json_term(p, v[k], w);
  }
  return p;
}

inline VField json_field(const json& v, const std::vector<std::string>& names, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected a list of components");
  if (v.size() != names.size())
    throw DimensionError(where + " has " + std::to_string(v.size()) + " components, dimension is " +
                         std::to_string(names.size()));
  VField f = VField::zero(names.size());
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = json_poly(v[i], names, where + "[" + std::to_string(i) + "]");
  return f;
}

}  // namespace detail

inline SystemFile parse_system_json(const json& j) {
  if (!j.is_object()) throw InputError("system file must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_unsigned()) throw InputError("system file needs a positive integer \"dim\"");
  const std::size_t n = j["dim"].get<std::size_t>();
  if (n == 0) throw InputError("dim must be positive");
  std::vector<std::string> names = default_var_names(n);
  if (j.contains("var_names")) {
    names = j["var_names"].get<std::vector<std::string>>();
    if (names.size() != n) throw DimensionError("var_names has " + std::to_string(names.size()) + " entries, dim is " + std::to_string(n));
    if (std::set<std::string>(names.begin(), names.end()).size() != n) throw InputError("var_names must be distinct");
  }
  if (!j.contains("drift")) throw InputError("system file needs \"drift\"");
  VField f = detail::json_field(j["drift"], names, "drift");
  std::vector<VField> g;
  if (j.contains("diffusion")) {
    const json& d = j["diffusion"];
    if (!d.is_array()) throw InputError("diffusion: expected a list of fields");
    for (std::size_t i = 0; i < d.size(); ++i) g.push_back(detail::json_field(d[i], names, "diffusion[" + std::to_string(i) + "]"));
  }
  if (j.contains("noise_dim")) {
    if (!j["noise_dim"].is_number_unsigned()) throw InputError("noise_dim must be a nonnegative integer");
    if (j["noise_dim"].get<std::size_t>() != g.size())
      throw DimensionError("noise_dim is " + j["noise_dim"].dump() + " but " + std::to_string(g.size()) +
                           " diffusion fields are given");
  }
  SystemFile sf{SdeSystem(std::move(f), std::move(g), names), {}, {}, {}};
  if (j.contains("candidates")) {
    for (const auto& [name, v] : j["candidates"].items())
      sf.candidates.emplace(name, detail::json_poly(v, names, "candidates." + name));
  }
  if (j.contains("x0")) {
    const json& x = j["x0"];
    if (!x.is_array() || x.size() != n) throw DimensionError("x0 must have dim entries");
    for (const auto& v : x) {
      if (v.is_number()) sf.x0.emplace_back(v.get<double>(), 0.0);
      else sf.x0.push_back(CRational(detail::json_rational(v, "x0")).to_complex());
    }
  }
  if (j.contains("description")) sf.description = j["description"].get<std::string>();
  return sf;
}

inline SystemFile parse_system_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_system_json(j);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid system file: ") + e.what());
  }
}

inline SystemFile parse_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read system file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system_text(ss.str());
}

// ---------------------------------------------------------------------------
// Canonical serialization

inline json coefficient_json(const CRational& c) { return json::array({rational_to_string(c.re()), rational_to_string(c.im())}); }

/// Term list in descending graded-lex order.
inline json poly_terms_json(const LaurentPoly& p) {
  json a = json::array();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it)
    a.push_back({{"c", coefficient_json(it->second)}, {"e", it->first}});
  return a;
}

inline json field_json(const VField& f) {
  json a = json::array();
  for (const auto& c : f.comps) a.push_back(poly_terms_json(c));
  return a;
}

inline json system_to_json(const SdeSystem& sys) {
  json j;
  j["dim"] = sys.dim();
  j["noise_dim"] = sys.noise_dim();
  j["var_names"] = sys.var_names;
  j["drift"] = field_json(sys.drift);
  j["diffusion"] = json::array();
  for (const auto& g : sys.diffusions) j["diffusion"].push_back(field_json(g));
  return j;
}

inline json system_file_to_json(const SystemFile& sf) {
  json j = system_to_json(sf.system);
  if (!sf.candidates.empty()) {
    j["candidates"] = json::object();
    for (const auto& [name, p] : sf.candidates) j["candidates"][name] = poly_terms_json(p);
  }
  if (!sf.x0.empty()) {
    j["x0"] = json::array();
    for (const auto& z : sf.x0) j["x0"].push_back(z.real());
  }
  if (!sf.description.empty()) j["description"] = sf.description;
  return j;
}

/// Parses a candidate given inline (polynomial text) or as a path to a file
/// holding either polynomial text or a JSON term list.
inline LaurentPoly parse_candidate(const std::string& spec, const std::vector<std::string>& names) {
  std::ifstream in(spec);
  if (in) {
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string body = ss.str();
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (body[first] == '[' || body[first] == '{' || body[first] == '"')) {
      json j;
      try {
        j = json::parse(body);
      } catch (const json::parse_error& e) {
        throw InputError("candidate file " + spec + ": malformed JSON: " + e.what());
      }
      return detail::json_poly(j, names, "candidate");
    }
    return parse_poly(body, names);
  }
  return parse_poly(spec, names);
}

}  // namespace sdefi
