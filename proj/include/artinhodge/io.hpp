#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "artinhodge/algebra.hpp"
#include "artinhodge/complexes.hpp"
#include "artinhodge/error.hpp"
#include "artinhodge/hodge.hpp"
#include "artinhodge/module.hpp"
#include "artinhodge/snc.hpp"
#include "artinhodge/weil.hpp"

namespace ah::io {

using Json = nlohmann::ordered_json;

inline Json load_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::parse_error, "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Errc::parse_error, "invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::parse_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(ss.str())));
  return std::string(buf);
}

// --- scalars ------------------------------------------------------------------

// a scalar is "p/q", ["re", "im"], or {"re": ..., "im": ...}
inline Scalar parse_scalar(const Json& j) {
  if (j.is_string()) return Scalar(rat_from_string(j.get<std::string>()));
  if (j.is_number_integer()) return Scalar(Rat(j.get<long>()));
  if (j.is_array()) {
    require(j.size() == 2, Errc::parse_error,
            "scalar array must be [re, im]");
    return Scalar(rat_from_string(j[0].get<std::string>()),
                  rat_from_string(j[1].get<std::string>()));
  }
  if (j.is_object()) {
    Rat re = j.contains("re") ? rat_from_string(j["re"].get<std::string>())
                              : Rat(0);
    Rat im = j.contains("im") ? rat_from_string(j["im"].get<std::string>())
                              : Rat(0);
    return im == 0 ? Scalar(re) : Scalar(re, im);
  }
  fail(Errc::parse_error, "unrecognized scalar literal");
}

inline Json scalar_to_json(const Scalar& s) {
  if (s.im == 0) return rat_to_string(s.re);
  return Json::array({rat_to_string(s.re), rat_to_string(s.im)});
}

inline Vec parse_vec(const Json& j, int expect = -1) {
  require(j.is_array(), Errc::parse_error, "expected a vector");
  Vec v;
  for (const auto& x : j) v.push_back(parse_scalar(x));
  require(expect < 0 || int(v.size()) == expect, Errc::parse_error,
          "vector has the wrong length");
  return v;
}

inline Matrix parse_matrix(const Json& j, int rows = -1, int cols = -1) {
  require(j.is_array(), Errc::parse_error, "expected a matrix");
  std::vector<Vec> r;
  for (const auto& row : j) r.push_back(parse_vec(row));
  int c = cols >= 0 ? cols : (r.empty() ? 0 : int(r[0].size()));
  for (const auto& row : r)
    require(int(row.size()) == c, Errc::parse_error, "ragged matrix");
  require(rows < 0 || int(r.size()) == rows, Errc::parse_error,
          "matrix has the wrong number of rows");
  return Matrix::from_rows(r, c);
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- algebras -------------------------------------------------------------------

// {"field": "Q"|"Qi", "vars": [...], "relations": [[{"mono": [...],
//  "re": "p/q", "im": "p/q"}, ...], ...], "nilpotency_bound": N}
inline AlgebraPresentation parse_presentation(const Json& j) {
  AlgebraPresentation p;
  std::string f = j.at("field").get<std::string>();
  require(f == "Q" || f == "Qi", Errc::parse_error,
          "field must be \"Q\" or \"Qi\"");
  p.field = f == "Q" ? Field::rationals : Field::gaussian_rationals;
  for (const auto& v : j.at("vars")) p.var_names.push_back(v.get<std::string>());
  p.nvars = int(p.var_names.size());
  p.nilpotency_bound = j.at("nilpotency_bound").get<int>();
  for (const auto& rel : j.value("relations", Json::array())) {
    Poly poly;
    for (const auto& term : rel) {
      Monomial m;
      for (const auto& e : term.at("mono")) m.push_back(e.get<int>());
      require(int(m.size()) == p.nvars, Errc::parse_error,
              "monomial length does not match the variable count");
      Rat re = term.contains("re")
                   ? rat_from_string(term["re"].get<std::string>())
                   : Rat(0);
      Rat im = term.contains("im")
                   ? rat_from_string(term["im"].get<std::string>())
                   : Rat(0);
      Scalar c = im == 0 ? Scalar(re) : Scalar(re, im);
      if (!c.is_zero()) poly[m] += c;
    }
    p.relations.push_back(std::move(poly));
  }
  return p;
}

inline Json presentation_to_json(const AlgebraPresentation& p) {
  Json j;
  j["field"] = p.field == Field::rationals ? "Q" : "Qi";
  j["vars"] = p.var_names;
  Json rels = Json::array();
  for (const auto& rel : p.relations) {
    Json terms = Json::array();
    for (const auto& [m, c] : rel) {
      Json term;
      term["mono"] = m;
      term["re"] = rat_to_string(c.re);
      term["im"] = rat_to_string(c.im);
      terms.push_back(std::move(term));
    }
    rels.push_back(std::move(terms));
  }
  j["relations"] = std::move(rels);
  j["nilpotency_bound"] = p.nilpotency_bound;
  return j;
}

// A "ref" is an inline object or a path relative to the referencing file;
// resolving one yields the document plus the directory for nested refs.
struct Resolved {
  Json doc;
  std::string dir;
};

inline Resolved resolve_ref(const Json& j, const std::string& base_dir) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    std::string dir = p.parent_path().string();
    return Resolved{load_file(p.string()), dir.empty() ? "." : dir};
  }
  return Resolved{j, base_dir};
}

inline ArtinAlgebra parse_algebra(const Json& j, const std::string& base_dir) {
  return ArtinAlgebra::build(parse_presentation(resolve_ref(j, base_dir).doc));
}

// --- modules and maps -----------------------------------------------------------

// {"algebra": ref, "free_rank": r} or
// {"algebra": ref, "dim": d, "action": [[d x d matrix] per basis element]}
inline FinModule parse_module(const Json& mj, const std::string& base_dir,
                              const ArtinAlgebra* fixed_algebra = nullptr) {
  auto [j, dir] = resolve_ref(mj, base_dir);
  ArtinAlgebra alg = fixed_algebra && !j.contains("algebra")
                         ? *fixed_algebra
                         : parse_algebra(j.at("algebra"), dir);
  if (j.contains("free_rank"))
    return FinModule::free(alg, j["free_rank"].get<int>());
  int dim = j.at("dim").get<int>();
  std::vector<Matrix> action;
  for (const auto& a : j.at("action")) action.push_back(parse_matrix(a, dim, dim));
  return FinModule::from_action(alg, dim, std::move(action));
}

// {"source": module ref, "target": module ref, "matrix": [[...]]} or, for a
// map between free modules, {"algebra": ref, "entries": [[element, ...]]}
// with elements given as coefficient vectors over the algebra basis.
inline ModuleMap parse_map(const Json& mj, const std::string& base_dir) {
  auto [j, dir] = resolve_ref(mj, base_dir);
  if (j.contains("entries")) {
    ArtinAlgebra alg = parse_algebra(j.at("algebra"), dir);
    std::vector<std::vector<Vec>> entries;
    for (const auto& row : j["entries"]) {
      std::vector<Vec> r;
      for (const auto& e : row) r.push_back(parse_vec(e, alg.dim()));
      entries.push_back(std::move(r));
    }
    int trank = int(entries.size());
    int srank = trank ? int(entries[0].size()) : 0;
    for (const auto& row : entries)
      require(int(row.size()) == srank, Errc::parse_error,
              "ragged entry matrix");
    FinModule src = FinModule::free(alg, srank);
    FinModule tgt = FinModule::free(alg, trank);
    const int da = alg.dim();
    Matrix m(tgt.dim(), src.dim());
    for (int u = 0; u < trank; ++u)
      for (int v = 0; v < srank; ++v) {
        Matrix mul = alg.mult_matrix(entries[u][v]);
        for (int r = 0; r < da; ++r)
          for (int c = 0; c < da; ++c) m.at(u * da + r, v * da + c) = mul.at(r, c);
      }
    return ModuleMap(src, tgt, std::move(m));
  }
  FinModule src = parse_module(j.at("source"), dir);
  FinModule tgt = parse_module(j.at("target"), dir);
  Matrix m = parse_matrix(j.at("matrix"), tgt.dim(), src.dim());
  return ModuleMap(std::move(src), std::move(tgt), std::move(m));
}

// --- filtered complexes -----------------------------------------------------------

// {"algebra": ref, "lo": n0, "modules": [module...], "differentials":
//  [matrix...], "filtration": [{"p": p, "levels": {"n": [[vec]...]}}, ...]}
struct ParsedFiltered {
  DecreasingFiltration filtration;
};

inline ParsedFiltered parse_filtered(const Json& fj,
                                     const std::string& base_dir) {
  auto [j, dir] = resolve_ref(fj, base_dir);
  ArtinAlgebra alg = parse_algebra(j.at("algebra"), dir);
  int lo = j.value("lo", 0);
  std::vector<FinModule> modules;
  for (const auto& m : j.at("modules"))
    modules.push_back(parse_module(m, dir, &alg));
  std::vector<ModuleMap> diffs;
  const auto& dj = j.at("differentials");
  require(dj.size() + 1 == modules.size(), Errc::parse_error,
          "expected one differential per adjacent pair");
  for (size_t n = 0; n + 1 < modules.size(); ++n)
    diffs.push_back(ModuleMap(modules[n], modules[n + 1],
                              parse_matrix(dj[n], modules[n + 1].dim(),
                                           modules[n].dim())));
  BoundedComplex complex = make_complex(lo, modules, std::move(diffs));

  if (!j.contains("filtration") || j["filtration"].empty())
    return ParsedFiltered{trivial_filtration(std::move(complex))};

  int pmin = 0, pmax = 0;
  bool first = true;
  for (const auto& lev : j["filtration"]) {
    int p = lev.at("p").get<int>();
    if (first) {
      pmin = pmax = p;
      first = false;
    }
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  std::vector<std::vector<Submodule>> levels(
      size_t(pmax - pmin + 1));
  for (int p = pmin; p <= pmax; ++p)
    for (int n = lo; n <= complex.hi(); ++n)
      levels[size_t(p - pmin)].push_back(
          Submodule::zero(complex.at(n)));
  for (const auto& lev : j["filtration"]) {
    int p = lev.at("p").get<int>();
    for (const auto& [key, gens] : lev.at("levels").items()) {
      int n = std::stoi(key);
      require(complex.has(n), Errc::parse_error,
              "filtration level outside the complex range");
      std::vector<Vec> g;
      for (const auto& v : gens) g.push_back(parse_vec(v, complex.at(n).dim()));
      levels[size_t(p - pmin)][size_t(n - lo)] =
          Submodule::span(complex.at(n), g);
    }
  }
  return ParsedFiltered{
      make_filtration(std::move(complex), pmin, pmax, std::move(levels))};
}

// --- Hodge structures ----------------------------------------------------------

// {"lattice_dim": h, "algebra": ref, "weight"?: k,
//  "F": {"p": [[vec]...]}, "W": {"m": [[vec]...]}}
struct ParsedStructure {
  bool weil = false;  // true when the algebra is rational
  MixedHodgeStructureOverR mhs;  // when !weil
  HodgeWeilStructure hws;        // when weil
  std::optional<int> weight;
};

inline ParsedStructure parse_structure(const Json& sj,
                                       const std::string& base_dir) {
  auto [j, dir] = resolve_ref(sj, base_dir);
  ArtinAlgebra alg = parse_algebra(j.at("algebra"), dir);
  int h = j.at("lattice_dim").get<int>();
  ParsedStructure out;
  out.weil = alg.field() == Field::rationals;
  if (j.contains("weight")) out.weight = j["weight"].get<int>();

  const int carrier_dim = out.weil ? 2 * h * alg.dim() : h * alg.dim();
  FinModule carrier = FinModule::free(alg, out.weil ? 2 * h : h);
  auto parse_chain = [&](const char* key) {
    std::map<int, Submodule> chain;
    if (!j.contains(key)) return chain;
    for (const auto& [pk, gens] : j[key].items()) {
      std::vector<Vec> g;
      for (const auto& v : gens) g.push_back(parse_vec(v, carrier_dim));
      chain.emplace(std::stoi(pk), Submodule::span(carrier, g));
    }
    return chain;
  };
  std::map<int, Submodule> f = parse_chain("F");
  std::map<int, Submodule> w = parse_chain("W");
  if (out.weight && w.empty()) {
    w.emplace(*out.weight - 1, Submodule::zero(carrier));
    w.emplace(*out.weight, Submodule::full(carrier));
  }
  if (out.weil)
    out.hws = make_hws(RealLattice{h}, alg, std::move(f), std::move(w));
  else
    out.mhs = make_mhs(RealLattice{h}, alg, std::move(f), std::move(w));
  return out;
}

// --- SNC models ------------------------------------------------------------------

inline Bigrade parse_bigrade(const std::string& s) {
  auto comma = s.find(',');
  require(comma != std::string::npos, Errc::parse_error,
          "bigrade keys look like \"p,q\"");
  try {
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(Errc::parse_error, "bad bigrade key '" + s + "'");
  }
}

inline std::string bigrade_key(Bigrade pq) {
  return std::to_string(pq.first) + "," + std::to_string(pq.second);
}

// {"algebra": ref, "components": n,
//  "strata": [{"I": [...], "hodge": {"p,q": rank}}, ...],
//  "faces": [{"from": [...], "to": [...], "matrices": {"p,q": [[..]]}}]}
inline SNCModel parse_snc_model(const Json& mj, const std::string& base_dir) {
  auto [j, dir] = resolve_ref(mj, base_dir);
  ArtinAlgebra alg = parse_algebra(j.at("algebra"), dir);
  int components = j.at("components").get<int>();
  std::vector<Stratum> strata;
  std::map<Stratum, std::map<Bigrade, int>> ranks;
  for (const auto& s : j.at("strata")) {
    Stratum idx;
    for (const auto& i : s.at("I")) idx.push_back(i.get<int>());
    std::map<Bigrade, int> r;
    Json hodge = s.value("hodge", Json::object());
    for (const auto& [key, v] : hodge.items())
      r[parse_bigrade(key)] = v.get<int>();
    strata.push_back(idx);
    ranks[idx] = std::move(r);
  }
  std::map<std::pair<Stratum, Stratum>, std::map<Bigrade, Matrix>> faces;
  for (const auto& f : j.value("faces", Json::array())) {
    Stratum from, to;
    for (const auto& i : f.at("from")) from.push_back(i.get<int>());
    for (const auto& i : f.at("to")) to.push_back(i.get<int>());
    std::map<Bigrade, Matrix> blocks;
    for (const auto& [key, m] : f.at("matrices").items())
      blocks[parse_bigrade(key)] = parse_matrix(m);
    faces[{from, to}] = std::move(blocks);
  }
  return make_snc_model(std::move(alg), components, std::move(strata),
                        std::move(ranks), std::move(faces));
}

// {"ranks": {"p,q": r}, "comparison": [{"component": i,
//   "matrices": {"p,q": [[..]]}}]}
inline AmbientData parse_ambient(const Json& aj, const std::string& base_dir) {
  auto [j, dir] = resolve_ref(aj, base_dir);
  (void)dir;
  AmbientData x;
  for (const auto& [key, v] : j.at("ranks").items())
    x.ranks[parse_bigrade(key)] = v.get<int>();
  for (const auto& c : j.value("comparison", Json::array())) {
    int comp = c.at("component").get<int>();
    for (const auto& [key, m] : c.at("matrices").items())
      x.comparison[comp][parse_bigrade(key)] = parse_matrix(m);
  }
  return x;
}

// --- reports ---------------------------------------------------------------------

// Deterministic machine-readable verification report: identical inputs
// produce byte-identical output except for the timing field.
struct Report {
  Json doc = Json::object();

  explicit Report(const std::string& command) {
    doc["command"] = command;
    doc["checks"] = Json::array();
    doc["inputs"] = Json::object();
  }

  void input(const std::string& flag, const std::string& path) {
    Json e;
    e["path"] = path;
    e["fnv1a64"] = file_hash(path);
    doc["inputs"][flag] = std::move(e);
  }

  void check(const std::string& name, bool pass, Json witness = nullptr) {
    Json c;
    c["name"] = name;
    c["pass"] = pass;
    if (!witness.is_null()) c["witness"] = std::move(witness);
    doc["checks"].push_back(std::move(c));
  }

  void set(const std::string& key, Json value) { doc[key] = std::move(value); }

  bool all_pass() const {
    for (const auto& c : doc["checks"])
      if (!c["pass"].get<bool>()) return false;
    return true;
  }
};

}  // namespace ah::io
