#pragma once

#include <random>
#include <vector>

#include "artinhodge/algebra.hpp"
#include "artinhodge/module.hpp"

namespace th {

using namespace ah;

inline Poly poly(std::vector<std::pair<Monomial, Scalar>> terms) {
  Poly p;
  for (auto& [m, c] : terms) p[m] += c;
  return p;
}

// Qi[z]/(z^2): dual numbers over the Gaussian rationals.
inline ArtinAlgebra eps2() {
  AlgebraPresentation p;
  p.field = Field::gaussian_rationals;
  p.nvars = 1;
  p.relations = {poly({{{2}, Scalar::one()}})};
  p.nilpotency_bound = 2;
  return ArtinAlgebra::build(p);
}

// Qi[z]/(z^3).
inline ArtinAlgebra eps3() {
  AlgebraPresentation p;
  p.field = Field::gaussian_rationals;
  p.nvars = 1;
  p.relations = {poly({{{3}, Scalar::one()}})};
  p.nilpotency_bound = 3;
  return ArtinAlgebra::build(p);
}

// Q[x,y]/(x^2 - y^2, 2xy): the Weil restriction of the dual numbers.
inline ArtinAlgebra dual_restricted() {
  AlgebraPresentation p;
  p.field = Field::rationals;
  p.nvars = 2;
  p.var_names = {"x", "y"};
  p.relations = {poly({{{2, 0}, Scalar::one()}, {{0, 2}, -Scalar::one()}}),
                 poly({{{1, 1}, Scalar(2)}})};
  p.nilpotency_bound = 3;
  return ArtinAlgebra::build(p);
}

inline ArtinAlgebra qi() {
  return ArtinAlgebra::base_field(Field::gaussian_rationals);
}

// Deterministic map between witnessed free modules from a matrix of
// algebra elements.
inline ModuleMap rmap(const FinModule& src, const FinModule& tgt,
                      const std::vector<std::vector<Vec>>& entries) {
  const ArtinAlgebra& a = src.algebra();
  const int da = a.dim();
  Matrix m(tgt.dim(), src.dim());
  for (size_t u = 0; u < entries.size(); ++u)
    for (size_t v = 0; v < entries[u].size(); ++v) {
      Matrix mul = a.mult_matrix(entries[u][v]);
      for (int r = 0; r < da; ++r)
        for (int c = 0; c < da; ++c)
          m.at(int(u) * da + r, int(v) * da + c) = mul.at(r, c);
    }
  return ModuleMap(src, tgt, std::move(m));
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}

  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen);
  }
  Scalar scalar(Field f, int mag = 2) {
    Scalar s(Rat(uniform(-mag, mag)));
    if (f == Field::gaussian_rationals && uniform(0, 1))
      s = Scalar(s.re, Rat(uniform(-mag, mag)));
    s.tag = f;
    return s;
  }
  Vec vec(const ArtinAlgebra& a, int mag = 2) {
    Vec v(a.dim());
    for (auto& x : v) x = scalar(a.field(), mag);
    return v;
  }
  Vec module_vec(int dim, Field f, int mag = 2) {
    Vec v(dim);
    for (auto& x : v) x = scalar(f, mag);
    return v;
  }
  Vec in_submodule(const Submodule& s, int mag = 2) {
    Vec v(s.ambient().dim());
    for (int i = 0; i < s.dim(); ++i) {
      Scalar c = scalar(s.ambient().algebra().field(), mag);
      Vec b = s.basis_vector(i);
      for (size_t t = 0; t < v.size(); ++t) v[t] += c * b[t];
    }
    return v;
  }
  // A random R-linear map between free modules, from a random matrix of
  // algebra elements.
  ModuleMap free_map(const FinModule& src, const FinModule& tgt, int mag = 2) {
    const ArtinAlgebra& a = src.algebra();
    const int da = a.dim();
    int s = src.witness()->rank, t = tgt.witness()->rank;
    Matrix m(tgt.dim(), src.dim());
    for (int u = 0; u < t; ++u)
      for (int v = 0; v < s; ++v) {
        Vec elem = vec(a, mag);
        // place mult-by-elem in block (u, v)
        Matrix mul = a.mult_matrix(elem);
        for (int r = 0; r < da; ++r)
          for (int c = 0; c < da; ++c) m.at(u * da + r, v * da + c) = mul.at(r, c);
      }
    return ModuleMap(src, tgt, std::move(m));
  }
};

}  // namespace th
