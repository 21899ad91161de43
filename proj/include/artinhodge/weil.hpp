#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "artinhodge/algebra.hpp"
#include "artinhodge/error.hpp"
#include "artinhodge/module.hpp"

namespace ah {

// Weil restriction of a Gaussian-field Artin algebra R to a rational-field
// Artin algebra R_wl: substitute z_k = x_k + i y_k into each relation and
// split into real and imaginary parts. The canonical map eta sends R into
// R_wl (x) Q(i), identifying the complexified restriction with the tensor
// square R (x) conj(R).
struct WeilRestrictedAlgebra {
  ArtinAlgebra source;        // over Q(i)
  ArtinAlgebra restricted;    // over Q
  ArtinAlgebra restricted_c;  // restricted (x) Q(i), carrier of eta
  RingMap eta;                // source -> restricted_c
  std::vector<Poly> real_relations;  // g_1, h_1, ..., g_k, h_k in 2n vars
  // Coordinates of the restricted basis inside R (x) conj(R), with tensor
  // index pairs (alpha, beta) flattened as alpha * dim(R) + beta.
  std::vector<Vec> basis_tensor_values;
};

namespace weil_detail {

// R (x)_{Q(i)} conj(R) with basis pairs (i, j) flattened as i*D + j.
inline ArtinAlgebra conj_tensor_square(const ArtinAlgebra& r) {
  const int d = r.dim();
  const int dim = d * d;
  std::vector<std::vector<SparseVec>> sc(dim, std::vector<SparseVec>(dim));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          SparseVec& out = sc[i * d + j][k * d + l];
          for (const auto& [t, c] : r.sc(i, k))
            for (const auto& [u, e] : r.sc(j, l))
              out.emplace_back(t * d + u, c * e.conj());
          std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return a.first < b.first;
          });
        }
  return ArtinAlgebra::from_structure(Field::gaussian_rationals, dim,
                                      std::move(sc),
                                      r.label() + " (x) conj");
}

// Coefficient extraction of a vector lying in the row space of B, where
// ech = RREF([B | I]): coefficients over the original rows of B.
struct Expander {
  RowSpace reduced;  // RREF of B (left block)
  Matrix transform;  // RREF(B) = transform * B
  int cols = 0;
};

inline Expander make_expander(const std::vector<Vec>& rows, int cols) {
  const int n = int(rows.size());
  Matrix aug(n, cols + n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < cols; ++c) aug.at(i, c) = rows[i][c];
    aug.at(i, cols + i) = Scalar::one();
  }
  std::vector<int> piv = aug.rref();
  require(int(piv.size()) == n && (piv.empty() || piv.back() < cols),
          Errc::internal_inconsistency, "expander rows are dependent");
  Matrix basis(n, cols), tr(n, n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < cols; ++c) basis.at(i, c) = aug.at(i, c);
    for (int c = 0; c < n; ++c) tr.at(i, c) = aug.at(i, cols + c);
  }
  return Expander{RowSpace{std::move(basis), std::move(piv), cols},
                  std::move(tr), cols};
}

// v must lie in the span; returns its coefficients over the original rows.
inline Vec express(const Expander& e, const Vec& v) {
  const int n = e.reduced.basis.rows();
  Vec c(n);
  for (int s = 0; s < n; ++s) {
    const Scalar& coeff = v[e.reduced.pivots[s]];
    if (coeff.is_zero()) continue;
    for (int j = 0; j < n; ++j)
      if (!e.transform.at(s, j).is_zero()) c[j] += coeff * e.transform.at(s, j);
  }
  // consistency: reduce_mod must vanish
  require(contains(e.reduced, v), Errc::internal_inconsistency,
          "vector does not lie in the expander span");
  return c;
}

}  // namespace weil_detail

inline WeilRestrictedAlgebra weil_restrict_algebra(const ArtinAlgebra& r) {
  require(r.field() == Field::gaussian_rationals, Errc::precondition_unmet,
          "Weil restriction expects an algebra over the Gaussian rationals");
  require(r.presentation().has_value(), Errc::precondition_unmet,
          "Weil restriction needs a presented algebra");
  const AlgebraPresentation& pres = *r.presentation();
  require(pres.nvars >= 1, Errc::non_local_result,
          "the zero-generator case is rejected: restricting the base field "
          "itself leaves the regime of Artin algebras with rational residue "
          "field established for restrictions of algebras with m != 0");

  const int n = pres.nvars;
  const int d = r.dim();
  const int dim_wl = d * d;

  // g_j + i h_j = f_j evaluated at z_k = x_k + i y_k; variables are ordered
  // x1, y1, ..., xn, yn.
  auto substituted = [&](const Poly& f) {
    Poly out;
    for (const auto& [mono, coeff] : f) {
      Poly term;
      term[Monomial(2 * n, 0)] = coeff;
      for (int k = 0; k < n; ++k)
        for (int e = 0; e < mono[k]; ++e) {
          Poly zk;
          Monomial mx(2 * n, 0), my(2 * n, 0);
          mx[2 * k] = 1;
          my[2 * k + 1] = 1;
          zk[mx] = Scalar::one();
          zk[my] = Scalar::i();
          term = poly_mul(term, zk);
        }
      out = poly_add(out, term);
    }
    return out;
  };
  std::vector<Poly> real_relations;
  for (const auto& f : pres.relations) {
    Poly s = substituted(f), g, h;
    for (const auto& [mono, c] : s) {
      if (c.re != 0) g[mono] = Scalar(c.re);
      if (c.im != 0) h[mono] = Scalar(c.im);
    }
    real_relations.push_back(std::move(g));
    real_relations.push_back(std::move(h));
  }

  ArtinAlgebra tensor = weil_detail::conj_tensor_square(r);

  // Values of the restricted generators inside the tensor square:
  // x_k = (eta(z_k) + conj-eta(z_k))/2, y_k the matching difference.
  std::vector<Vec> gen_values;
  for (int k = 0; k < n; ++k) {
    Vec nf = r.generator(k);
    Vec vx(dim_wl), vy(dim_wl);
    Scalar half(Rat(1, 2)), mhalf_i(Rat(0), Rat(-1, 2)), half_i(Rat(0), Rat(1, 2));
    for (int i = 0; i < d; ++i) {
      if (nf[i].is_zero()) continue;
      vx[i * d + 0] += half * nf[i];
      vx[0 * d + i] += half * nf[i].conj();
      vy[i * d + 0] += mhalf_i * nf[i];
      vy[0 * d + i] += half_i * nf[i].conj();
    }
    gen_values.push_back(std::move(vx));
    gen_values.push_back(std::move(vy));
  }

  // Greedy canonical basis: scan monomials in 2n variables degree by
  // degree in graded-lex order, selecting those whose values are linearly
  // independent; stop when a whole degree evaluates to zero.
  std::vector<Monomial> sel_monos;
  std::vector<Vec> sel_values;
  std::map<int, Vec> echelon;  // pivot coordinate -> normalized row
  auto try_select = [&](const Monomial& m, const Vec& value) {
    Vec v = value;
    for (auto& [p, row] : echelon) {
      if (v[p].is_zero()) continue;
      Scalar f = v[p];
      for (int c = 0; c < dim_wl; ++c)
        if (!row[c].is_zero()) v[c] -= f * row[c];
    }
    int pivot = -1;
    for (int c = 0; c < dim_wl; ++c)
      if (!v[c].is_zero()) {
        pivot = c;
        break;
      }
    if (pivot < 0) return false;
    Scalar inv = v[pivot].inv();
    for (auto& x : v) x *= inv;
    echelon.emplace(pivot, std::move(v));
    sel_monos.push_back(m);
    sel_values.push_back(value);
    return true;
  };

  std::map<Monomial, Vec> prev_deg, cur_deg;
  std::map<Monomial, Vec> degree_one_values;
  {
    Monomial one_m(2 * n, 0);
    Vec one_v(dim_wl);
    one_v[0] = Scalar::one();
    try_select(one_m, one_v);
    prev_deg[one_m] = std::move(one_v);
  }
  int max_nonzero_degree = 0;
  for (int deg = 1;; ++deg) {
    std::vector<Monomial> monos;
    Monomial scratch(2 * n);
    enumerate_degree(2 * n, deg, scratch, monos);
    bool any_nonzero = false;
    cur_deg.clear();
    for (const auto& m : monos) {
      int var = 0;
      while (m[var] == 0) ++var;
      Monomial rest = m;
      rest[var] -= 1;
      Vec value = tensor.multiply(gen_values[var], prev_deg.at(rest));
      bool nz = false;
      for (const auto& x : value)
        if (!x.is_zero()) {
          nz = true;
          break;
        }
      if (nz) {
        any_nonzero = true;
        max_nonzero_degree = deg;
        try_select(m, value);
      }
      if (deg == 1) degree_one_values[m] = value;
      cur_deg[m] = std::move(value);
    }
    if (!any_nonzero) break;
    prev_deg = std::move(cur_deg);
    require(deg <= 2 * pres.nilpotency_bound, Errc::internal_inconsistency,
            "restricted maximal ideal fails to vanish below twice the bound");
  }
  require(int(sel_monos.size()) == dim_wl, Errc::internal_inconsistency,
          "restricted algebra dimension differs from the tensor-square "
          "dimension");

  weil_detail::Expander ex = weil_detail::make_expander(sel_values, dim_wl);

  // Structure constants; tau-fixedness of the tensor square forces them to
  // be rational.
  auto express_rational = [&](const Vec& v) {
    Vec c = weil_detail::express(ex, v);
    SparseVec s;
    for (int k = 0; k < dim_wl; ++k) {
      if (c[k].is_zero()) continue;
      require(c[k].is_rational(), Errc::internal_inconsistency,
              "restricted structure constant is not rational");
      s.emplace_back(k, Scalar(c[k].re));
    }
    return s;
  };
  std::vector<std::vector<SparseVec>> sc(dim_wl,
                                         std::vector<SparseVec>(dim_wl));
  for (int i = 0; i < dim_wl; ++i)
    for (int j = i; j < dim_wl; ++j) {
      Vec prod = tensor.multiply(sel_values[i], sel_values[j]);
      SparseVec s = express_rational(prod);
      sc[i][j] = s;
      sc[j][i] = std::move(s);
    }

  // Normal forms for the unit and the generators; higher monomials are
  // reachable through multiplication.
  std::map<Monomial, SparseVec> normal_forms;
  normal_forms[Monomial(2 * n, 0)] = {{0, Scalar::one()}};
  for (const auto& [m, value] : degree_one_values)
    normal_forms[m] = express_rational(value);

  AlgebraPresentation wl_pres;
  wl_pres.field = Field::rationals;
  wl_pres.nvars = 2 * n;
  for (int k = 0; k < n; ++k) {
    wl_pres.var_names.push_back("x" + std::to_string(k + 1));
    wl_pres.var_names.push_back("y" + std::to_string(k + 1));
  }
  wl_pres.relations = real_relations;
  wl_pres.nilpotency_bound = max_nonzero_degree + 1;

  ArtinAlgebra restricted = ArtinAlgebra::from_parts(
      Field::rationals, dim_wl, std::move(sc), std::move(wl_pres), sel_monos,
      std::move(normal_forms), "wl(" + r.label() + ")");
  require(restricted.minimal_nilpotency() == max_nonzero_degree + 1,
          Errc::internal_inconsistency,
          "minimal nilpotency bound disagrees with the evaluation degree");

  ArtinAlgebra restricted_c = restricted.complexified();

  // eta(b_alpha) = class of b_alpha (x) 1, expressed over the restricted
  // basis with Gaussian coefficients.
  std::vector<Vec> eta_images;
  for (int alpha = 0; alpha < d; ++alpha) {
    Vec v(dim_wl);
    v[alpha * d + 0] = Scalar::one();
    eta_images.push_back(weil_detail::express(ex, v));
  }
  RingMap eta = make_ring_map(r, restricted_c, std::move(eta_images));

  return WeilRestrictedAlgebra{r,
                               std::move(restricted),
                               std::move(restricted_c),
                               std::move(eta),
                               std::move(real_relations),
                               std::move(sel_values)};
}

// Weil restriction of a module: M (x)_R (R_wl (x) Q(i)) along eta. Since
// the complexified restriction is R (x) conj(R) and eta is the first
// tensor factor, the result is canonically M (x) conj(R); the restricted
// algebra acts through its tensor coordinates. No row reduction is needed.
struct WeilRestrictedModule {
  FinModule module;    // over wl.restricted (realified coordinates)
  FinModule module_c;  // over wl.restricted_c: the space M (x) conj(R)
  Matrix embed;        // (dim(M) * dim(R)) x dim(M), m -> m (x) 1
};

inline WeilRestrictedModule weil_restrict_module(
    const WeilRestrictedAlgebra& wl, const FinModule& m) {
  require(m.algebra().same(wl.source), Errc::algebra_mismatch,
          "module is not over the restricted algebra's source");
  const int d = m.dim();
  const int ds = wl.source.dim();
  const int dimc = d * ds;

  std::vector<Matrix> action;
  action.reserve(wl.restricted_c.dim());
  for (const Vec& value : wl.basis_tensor_values) {
    Matrix act(dimc, dimc);
    for (int alpha = 0; alpha < ds; ++alpha)
      for (int beta = 0; beta < ds; ++beta) {
        const Scalar& v = value[alpha * ds + beta];
        if (v.is_zero()) continue;
        const Matrix& am = m.action(alpha);
        for (int bc = 0; bc < ds; ++bc)
          for (const auto& [bp, e] : wl.source.sc(beta, bc)) {
            Scalar w = v * e.conj();
            for (int jp = 0; jp < d; ++jp)
              for (int j = 0; j < d; ++j) {
                const Scalar& a = am.at(jp, j);
                if (!a.is_zero()) act.at(jp * ds + bp, j * ds + bc) += w * a;
              }
          }
      }
    action.push_back(std::move(act));
  }
  FinModule module_c = FinModule::from_action(wl.restricted_c, dimc,
                                              std::move(action), {},
                                              /*check_mult=*/false);
  Matrix embed(dimc, d);
  for (int j = 0; j < d; ++j) embed.at(j * ds + 0, j) = Scalar::one();

  FinModule restricted = restrict_scalars(module_c, wl.restricted);
  if (m.witness()) {
    FreeReport fr = is_free(restricted);
    require(fr.free && fr.rank == 2 * m.witness()->rank,
            Errc::internal_inconsistency,
            "restriction of a free module must be free of twice the rank");
    restricted = restricted.attach_witness(*fr.witness);
  }
  return WeilRestrictedModule{std::move(restricted), std::move(module_c),
                              std::move(embed)};
}

inline ModuleMap weil_restrict_map(const WeilRestrictedAlgebra& wl,
                                   const ModuleMap& f,
                                   const WeilRestrictedModule& src,
                                   const WeilRestrictedModule& tgt) {
  const int ds = wl.source.dim();
  Matrix big(tgt.module_c.dim(), src.module_c.dim());
  for (int r = 0; r < f.target().dim(); ++r)
    for (int c = 0; c < f.source().dim(); ++c) {
      const Scalar& x = f.mat().at(r, c);
      if (x.is_zero()) continue;
      for (int b = 0; b < ds; ++b) big.at(r * ds + b, c * ds + b) = x;
    }
  return ModuleMap(src.module, tgt.module, realify(big),
                   /*check_linear=*/false);
}

// Image of a submodule under restriction: the restricted span of the
// embedded generators together with their i-multiples.
inline Submodule weil_restrict_submodule(const WeilRestrictedAlgebra&,
                                         const Submodule& s,
                                         const WeilRestrictedModule& amb) {
  std::vector<Vec> gens;
  for (int k = 0; k < s.dim(); ++k) {
    Vec w = amb.embed * s.basis_vector(k);
    Vec iw(w.size());
    for (size_t t = 0; t < w.size(); ++t) iw[t] = Scalar::i() * w[t];
    gens.push_back(realify(w));
    gens.push_back(realify(iw));
  }
  return Submodule::span(amb.module, gens);
}

}  // namespace ah
