#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "artinhodge/error.hpp"
#include "artinhodge/matrix.hpp"
#include "artinhodge/scalar.hpp"

namespace ah {

// Monomials are exponent tuples. The canonical order is graded
// lexicographic: by total degree first, then higher powers of earlier
// variables first, so that 1 < z1 < z2 < z1^2 < z1 z2 < z2^2 < ...
using Monomial = std::vector<int>;
using Poly = std::map<Monomial, Scalar>;
using SparseVec = std::vector<std::pair<int, Scalar>>;

inline int degree(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0);
}

inline bool grlex_less(const Monomial& a, const Monomial& b) {
  int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  return a > b;  // lexicographically larger tuple comes first in the order
}

inline void enumerate_degree(int nvars, int deg, Monomial& scratch,
                             std::vector<Monomial>& out, int var = 0) {
  if (var == nvars - 1) {
    scratch[var] = deg;
    out.push_back(scratch);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    scratch[var] = e;
    enumerate_degree(nvars, deg - e, scratch, out, var + 1);
  }
}

// All monomials of degree <= maxdeg in canonical order. For nvars == 0 the
// single monomial is the empty tuple (the constant 1).
inline std::vector<Monomial> monomials_up_to(int nvars, int maxdeg) {
  std::vector<Monomial> out;
  if (nvars == 0) {
    out.push_back({});
    return out;
  }
  Monomial scratch(nvars);
  for (int d = 0; d <= maxdeg; ++d) enumerate_degree(nvars, d, scratch, out);
  return out;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [m, c] : b) {
    auto it = r.find(m);
    if (it == r.end()) {
      r.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) r.erase(it);
    }
  }
  return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m(ma.size());
      for (size_t k = 0; k < ma.size(); ++k) m[k] = ma[k] + mb[k];
      Scalar c = ca * cb;
      auto it = r.find(m);
      if (it == r.end()) {
        if (!c.is_zero()) r.emplace(std::move(m), std::move(c));
      } else {
        it->second += c;
        if (it->second.is_zero()) r.erase(it);
      }
    }
  return r;
}

inline Poly poly_scale(const Scalar& c, const Poly& a) {
  Poly r;
  if (c.is_zero()) return r;
  for (const auto& [m, x] : a) r.emplace(m, c * x);
  return r;
}

struct AlgebraPresentation {
  Field field = Field::gaussian_rationals;
  int nvars = 0;
  std::vector<std::string> var_names;  // defaults to z1..zn when empty
  std::vector<Poly> relations;
  int nilpotency_bound = 1;  // N with m^N contained in the relation ideal
  // when set, building additionally checks m^{N-1} != 0
  bool bound_declared_minimal = false;
};

namespace detail {

struct AlgebraData {
  Field field;
  int dim = 0;
  std::optional<AlgebraPresentation> pres;
  std::vector<Monomial> basis;            // empty for structural algebras
  std::map<Monomial, int> basis_index;
  std::map<Monomial, SparseVec> normal_forms;  // monomials of degree < bound
  std::vector<std::vector<SparseVec>> sc;      // sc[i][j], symmetric
  int minimal_bound = 1;  // least k with m^k = 0
  std::string label;
};

inline void sparse_accumulate(Vec& dense, const Scalar& c, const SparseVec& v) {
  for (const auto& [k, x] : v) dense[k] += c * x;
}

inline SparseVec to_sparse(const Vec& dense) {
  SparseVec s;
  for (size_t k = 0; k < dense.size(); ++k)
    if (!dense[k].is_zero()) s.emplace_back(int(k), dense[k]);
  return s;
}

}  // namespace detail

// A finite dimensional local algebra over Q or Q(i) with nilpotent maximal
// ideal and residue field equal to the base field. Immutable value type;
// copies share the underlying data.
class ArtinAlgebra {
 public:
  ArtinAlgebra() = default;

  static ArtinAlgebra build(AlgebraPresentation pres);
  static ArtinAlgebra base_field(Field f) {
    AlgebraPresentation p;
    p.field = f;
    p.nvars = 0;
    p.nilpotency_bound = 1;
    return build(std::move(p));
  }
  static ArtinAlgebra from_structure(Field field, int dim,
                                     std::vector<std::vector<SparseVec>> sc,
                                     std::string label);
  // Full construction from precomputed parts (used when the quotient basis
  // is obtained by other exact means than truncated reduction); all
  // structural validations still run.
  static ArtinAlgebra from_parts(Field field, int dim,
                                 std::vector<std::vector<SparseVec>> sc,
                                 AlgebraPresentation pres,
                                 std::vector<Monomial> basis,
                                 std::map<Monomial, SparseVec> normal_forms,
                                 std::string label);

  bool valid() const { return d_ != nullptr; }
  Field field() const { return d_->field; }
  int dim() const { return d_->dim; }
  // Length of the algebra as a module over itself; since every simple
  // module is the residue field, this is the base-field dimension.
  int length() const { return d_->dim; }
  int nvars() const { return d_->pres ? d_->pres->nvars : 0; }
  const std::optional<AlgebraPresentation>& presentation() const {
    return d_->pres;
  }
  const std::vector<Monomial>& basis() const { return d_->basis; }
  const std::string& label() const { return d_->label; }
  int minimal_nilpotency() const { return d_->minimal_bound; }

  const SparseVec& sc(int i, int j) const { return d_->sc[i][j]; }

  Vec zero() const { return Vec(d_->dim); }
  Vec one() const {
    Vec v(d_->dim);
    v[0] = Scalar::one();
    return v;
  }

  // Image of the k-th generator in the quotient (its normal form).
  Vec generator(int k) const {
    require(d_->pres.has_value() && k >= 0 && k < d_->pres->nvars,
            Errc::precondition_unmet, "generator index out of range");
    Monomial m(d_->pres->nvars, 0);
    m[k] = 1;
    return monomial_value(m);
  }

  // Value of an arbitrary monomial in the quotient.
  Vec monomial_value(const Monomial& m) const {
    require(d_->pres.has_value(), Errc::precondition_unmet,
            "monomial_value needs a presented algebra");
    Vec v(d_->dim);
    auto it = d_->normal_forms.find(m);
    if (it != d_->normal_forms.end())
      detail::sparse_accumulate(v, Scalar::one(), it->second);
    return v;
  }

  Vec value_of(const Poly& p) const {
    Vec v(d_->dim);
    for (const auto& [m, c] : p) {
      auto it = d_->normal_forms.find(m);
      if (it != d_->normal_forms.end())
        detail::sparse_accumulate(v, c, it->second);
    }
    return v;
  }

  Vec multiply(const Vec& a, const Vec& b) const {
    require(int(a.size()) == d_->dim && int(b.size()) == d_->dim,
            Errc::dimension_mismatch, "element size vs algebra dimension");
    Vec r(d_->dim);
    for (int i = 0; i < d_->dim; ++i) {
      if (a[i].is_zero()) continue;
      for (int j = 0; j < d_->dim; ++j) {
        if (b[j].is_zero()) continue;
        Scalar c = a[i] * b[j];
        detail::sparse_accumulate(r, c, d_->sc[i][j]);
      }
    }
    return r;
  }

  Scalar residue(const Vec& a) const {
    require(int(a.size()) == d_->dim, Errc::dimension_mismatch,
            "element size vs algebra dimension");
    return a[0];
  }

  bool is_unit(const Vec& a) const { return !residue(a).is_zero(); }

  // Multiplication-by-basis-element matrix.
  Matrix mult_matrix(int i) const {
    Matrix m(d_->dim, d_->dim);
    for (int j = 0; j < d_->dim; ++j)
      for (const auto& [t, c] : d_->sc[i][j]) m.at(t, j) = c;
    return m;
  }

  Matrix mult_matrix(const Vec& a) const {
    Matrix m(d_->dim, d_->dim);
    for (int i = 0; i < d_->dim; ++i) {
      if (a[i].is_zero()) continue;
      for (int j = 0; j < d_->dim; ++j)
        for (const auto& [t, c] : d_->sc[i][j]) m.at(t, j) += a[i] * c;
    }
    return m;
  }

  // The same algebra regarded over Q(i); only meaningful for rational
  // algebras (all structure constants are unchanged).
  ArtinAlgebra complexified() const {
    require(field() == Field::rationals, Errc::precondition_unmet,
            "complexified expects a rational algebra");
    auto nd = std::make_shared<detail::AlgebraData>(*d_);
    nd->field = Field::gaussian_rationals;
    nd->label += " (x) Qi";
    if (nd->pres) nd->pres->field = Field::gaussian_rationals;
    ArtinAlgebra a;
    a.d_ = std::move(nd);
    return a;
  }

  bool same(const ArtinAlgebra& o) const {
    if (d_ == o.d_) return true;
    if (!d_ || !o.d_) return false;
    return d_->field == o.d_->field && d_->dim == o.d_->dim &&
           d_->sc == o.d_->sc;
  }

 private:
  static std::shared_ptr<detail::AlgebraData> finish(
      std::shared_ptr<detail::AlgebraData> d);
  std::shared_ptr<const detail::AlgebraData> d_;
};

inline ArtinAlgebra ArtinAlgebra::build(AlgebraPresentation pres) {
  require(pres.nilpotency_bound >= 1, Errc::precondition_unmet,
          "nilpotency bound must be at least 1");
  require(pres.nvars >= 0, Errc::precondition_unmet, "negative nvars");
  if (pres.var_names.empty())
    for (int k = 0; k < pres.nvars; ++k)
      pres.var_names.push_back("z" + std::to_string(k + 1));
  const Monomial one_mono(pres.nvars, 0);
  for (const auto& f : pres.relations) {
    auto it = f.find(one_mono);
    require(it == f.end() || it->second.is_zero(), Errc::not_local,
            "relation has nonzero constant term; the ideal must lie in the "
            "maximal ideal");
    if (pres.field == Field::rationals)
      for (const auto& [m, c] : f)
        require(c.is_rational(), Errc::precondition_unmet,
                "non-rational coefficient in a rational presentation");
  }

  const int bound = pres.nilpotency_bound;
  std::vector<Monomial> cols = monomials_up_to(pres.nvars, bound);
  std::map<Monomial, int> col_index;
  for (size_t i = 0; i < cols.size(); ++i) col_index[cols[i]] = int(i);
  const int ncols = int(cols.size());

  // Rows span the ideal inside the truncation at the bound. Columns are
  // laid out in descending order so RREF pivots eliminate the largest
  // monomial of each row, leaving normal forms supported on smaller ones.
  auto desc = [&](int mono_idx) { return ncols - 1 - mono_idx; };
  std::vector<Vec> rows;
  std::vector<Monomial> mults = monomials_up_to(pres.nvars, bound - 1);
  for (const auto& f : pres.relations) {
    for (const auto& m : mults) {
      Vec row(ncols);
      bool nonzero = false;
      for (const auto& [fm, c] : f) {
        Monomial prod(pres.nvars);
        for (int k = 0; k < pres.nvars; ++k) prod[k] = m[k] + fm[k];
        if (degree(prod) > bound) continue;
        row[desc(col_index[prod])] += c;
        nonzero = true;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }
  RowSpace red = row_space(Matrix::from_rows(rows, ncols));

  std::vector<bool> pivot_mono(ncols, false);
  for (int p : red.pivots) pivot_mono[ncols - 1 - p] = true;

  // m^bound must vanish in the quotient: every degree-bound monomial has
  // to reduce to zero exactly.
  for (int idx = 0; idx < ncols; ++idx) {
    if (degree(cols[idx]) != bound) continue;
    Vec unit(ncols);
    unit[desc(idx)] = Scalar::one();
    if (!contains(red, unit)) {
      std::string nm;
      for (int k = 0; k < pres.nvars; ++k)
        if (cols[idx][k] > 0)
          nm += pres.var_names[k] + "^" + std::to_string(cols[idx][k]);
      fail(Errc::nilpotency_bound_violated,
           "degree-" + std::to_string(bound) + " monomial " + nm +
               " does not reduce to 0; the declared bound does not satisfy "
               "m^N = 0");
    }
  }

  auto data = std::make_shared<detail::AlgebraData>();
  data->field = pres.field;
  for (int idx = 0; idx < ncols; ++idx)
    if (degree(cols[idx]) < bound && !pivot_mono[idx])
      data->basis.push_back(cols[idx]);
  data->dim = int(data->basis.size());
  require(data->dim >= 1, Errc::internal_inconsistency,
          "quotient algebra has dimension zero");
  require(degree(data->basis[0]) == 0, Errc::internal_inconsistency,
          "basis element 0 is not the monomial 1");
  for (int i = 0; i < data->dim; ++i) data->basis_index[data->basis[i]] = i;

  // Normal forms of all monomials below the bound.
  for (int idx = 0; idx < ncols; ++idx) {
    if (degree(cols[idx]) >= bound) continue;
    SparseVec nf;
    if (!pivot_mono[idx]) {
      nf.emplace_back(data->basis_index[cols[idx]], Scalar::one());
    } else {
      Vec unit(ncols);
      unit[desc(idx)] = Scalar::one();
      Vec r = reduce_mod(red, unit);
      for (int k = 0; k < ncols; ++k) {
        if (r[k].is_zero()) continue;
        const Monomial& mono = cols[ncols - 1 - k];
        require(degree(mono) < bound, Errc::internal_inconsistency,
                "normal form escapes the basis degree range");
        nf.emplace_back(data->basis_index.at(mono), r[k]);
      }
      std::sort(nf.begin(), nf.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    data->normal_forms[cols[idx]] = std::move(nf);
  }

  // Structure constants by reducing products of basis monomials.
  data->sc.assign(data->dim, std::vector<SparseVec>(data->dim));
  for (int i = 0; i < data->dim; ++i)
    for (int j = i; j < data->dim; ++j) {
      Monomial prod(pres.nvars);
      for (int k = 0; k < pres.nvars; ++k)
        prod[k] = data->basis[i][k] + data->basis[j][k];
      SparseVec v;
      if (degree(prod) < bound) {
        auto it = data->normal_forms.find(prod);
        if (it != data->normal_forms.end()) v = it->second;
      }
      data->sc[i][j] = v;
      data->sc[j][i] = std::move(v);
    }

  data->pres = std::move(pres);
  data->label = data->pres->var_names.empty()
                    ? std::string(field_name(data->field))
                    : std::string(field_name(data->field)) + "[...]";
  ArtinAlgebra a;
  a.d_ = finish(std::move(data));
  if (a.d_->pres->bound_declared_minimal)
    require(a.d_->minimal_bound == a.d_->pres->nilpotency_bound,
            Errc::nilpotency_bound_violated,
            "the bound was declared minimal but m^{N-1} = 0 already");
  return a;
}

inline ArtinAlgebra ArtinAlgebra::from_structure(
    Field field, int dim, std::vector<std::vector<SparseVec>> sc,
    std::string label) {
  require(dim >= 1, Errc::precondition_unmet, "dimension must be positive");
  auto data = std::make_shared<detail::AlgebraData>();
  data->field = field;
  data->dim = dim;
  data->sc = std::move(sc);
  data->label = std::move(label);
  ArtinAlgebra a;
  a.d_ = finish(std::move(data));
  return a;
}

inline ArtinAlgebra ArtinAlgebra::from_parts(
    Field field, int dim, std::vector<std::vector<SparseVec>> sc,
    AlgebraPresentation pres, std::vector<Monomial> basis,
    std::map<Monomial, SparseVec> normal_forms, std::string label) {
  require(dim >= 1 && int(basis.size()) == dim, Errc::precondition_unmet,
          "basis size vs dimension");
  require(degree(basis[0]) == 0, Errc::internal_inconsistency,
          "basis element 0 is not the monomial 1");
  auto data = std::make_shared<detail::AlgebraData>();
  data->field = field;
  data->dim = dim;
  data->sc = std::move(sc);
  data->basis = std::move(basis);
  for (int i = 0; i < dim; ++i) data->basis_index[data->basis[i]] = i;
  data->normal_forms = std::move(normal_forms);
  data->pres = std::move(pres);
  data->label = std::move(label);
  ArtinAlgebra a;
  a.d_ = finish(std::move(data));
  return a;
}

// Shared validation: unit, commutativity, associativity, locality.
inline std::shared_ptr<detail::AlgebraData> ArtinAlgebra::finish(
    std::shared_ptr<detail::AlgebraData> d) {
  const int n = d->dim;
  require(int(d->sc.size()) == n, Errc::dimension_mismatch,
          "structure constant table size");
  for (int i = 0; i < n; ++i)
    require(int(d->sc[i].size()) == n, Errc::dimension_mismatch,
            "structure constant table size");

  // Basis element 0 is the unit.
  for (int j = 0; j < n; ++j) {
    const SparseVec& u = d->sc[0][j];
    require(u.size() == 1 && u[0].first == j && u[0].second == Scalar::one(),
            Errc::internal_inconsistency, "basis element 0 is not a unit");
  }

  // Commutativity and associativity, exhaustively on the basis. Sparse
  // accumulators keep this O(triples * fill) rather than O(triples * dim).
  auto combine = [](std::vector<std::pair<int, Scalar>>& acc) {
    std::sort(acc.begin(), acc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVec out;
    for (const auto& [k, c] : acc) {
      if (!out.empty() && out.back().first == k)
        out.back().second += c;
      else
        out.emplace_back(k, c);
    }
    std::erase_if(out, [](const auto& e) { return e.second.is_zero(); });
    return out;
  };
  std::vector<std::pair<int, Scalar>> acc;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      require(d->sc[i][j] == d->sc[j][i], Errc::internal_inconsistency,
              "multiplication is not commutative on the basis");
      for (int k = 0; k < n; ++k) {
        acc.clear();
        for (const auto& [t, c] : d->sc[i][j])
          for (const auto& [u, x] : d->sc[t][k]) acc.emplace_back(u, c * x);
        SparseVec lhs = combine(acc);
        acc.clear();
        for (const auto& [t, c] : d->sc[j][k])
          for (const auto& [u, x] : d->sc[i][t]) acc.emplace_back(u, c * x);
        SparseVec rhs = combine(acc);
        require(lhs == rhs, Errc::internal_inconsistency,
                "multiplication is not associative on the basis");
      }
    }

  // The span of the non-unit basis elements must be a nilpotent ideal;
  // minimal_bound is the least k with m^k = 0.
  if (n == 1) {
    d->minimal_bound = 1;
  } else {
    RowSpace power = zero_space(n);
    {
      std::vector<Vec> gens;
      for (int i = 1; i < n; ++i) {
        Vec e(n);
        e[i] = Scalar::one();
        gens.push_back(std::move(e));
      }
      power = row_space(Matrix::from_rows(gens, n));
    }
    int k = 1;
    while (power.rank() > 0) {
      std::vector<Vec> next;
      for (int i = 1; i < n; ++i)
        for (int r = 0; r < power.basis.rows(); ++r) {
          Vec v(n);
          Vec br = power.basis.row(r);
          for (int j = 0; j < n; ++j)
            if (!br[j].is_zero())
              detail::sparse_accumulate(v, br[j], d->sc[i][j]);
          next.push_back(std::move(v));
        }
      RowSpace np = row_space(Matrix::from_rows(next, n));
      require(np.rank() < power.rank() || power.rank() == 0, Errc::not_local,
              "maximal ideal is not nilpotent; the algebra is not local "
              "Artinian over its base field");
      power = std::move(np);
      ++k;
      require(k <= n + 1, Errc::not_local,
              "maximal ideal is not nilpotent (stabilized without vanishing)");
    }
    d->minimal_bound = k;
  }
  return d;
}

}  // namespace ah
