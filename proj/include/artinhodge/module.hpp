#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "artinhodge/algebra.hpp"
#include "artinhodge/error.hpp"
#include "artinhodge/matrix.hpp"

namespace ah {

// Witness that a module is free: a rank and a chosen R-basis given by
// base-field vectors.
struct FreeWitness {
  int rank = 0;
  std::vector<Vec> basis;
};

namespace detail {
struct ModuleData {
  ArtinAlgebra alg;
  int dim = 0;                 // base-field dimension
  std::vector<Matrix> action;  // one matrix per algebra basis element
  std::optional<FreeWitness> witness;
};
}  // namespace detail

// A finitely generated module over an ArtinAlgebra, presented as a
// base-field vector space with one action matrix per algebra basis
// element. Immutable; copies share data.
class FinModule {
 public:
  FinModule() = default;

  // check_mult controls the exhaustive action(a)action(b) = action(ab)
  // validation. Library-internal constructions (quotients, tensors, direct
  // sums) are multiplicative by construction and skip it; externally
  // supplied action tables are always checked.
  static FinModule from_action(ArtinAlgebra alg, int dim,
                               std::vector<Matrix> action,
                               std::optional<FreeWitness> witness = {},
                               bool check_mult = true) {
    require(dim >= 0, Errc::precondition_unmet, "negative module dimension");
    require(int(action.size()) == alg.dim(), Errc::dimension_mismatch,
            "one action matrix per algebra basis element expected");
    for (const auto& m : action)
      require(m.rows() == dim && m.cols() == dim, Errc::dimension_mismatch,
              "action matrix shape");
    require(action.empty() || action[0] == Matrix::identity(dim),
            Errc::internal_inconsistency, "action of 1 is not the identity");
    const int da = alg.dim();
    if (check_mult) {
      for (int i = 1; i < da; ++i)
        for (int j = i; j < da; ++j) {
          Matrix lhs = action[i] * action[j];
          Matrix rhs(dim, dim);
          for (const auto& [t, c] : alg.sc(i, j)) rhs = rhs + c * action[t];
          require(lhs == rhs, Errc::internal_inconsistency,
                  "action matrices do not respect the algebra multiplication");
        }
    }
    auto d = std::make_shared<detail::ModuleData>();
    d->alg = std::move(alg);
    d->dim = dim;
    d->action = std::move(action);
    if (witness) {
      validate_witness(*d, *witness);
      d->witness = std::move(witness);
    }
    FinModule m;
    m.d_ = std::move(d);
    return m;
  }

  // R^rank with coordinates (slot, algebra basis element) flattened as
  // slot * dim(R) + basis index.
  static FinModule free(ArtinAlgebra alg, int rank) {
    const int da = alg.dim();
    const int dim = rank * da;
    std::vector<Matrix> action;
    action.reserve(da);
    for (int i = 0; i < da; ++i) {
      Matrix m(dim, dim);
      for (int s = 0; s < rank; ++s)
        for (int l = 0; l < da; ++l)
          for (const auto& [t, c] : alg.sc(i, l)) m.at(s * da + t, s * da + l) = c;
      action.push_back(std::move(m));
    }
    FreeWitness w;
    w.rank = rank;
    for (int s = 0; s < rank; ++s) {
      Vec v(dim);
      v[s * da] = Scalar::one();
      w.basis.push_back(std::move(v));
    }
    return from_action(std::move(alg), dim, std::move(action), std::move(w),
                       /*check_mult=*/false);
  }

  bool valid() const { return d_ != nullptr; }
  const ArtinAlgebra& algebra() const { return d_->alg; }
  int dim() const { return d_->dim; }
  const Matrix& action(int i) const { return d_->action[i]; }
  const std::optional<FreeWitness>& witness() const { return d_->witness; }

  FinModule attach_witness(FreeWitness w) const {
    auto d = std::make_shared<detail::ModuleData>(*d_);
    validate_witness(*d, w);
    d->witness = std::move(w);
    FinModule m;
    m.d_ = std::move(d);
    return m;
  }

  // Action of a full algebra element.
  Vec act(const Vec& a, const Vec& v) const {
    require(int(a.size()) == d_->alg.dim(), Errc::dimension_mismatch,
            "algebra element size");
    Vec r(d_->dim);
    for (int i = 0; i < d_->alg.dim(); ++i) {
      if (a[i].is_zero()) continue;
      Vec w = d_->action[i] * v;
      for (int t = 0; t < d_->dim; ++t) r[t] += a[i] * w[t];
    }
    return r;
  }

  bool same(const FinModule& o) const {
    if (d_ == o.d_) return true;
    if (!d_ || !o.d_) return false;
    return d_->dim == o.d_->dim && d_->alg.same(o.d_->alg) &&
           d_->action == o.d_->action;
  }

 private:
  static void validate_witness(const detail::ModuleData& d,
                               const FreeWitness& w) {
    const int da = d.alg.dim();
    require(int(w.basis.size()) == w.rank, Errc::precondition_unmet,
            "witness rank vs basis size");
    require(d.dim == w.rank * da, Errc::precondition_unmet,
            "free witness requires dim = rank * dim(R)");
    Matrix cols(d.dim, w.rank * da);
    for (int u = 0; u < w.rank; ++u) {
      require(int(w.basis[u].size()) == d.dim, Errc::dimension_mismatch,
              "witness vector size");
      for (int l = 0; l < da; ++l) {
        Vec col = d.action[l] * w.basis[u];
        for (int r = 0; r < d.dim; ++r) cols.at(r, u * da + l) = col[r];
      }
    }
    require(cols.rank() == d.dim, Errc::precondition_unmet,
            "witness vectors are not a free basis");
  }

  std::shared_ptr<const detail::ModuleData> d_;
};

// A submodule stored as its canonical base-field row space. Closure under
// the algebra action is verified on construction.
class Submodule {
 public:
  Submodule() = default;

  // Span of the generators as an R-module (closed under the action).
  static Submodule span(const FinModule& ambient,
                        const std::vector<Vec>& gens) {
    std::vector<Vec> all;
    for (const auto& g : gens) {
      require(int(g.size()) == ambient.dim(), Errc::dimension_mismatch,
              "generator size vs ambient dimension");
      for (int i = 0; i < ambient.algebra().dim(); ++i)
        all.push_back(ambient.action(i) * g);
    }
    return Submodule(ambient, row_space(Matrix::from_rows(all, ambient.dim())),
                     /*check=*/false);
  }

  // From a base-field subspace that must already be action-closed.
  static Submodule from_subspace(const FinModule& ambient,
                                 const std::vector<Vec>& basis) {
    return Submodule(ambient,
                     row_space(Matrix::from_rows(basis, ambient.dim())),
                     /*check=*/true);
  }

  static Submodule from_space(const FinModule& ambient, RowSpace s,
                              bool check = true) {
    return Submodule(ambient, std::move(s), check);
  }

  static Submodule zero(const FinModule& ambient) {
    return Submodule(ambient, zero_space(ambient.dim()), false);
  }
  static Submodule full(const FinModule& ambient) {
    return Submodule(ambient, full_space(ambient.dim()), false);
  }

  const FinModule& ambient() const { return ambient_; }
  const RowSpace& space() const { return space_; }
  int dim() const { return space_.rank(); }
  Vec basis_vector(int i) const { return space_.basis.row(i); }
  std::vector<Vec> basis_vectors() const {
    std::vector<Vec> v;
    for (int i = 0; i < dim(); ++i) v.push_back(basis_vector(i));
    return v;
  }
  bool contains_vec(const Vec& v) const { return ah::contains(space_, v); }

 private:
  Submodule(FinModule ambient, RowSpace s, bool check)
      : ambient_(std::move(ambient)), space_(std::move(s)) {
    require(space_.dim == ambient_.dim(), Errc::dimension_mismatch,
            "subspace ambient dimension");
    if (check) {
      for (int i = 1; i < ambient_.algebra().dim(); ++i)
        for (int r = 0; r < space_.basis.rows(); ++r)
          require(ah::contains(space_,
                               ambient_.action(i) * space_.basis.row(r)),
                  Errc::internal_inconsistency,
                  "subspace is not closed under the algebra action");
    }
  }

  FinModule ambient_;
  RowSpace space_;
};

inline bool submodule_equal(const Submodule& a, const Submodule& b) {
  require(a.ambient().same(b.ambient()), Errc::ambient_mismatch,
          "submodules of different ambient modules");
  return equal(a.space(), b.space());
}

inline bool submodule_contains(const Submodule& outer, const Submodule& inner) {
  require(outer.ambient().same(inner.ambient()), Errc::ambient_mismatch,
          "submodules of different ambient modules");
  return contains(outer.space(), inner.space());
}

inline Submodule intersect(const Submodule& a, const Submodule& b) {
  require(a.ambient().same(b.ambient()), Errc::ambient_mismatch,
          "intersection of submodules of different ambient modules");
  return Submodule::from_space(a.ambient(),
                               space_intersect(a.space(), b.space()),
                               /*check=*/false);
}

inline Submodule sum(const Submodule& a, const Submodule& b) {
  require(a.ambient().same(b.ambient()), Errc::ambient_mismatch,
          "sum of submodules of different ambient modules");
  return Submodule::from_space(a.ambient(), space_sum(a.space(), b.space()),
                               /*check=*/false);
}

// An R-linear map, stored as its base-field matrix.
class ModuleMap {
 public:
  ModuleMap() = default;
  // Equivariance is checked by default; compositions and functorially
  // induced maps are linear by construction and may skip it.
  ModuleMap(FinModule source, FinModule target, Matrix mat,
            bool check_linear = true)
      : source_(std::move(source)), target_(std::move(target)),
        mat_(std::move(mat)) {
    require(mat_.rows() == target_.dim() && mat_.cols() == source_.dim(),
            Errc::dimension_mismatch, "map matrix shape");
    require(source_.algebra().same(target_.algebra()), Errc::algebra_mismatch,
            "map between modules over different algebras");
    if (check_linear)
      for (int i = 1; i < source_.algebra().dim(); ++i)
        require(mat_ * source_.action(i) == target_.action(i) * mat_,
                Errc::internal_inconsistency,
                "matrix does not commute with the algebra action");
  }

  static ModuleMap zero(const FinModule& src, const FinModule& tgt) {
    return ModuleMap(src, tgt, Matrix(tgt.dim(), src.dim()));
  }
  static ModuleMap identity(const FinModule& m) {
    return ModuleMap(m, m, Matrix::identity(m.dim()));
  }

  const FinModule& source() const { return source_; }
  const FinModule& target() const { return target_; }
  const Matrix& mat() const { return mat_; }
  Vec apply(const Vec& v) const { return mat_ * v; }
  bool is_zero() const { return mat_.is_zero(); }

 private:
  FinModule source_, target_;
  Matrix mat_;
};

inline ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  require(f.target().same(g.source()), Errc::dimension_mismatch,
          "composition of non-composable maps");
  return ModuleMap(f.source(), g.target(), g.mat() * f.mat(),
                   /*check_linear=*/false);
}

inline Submodule kernel(const ModuleMap& f) {
  return Submodule::from_space(f.source(), kernel_space(f.mat()));
}

inline Submodule image(const ModuleMap& f) {
  return Submodule::from_space(f.target(), image_space(f.mat()));
}

// M/S with projection and a linear section; quotient coordinates are the
// non-pivot coordinates of S's canonical form.
struct QuotientModule {
  FinModule module;
  Matrix proj;  // module.dim x ambient.dim
  Matrix sect;  // ambient.dim x module.dim
};

inline QuotientModule quotient(const FinModule& m, const Submodule& s) {
  require(s.ambient().same(m), Errc::ambient_mismatch,
          "quotient by a submodule of a different module");
  const int d = m.dim();
  std::vector<bool> is_piv(d, false);
  for (int p : s.space().pivots) is_piv[p] = true;
  std::vector<int> rest;
  for (int c = 0; c < d; ++c)
    if (!is_piv[c]) rest.push_back(c);
  const int q = int(rest.size());

  Matrix proj(q, d);
  for (int c = 0; c < d; ++c) {
    Vec unit(d);
    unit[c] = Scalar::one();
    Vec red = reduce_mod(s.space(), std::move(unit));
    for (int r = 0; r < q; ++r) proj.at(r, c) = red[rest[r]];
  }
  Matrix sect(d, q);
  for (int r = 0; r < q; ++r) sect.at(rest[r], r) = Scalar::one();

  std::vector<Matrix> action;
  for (int i = 0; i < m.algebra().dim(); ++i)
    action.push_back(proj * (m.action(i) * sect));
  return QuotientModule{FinModule::from_action(m.algebra(), q,
                                               std::move(action), {},
                                               /*check_mult=*/false),
                        proj, sect};
}

inline QuotientModule cokernel(const ModuleMap& f) {
  return quotient(f.target(), image(f));
}

// A submodule regarded as a module in its own right, with inclusion and
// coordinate-extraction matrices.
struct SubmoduleModule {
  FinModule module;
  Matrix incl;    // ambient.dim x r
  Matrix coords;  // r x ambient.dim; valid on vectors inside the submodule
};

inline SubmoduleModule as_module(const Submodule& s) {
  const FinModule& amb = s.ambient();
  const int r = s.dim();
  Matrix incl(amb.dim(), r);
  for (int i = 0; i < r; ++i) {
    Vec b = s.basis_vector(i);
    for (int c = 0; c < amb.dim(); ++c) incl.at(c, i) = b[c];
  }
  Matrix coords(r, amb.dim());
  for (int i = 0; i < r; ++i) coords.at(i, s.space().pivots[i]) = Scalar::one();
  std::vector<Matrix> action;
  for (int i = 0; i < amb.algebra().dim(); ++i)
    action.push_back(coords * (amb.action(i) * incl));
  return SubmoduleModule{FinModule::from_action(amb.algebra(), r,
                                                std::move(action), {},
                                                /*check_mult=*/false),
                         incl, coords};
}

// Z/B for submodules B <= Z of a common ambient module, with a lift of
// quotient coordinates back into the ambient space.
struct SubquotientModule {
  FinModule module;
  Matrix lift;       // ambient.dim x q
  Matrix represent;  // q x ambient.dim; valid on vectors inside Z
};

inline SubquotientModule subquotient(const Submodule& z, const Submodule& b) {
  require(z.ambient().same(b.ambient()), Errc::ambient_mismatch,
          "subquotient of submodules in different ambients");
  require(submodule_contains(z, b), Errc::precondition_unmet,
          "denominator is not contained in the numerator");
  SubmoduleModule zm = as_module(z);
  std::vector<Vec> b_in_z;
  for (int i = 0; i < b.dim(); ++i)
    b_in_z.push_back(zm.coords * b.basis_vector(i));
  Submodule bz = Submodule::from_subspace(zm.module, b_in_z);
  QuotientModule q = quotient(zm.module, bz);
  return SubquotientModule{q.module, zm.incl * q.sect, q.proj * zm.coords};
}

// --- freeness -------------------------------------------------------------

struct FreeReport {
  bool free = false;
  int rank = 0;          // dim(M (x) k), the minimal generator count
  int mm_dim = 0;        // dim of m*M
  std::optional<FreeWitness> witness;
};

// Freeness test over the local Artin base: r = dim(M (x) k) via Nakayama,
// free iff dim = r * dim(R). The generation of M by lifted residue basis
// vectors is re-verified and must always hold.
inline FreeReport is_free(const FinModule& m) {
  const int d = m.dim();
  const int da = m.algebra().dim();
  std::vector<Vec> mm_rows;
  for (int i = 1; i < da; ++i)
    for (int c = 0; c < d; ++c) mm_rows.push_back(m.action(i).col(c));
  RowSpace mm = row_space(Matrix::from_rows(mm_rows, d));
  FreeReport rep;
  rep.mm_dim = mm.rank();
  rep.rank = d - rep.mm_dim;

  std::vector<bool> is_piv(d, false);
  for (int p : mm.pivots) is_piv[p] = true;
  std::vector<Vec> lifts;
  for (int c = 0; c < d && int(lifts.size()) < rep.rank; ++c) {
    if (is_piv[c]) continue;
    Vec v(d);
    v[c] = Scalar::one();
    lifts.push_back(std::move(v));
  }
  std::vector<Vec> gen_rows;
  for (const auto& v : lifts)
    for (int i = 0; i < da; ++i) gen_rows.push_back(m.action(i) * v);
  int gen_rank = Matrix::from_rows(gen_rows, d).rank();
  require(gen_rank == d, Errc::internal_inconsistency,
          "lifted residue basis fails to generate (Nakayama violated)");

  rep.free = (d == rep.rank * da);
  if (rep.free) rep.witness = FreeWitness{rep.rank, std::move(lifts)};
  return rep;
}

// Attach a freeness witness, computing one if needed.
inline FinModule with_witness(const FinModule& m) {
  if (m.witness()) return m;
  FreeReport r = is_free(m);
  require(r.free, Errc::not_free_witnessed,
          "module is not free; no witness can be attached");
  return m.attach_witness(*r.witness);
}

// An R-linear map out of a witnessed free module, determined by arbitrary
// images of the witness basis.
inline ModuleMap map_from_free(const FinModule& src, const FinModule& tgt,
                               const std::vector<Vec>& images) {
  require(src.witness().has_value(), Errc::not_free_witnessed,
          "source must be witnessed free");
  const auto& w = *src.witness();
  require(int(images.size()) == w.rank, Errc::dimension_mismatch,
          "one image per witness basis vector expected");
  const int da = src.algebra().dim();
  Matrix wcols(src.dim(), w.rank * da);
  Matrix icols(tgt.dim(), w.rank * da);
  for (int s = 0; s < w.rank; ++s)
    for (int l = 0; l < da; ++l) {
      Vec a = src.action(l) * w.basis[s];
      Vec b = tgt.action(l) * images[s];
      for (int r = 0; r < src.dim(); ++r) wcols.at(r, s * da + l) = a[r];
      for (int r = 0; r < tgt.dim(); ++r) icols.at(r, s * da + l) = b[r];
    }
  Matrix m = icols * inverse(wcols);
  return ModuleMap(src, tgt, std::move(m), /*check_linear=*/false);
}

// --- minors, rank, constant rank -------------------------------------------

struct IdealOfMinors {
  ArtinAlgebra alg;
  int order = 0;  // j of the j x j minors
  std::vector<Vec> gens;
};

inline bool ideal_is_zero(const IdealOfMinors& ideal) {
  for (const auto& g : ideal.gens)
    for (const auto& c : g)
      if (!c.is_zero()) return false;
  return true;
}

// Over a local ring, I = R iff some generator is a unit.
inline bool ideal_is_unit(const IdealOfMinors& ideal) {
  for (const auto& g : ideal.gens)
    if (ideal.alg.is_unit(g)) return true;
  return false;
}

// The matrix of a map between witnessed free modules, with entries in R.
inline std::vector<std::vector<Vec>> rmatrix(const ModuleMap& f) {
  require(f.source().witness() && f.target().witness(),
          Errc::not_free_witnessed,
          "both sides must carry free witnesses");
  const auto& ws = *f.source().witness();
  const auto& wt = *f.target().witness();
  const int da = f.source().algebra().dim();
  Matrix cols(f.target().dim(), wt.rank * da);
  for (int u = 0; u < wt.rank; ++u)
    for (int l = 0; l < da; ++l) {
      Vec col = f.target().action(l) * wt.basis[u];
      for (int r = 0; r < f.target().dim(); ++r) cols.at(r, u * da + l) = col[r];
    }
  std::vector<std::vector<Vec>> out(wt.rank, std::vector<Vec>(ws.rank));
  for (int v = 0; v < ws.rank; ++v) {
    Vec c = solve_unique(cols, f.apply(ws.basis[v]));
    for (int u = 0; u < wt.rank; ++u) {
      Vec elem(da);
      for (int l = 0; l < da; ++l) elem[l] = c[u * da + l];
      out[u][v] = std::move(elem);
    }
  }
  return out;
}

namespace detail {
// Laplace expansion along the rows; the column mask preserves the relative
// order of the remaining columns so the signs stay correct.
inline Vec rdet(const ArtinAlgebra& alg,
                const std::vector<std::vector<Vec>>& m,
                const std::vector<int>& rows, const std::vector<int>& cols,
                std::vector<bool>& used, size_t depth) {
  if (depth == rows.size()) return alg.one();
  Vec acc = alg.zero();
  int sign = 1;
  for (size_t k = 0; k < cols.size(); ++k) {
    if (used[k]) continue;
    const Vec& entry = m[rows[depth]][cols[k]];
    bool zero = true;
    for (const auto& c : entry)
      if (!c.is_zero()) {
        zero = false;
        break;
      }
    if (!zero) {
      used[k] = true;
      Vec sub = rdet(alg, m, rows, cols, used, depth + 1);
      used[k] = false;
      Vec term = alg.multiply(entry, sub);
      for (size_t t = 0; t < acc.size(); ++t)
        acc[t] += (sign > 0 ? term[t] : -term[t]);
    }
    sign = -sign;
  }
  return acc;
}

inline void subsets(int n, int k, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out, int start = 0) {
  if (int(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i <= n - (k - int(cur.size())); ++i) {
    cur.push_back(i);
    subsets(n, k, cur, out, i + 1);
    cur.pop_back();
  }
}
}  // namespace detail

// All j x j determinantal minors of the map, as elements of R. I_0 = R.
inline IdealOfMinors minors_ideal(const ModuleMap& f, int j) {
  require(j >= 0, Errc::precondition_unmet, "negative minor order");
  const ArtinAlgebra& alg = f.source().algebra();
  if (j == 0) return IdealOfMinors{alg, 0, {alg.one()}};
  auto m = rmatrix(f);
  const int trank = int(m.size());
  const int srank = trank ? int(m[0].size()) : f.source().witness()->rank;
  IdealOfMinors ideal{alg, j, {}};
  if (j > trank || j > srank) return ideal;  // no minors: the zero ideal
  std::vector<std::vector<int>> row_sets, col_sets;
  std::vector<int> cur;
  detail::subsets(trank, j, cur, row_sets);
  detail::subsets(srank, j, cur, col_sets);
  for (const auto& rs : row_sets)
    for (const auto& cs : col_sets) {
      std::vector<bool> used(cs.size(), false);
      ideal.gens.push_back(detail::rdet(alg, m, rs, cs, used, 0));
    }
  return ideal;
}

// rk(f) = max { j : I_j(f) != 0 }.
inline int rank_of(const ModuleMap& f) {
  require(f.source().witness() && f.target().witness(),
          Errc::not_free_witnessed, "rank needs free witnesses on both sides");
  const int maxj = std::min(f.source().witness()->rank,
                            f.target().witness()->rank);
  int rank = 0;
  for (int j = 1; j <= maxj; ++j) {
    if (ideal_is_zero(minors_ideal(f, j))) break;
    rank = j;
  }
  return rank;
}

struct ConstantRankReport {
  bool constant = false;
  int rank = 0;             // rk(f) from the minors
  bool top_minors_unit = false;
  bool next_minors_zero = false;
  bool coker_free = false;
  int coker_rank = 0;
};

// Constant rank k: I_k(f) = R and I_{k+1}(f) = 0. Cross-checked against
// freeness of the cokernel, which is equivalent over a local ring; a
// disagreement is a bug, never a valid state.
inline ConstantRankReport constant_rank(const ModuleMap& f) {
  ConstantRankReport rep;
  rep.rank = rank_of(f);
  rep.top_minors_unit = ideal_is_unit(minors_ideal(f, rep.rank));
  rep.next_minors_zero = ideal_is_zero(minors_ideal(f, rep.rank + 1));
  rep.constant = rep.top_minors_unit && rep.next_minors_zero;
  FreeReport coker = is_free(cokernel(f).module);
  rep.coker_free = coker.free;
  rep.coker_rank = coker.rank;
  require(rep.constant == rep.coker_free, Errc::internal_inconsistency,
          "minors criterion and cokernel-freeness criterion disagree");
  if (rep.constant)
    require(coker.rank == f.target().witness()->rank - rep.rank,
            Errc::internal_inconsistency,
            "cokernel rank inconsistent with the minors rank");
  return rep;
}

// --- base change ------------------------------------------------------------

// A unit-preserving local homomorphism between built algebras, given by the
// images of the source basis elements.
struct RingMap {
  ArtinAlgebra source, target;
  std::vector<Vec> images;

  Matrix as_matrix() const {
    Matrix m(target.dim(), source.dim());
    for (int j = 0; j < source.dim(); ++j)
      for (int r = 0; r < target.dim(); ++r) m.at(r, j) = images[j][r];
    return m;
  }

  Vec apply(const Vec& a) const {
    Vec r(target.dim());
    for (int j = 0; j < source.dim(); ++j)
      for (int t = 0; t < target.dim(); ++t) r[t] += a[j] * images[j][t];
    return r;
  }
};

inline RingMap make_ring_map(ArtinAlgebra source, ArtinAlgebra target,
                             std::vector<Vec> images) {
  require(int(images.size()) == source.dim(), Errc::dimension_mismatch,
          "one image per source basis element expected");
  for (const auto& v : images)
    require(int(v.size()) == target.dim(), Errc::dimension_mismatch,
            "image vector size");
  require(images[0] == target.one(), Errc::not_local_homomorphism,
          "ring map does not preserve the unit");
  for (int i = 1; i < source.dim(); ++i)
    require(target.residue(images[i]).is_zero(), Errc::not_local_homomorphism,
            "ring map does not carry the maximal ideal into the maximal "
            "ideal");
  RingMap f{std::move(source), std::move(target), std::move(images)};
  for (int i = 0; i < f.source.dim(); ++i)
    for (int j = i; j < f.source.dim(); ++j) {
      Vec lhs = f.target.multiply(f.images[i], f.images[j]);
      Vec rhs(f.target.dim());
      for (const auto& [t, c] : f.source.sc(i, j))
        for (int r = 0; r < f.target.dim(); ++r) rhs[r] += c * f.images[t][r];
      require(lhs == rhs, Errc::not_local_homomorphism,
              "ring map is not multiplicative");
    }
  return f;
}

inline RingMap residue_map(const ArtinAlgebra& alg) {
  ArtinAlgebra k = ArtinAlgebra::base_field(alg.field());
  std::vector<Vec> images(alg.dim(), Vec(1));
  images[0][0] = Scalar::one();
  return make_ring_map(alg, k, std::move(images));
}

// M (x)_A A' along f : A -> A', computed as the quotient of the base-field
// tensor product by the bilinearity relations.
struct BaseChangedModule {
  FinModule module;
  Matrix proj;   // module.dim x (dim(M) * dim(A'))
  Matrix sect;   // (dim(M) * dim(A')) x module.dim
  Matrix embed;  // module.dim x dim(M): x -> class of x (x) 1
};

inline FinModule tensor_space_module(const FinModule& m, const ArtinAlgebra& ap) {
  const int da2 = ap.dim();
  const int dim = m.dim() * da2;
  std::vector<Matrix> action;
  for (int i = 0; i < da2; ++i) {
    Matrix a(dim, dim);
    for (int j = 0; j < m.dim(); ++j)
      for (int l = 0; l < da2; ++l)
        for (const auto& [t, c] : ap.sc(i, l)) a.at(j * da2 + t, j * da2 + l) = c;
    action.push_back(std::move(a));
  }
  return FinModule::from_action(ap, dim, std::move(action), {},
                                /*check_mult=*/false);
}

inline BaseChangedModule base_change(const FinModule& m, const RingMap& f) {
  require(m.algebra().same(f.source), Errc::algebra_mismatch,
          "module is not over the source of the ring map");
  const ArtinAlgebra& ap = f.target;
  const int da = m.algebra().dim();
  const int da2 = ap.dim();
  FinModule tensor = tensor_space_module(m, ap);
  // (a x) (x) 1 - x (x) f(a) for algebra basis elements a and module basis
  // vectors x; the module span closes these under the A'-action.
  std::vector<Vec> rels;
  for (int i = 1; i < da; ++i)
    for (int j = 0; j < m.dim(); ++j) {
      Vec r(tensor.dim());
      for (int t = 0; t < m.dim(); ++t) {
        const Scalar& c = m.action(i).at(t, j);
        if (!c.is_zero()) r[t * da2 + 0] += c;
      }
      for (int l = 0; l < da2; ++l) r[j * da2 + l] -= f.images[i][l];
      rels.push_back(std::move(r));
    }
  Submodule rel = Submodule::span(tensor, rels);
  QuotientModule q = quotient(tensor, rel);
  Matrix embed(q.module.dim(), m.dim());
  for (int j = 0; j < m.dim(); ++j)
    for (int r = 0; r < q.module.dim(); ++r)
      embed.at(r, j) = q.proj.at(r, j * da2 + 0);
  return BaseChangedModule{q.module, q.proj, q.sect, std::move(embed)};
}

inline ModuleMap base_change_map(const ModuleMap& g,
                                 const BaseChangedModule& src,
                                 const BaseChangedModule& tgt,
                                 const RingMap& f) {
  const int da2 = f.target.dim();
  Matrix big(g.target().dim() * da2, g.source().dim() * da2);
  for (int r = 0; r < g.target().dim(); ++r)
    for (int c = 0; c < g.source().dim(); ++c) {
      const Scalar& x = g.mat().at(r, c);
      if (x.is_zero()) continue;
      for (int l = 0; l < da2; ++l) big.at(r * da2 + l, c * da2 + l) = x;
    }
  return ModuleMap(src.module, tgt.module, tgt.proj * (big * src.sect),
                   /*check_linear=*/false);
}

inline Submodule base_change_submodule(const Submodule& s,
                                       const BaseChangedModule& bc) {
  std::vector<Vec> gens;
  for (int i = 0; i < s.dim(); ++i)
    gens.push_back(bc.embed * s.basis_vector(i));
  return Submodule::span(bc.module, gens);
}

// A module over the complexification of a rational algebra, regarded over
// the rational algebra itself: coordinates double, i acts as a 2x2 block.
inline FinModule restrict_scalars(const FinModule& m,
                                  const ArtinAlgebra& real_alg) {
  require(m.algebra().field() == Field::gaussian_rationals &&
              real_alg.field() == Field::rationals,
          Errc::precondition_unmet,
          "restrict_scalars expects a Gaussian module over a rational "
          "algebra's complexification");
  require(real_alg.complexified().same(m.algebra()), Errc::algebra_mismatch,
          "algebra is not the complexification of the given real algebra");
  std::vector<Matrix> action;
  for (int i = 0; i < real_alg.dim(); ++i) action.push_back(realify(m.action(i)));
  return FinModule::from_action(real_alg, 2 * m.dim(), std::move(action), {},
                                /*check_mult=*/false);
}

// --- Appendix toolkit -------------------------------------------------------

struct QuotientFreeReport {
  bool quotient_free = false;
  int quotient_rank = 0;
  bool fiber_injective = false;
};

// For free F1 <= F: F/F1 is free and F1 (x) k -> F (x) k is injective.
inline QuotientFreeReport quotient_free_check(const FinModule& f_mod,
                                              const Submodule& f1) {
  require(f_mod.witness().has_value(), Errc::not_free_witnessed,
          "ambient module must be witnessed free");
  require(f1.ambient().same(f_mod), Errc::ambient_mismatch,
          "submodule of a different module");
  SubmoduleModule sub = as_module(f1);
  FreeReport sub_free = is_free(sub.module);
  require(sub_free.free, Errc::precondition_unmet,
          "the submodule is not free");
  QuotientFreeReport rep;
  FreeReport qf = is_free(quotient(f_mod, f1).module);
  rep.quotient_free = qf.free;
  rep.quotient_rank = qf.rank;
  // Injectivity of F1 (x) k -> F (x) k: no basis combination of F1 falls
  // into m*F without falling into m*F1.
  const int d = f_mod.dim();
  std::vector<Vec> mf_rows;
  for (int i = 1; i < f_mod.algebra().dim(); ++i)
    for (int c = 0; c < d; ++c) mf_rows.push_back(f_mod.action(i).col(c));
  RowSpace mf = row_space(Matrix::from_rows(mf_rows, d));
  std::vector<Vec> fiber_rows;
  for (int i = 0; i < f1.dim(); ++i)
    fiber_rows.push_back(reduce_mod(mf, f1.basis_vector(i)));
  int fiber_rank = Matrix::from_rows(fiber_rows, d).rank();
  rep.fiber_injective = (fiber_rank == sub_free.rank);
  return rep;
}

struct TriangleReport {
  int eta_rank = 0;
  bool coker_psi_free = false;
  bool coker_composite_free = false;
  bool equivalent = false;
};

// Triangle rank transfer: with eta of constant rank and im(psi) meeting
// ker(eta) trivially, coker(eta o psi) is free iff coker(psi) is.
inline TriangleReport triangle_rank_transfer(const ModuleMap& psi,
                                             const ModuleMap& eta) {
  require(psi.target().same(eta.source()), Errc::precondition_unmet,
          "psi and eta are not composable");
  require(eta.source().witness() && eta.target().witness(),
          Errc::not_free_witnessed, "G and H must be witnessed free");
  ConstantRankReport eta_cr = constant_rank(eta);
  require(eta_cr.constant, Errc::precondition_unmet,
          "eta does not have constant rank");
  Submodule meet = intersect(image(psi), kernel(eta));
  require(meet.dim() == 0, Errc::precondition_unmet,
          "im(psi) meets ker(eta) nontrivially");
  TriangleReport rep;
  rep.eta_rank = eta_cr.rank;
  rep.coker_psi_free = is_free(cokernel(psi).module).free;
  rep.coker_composite_free = is_free(cokernel(compose(eta, psi)).module).free;
  rep.equivalent = (rep.coker_psi_free == rep.coker_composite_free);
  require(rep.equivalent, Errc::internal_inconsistency,
          "triangle lemma violated: the two freeness verdicts disagree");
  return rep;
}

struct CohomologyFreeReport {
  bool free = false;
  int rank = 0;
  int dim = 0;
};

// For a complex of witnessed frees with constant-rank differentials, the
// cohomology ker d2 / im d1 is free.
inline CohomologyFreeReport complex_cohomology_free_check(const ModuleMap& d1,
                                                          const ModuleMap& d2) {
  require(d1.target().same(d2.source()), Errc::precondition_unmet,
          "d1 and d2 are not composable");
  require(d1.source().witness() && d1.target().witness() &&
              d2.target().witness(),
          Errc::not_free_witnessed, "all three modules must be witnessed free");
  require(compose(d2, d1).is_zero(), Errc::not_a_complex,
          "d2 o d1 is not zero");
  require(constant_rank(d1).constant && constant_rank(d2).constant,
          Errc::precondition_unmet,
          "differentials do not have constant rank");
  SubquotientModule h = subquotient(kernel(d2), image(d1));
  FreeReport fr = is_free(h.module);
  require(fr.free, Errc::internal_inconsistency,
          "cohomology of a constant-rank complex of frees is not free");
  return CohomologyFreeReport{fr.free, fr.rank, h.module.dim()};
}

// Direct sums, used by complexes and the SNC pipeline.
struct DirectSum {
  FinModule module;
  std::vector<int> offsets;  // starting coordinate of each summand
};

inline DirectSum direct_sum(const ArtinAlgebra& alg,
                            const std::vector<FinModule>& parts) {
  int total = 0;
  std::vector<int> offsets;
  for (const auto& p : parts) {
    require(p.algebra().same(alg), Errc::algebra_mismatch,
            "direct sum over mixed algebras");
    offsets.push_back(total);
    total += p.dim();
  }
  std::vector<Matrix> action;
  for (int i = 0; i < alg.dim(); ++i) {
    Matrix a(total, total);
    for (size_t s = 0; s < parts.size(); ++s) {
      const Matrix& b = parts[s].action(i);
      for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c)
          a.at(offsets[s] + r, offsets[s] + c) = b.at(r, c);
    }
    action.push_back(std::move(a));
  }
  return DirectSum{FinModule::from_action(alg, total, std::move(action), {},
                                          /*check_mult=*/false),
                   std::move(offsets)};
}

}  // namespace ah
