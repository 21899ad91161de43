#pragma once

#include <map>
#include <utility>
#include <vector>

#include "artinhodge/error.hpp"
#include "artinhodge/module.hpp"

namespace ah {

// A bounded cochain complex of FinModules with differentials of degree +1.
struct BoundedComplex {
  int lo = 0;
  std::vector<FinModule> modules;           // degrees lo .. lo+size-1
  std::vector<ModuleMap> differentials;     // d^n : K^n -> K^{n+1}

  int hi() const { return lo + int(modules.size()) - 1; }
  bool has(int n) const { return n >= lo && n <= hi(); }
  const FinModule& at(int n) const { return modules[size_t(n - lo)]; }
  bool has_diff(int n) const { return n >= lo && n < hi(); }
  const ModuleMap& diff(int n) const { return differentials[size_t(n - lo)]; }

  const ArtinAlgebra& algebra() const { return modules.front().algebra(); }
};

inline BoundedComplex make_complex(int lo, std::vector<FinModule> modules,
                                   std::vector<ModuleMap> differentials) {
  require(!modules.empty(), Errc::precondition_unmet, "empty complex");
  require(differentials.size() + 1 == modules.size(), Errc::dimension_mismatch,
          "a complex on k degrees has k-1 differentials");
  for (size_t n = 0; n < differentials.size(); ++n) {
    require(differentials[n].source().same(modules[n]) &&
                differentials[n].target().same(modules[n + 1]),
            Errc::dimension_mismatch, "differential endpoints");
    if (n + 1 < differentials.size())
      require(compose(differentials[n + 1], differentials[n]).is_zero(),
              Errc::not_a_complex, "d o d != 0");
  }
  return BoundedComplex{lo, std::move(modules), std::move(differentials)};
}

struct CohomologyModule {
  FinModule module;
  SubquotientModule data;  // lift / represent within K^n
};

inline CohomologyModule cohomology(const BoundedComplex& k, int n) {
  if (!k.has(n)) {
    FinModule zero = FinModule::free(k.algebra(), 0);
    Submodule z = Submodule::zero(zero);
    return CohomologyModule{zero, subquotient(z, z)};
  }
  Submodule z = k.has_diff(n) ? kernel(k.diff(n)) : Submodule::full(k.at(n));
  Submodule b = k.has_diff(n - 1) ? image(k.diff(n - 1))
                                  : Submodule::zero(k.at(n));
  SubquotientModule sq = subquotient(z, b);
  return CohomologyModule{sq.module, std::move(sq)};
}

// --- filtrations ------------------------------------------------------------

// A decreasing filtration by subcomplexes: F^{pmin} is everything,
// F^{pmax+1} is zero, levels decrease and are respected by d.
struct DecreasingFiltration {
  BoundedComplex complex;
  int pmin = 0, pmax = 0;
  std::vector<std::vector<Submodule>> levels;  // [p - pmin][n - lo]

  Submodule level(int p, int n) const {
    if (!complex.has(n))
      return Submodule::zero(FinModule::free(complex.algebra(), 0));
    if (p < pmin) return Submodule::full(complex.at(n));
    if (p > pmax) return Submodule::zero(complex.at(n));
    return levels[size_t(p - pmin)][size_t(n - complex.lo)];
  }
};

inline DecreasingFiltration make_filtration(
    BoundedComplex complex, int pmin, int pmax,
    std::vector<std::vector<Submodule>> levels) {
  require(pmax >= pmin, Errc::precondition_unmet, "empty filtration range");
  require(int(levels.size()) == pmax - pmin + 1, Errc::dimension_mismatch,
          "one level per filtration index expected");
  const int width = int(complex.modules.size());
  for (int p = pmin; p <= pmax; ++p) {
    require(int(levels[size_t(p - pmin)].size()) == width,
            Errc::dimension_mismatch, "one submodule per degree expected");
    for (int n = complex.lo; n <= complex.hi(); ++n) {
      const Submodule& s = levels[size_t(p - pmin)][size_t(n - complex.lo)];
      require(s.ambient().same(complex.at(n)), Errc::ambient_mismatch,
              "filtration level in the wrong module");
      if (p == pmin)
        require(s.dim() == complex.at(n).dim(), Errc::precondition_unmet,
                "filtration is not exhaustive at its lowest index");
      if (p > pmin)
        require(submodule_contains(
                    levels[size_t(p - 1 - pmin)][size_t(n - complex.lo)], s),
                Errc::precondition_unmet, "filtration is not decreasing");
      if (complex.has_diff(n)) {
        std::vector<Vec> imgs;
        for (int i = 0; i < s.dim(); ++i)
          imgs.push_back(complex.diff(n).apply(s.basis_vector(i)));
        const Submodule& tgt =
            levels[size_t(p - pmin)][size_t(n + 1 - complex.lo)];
        for (const auto& v : imgs)
          require(tgt.contains_vec(v), Errc::precondition_unmet,
                  "differential does not respect the filtration");
      }
    }
  }
  return DecreasingFiltration{std::move(complex), pmin, pmax,
                              std::move(levels)};
}

inline DecreasingFiltration trivial_filtration(BoundedComplex complex) {
  std::vector<std::vector<Submodule>> levels(1);
  for (int n = complex.lo; n <= complex.hi(); ++n)
    levels[0].push_back(Submodule::full(complex.at(n)));
  return make_filtration(std::move(complex), 0, 0, std::move(levels));
}

// F^p = the subcomplex of degrees >= p.
inline DecreasingFiltration stupid_filtration(BoundedComplex complex) {
  const int lo = complex.lo, hi = complex.hi();
  std::vector<std::vector<Submodule>> levels;
  for (int p = lo; p <= hi; ++p) {
    std::vector<Submodule> row;
    for (int n = lo; n <= hi; ++n)
      row.push_back(n >= p ? Submodule::full(complex.at(n))
                           : Submodule::zero(complex.at(n)));
    levels.push_back(std::move(row));
  }
  return make_filtration(std::move(complex), lo, hi, std::move(levels));
}

// --- spectral sequence ------------------------------------------------------

struct SpectralCell {
  FinModule module;
  SubquotientModule data;  // lift / represent within K^{p+q}
};

struct SpectralSequencePage {
  int r = 0;
  std::map<std::pair<int, int>, SpectralCell> cells;
  std::map<std::pair<int, int>, ModuleMap> differentials;

  int cell_dim(int p, int q) const {
    auto it = cells.find({p, q});
    return it == cells.end() ? 0 : it->second.module.dim();
  }
  bool differentials_vanish() const {
    for (const auto& [pq, d] : differentials)
      if (!d.is_zero()) return false;
    return true;
  }
  int total_dim() const {
    int t = 0;
    for (const auto& [pq, c] : cells) t += c.module.dim();
    return t;
  }
};

namespace ss_detail {

// Z_r^{p,q} = F^p K^n  meet  d^{-1}(F^{p+r} K^{n+1}), with index clamping.
inline Submodule z_space(const DecreasingFiltration& f, int r, int p, int n) {
  const BoundedComplex& k = f.complex;
  if (!k.has(n)) return Submodule::zero(FinModule::free(k.algebra(), 0));
  Submodule fp = f.level(p, n);
  if (!k.has_diff(n)) return fp;
  RowSpace pre = preimage(k.diff(n).mat(), f.level(p + r, n + 1).space());
  return intersect(fp, Submodule::from_space(k.at(n), pre, /*check=*/false));
}

inline Submodule d_image(const DecreasingFiltration& f, const Submodule& s,
                         int n) {
  const BoundedComplex& k = f.complex;
  if (!k.has_diff(n) || !k.has(n + 1))
    return Submodule::zero(k.has(n + 1)
                               ? k.at(n + 1)
                               : FinModule::free(k.algebra(), 0));
  std::vector<Vec> imgs;
  for (int i = 0; i < s.dim(); ++i)
    imgs.push_back(k.diff(n).apply(s.basis_vector(i)));
  return Submodule::from_space(
      k.at(n + 1), row_space(Matrix::from_rows(imgs, k.at(n + 1).dim())),
      /*check=*/false);
}

}  // namespace ss_detail

struct SpectralSequence {
  std::vector<SpectralSequencePage> pages;  // pages[i] has r = i+1
  int stable_from = 0;  // least r with E_r = E_{r+1} = ... among computed

  const SpectralSequencePage& page(int r) const { return pages[size_t(r - 1)]; }
  const SpectralSequencePage& infinity() const { return pages.back(); }
};

// Pages E_1 .. E_{r_max} of the filtered complex by the standard
// subquotient formula; each d_r is induced by d and squares to zero.
inline SpectralSequence spectral_pages(const DecreasingFiltration& f,
                                       int r_max) {
  require(r_max >= 1, Errc::precondition_unmet, "need at least one page");
  const BoundedComplex& k = f.complex;
  const int cap = std::max(r_max, f.pmax - f.pmin + 2);
  SpectralSequence out;
  for (int r = 1; r <= cap; ++r) {
    SpectralSequencePage page;
    page.r = r;
    for (int p = f.pmin; p <= f.pmax; ++p)
      for (int n = k.lo; n <= k.hi(); ++n) {
        const int q = n - p;
        Submodule z = ss_detail::z_space(f, r, p, n);
        Submodule b = sum(
            intersect(f.level(p + 1, n), ss_detail::z_space(f, r - 1, p + 1, n)),
            ss_detail::d_image(
                f, ss_detail::z_space(f, r - 1, p - r + 1, n - 1), n - 1));
        SubquotientModule sq = subquotient(z, b);
        page.cells.emplace(std::pair{p, q},
                           SpectralCell{sq.module, std::move(sq)});
      }
    for (auto& [pq, cell] : page.cells) {
      const auto [p, q] = pq;
      const int n = p + q;
      auto tgt = page.cells.find({p + r, q - r + 1});
      if (tgt == page.cells.end()) continue;
      Matrix dm(tgt->second.module.dim(), cell.module.dim());
      if (k.has_diff(n)) {
        Matrix amb = k.diff(n).mat() * cell.data.lift;
        dm = tgt->second.data.represent * amb;
      }
      page.differentials.emplace(
          pq, ModuleMap(cell.module, tgt->second.module, std::move(dm),
                        /*check_linear=*/false));
    }
    // d_r o d_r = 0
    for (const auto& [pq, d1] : page.differentials) {
      auto next = page.differentials.find(
          {pq.first + r, pq.second - r + 1});
      if (next != page.differentials.end())
        require(compose(next->second, d1).is_zero(), Errc::internal_inconsistency,
                "page differential does not square to zero");
    }
    out.pages.push_back(std::move(page));
  }
  out.stable_from = cap;
  for (int r = cap - 1; r >= 1; --r) {
    const SpectralSequencePage& cur = out.page(r);
    const SpectralSequencePage& next = out.page(r + 1);
    bool stable = cur.differentials_vanish();
    for (int p = f.pmin; p <= f.pmax && stable; ++p)
      for (int n = k.lo; n <= k.hi() && stable; ++n)
        if (cur.cell_dim(p, n - p) != next.cell_dim(p, n - p)) stable = false;
    if (stable)
      out.stable_from = r;
    else
      break;
  }
  return out;
}

// True iff all differentials vanish from page r on (equivalently, the cell
// dimensions are constant from page r on).
inline bool degeneration_check(const SpectralSequence& ss, int r) {
  for (const auto& page : ss.pages) {
    if (page.r < r) continue;
    if (!page.differentials_vanish()) return false;
  }
  return true;
}

// Images of H^n(F^p K) -> H^n(K) as submodules of the cohomology module;
// returned for p = pmin .. pmax+1 (decreasing, ends at zero).
struct AbutmentFiltration {
  CohomologyModule cohom;
  int pmin = 0;
  std::vector<Submodule> levels;  // index p - pmin, last entry is zero
};

inline AbutmentFiltration filtration_on_abutment(const DecreasingFiltration& f,
                                                 int n) {
  const BoundedComplex& k = f.complex;
  CohomologyModule h = cohomology(k, n);
  AbutmentFiltration out{h, f.pmin, {}};
  if (!k.has(n)) {
    for (int p = f.pmin; p <= f.pmax + 1; ++p)
      out.levels.push_back(Submodule::zero(h.module));
    return out;
  }
  Submodule z =
      k.has_diff(n) ? kernel(k.diff(n)) : Submodule::full(k.at(n));
  for (int p = f.pmin; p <= f.pmax + 1; ++p) {
    Submodule zf = intersect(z, f.level(p, n));
    std::vector<Vec> reps;
    for (int i = 0; i < zf.dim(); ++i)
      reps.push_back(h.data.represent * zf.basis_vector(i));
    out.levels.push_back(Submodule::from_space(
        h.module, row_space(Matrix::from_rows(reps, h.module.dim())),
        /*check=*/false));
  }
  return out;
}

// --- double complexes -------------------------------------------------------

// A bigraded rectangle with commuting differentials on ingestion; vertical
// maps at column a are stored multiplied by (-1)^a so that the squares
// anticommute and the total differential squares to zero.
struct DoubleComplex {
  int a_lo = 0, b_lo = 0;
  std::vector<std::vector<FinModule>> modules;  // [a - a_lo][b - b_lo]
  std::vector<std::vector<ModuleMap>> horiz;    // (a,b) -> (a+1,b)
  std::vector<std::vector<ModuleMap>> vert;     // (a,b) -> (a,b+1), twisted

  int a_hi() const { return a_lo + int(modules.size()) - 1; }
  int b_hi() const { return b_lo + int(modules.front().size()) - 1; }
  const FinModule& at(int a, int b) const {
    return modules[size_t(a - a_lo)][size_t(b - b_lo)];
  }
};

inline DoubleComplex make_double_complex(
    int a_lo, int b_lo, std::vector<std::vector<FinModule>> modules,
    std::vector<std::vector<ModuleMap>> horiz,
    std::vector<std::vector<ModuleMap>> vert) {
  require(!modules.empty() && !modules.front().empty(),
          Errc::precondition_unmet, "empty double complex");
  const int na = int(modules.size());
  const int nb = int(modules.front().size());
  for (const auto& col : modules)
    require(int(col.size()) == nb, Errc::dimension_mismatch,
            "ragged double complex");
  require(int(horiz.size()) == na - 1, Errc::dimension_mismatch,
          "horizontal map count");
  for (const auto& col : horiz)
    require(int(col.size()) == nb, Errc::dimension_mismatch,
            "horizontal map count per column");
  require(int(vert.size()) == na, Errc::dimension_mismatch,
          "vertical map count");
  for (const auto& col : vert)
    require(int(col.size()) == nb - 1, Errc::dimension_mismatch,
            "vertical map count per column");
  for (int a = 0; a < na - 1; ++a)
    for (int b = 0; b < nb; ++b)
      require(horiz[size_t(a)][size_t(b)].source().same(
                  modules[size_t(a)][size_t(b)]) &&
                  horiz[size_t(a)][size_t(b)].target().same(
                      modules[size_t(a + 1)][size_t(b)]),
              Errc::dimension_mismatch, "horizontal map endpoints");
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb - 1; ++b)
      require(vert[size_t(a)][size_t(b)].source().same(
                  modules[size_t(a)][size_t(b)]) &&
                  vert[size_t(a)][size_t(b)].target().same(
                      modules[size_t(a)][size_t(b + 1)]),
              Errc::dimension_mismatch, "vertical map endpoints");
  // d_h o d_h = 0 along rows, d_v o d_v = 0 along columns, squares commute
  for (int a = 0; a < na - 1; ++a)
    for (int b = 0; b < nb; ++b) {
      if (a + 2 <= na - 1)
        require(compose(horiz[size_t(a + 1)][size_t(b)],
                        horiz[size_t(a)][size_t(b)])
                    .is_zero(),
                Errc::not_a_complex, "horizontal d^2 != 0");
    }
  for (int a = 0; a < na; ++a)
    for (int b = 0; b + 2 <= nb - 1; ++b)
      require(compose(vert[size_t(a)][size_t(b + 1)], vert[size_t(a)][size_t(b)])
                  .is_zero(),
              Errc::not_a_complex, "vertical d^2 != 0");
  for (int a = 0; a + 1 < na; ++a)
    for (int b = 0; b + 1 < nb; ++b)
      require(compose(vert[size_t(a + 1)][size_t(b)], horiz[size_t(a)][size_t(b)])
                      .mat() ==
                  compose(horiz[size_t(a)][size_t(b + 1)],
                          vert[size_t(a)][size_t(b)])
                      .mat(),
              Errc::not_a_complex, "squares do not commute on ingestion");
  // twist
  for (int a = 0; a < na; ++a) {
    if ((a + a_lo) % 2 == 0) continue;
    for (auto& m : vert[size_t(a)])
      m = ModuleMap(m.source(), m.target(), -Scalar::one() * m.mat(),
                    /*check_linear=*/false);
  }
  return DoubleComplex{a_lo, b_lo, std::move(modules), std::move(horiz),
                       std::move(vert)};
}

// T^n = direct sum over a+b = n, with differential d_h + (twisted) d_v.
inline BoundedComplex total_complex(const DoubleComplex& dc) {
  const ArtinAlgebra& alg = dc.modules.front().front().algebra();
  const int n_lo = dc.a_lo + dc.b_lo;
  const int n_hi = dc.a_hi() + dc.b_hi();
  std::vector<FinModule> total;
  std::vector<std::vector<std::pair<int, int>>> layout;  // per n: (a,b)
  std::vector<std::vector<int>> offsets;
  for (int n = n_lo; n <= n_hi; ++n) {
    std::vector<FinModule> parts;
    std::vector<std::pair<int, int>> lay;
    for (int a = dc.a_lo; a <= dc.a_hi(); ++a) {
      int b = n - a;
      if (b < dc.b_lo || b > dc.b_hi()) continue;
      parts.push_back(dc.at(a, b));
      lay.emplace_back(a, b);
    }
    DirectSum ds = direct_sum(alg, parts);
    total.push_back(ds.module);
    layout.push_back(std::move(lay));
    offsets.push_back(std::move(ds.offsets));
  }
  std::vector<ModuleMap> diffs;
  for (int n = n_lo; n < n_hi; ++n) {
    const auto& src_lay = layout[size_t(n - n_lo)];
    const auto& tgt_lay = layout[size_t(n + 1 - n_lo)];
    Matrix d(total[size_t(n + 1 - n_lo)].dim(), total[size_t(n - n_lo)].dim());
    auto tgt_offset = [&](int a, int b) {
      for (size_t i = 0; i < tgt_lay.size(); ++i)
        if (tgt_lay[i] == std::pair{a, b})
          return offsets[size_t(n + 1 - n_lo)][i];
      return -1;
    };
    for (size_t i = 0; i < src_lay.size(); ++i) {
      auto [a, b] = src_lay[i];
      int src_off = offsets[size_t(n - n_lo)][i];
      if (a + 1 <= dc.a_hi()) {
        int off = tgt_offset(a + 1, b);
        if (off >= 0) {
          const Matrix& h =
              dc.horiz[size_t(a - dc.a_lo)][size_t(b - dc.b_lo)].mat();
          for (int r = 0; r < h.rows(); ++r)
            for (int c = 0; c < h.cols(); ++c)
              if (!h.at(r, c).is_zero()) d.at(off + r, src_off + c) = h.at(r, c);
        }
      }
      if (b + 1 <= dc.b_hi()) {
        int off = tgt_offset(a, b + 1);
        if (off >= 0) {
          const Matrix& v =
              dc.vert[size_t(a - dc.a_lo)][size_t(b - dc.b_lo)].mat();
          for (int r = 0; r < v.rows(); ++r)
            for (int c = 0; c < v.cols(); ++c)
              if (!v.at(r, c).is_zero()) d.at(off + r, src_off + c) = v.at(r, c);
        }
      }
    }
    diffs.push_back(ModuleMap(total[size_t(n - n_lo)],
                              total[size_t(n + 1 - n_lo)], std::move(d),
                              /*check_linear=*/false));
  }
  return make_complex(n_lo, std::move(total), std::move(diffs));
}

// --- length inequality -------------------------------------------------------

struct LengthReport {
  int lhs = 0;        // lg_R H^n(K)
  int rhs = 0;        // lg(R) * dim_k H^n(K (x) k)
  bool holds = false;
  bool equality = false;
  bool cohomology_free = false;
};

// lg_R(H^n(K)) <= lg(R) * dim_k(H^n(K (x) k)) for a complex of free
// modules, with freeness at equality. Lengths over these algebras are
// base-field dimensions, every simple module being the residue field.
inline LengthReport length_inequality(const BoundedComplex& k, int n) {
  for (const auto& m : k.modules)
    require(m.witness().has_value(), Errc::precondition_unmet,
            "length inequality needs a complex of witnessed free modules");
  LengthReport rep;
  CohomologyModule h = cohomology(k, n);
  rep.lhs = h.module.dim();

  const ArtinAlgebra& alg = k.algebra();
  RingMap res = residue_map(alg);
  // fiber complex dimensions: dim - rank(d^n (x) k) - rank(d^{n-1} (x) k)
  auto fiber_rank = [&](int m) {
    if (!k.has_diff(m)) return 0;
    BaseChangedModule s = base_change(k.at(m), res);
    BaseChangedModule t = base_change(k.at(m + 1), res);
    return image(base_change_map(k.diff(m), s, t, res)).dim();
  };
  int fiber_dim = k.has(n) ? base_change(k.at(n), res).module.dim() : 0;
  int hn_fiber = fiber_dim - fiber_rank(n) - fiber_rank(n - 1);
  rep.rhs = alg.length() * hn_fiber;
  rep.holds = rep.lhs <= rep.rhs;
  rep.equality = rep.lhs == rep.rhs;
  rep.cohomology_free = is_free(h.module).free;
  if (rep.equality)
    require(rep.cohomology_free, Errc::internal_inconsistency,
            "length equality must force free cohomology");
  return rep;
}

}  // namespace ah
