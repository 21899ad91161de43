// Acceptance suite: runs every acceptance criterion at its stated tolerance
// (exact equality throughout; runtimes as wall-clock bounds) and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "artinhodge/artinhodge.hpp"
#include "oracle.hpp"

using namespace ah;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

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
  Vec algebra_elem(const ArtinAlgebra& a, int mag = 2) {
    Vec v(a.dim());
    for (auto& x : v) x = scalar(a.field(), mag);
    return v;
  }
  ModuleMap free_map(const FinModule& src, const FinModule& tgt, int mag = 2) {
    const ArtinAlgebra& a = src.algebra();
    const int da = a.dim();
    int s = src.witness()->rank, t = tgt.witness()->rank;
    Matrix m(tgt.dim(), src.dim());
    for (int u = 0; u < t; ++u)
      for (int v = 0; v < s; ++v) {
        Matrix mul = a.mult_matrix(algebra_elem(a, mag));
        for (int r = 0; r < da; ++r)
          for (int c = 0; c < da; ++c)
            m.at(u * da + r, v * da + c) = mul.at(r, c);
      }
    return ModuleMap(src, tgt, std::move(m));
  }
  Vec in_space(const Submodule& s, int mag = 2) {
    Vec v(s.ambient().dim());
    for (int i = 0; i < s.dim(); ++i) {
      Scalar c = scalar(s.ambient().algebra().field(), mag);
      Vec b = s.basis_vector(i);
      for (size_t t = 0; t < v.size(); ++t) v[t] += c * b[t];
    }
    return v;
  }
};

Poly mono_poly(std::vector<std::pair<Monomial, Scalar>> terms) {
  Poly p;
  for (auto& [m, c] : terms) p[m] += c;
  return p;
}

ArtinAlgebra eps_algebra(int n, Field f = Field::gaussian_rationals) {
  AlgebraPresentation p;
  p.field = f;
  p.nvars = 1;
  p.relations = {mono_poly({{{n}, Scalar::one()}})};
  p.nilpotency_bound = n;
  return ArtinAlgebra::build(p);
}

ArtinAlgebra square_zero_pair(Field f = Field::gaussian_rationals) {
  AlgebraPresentation p;
  p.field = f;
  p.nvars = 2;
  p.relations = {mono_poly({{{2, 0}, Scalar::one()}}),
                 mono_poly({{{0, 2}, Scalar::one()}}),
                 mono_poly({{{1, 1}, Scalar::one()}})};
  p.nilpotency_bound = 2;
  return ArtinAlgebra::build(p);
}

// Random local Artin presentation over Q(i): every degree-N monomial plus a
// few random lower-degree relations, so the bound always validates.
ArtinAlgebra random_algebra(Rng& rng) {
  AlgebraPresentation p;
  p.field = Field::gaussian_rationals;
  p.nvars = rng.uniform(1, 3);
  p.nilpotency_bound = p.nvars == 1   ? rng.uniform(2, 4)
                       : p.nvars == 2 ? rng.uniform(2, 3)
                                      : 2;
  const int n = p.nvars, bound = p.nilpotency_bound;
  Monomial scratch(n);
  std::vector<Monomial> top;
  enumerate_degree(n, bound, scratch, top);
  for (const auto& m : top) p.relations.push_back(mono_poly({{m, Scalar::one()}}));
  // extra random relations of intermediate degree keep dimensions modest
  int extras = n >= 2 ? rng.uniform(n - 1, n) : rng.uniform(0, 1);
  for (int e = 0; e < extras; ++e) {
    Poly rel;
    int terms = rng.uniform(1, 2);
    for (int t = 0; t < terms; ++t) {
      Monomial m(n, 0);
      int deg = rng.uniform(2, std::max(2, bound - 1));
      for (int d = 0; d < deg; ++d) m[size_t(rng.uniform(0, n - 1))] += 1;
      Scalar c = rng.scalar(Field::gaussian_rationals, 2);
      if (c.is_zero()) c = Scalar::one();
      rel[m] += c;
    }
    if (!rel.empty()) p.relations.push_back(std::move(rel));
  }
  return ArtinAlgebra::build(p);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  auto t0 = Clock::now();
  Rng rng(101);
  int dim_law_holds = 0, structural_ok = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    ArtinAlgebra a = random_algebra(rng);
    WeilRestrictedAlgebra wl = weil_restrict_algebra(a);
    // local Artin over Q with rational residue field: enforced by the
    // builder; re-check the observable facts
    bool structural = wl.restricted.field() == Field::rationals &&
                      wl.restricted.dim() >= 1 &&
                      wl.restricted.minimal_nilpotency() >= 1 &&
                      wl.restricted.residue(wl.restricted.one()) ==
                          Scalar::one();
    if (structural) ++structural_ok;
    if (wl.restricted.dim() == 2 * a.dim()) ++dim_law_holds;
  }
  double el = seconds_since(t0);
  std::ostringstream ss;
  ss << "dim(R_wl) = 2*dim(R) held on " << dim_law_holds << "/" << trials
     << " (it holds exactly when dim(R) = 2; the restriction of the stated "
        "construction has dim(R_wl) = dim(R)^2); local-Artin/rational-residue "
     << structural_ok << "/" << trials << "; " << el << "s";
  bool pass = dim_law_holds == trials && structural_ok == trials && el < 5.0;
  return {pass, ss.str()};
}

Outcome criterion2() {
  ArtinAlgebra a = eps_algebra(2);
  WeilRestrictedAlgebra wl = weil_restrict_algebra(a);
  bool ok = true;
  std::ostringstream ss;
  Poly g = mono_poly({{{2, 0}, Scalar::one()}, {{0, 2}, -Scalar::one()}});
  Poly h = mono_poly({{{1, 1}, Scalar(2)}});
  ok &= wl.real_relations.size() == 2 && wl.real_relations[0] == g &&
        wl.real_relations[1] == h;
  ok &= wl.restricted.dim() == 4;
  ok &= wl.restricted.basis() ==
        std::vector<Monomial>{{0, 0}, {1, 0}, {0, 1}, {2, 0}};
  ok &= wl.restricted.minimal_nilpotency() == 3;  // m^3 = 0, m^2 != 0
  // independent oracle: exhaustive normal-form reduction
  auto ora = oracle::quotient_oracle(2, wl.real_relations, 3);
  ok &= ora.dim == 4;
  for (size_t i = 0; i < 4 && ok; ++i)
    ok &= ora.surviving[i] == wl.restricted.basis()[i];
  ss << "R_wl = Q[x,y]/(x^2-y^2, 2xy), basis {1,x,y,x^2}, m^3 = 0, oracle dim "
     << ora.dim;
  return {ok, ss.str()};
}

Outcome criterion3() {
  auto t0 = Clock::now();
  Rng rng(103);
  int done = 0, agree = 0;
  for (ArtinAlgebra a : {eps_algebra(2), eps_algebra(3)}) {
    WeilRestrictedAlgebra wl = weil_restrict_algebra(a);
    for (int t = 0; t < 50; ++t) {
      // three-term sequence
      FinModule k1 = FinModule::free(a, rng.uniform(1, 2));
      FinModule k2 = FinModule::free(a, rng.uniform(1, 2));
      FinModule k3 = FinModule::free(a, rng.uniform(1, 2));
      ModuleMap f = rng.free_map(k1, k2);
      ModuleMap g = rng.free_map(k2, k3);
      bool exact = submodule_equal(image(f), kernel(g));
      WeilRestrictedModule w1 = weil_restrict_module(wl, k1);
      WeilRestrictedModule w2 = weil_restrict_module(wl, k2);
      WeilRestrictedModule w3 = weil_restrict_module(wl, k3);
      bool exact_wl = submodule_equal(image(weil_restrict_map(wl, f, w1, w2)),
                                      kernel(weil_restrict_map(wl, g, w2, w3)));
      ++done;
      if (exact == exact_wl) ++agree;
      // module freeness reflection
      FinModule m = cokernel(rng.free_map(FinModule::free(a, rng.uniform(1, 2)),
                                          FinModule::free(a, rng.uniform(1, 2))))
                        .module;
      WeilRestrictedModule mw = weil_restrict_module(wl, m);
      ++done;
      if (is_free(m).free == is_free(mw.module).free) ++agree;
    }
  }
  double el = seconds_since(t0);
  std::ostringstream ss;
  ss << agree << "/" << done << " verdicts invariant under restriction; " << el
     << "s";
  return {agree == done && done == 200 && el < 30.0, ss.str()};
}

Outcome criterion4() {
  auto t0 = Clock::now();
  Rng rng(104);
  int done = 0, agree = 0;
  std::vector<ArtinAlgebra> algebras = {eps_algebra(2), eps_algebra(3),
                                        square_zero_pair()};
  for (int t = 0; t < 500; ++t) {
    const ArtinAlgebra& a = algebras[size_t(t % 3)];
    FinModule src = FinModule::free(a, rng.uniform(1, 5));
    FinModule tgt = FinModule::free(a, rng.uniform(1, 5));
    // constant_rank throws InternalInconsistency if the two criteria split
    ConstantRankReport rep = constant_rank(rng.free_map(src, tgt, 1));
    ++done;
    if (rep.constant == rep.coker_free) ++agree;
  }
  double el = seconds_since(t0);
  std::ostringstream ss;
  ss << agree << "/" << done
     << " minors-vs-cokernel agreements (corrected index convention); " << el
     << "s";
  return {agree == 500 && el < 60.0, ss.str()};
}

Outcome criterion5() {
  Rng rng(105);
  ArtinAlgebra a = eps_algebra(2);
  int fq = 0, inter = 0, tri = 0, coh = 0;
  int attempts = 0;
  // free quotients
  while (fq < 100 && ++attempts < 4000) {
    FinModule f = FinModule::free(a, rng.uniform(2, 3));
    Vec v(f.dim());
    for (auto& x : v) x = rng.scalar(a.field(), 1);
    Submodule f1 = Submodule::span(f, {v});
    if (!is_free(as_module(f1).module).free) continue;
    QuotientFreeReport rep = quotient_free_check(f, f1);
    if (rep.quotient_free && rep.fiber_injective) ++fq;
  }
  // intersections iff fibers
  attempts = 0;
  std::vector<Vec> mm_rows;
  FinModule amb = FinModule::free(a, 3);
  for (int i = 1; i < a.dim(); ++i)
    for (int c = 0; c < amb.dim(); ++c) mm_rows.push_back(amb.action(i).col(c));
  RowSpace mspace = row_space(Matrix::from_rows(mm_rows, amb.dim()));
  while (inter < 100 && ++attempts < 4000) {
    Vec v(amb.dim()), w(amb.dim());
    for (auto& x : v) x = rng.scalar(a.field(), 1);
    for (auto& x : w) x = rng.scalar(a.field(), 1);
    Submodule f1 = Submodule::span(amb, {v});
    Submodule f2 = Submodule::span(amb, {w});
    if (!is_free(as_module(f1).module).free) continue;
    if (!is_free(as_module(f2).module).free) continue;
    auto fiber = [&](const Submodule& s) {
      std::vector<Vec> rows;
      for (int i = 0; i < s.dim(); ++i)
        rows.push_back(reduce_mod(mspace, s.basis_vector(i)));
      return row_space(Matrix::from_rows(rows, amb.dim()));
    };
    bool exact_zero = intersect(f1, f2).dim() == 0;
    bool fiber_zero = space_intersect(fiber(f1), fiber(f2)).rank() == 0;
    if (exact_zero == fiber_zero) ++inter;
  }
  // triangle transfer
  attempts = 0;
  while (tri < 100 && ++attempts < 6000) {
    FinModule f = FinModule::free(a, rng.uniform(1, 2));
    FinModule g = FinModule::free(a, rng.uniform(1, 3));
    FinModule h = FinModule::free(a, rng.uniform(1, 2));
    ModuleMap eta = rng.free_map(g, h, 1);
    if (!is_free(cokernel(eta).module).free) continue;
    ModuleMap psi = rng.free_map(f, g, 1);
    if (intersect(image(psi), kernel(eta)).dim() != 0) continue;
    TriangleReport rep = triangle_rank_transfer(psi, eta);
    if (rep.equivalent) ++tri;
  }
  // constant-rank complexes
  attempts = 0;
  while (coh < 100 && ++attempts < 6000) {
    FinModule h1 = FinModule::free(a, rng.uniform(1, 2));
    FinModule h2 = FinModule::free(a, rng.uniform(2, 3));
    FinModule h3 = FinModule::free(a, rng.uniform(1, 2));
    ModuleMap d2 = rng.free_map(h2, h3, 1);
    if (!is_free(cokernel(d2).module).free) continue;
    Submodule ker2 = kernel(d2);
    std::vector<Vec> imgs;
    for (int s = 0; s < h1.witness()->rank; ++s)
      imgs.push_back(rng.in_space(ker2, 1));
    ModuleMap d1 = map_from_free(h1, h2, imgs);
    if (!is_free(cokernel(d1).module).free) continue;
    CohomologyFreeReport rep = complex_cohomology_free_check(d1, d2);
    if (rep.free) ++coh;
  }
  std::ostringstream ss;
  ss << "free-quotient " << fq << "/100, intersection-iff-fiber " << inter
     << "/100, triangle " << tri << "/100, complex-cohomology " << coh
     << "/100, zero failures";
  return {fq == 100 && inter == 100 && tri == 100 && coh == 100, ss.str()};
}

Outcome criterion6() {
  Rng rng(106);
  int done = 0, good = 0;
  std::vector<ArtinAlgebra> algebras = {
      eps_algebra(2, Field::rationals), eps_algebra(3, Field::rationals),
      square_zero_pair(Field::rationals)};
  while (done < 50) {
    const ArtinAlgebra& rw = algebras[size_t(rng.uniform(0, 2))];
    int k = rng.uniform(0, 3);
    // random symmetric Hodge numbers on the antidiagonal, lattice dim <= 2
    std::map<std::pair<int, int>, int> ranks;
    int h = rng.uniform(1, 2);
    if (k % 2 == 0 && rng.uniform(0, 1)) {
      ranks[{k / 2, k / 2}] = h;
    } else {
      int p = rng.uniform((k + 1) / 2, k);
      int q = k - p;
      if (p == q) {
        ranks[{p, q}] = h;
      } else {
        if (2 * ((h + 1) / 2) != h) h += 1;  // need an even split
        ranks[{p, q}] = h / 2;
        ranks[{q, p}] = h / 2;
      }
    }
    // canonical pure Hodge-Weil structure with these numbers
    int lattice = 0;
    for (auto& [pq, r] : ranks) lattice += r;
    FinModule carrier = FinModule::free(rw, 2 * lattice);
    const int da = rw.dim();
    // each piece is an R'-submodule of rank two per unit: both u and i*u
    // generate it, since i is not an element of the real algebra
    std::map<std::pair<int, int>, std::vector<Vec>> gens;
    int slot = 0;
    for (const auto& [pq, r] : ranks) {
      if (pq.first < pq.second) continue;
      if (pq.first == pq.second) {
        for (int u = 0; u < r; ++u) {
          Vec v(carrier.dim()), iv(carrier.dim());
          v[size_t(slot * 2) * da] = Scalar::one();
          iv[size_t(slot * 2 + 1) * da] = Scalar::one();
          gens[pq].push_back(std::move(v));
          gens[pq].push_back(std::move(iv));
          ++slot;
        }
      } else {
        for (int u = 0; u < r; ++u) {
          // u = alpha + i beta and i u = i alpha - beta, plus conjugates
          Vec v(carrier.dim()), iv(carrier.dim());
          Vec w(carrier.dim()), iw(carrier.dim());
          v[size_t(slot * 2) * da] = Scalar::one();
          v[size_t((slot + 1) * 2 + 1) * da] = Scalar::one();
          iv[size_t(slot * 2 + 1) * da] = Scalar::one();
          iv[size_t((slot + 1) * 2) * da] = -Scalar::one();
          w[size_t(slot * 2) * da] = Scalar::one();
          w[size_t((slot + 1) * 2 + 1) * da] = -Scalar::one();
          iw[size_t(slot * 2 + 1) * da] = Scalar::one();
          iw[size_t((slot + 1) * 2) * da] = Scalar::one();
          gens[pq].push_back(std::move(v));
          gens[pq].push_back(std::move(iv));
          gens[{pq.second, pq.first}].push_back(std::move(w));
          gens[{pq.second, pq.first}].push_back(std::move(iw));
          slot += 2;
        }
      }
    }
    // random sigma-commuting twist: lattice-slot matrix over the algebra
    Matrix twist(carrier.dim(), carrier.dim());
    for (int i = 0; i < lattice; ++i)
      for (int j = 0; j < lattice; ++j) {
        Vec elem = rng.algebra_elem(rw, 1);
        if (i == j && elem[0].is_zero()) elem[0] = Scalar::one();
        if (i != j) elem[0] = Scalar(0);
        Matrix mul = rw.mult_matrix(elem);
        for (int u = 0; u < 2; ++u)
          for (int r = 0; r < da; ++r)
            for (int c = 0; c < da; ++c)
              twist.at((i * 2 + u) * da + r, (j * 2 + u) * da + c) =
                  mul.at(r, c);
      }
    if (Matrix(twist).rank() != twist.rows()) continue;
    int pmin = k, pmax = 0;
    for (const auto& [pq, r] : ranks) {
      pmin = std::min(pmin, pq.first);
      pmax = std::max(pmax, pq.first);
    }
    std::map<int, Submodule> hodge;
    for (int p = pmin; p <= pmax + 1; ++p) {
      std::vector<Vec> g;
      for (const auto& [pq, vs] : gens)
        if (pq.first >= p)
          for (const auto& v : vs) g.push_back(twist * v);
      hodge.emplace(p, Submodule::span(carrier, g));
    }
    HodgeWeilStructure hws =
        make_pure_hws(RealLattice{lattice}, rw, std::move(hodge), k);
    if (!verify_hws(hws).ok) continue;
    ++done;
    HodgeDecomposition d = hodge_decomposition(hws, k);
    if (d.ok) ++good;  // the three identities plus sigma-symmetry, exact
  }
  std::ostringstream ss;
  ss << good << "/50 randomized pure Hodge-Weil structures decompose with "
        "all identities exact";
  return {good == 50, ss.str()};
}

Outcome criterion7() {
  auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream ss;
  ArtinAlgebra qi = ArtinAlgebra::base_field(Field::gaussian_rationals);
  ArtinAlgebra e2 = eps_algebra(2);
  std::map<std::string, std::vector<int>> expected = {
      {"wedge", {1, 0, 2}}, {"banana", {1, 1, 2}}, {"triangle", {1, 1, 3}}};
  std::map<std::string, std::map<std::pair<int, int>, int>> ranks_by_algebra;
  for (ArtinAlgebra a : {qi, e2}) {
    for (const auto& [name, exp] : expected) {
      SNCModel m = name == "wedge"    ? demo::wedge(a)
                   : name == "banana" ? demo::banana(a)
                                      : demo::triangle(a);
      for (int k = 0; k <= 2; ++k) {
        AssembledStructure s = assemble_mhs(m, k);
        int total = 0;
        for (const auto& [pq, c] : s.cells) {
          total += c.rank;
          // graded ranks equal the E_2 ranks and are independent of R
          auto key = std::pair{k * 10 + pq.first, pq.second};
          auto [it, inserted] = ranks_by_algebra[name].emplace(key, c.rank);
          if (!inserted && it->second != c.rank) ok = false;
        }
        if (total != exp[size_t(k)]) ok = false;
        if (!verify_mhs(s.structure).ok) ok = false;
      }
      if (name == "banana") {
        AssembledStructure s1 = assemble_mhs(m, 1);
        if (!s1.cells.count({0, 0})) ok = false;  // H^1 has weight 0
      }
      // weight sequences degenerate at E_2 and (banana/triangle) not at E_1
      WeightSS w = weight_ss(m, 0);
      if (!w.degeneration_bookkeeping || !w.e2_free ||
          !w.differentials_constant_rank)
        ok = false;
      if (name != "wedge") {
        bool e1_nontrivial = false;
        for (const auto& [am, cell] : w.e2)
          if (w.e1_dims.count(am) && w.e1_dims.at(am) != cell.dim)
            e1_nontrivial = true;
        if (!e1_nontrivial) ok = false;
      }
    }
  }
  double el = seconds_since(t0);
  ss << "wedge (1,0,2), banana (1,1,2) with weight-0 H^1, triangle (1,1,3) "
        "over Qi and Qi[e]/(e^2); E_2 degeneration; "
     << el << "s";
  return {ok && el < 5.0, ss.str()};
}

// random two-component model over the algebra with an admissible ambient
struct RandomTheoremInstance {
  SNCModel model;
  AmbientData ambient;
};

RandomTheoremInstance random_theorem_instance(Rng& rng, const ArtinAlgebra& a) {
  // components are surfaces with h^{0,0} = 1, h^{1,1} in 1..2, h^{2,2} = 1;
  // the intersection is a disjoint union of curves, sometimes of genus one
  int r1 = rng.uniform(1, 2), r2 = rng.uniform(1, 2);
  int curves = rng.uniform(1, 2);
  bool genus_one = rng.uniform(0, 1) == 1;
  std::map<Stratum, std::map<Bigrade, int>> ranks;
  ranks[{1}] = {{{0, 0}, 1}, {{1, 1}, r1}, {{2, 2}, 1}};
  ranks[{2}] = {{{0, 0}, 1}, {{1, 1}, r2}, {{2, 2}, 1}};
  std::map<Bigrade, int> curve{{{0, 0}, curves}, {{1, 1}, curves}};
  if (genus_one) {
    curve[{1, 0}] = curves;
    curve[{0, 1}] = curves;
  }
  ranks[{1, 2}] = curve;

  auto rand_block = [&](int rows, int cols) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m.at(r, c) = Scalar(Rat(rng.uniform(-2, 2)));
    return m;
  };
  std::map<std::pair<Stratum, Stratum>, std::map<Bigrade, Matrix>> faces;
  Matrix const_restrict(curves, 1);
  for (int j = 0; j < curves; ++j) const_restrict.at(j, 0) = Scalar::one();
  for (int comp : {1, 2}) {
    std::map<Bigrade, Matrix> blocks;
    // constants restrict to 1 on every connected piece; the (1,1) data is
    // a free choice over the lattice
    blocks[{0, 0}] = const_restrict;
    blocks[{1, 1}] = rand_block(curves, comp == 1 ? r1 : r2);
    faces[{{comp}, {1, 2}}] = std::move(blocks);
  }
  SNCModel model = make_snc_model(a, 2, {{1}, {2}, {1, 2}}, std::move(ranks),
                                  std::move(faces));

  // ambient data with comparison maps valued in the kernel of delta
  AmbientData x;
  int rx = rng.uniform(1, 2);
  x.ranks = {{{0, 0}, 1}, {{1, 1}, rx}, {{2, 2}, 1}};
  CechComplex row = cech_complex(model, 1, 1);
  RowSpace ker = row.lattice_diff.empty()
                     ? full_space(row.level_rank[0])
                     : kernel_space(row.lattice_diff[0]);
  Matrix phi(row.level_rank[0], rx);
  for (int c = 0; c < rx; ++c) {
    // random rational combination of the kernel basis
    Vec v(row.level_rank[0]);
    for (int i = 0; i < ker.rank(); ++i) {
      Scalar t(Rat(rng.uniform(-2, 2)));
      for (int j = 0; j < row.level_rank[0]; ++j)
        v[size_t(j)] += t * ker.basis.at(i, j);
    }
    for (int j = 0; j < row.level_rank[0]; ++j) phi.at(j, c) = v[size_t(j)];
  }
  // split the stacked phi into per-component comparison blocks
  Matrix c1(r1, rx), c2(r2, rx);
  for (int c = 0; c < rx; ++c) {
    for (int j = 0; j < r1; ++j)
      c1.at(j, c) = phi.at(row.level_offsets[0][0] + j, c);
    for (int j = 0; j < r2; ++j)
      c2.at(j, c) = phi.at(row.level_offsets[0][1] + j, c);
  }
  Matrix unit(1, 1);
  unit.at(0, 0) = Scalar::one();
  x.comparison[1] = {{{0, 0}, unit}, {{1, 1}, c1}};
  x.comparison[2] = {{{0, 0}, unit}, {{1, 1}, c2}};
  return RandomTheoremInstance{std::move(model), std::move(x)};
}

Outcome criterion8() {
  auto t0 = Clock::now();
  ArtinAlgebra a = eps_algebra(2);
  bool golden_ok = true;
  {
    SNCModel b = demo::banana(a);
    TheoremReport rep =
        verify_theorem_free_singular(b, demo::banana_ambient(), 1, 1);
    golden_ok = rep.ok && rep.pullback.coker_free &&
                rep.weight_transversal_on_structure;
  }
  Rng rng(108);
  int done = 0, good = 0;
  while (done < 100) {
    RandomTheoremInstance inst = random_theorem_instance(rng, a);
    TheoremReport rep =
        verify_theorem_free_singular(inst.model, inst.ambient, 1, 1);
    ++done;
    if (rep.pullback.coker_free && rep.pullback.image_meets_weight_trivially &&
        rep.weight_transversal_on_structure)
      ++good;
  }
  double el = seconds_since(t0);
  std::ostringstream ss;
  ss << "banana/ambient golden instance " << (golden_ok ? "ok" : "FAILED")
     << "; " << good << "/100 randomized instances have free coker(i*) and "
     << "im i* meeting W_{p+q-1} trivially; " << el << "s";
  return {golden_ok && good == 100 && el < 60.0, ss.str()};
}

SNCModel random_basechange_model(Rng& rng, const ArtinAlgebra& a) {
  int curves = rng.uniform(1, 2);
  std::map<Stratum, std::map<Bigrade, int>> ranks;
  ranks[{1}] = {{{0, 0}, 1}, {{1, 1}, rng.uniform(1, 2)}, {{2, 2}, 1}};
  ranks[{2}] = {{{0, 0}, 1}, {{1, 1}, rng.uniform(1, 2)}, {{2, 2}, 1}};
  ranks[{1, 2}] = {{{0, 0}, curves}, {{1, 1}, curves}};
  auto rand_block = [&](int rows, int cols) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m.at(r, c) = Scalar(Rat(rng.uniform(-2, 2)));
    return m;
  };
  std::map<std::pair<Stratum, Stratum>, std::map<Bigrade, Matrix>> faces;
  for (int comp : {1, 2}) {
    std::map<Bigrade, Matrix> blocks;
    blocks[{0, 0}] = rand_block(curves, 1);
    blocks[{1, 1}] = rand_block(curves, ranks[{comp}][{1, 1}]);
    faces[{{comp}, {1, 2}}] = std::move(blocks);
  }
  return make_snc_model(a, 2, {{1}, {2}, {1, 2}}, std::move(ranks),
                        std::move(faces));
}

SNCModel remap_model(const SNCModel& src, const ArtinAlgebra& target) {
  return make_snc_model(target, src.dual.components, src.dual.strata,
                        src.hodge_ranks, src.faces);
}

Outcome criterion9() {
  Rng rng(109);
  ArtinAlgebra e3 = eps_algebra(3);
  ArtinAlgebra e2 = eps_algebra(2);
  ArtinAlgebra qi = ArtinAlgebra::base_field(Field::gaussian_rationals);
  // truncation and evaluation maps out of Qi[e]/(e^3)
  std::vector<Vec> t2 = {e2.one(), e2.generator(0),
                         e2.multiply(e2.generator(0), e2.generator(0))};
  RingMap to_e2 = make_ring_map(e3, e2, t2);
  std::vector<Vec> t0 = {qi.one(), qi.zero(), qi.zero()};
  RingMap to_qi = make_ring_map(e3, qi, t0);

  int models_ok = 0;
  for (int t = 0; t < 10; ++t) {
    SNCModel m3 = random_basechange_model(rng, e3);
    SNCModel m2 = remap_model(m3, e2);
    SNCModel m0 = remap_model(m3, qi);
    bool ok = true;
    for (int k = 0; k <= 4 && ok; ++k) {
      AssembledStructure s3 = assemble_mhs(m3, k);
      AssembledStructure s2 = assemble_mhs(m2, k);
      AssembledStructure s0 = assemble_mhs(m0, k);
      // cell-by-cell: base change of each E_2 subquotient matches the
      // directly computed cell, dimension for dimension
      if (s3.cells.size() != s2.cells.size() ||
          s3.cells.size() != s0.cells.size())
        ok = false;
      for (const auto& [pq, cell] : s3.cells) {
        if (!ok) break;
        CechComplex row3 = cech_complex(m3, pq.first, pq.second);
        CohomologyModule h3 = cohomology(row3.complex, cell.a);
        BaseChangedModule b2 = base_change(h3.module, to_e2);
        BaseChangedModule b0 = base_change(h3.module, to_qi);
        auto c2 = s2.cells.find(pq);
        auto c0 = s0.cells.find(pq);
        if (c2 == s2.cells.end() || c0 == s0.cells.end()) {
          ok = false;
          break;
        }
        CechComplex row2 = cech_complex(m2, pq.first, pq.second);
        CechComplex row0 = cech_complex(m0, pq.first, pq.second);
        if (b2.module.dim() != cohomology(row2.complex, cell.a).module.dim())
          ok = false;
        if (b0.module.dim() != cohomology(row0.complex, cell.a).module.dim())
          ok = false;
        if (c2->second.rank != cell.rank || c0->second.rank != cell.rank)
          ok = false;
      }
    }
    if (ok) ++models_ok;
  }
  std::ostringstream ss;
  ss << models_ok
     << "/10 models: pipeline over Qi[e]/(e^3) base-changed to Qi[e]/(e^2) "
        "and Qi matches the direct pipelines dimension-for-dimension";
  return {models_ok == 10, ss.str()};
}

std::string run_cli(const std::string& args, int* code) {
  std::string cmd = std::string(AH_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  if (!p) {
    *code = -1;
    return out;
  }
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome criterion10() {
  std::string d = AH_DATA_DIR;
  std::vector<std::string> commands = {
      "algebra check --algebra " + d + "/dual.json",
      "algebra check --algebra " + d + "/eps3.json",
      "weil restrict --algebra " + d + "/dual.json",
      "weil restrict --algebra " + d + "/dual.json --module " + d +
          "/free1.json",
      "module rank --map " + d + "/diag1eps.json",
      "module rank --map " + d + "/rank1proj.json",
      "ss compute --filtered " + d + "/filtered_eps.json --pages 3",
      "ss compute --filtered " + d + "/filtered_d2.json --pages 4",
      "hodge verify --module " + d + "/structure_elliptic.json",
      "hodge decompose --module " + d + "/structure_elliptic_wl.json",
      "snc mhs --model " + d + "/banana.json --k 1",
      "snc pullback-rank --model " + d + "/banana.json --ambient " + d +
          "/ambient_banana.json --p 1 --q 1",
      "demo wedge --algebra " + d + "/dual.json",
      "demo banana --algebra " + d + "/dual.json",
      "demo triangle --algebra " + d + "/dual.json",
  };
  int identical = 0;
  for (const auto& c : commands) {
    int code1 = 0, code2 = 0;
    std::string a = run_cli(c + " --json-only", &code1);
    std::string b = run_cli(c + " --json-only", &code2);
    if (code1 != code2) continue;
    auto ja = nlohmann::json::parse(a, nullptr, false);
    auto jb = nlohmann::json::parse(b, nullptr, false);
    if (ja.is_discarded() || jb.is_discarded()) continue;
    ja.erase("timing_ms");
    jb.erase("timing_ms");
    if (ja.dump() == jb.dump()) ++identical;
  }
  std::ostringstream ss;
  ss << identical << "/" << commands.size()
     << " golden commands byte-identical across repeated runs (timing "
        "excluded)";
  return {identical == int(commands.size()), ss.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "Weil restriction dimension law", criterion1},
      {2, "dual-numbers golden case", criterion2},
      {3, "faithful exactness and free reflection", criterion3},
      {4, "constant-rank equivalence", criterion4},
      {5, "appendix lemma suite", criterion5},
      {6, "Hodge decomposition identities", criterion6},
      {7, "SNC golden models", criterion7},
      {8, "free cokernel of ambient pullbacks", criterion8},
      {9, "base-change coherence", criterion9},
      {10, "deterministic reports", criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %2d (%s): %s\n", o.pass ? "PASS" : "FAIL",
                c.number, c.name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
