#pragma once

// Test-only oracles, kept independent of the library's linear algebra:
// a naive fraction-free Gaussian elimination and a brute-force polynomial
// normal form over a monomial truncation. Used to derive expected values
// for quotient bases, dimensions and ranks.

#include <map>
#include <vector>

#include "artinhodge/scalar.hpp"

namespace oracle {

using ah::Rat;
using ah::Scalar;

// Rank by plain elimination, no pivot bookkeeping shared with the library.
inline int naive_rank(std::vector<std::vector<Scalar>> rows) {
  if (rows.empty()) return 0;
  size_t cols = rows[0].size();
  int rank = 0;
  size_t lead = 0;
  for (size_t r = 0; r < rows.size() && lead < cols; ++lead) {
    size_t sel = r;
    while (sel < rows.size() && rows[sel][lead].is_zero()) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    Scalar inv = rows[r][lead].inv();
    for (auto& x : rows[r]) x *= inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][lead].is_zero()) continue;
      Scalar f = rows[i][lead];
      for (size_t c = 0; c < cols; ++c) rows[i][c] -= f * rows[r][c];
    }
    ++r;
    ++rank;
  }
  return rank;
}

// Exhaustive normal-form oracle for P/(relations + m^bound): enumerates all
// monomials of degree <= bound, spans {monomial * relation} truncated, and
// reports the quotient dimension together with the list of monomials that
// survive greedy selection from below.
struct QuotientOracle {
  int dim = 0;
  std::vector<std::vector<int>> surviving;  // exponent tuples, selection order
};

inline void oracle_monomials(int nvars, int deg, std::vector<int>& cur,
                             std::vector<std::vector<int>>& out, int var = 0) {
  if (var == nvars - 1) {
    cur[var] = deg;
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[var] = e;
    oracle_monomials(nvars, deg - e, cur, out, var + 1);
  }
}

inline QuotientOracle quotient_oracle(
    int nvars, const std::vector<std::map<std::vector<int>, Scalar>>& rels,
    int bound) {
  std::vector<std::vector<int>> monos;
  if (nvars == 0) {
    monos.push_back({});
  } else {
    std::vector<int> cur(nvars);
    for (int d = 0; d <= bound; ++d) oracle_monomials(nvars, d, cur, monos);
  }
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < monos.size(); ++i) index[monos[i]] = int(i);
  auto deg = [](const std::vector<int>& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
  };

  std::vector<std::vector<Scalar>> span;
  for (const auto& f : rels)
    for (const auto& m : monos) {
      if (deg(m) >= bound) continue;
      std::vector<Scalar> row(monos.size());
      bool nz = false;
      for (const auto& [fm, c] : f) {
        std::vector<int> p(nvars);
        for (int k = 0; k < nvars; ++k) p[k] = m[k] + fm[k];
        if (deg(p) > bound) continue;
        row[index[p]] += c;
        nz = true;
      }
      if (nz) span.push_back(std::move(row));
    }
  // Degree-bound monomials are zero in the quotient by assumption.
  for (const auto& m : monos) {
    if (deg(m) != bound) continue;
    std::vector<Scalar> row(monos.size());
    row[index[m]] = Scalar::one();
    span.push_back(std::move(row));
  }

  QuotientOracle out;
  int base = naive_rank(span);
  for (const auto& m : monos) {
    if (deg(m) >= bound) continue;
    std::vector<Scalar> row(monos.size());
    row[index[m]] = Scalar::one();
    auto trial = span;
    trial.push_back(row);
    if (naive_rank(trial) > base) {
      span.push_back(std::move(row));
      ++base;
      out.surviving.push_back(m);
    }
  }
  out.dim = int(out.surviving.size());
  return out;
}

}  // namespace oracle
