#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "artinhodge/error.hpp"
#include "artinhodge/scalar.hpp"

namespace ah {

using Vec = std::vector<Scalar>;

// Dense matrix over Q(i) with exact Gauss-Jordan elimination. Row spaces in
// reduced row echelon form are the canonical representation of subspaces
// throughout the library: two subspaces are equal iff their RREFs are.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one();
    return m;
  }

  static Matrix from_rows(const std::vector<Vec>& rows, int cols) {
    Matrix m(int(rows.size()), cols);
    for (size_t r = 0; r < rows.size(); ++r) {
      require(int(rows[r].size()) == cols, Errc::dimension_mismatch,
              "row length mismatch");
      for (int c = 0; c < cols; ++c) m.at(int(r), c) = rows[r][c];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar& at(int r, int c) { return a_[size_t(r) * cols_ + c]; }
  const Scalar& at(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

  Vec row(int r) const {
    Vec v(cols_);
    for (int c = 0; c < cols_; ++c) v[c] = at(r, c);
    return v;
  }
  Vec col(int c) const {
    Vec v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = at(r, c);
    return v;
  }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols_ == b.rows_, Errc::dimension_mismatch, "matrix product");
    Matrix p(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Scalar& aik = a.at(i, k);
        if (aik.is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) {
          const Scalar& bkj = b.at(k, j);
          if (!bkj.is_zero()) p.at(i, j) += aik * bkj;
        }
      }
    return p;
  }

  friend Vec operator*(const Matrix& a, const Vec& v) {
    require(a.cols_ == int(v.size()), Errc::dimension_mismatch,
            "matrix-vector product");
    Vec r(a.rows_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k)
        if (!a.at(i, k).is_zero() && !v[k].is_zero()) r[i] += a.at(i, k) * v[k];
    return r;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, Errc::dimension_mismatch,
            "matrix sum");
    Matrix s = a;
    for (size_t i = 0; i < s.a_.size(); ++i) s.a_[i] += b.a_[i];
    return s;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, Errc::dimension_mismatch,
            "matrix difference");
    Matrix s = a;
    for (size_t i = 0; i < s.a_.size(); ++i) s.a_[i] -= b.a_[i];
    return s;
  }
  friend Matrix operator*(const Scalar& c, const Matrix& m) {
    Matrix s = m;
    for (auto& x : s.a_) x *= c;
    return s;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  // In-place reduction to RREF. Returns the pivot columns in order.
  std::vector<int> rref() {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
      int sel = -1;
      for (int i = r; i < rows_; ++i)
        if (!at(i, c).is_zero()) {
          sel = i;
          break;
        }
      if (sel < 0) continue;
      if (sel != r)
        for (int j = c; j < cols_; ++j) std::swap(at(sel, j), at(r, j));
      Scalar inv = at(r, c).inv();
      for (int j = c; j < cols_; ++j)
        if (!at(r, j).is_zero()) at(r, j) *= inv;
      for (int i = 0; i < rows_; ++i) {
        if (i == r || at(i, c).is_zero()) continue;
        Scalar f = at(i, c);
        for (int j = c; j < cols_; ++j)
          if (!at(r, j).is_zero()) at(i, j) -= f * at(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  int rank() const {
    Matrix m = *this;
    return int(m.rref().size());
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Scalar> a_;
};

// A canonical basis of a subspace: RREF rows with zero rows dropped, plus
// the pivot columns. Unique per subspace.
struct RowSpace {
  Matrix basis;              // rank x dim, RREF
  std::vector<int> pivots;   // strictly increasing
  int dim = 0;               // ambient dimension

  int rank() const { return basis.rows(); }
};

inline RowSpace row_space(const Matrix& m) {
  Matrix r = m;
  std::vector<int> piv = r.rref();
  Matrix b(int(piv.size()), m.cols());
  for (int i = 0; i < int(piv.size()); ++i)
    for (int c = 0; c < m.cols(); ++c) b.at(i, c) = r.at(i, c);
  return RowSpace{std::move(b), std::move(piv), m.cols()};
}

inline RowSpace zero_space(int dim) {
  return RowSpace{Matrix(0, dim), {}, dim};
}

inline RowSpace full_space(int dim) {
  RowSpace s{Matrix::identity(dim), {}, dim};
  for (int i = 0; i < dim; ++i) s.pivots.push_back(i);
  return s;
}

// Reduce v against the RREF rows, i.e. the normal form of v modulo the
// subspace. v lies in the subspace iff the result is zero.
inline Vec reduce_mod(const RowSpace& s, Vec v) {
  for (int i = 0; i < s.basis.rows(); ++i) {
    const Scalar& c = v[s.pivots[i]];
    if (c.is_zero()) continue;
    Scalar f = c;
    for (int j = 0; j < s.dim; ++j)
      if (!s.basis.at(i, j).is_zero()) v[j] -= f * s.basis.at(i, j);
  }
  return v;
}

inline bool contains(const RowSpace& s, const Vec& v) {
  Vec r = reduce_mod(s, v);
  for (const auto& x : r)
    if (!x.is_zero()) return false;
  return true;
}

inline bool contains(const RowSpace& outer, const RowSpace& inner) {
  for (int i = 0; i < inner.basis.rows(); ++i)
    if (!contains(outer, inner.basis.row(i))) return false;
  return true;
}

inline bool equal(const RowSpace& a, const RowSpace& b) {
  return a.dim == b.dim && a.pivots == b.pivots && a.basis == b.basis;
}

// Coordinates of v in the RREF basis; empty if v is not in the span.
// With RREF rows the coefficient of row i is just v[pivot_i].
inline std::optional<Vec> coords_in(const RowSpace& s, const Vec& v) {
  if (!contains(s, v)) return std::nullopt;
  Vec c(s.basis.rows());
  for (int i = 0; i < s.basis.rows(); ++i) c[i] = v[s.pivots[i]];
  return c;
}

inline RowSpace space_sum(const RowSpace& a, const RowSpace& b) {
  require(a.dim == b.dim, Errc::dimension_mismatch, "subspace sum");
  Matrix st(a.basis.rows() + b.basis.rows(), a.dim);
  for (int i = 0; i < a.basis.rows(); ++i)
    for (int c = 0; c < a.dim; ++c) st.at(i, c) = a.basis.at(i, c);
  for (int i = 0; i < b.basis.rows(); ++i)
    for (int c = 0; c < a.dim; ++c)
      st.at(a.basis.rows() + i, c) = b.basis.at(i, c);
  return row_space(st);
}

// Right kernel of m, as a canonical row space of (transposed) solutions.
inline RowSpace kernel_space(const Matrix& m) {
  Matrix r = m;
  std::vector<int> piv = r.rref();
  std::vector<bool> is_piv(m.cols(), false);
  for (int p : piv) is_piv[p] = true;
  std::vector<Vec> basis;
  for (int c = 0; c < m.cols(); ++c) {
    if (is_piv[c]) continue;
    Vec v(m.cols());
    v[c] = Scalar::one();
    for (int i = 0; i < int(piv.size()); ++i) v[piv[i]] = -r.at(i, c);
    basis.push_back(std::move(v));
  }
  return row_space(Matrix::from_rows(basis, m.cols()));
}

inline RowSpace space_intersect(const RowSpace& a, const RowSpace& b) {
  require(a.dim == b.dim, Errc::dimension_mismatch, "subspace intersection");
  // (c,e) with c*A + e*B = 0 <=> w = c*A lies in both row spaces.
  int na = a.basis.rows(), nb = b.basis.rows();
  if (na == 0 || nb == 0) return zero_space(a.dim);
  Matrix st(na + nb, a.dim);
  for (int i = 0; i < na; ++i)
    for (int c = 0; c < a.dim; ++c) st.at(i, c) = a.basis.at(i, c);
  for (int i = 0; i < nb; ++i)
    for (int c = 0; c < a.dim; ++c) st.at(na + i, c) = b.basis.at(i, c);
  RowSpace lk = kernel_space(st.transpose());
  std::vector<Vec> gens;
  for (int i = 0; i < lk.basis.rows(); ++i) {
    Vec w(a.dim);
    for (int j = 0; j < na; ++j) {
      const Scalar& cj = lk.basis.at(i, j);
      if (cj.is_zero()) continue;
      for (int c = 0; c < a.dim; ++c)
        if (!a.basis.at(j, c).is_zero()) w[c] += cj * a.basis.at(j, c);
    }
    gens.push_back(std::move(w));
  }
  return row_space(Matrix::from_rows(gens, a.dim));
}

// Unique solution of A x = b for invertible square A.
inline Vec solve_unique(const Matrix& a, const Vec& b) {
  require(a.rows() == a.cols() && a.rows() == int(b.size()),
          Errc::dimension_mismatch, "solve_unique wants a square system");
  Matrix aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  std::vector<int> piv = aug.rref();
  require(int(piv.size()) == a.cols() && (piv.empty() || piv.back() < a.cols()),
          Errc::internal_inconsistency, "singular system in solve_unique");
  Vec x(a.cols());
  for (int i = 0; i < a.cols(); ++i) x[piv[i]] = aug.at(i, a.cols());
  return x;
}

inline Matrix inverse(const Matrix& a) {
  require(a.rows() == a.cols(), Errc::dimension_mismatch, "inverse of a "
          "non-square matrix");
  const int n = a.rows();
  Matrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, n + i) = Scalar::one();
  }
  std::vector<int> piv = aug.rref();
  require(int(piv.size()) == n && (n == 0 || piv.back() == n - 1),
          Errc::internal_inconsistency, "matrix is singular");
  Matrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

// {v : A v in S}, with A mapping ambient columns to S's ambient.
inline RowSpace preimage(const Matrix& a, const RowSpace& s) {
  require(a.rows() == s.dim, Errc::dimension_mismatch, "preimage");
  // Reduction modulo S is linear; v maps into S iff reduce(A v) = 0.
  Matrix red(s.dim, a.cols());
  for (int c = 0; c < a.cols(); ++c) {
    Vec col = reduce_mod(s, a.col(c));
    for (int r = 0; r < s.dim; ++r) red.at(r, c) = col[r];
  }
  return kernel_space(red);
}

inline RowSpace image_space(const Matrix& a) {
  return row_space(a.transpose());
}

// Realification: a Q(i)-matrix becomes a Q-matrix on doubled coordinates,
// each coordinate j splitting into (re, im) at (2j, 2j+1).
inline Matrix realify(const Matrix& m) {
  Matrix r(2 * m.rows(), 2 * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const Scalar& x = m.at(i, j);
      if (x.is_zero()) continue;
      r.at(2 * i, 2 * j) = Scalar(x.re);
      r.at(2 * i, 2 * j + 1) = Scalar(-x.im);
      r.at(2 * i + 1, 2 * j) = Scalar(x.im);
      r.at(2 * i + 1, 2 * j + 1) = Scalar(x.re);
    }
  return r;
}

inline Vec realify(const Vec& v) {
  Vec r(2 * v.size());
  for (size_t j = 0; j < v.size(); ++j) {
    r[2 * j] = Scalar(v[j].re);
    r[2 * j + 1] = Scalar(v[j].im);
  }
  return r;
}

}  // namespace ah
