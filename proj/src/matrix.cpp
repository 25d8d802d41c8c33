#include "nca/matrix.hpp"

#include <string>

namespace nca::gf {

namespace {

void require_same_shape(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw DimensionError("matrix shapes differ: " + std::to_string(a.rows) +
                         "x" + std::to_string(a.cols) + " vs " +
                         std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

}  // namespace

FieldMatrix mat_add(const FieldContext& ctx, const FieldMatrix& a,
                    const FieldMatrix& b) {
  require_same_shape(a, b);
  FieldMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = ctx.add(a.data[i], b.data[i]);
  return out;
}

FieldMatrix mat_sub(const FieldContext& ctx, const FieldMatrix& a,
                    const FieldMatrix& b) {
  require_same_shape(a, b);
  FieldMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = ctx.sub(a.data[i], b.data[i]);
  return out;
}

FieldMatrix mat_mul(const FieldContext& ctx, const FieldMatrix& a,
                    const FieldMatrix& b) {
  if (a.cols != b.rows)
    throw DimensionError("matrix product shape mismatch");
  FieldMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      Elem aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        out.at(i, j) = ctx.add(out.at(i, j), ctx.mul(aik, b.at(k, j)));
    }
  }
  return out;
}

FieldMatrix mat_scale(const FieldContext& ctx, Elem s, const FieldMatrix& a) {
  FieldMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = ctx.mul(s, a.data[i]);
  return out;
}

FieldMatrix diag_scale(const FieldContext& ctx, std::span<const Elem> d,
                       const FieldMatrix& a) {
  if (d.size() != a.rows)
    throw DimensionError("diagonal length does not match row count");
  FieldMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      out.at(i, j) = ctx.mul(d[i], a.at(i, j));
  return out;
}

FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.rows != b.rows) throw DimensionError("hstack row counts differ");
  FieldMatrix out(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) out.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols; ++j) out.at(i, a.cols + j) = b.at(i, j);
  }
  return out;
}

FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b,
                   const FieldMatrix& c) {
  return hstack(hstack(a, b), c);
}

std::size_t mat_rank(const FieldContext& ctx, const FieldMatrix& a) {
  FieldMatrix m = a;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < m.rows && m.at(pivot, col) == 0) ++pivot;
    if (pivot == m.rows) continue;
    if (pivot != rank)
      for (std::size_t j = col; j < m.cols; ++j)
        std::swap(m.at(pivot, j), m.at(rank, j));
    const Elem inv_p = ctx.inv(m.at(rank, col));
    for (std::size_t r = rank + 1; r < m.rows; ++r) {
      Elem f = ctx.mul(m.at(r, col), inv_p);
      if (f == 0) continue;
      for (std::size_t j = col; j < m.cols; ++j)
        m.at(r, j) = ctx.sub(m.at(r, j), ctx.mul(f, m.at(rank, j)));
    }
    ++rank;
  }
  return rank;
}

namespace {

// Gauss-Jordan on [a | rhs]; returns the transformed rhs.
FieldMatrix eliminate(const FieldContext& ctx, FieldMatrix a, FieldMatrix rhs,
                      const char* what) {
  const std::size_t n = a.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a.at(pivot, col) == 0) ++pivot;
    if (pivot == n) throw SingularMatrixError(what);
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a.at(pivot, j), a.at(col, j));
      for (std::size_t j = 0; j < rhs.cols; ++j)
        std::swap(rhs.at(pivot, j), rhs.at(col, j));
    }
    const Elem inv_p = ctx.inv(a.at(col, col));
    for (std::size_t j = 0; j < n; ++j) a.at(col, j) = ctx.mul(a.at(col, j), inv_p);
    for (std::size_t j = 0; j < rhs.cols; ++j)
      rhs.at(col, j) = ctx.mul(rhs.at(col, j), inv_p);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      Elem f = a.at(r, col);
      if (f == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        a.at(r, j) = ctx.sub(a.at(r, j), ctx.mul(f, a.at(col, j)));
      for (std::size_t j = 0; j < rhs.cols; ++j)
        rhs.at(r, j) = ctx.sub(rhs.at(r, j), ctx.mul(f, rhs.at(col, j)));
    }
  }
  return rhs;
}

}  // namespace

FieldMatrix mat_solve(const FieldContext& ctx, const FieldMatrix& a,
                      const FieldMatrix& y) {
  if (a.rows != a.cols) throw DimensionError("mat_solve needs a square matrix");
  if (y.rows != a.rows) throw DimensionError("right-hand side length mismatch");
  return eliminate(ctx, a, y, "singular system in mat_solve");
}

FieldMatrix mat_inverse(const FieldContext& ctx, const FieldMatrix& a) {
  if (a.rows != a.cols) throw DimensionError("mat_inverse needs a square matrix");
  return eliminate(ctx, a, FieldMatrix::identity(a.rows),
                   "singular matrix in mat_inverse");
}

FieldMatrix mat_vec(const FieldContext& ctx, const FieldMatrix& a,
                    std::span<const Elem> x) {
  if (x.size() != a.cols) throw DimensionError("mat_vec length mismatch");
  FieldMatrix out(a.rows, 1);
  for (std::size_t i = 0; i < a.rows; ++i) {
    Elem acc = 0;
    for (std::size_t j = 0; j < a.cols; ++j)
      acc = ctx.add(acc, ctx.mul(a.at(i, j), x[j]));
    out.at(i, 0) = acc;
  }
  return out;
}

}  // namespace nca::gf
