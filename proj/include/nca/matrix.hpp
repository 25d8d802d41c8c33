#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nca/field.hpp"

namespace nca::gf {

/// Dense row-major matrix over F_p. Entries are kept reduced; the field
/// context travels separately with each operation.
struct FieldMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Elem> data;

  FieldMatrix() = default;
  FieldMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r * c, 0) {}

  static FieldMatrix identity(std::size_t n) {
    FieldMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static FieldMatrix column(std::span<const Elem> v) {
    FieldMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m.at(i, 0) = v[i];
    return m;
  }

  Elem& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Elem at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const Elem> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  bool is_zero() const {
    for (Elem v : data)
      if (v != 0) return false;
    return true;
  }

  bool operator==(const FieldMatrix&) const = default;
};

FieldMatrix mat_add(const FieldContext& ctx, const FieldMatrix& a,
                    const FieldMatrix& b);
FieldMatrix mat_sub(const FieldContext& ctx, const FieldMatrix& a,
                    const FieldMatrix& b);
FieldMatrix mat_mul(const FieldContext& ctx, const FieldMatrix& a,
                    const FieldMatrix& b);
FieldMatrix mat_scale(const FieldContext& ctx, Elem s, const FieldMatrix& a);

/// diag(d) * a, i.e. scale row k of a by d[k].
FieldMatrix diag_scale(const FieldContext& ctx, std::span<const Elem> d,
                       const FieldMatrix& a);

/// [a | b] side by side; row counts must match.
FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix hstack(const FieldMatrix& a, const FieldMatrix& b,
                   const FieldMatrix& c);

/// Rank by Gaussian elimination. Pivot selection takes the first nonzero
/// entry in the current column, lowest row index first.
std::size_t mat_rank(const FieldContext& ctx, const FieldMatrix& a);

/// Solve A x = y for square A; throws SingularMatrixError when rank-deficient.
FieldMatrix mat_solve(const FieldContext& ctx, const FieldMatrix& a,
                      const FieldMatrix& y);

/// Inverse of square A; throws SingularMatrixError when singular.
FieldMatrix mat_inverse(const FieldContext& ctx, const FieldMatrix& a);

FieldMatrix mat_vec(const FieldContext& ctx, const FieldMatrix& a,
                    std::span<const Elem> x);

}  // namespace nca::gf
