#pragma once

#include "bigint.hpp"
#include "errors.hpp"

namespace repcount {

template <class Int>
struct SnfResult {
  Matrix<Int> U, V, D;  // U * C * V = D
  std::vector<Int> invariants() const {
    std::vector<Int> g;
    for (std::size_t i = 0; i < D.rows(); ++i) g.push_back(D(i, i));
    return g;
  }
};

/// Smith normal form of a nonsingular square integer matrix by elimination
/// with the smallest nonzero entry as pivot. Returns unimodular U, V with
/// U C V = diag(g_1, ..., g_m), g_i > 0 and g_i | g_{i+1}.
template <class Int = BigInt>
SnfResult<Int> smith_normal_form(const Matrix<Int>& c) {
  const std::size_t n = c.rows();
  if (c.cols() != n) throw InputError("smith_normal_form needs a square matrix");
  if (determinant(c) == 0) throw InputError("smith_normal_form needs a nonsingular matrix");

  Matrix<Int> a = c;
  Matrix<Int> u = Matrix<Int>::identity(n), v = Matrix<Int>::identity(n);
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a(i, k), a(j, k));
      std::swap(u(i, k), u(j, k));
    }
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a(k, i), a(k, j));
      std::swap(v(k, i), v(k, j));
    }
  };
  // row_i -= q * row_j
  auto add_row = [&](std::size_t i, std::size_t j, const Int& q) {
    for (std::size_t k = 0; k < n; ++k) {
      a(i, k) -= q * a(j, k);
      u(i, k) -= q * u(j, k);
    }
  };
  auto add_col = [&](std::size_t i, std::size_t j, const Int& q) {
    for (std::size_t k = 0; k < n; ++k) {
      a(k, i) -= q * a(k, j);
      v(k, i) -= q * v(k, j);
    }
  };
  auto absval = [](const Int& x) { return x < 0 ? Int(-x) : x; };

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pi = t, pj = t;
      bool found = false;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a(i, j) != 0 && (!found || absval(a(i, j)) < absval(a(pi, pj)))) {
            pi = i;
            pj = j;
            found = true;
          }
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (a(i, t) == 0) continue;
        add_row(i, t, Int(a(i, t) / a(t, t)));
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        add_col(j, t, Int(a(t, j) / a(t, t)));
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // pivot must divide the whole trailing block
      bool divides = true;
      for (std::size_t i = t + 1; i < n && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (a(i, j) % a(t, t) != 0) {
            add_row(t, i, Int(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a(t, t) < 0) {
      for (std::size_t k = 0; k < n; ++k) {
        a(t, k) = -a(t, k);
        u(t, k) = -u(t, k);
      }
    }
  }
  return {std::move(u), std::move(v), std::move(a)};
}

} // namespace repcount
