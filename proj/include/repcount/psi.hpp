#pragma once

#include "bigint.hpp"
#include "errors.hpp"
#include "form.hpp"
#include "multi_index.hpp"
#include "rng.hpp"

#include <cmath>
#include <map>
#include <optional>

namespace repcount {

namespace detail {
inline void require_positive_diagonal(const TargetForm& psi) {
  for (int i = 0; i < psi.m(); ++i)
    if (psi.diagonal(i) <= 0)
      throw InputError("diagonal coefficient n_" + std::to_string(i + 1) + " = " +
                       psi.diagonal(i).str() + " is not positive");
}

inline BigInt diagonal_product(const TargetForm& psi, const MultiIndex& j) {
  BigInt p = 1;
  for (int k : j.entries) p *= psi.diagonal(k);
  return p;
}
} // namespace detail

/// <psi> = n_1 * ... * n_m.
inline BigInt magnitude(const TargetForm& psi) {
  detail::require_positive_diagonal(psi);
  BigInt p = 1;
  for (int i = 0; i < psi.m(); ++i) p *= psi.diagonal(i);
  return p;
}

/// max_i log<psi> / (m log n_i); needs every n_i >= 2.
inline double eccentricity(const TargetForm& psi) {
  for (int i = 0; i < psi.m(); ++i)
    if (psi.diagonal(i) < 2)
      throw InputError("eccentricity undefined: n_" + std::to_string(i + 1) + " = " +
                       psi.diagonal(i).str() + " < 2");
  double log_mag = 0;
  for (int i = 0; i < psi.m(); ++i) log_mag += std::log(to_double(psi.diagonal(i)));
  double best = 0;
  for (int i = 0; i < psi.m(); ++i)
    best = std::max(best, log_mag / (psi.m() * std::log(to_double(psi.diagonal(i)))));
  return best;
}

/// |n_j|^d <= prod_k n_{j_k} for every j, in exact integers.
inline bool is_pseudo_diagonal(const TargetForm& psi) {
  detail::require_positive_diagonal(psi);
  for (auto& [j, n] : psi.coefficients()) {
    BigInt lhs = ipow(abs(n), static_cast<unsigned>(psi.d()));
    if (lhs > detail::diagonal_product(psi, j)) return false;
  }
  return true;
}

/// b_ij^2 <= b_ii b_jj for all i < j.
inline bool quadratic_matrix_pseudo_diagonal(const IntMatrix& b) {
  if (!b.is_symmetric()) throw InputError("matrix is not symmetric");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = i + 1; j < b.cols(); ++j)
      if (b(i, j) * b(i, j) > b(i, i) * b(j, j)) return false;
  return true;
}

/// n~_j = n_j (n_{j_1} ... n_{j_d})^{-1/d}; diagonal entries are exactly 1.
inline std::map<MultiIndex, double> normalize_psi(const TargetForm& psi) {
  detail::require_positive_diagonal(psi);
  std::map<MultiIndex, double> out;
  for (auto& [j, n] : psi.coefficients()) {
    const BigInt prod = detail::diagonal_product(psi, j);
    if (n == 0) {
      out[j] = 0.0;
    } else if (ipow(abs(n), static_cast<unsigned>(psi.d())) == prod) {
      out[j] = n > 0 ? 1.0 : -1.0;
    } else {
      // ratio via logs keeps huge coefficients finite
      const double log_ratio = std::log(to_double(abs(n))) - std::log(to_double(prod)) / psi.d();
      out[j] = (n > 0 ? 1.0 : -1.0) * std::exp(log_ratio);
    }
  }
  return out;
}

struct PsiProfile {
  BigInt magnitude;
  std::optional<double> eccentricity;  // empty when some n_i < 2
  bool pseudo_diagonal = false;
  std::map<MultiIndex, double> normalized;
};

inline PsiProfile analyze_psi(const TargetForm& psi) {
  PsiProfile p;
  p.magnitude = magnitude(psi);
  try {
    p.eccentricity = eccentricity(psi);
  } catch (const InputError&) {
    p.eccentricity.reset();
  }
  p.pseudo_diagonal = is_pseudo_diagonal(psi);
  p.normalized = normalize_psi(psi);
  return p;
}

struct HypothesisReport {
  long long lhs = 0;   // s - dim sing F
  double rhs = 0;      // 2^{d-1} max{2r(d-1), r d E(psi)}
  bool satisfied = false;
};

/// Variable-count condition of the main asymptotic formula.
inline HypothesisReport check_hypotheses(const Form& f, const TargetForm& psi, long long dim_sing) {
  if (psi.d() != f.d()) throw InputError("F and psi have different degrees");
  const double ecc = eccentricity(psi);
  const double r = static_cast<double>(psi.r());
  const int d = f.d();
  HypothesisReport rep;
  rep.lhs = static_cast<long long>(f.s()) - dim_sing;
  rep.rhs = std::ldexp(1.0, d - 1) * std::max(2.0 * r * (d - 1), r * d * ecc);
  rep.satisfied = static_cast<double>(rep.lhs) > rep.rhs;
  return rep;
}

/// Positive definite B = M^T M with random |M_ij| <= bound, det B != 0.
inline IntMatrix random_pd_quadratic(int m, int bound, std::uint64_t seed) {
  if (m < 1 || bound < 1) throw InputError("random_pd_quadratic needs m >= 1 and bound >= 1");
  CounterRng rng("random_pd_quadratic", seed);
  for (;;) {
    IntMatrix mm(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) mm(i, j) = rng.between(-bound, bound);
    IntMatrix b = mm.transpose() * mm;
    if (determinant(b) != 0) return b;
  }
}

} // namespace repcount
