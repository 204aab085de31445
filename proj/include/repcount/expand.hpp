#pragma once

#include "form.hpp"
#include "multi_index.hpp"
#include "polynomial.hpp"

#include <functional>
#include <vector>

namespace repcount {

/// The r polynomials Phi_j in ms variables with
///   F(t_1 x_1 + ... + t_m x_m) = sum_j Phi_j(x_1, ..., x_m) t^j.
/// Variable (i, n) -- the n-th coordinate of block x_i -- has flat index i*s + n.
class ExpandedSystem {
public:
  ExpandedSystem() = default;
  ExpandedSystem(Form base, int m, std::vector<MultiIndex> indices, std::vector<Polynomial> polys)
      : base_(std::move(base)), m_(m), indices_(std::move(indices)), polys_(std::move(polys)) {
    if (indices_.size() != polys_.size()) throw std::invalid_argument("index/polynomial count mismatch");
  }

  const Form& base() const noexcept { return base_; }
  int m() const noexcept { return m_; }
  int d() const noexcept { return base_.d(); }
  std::size_t s() const noexcept { return base_.s(); }
  std::size_t num_vars() const noexcept { return static_cast<std::size_t>(m_) * base_.s(); }
  std::size_t r() const noexcept { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  const std::vector<Polynomial>& polys() const noexcept { return polys_; }

  std::size_t index_of(const MultiIndex& j) const {
    for (std::size_t k = 0; k < indices_.size(); ++k)
      if (indices_[k] == j) return k;
    throw InputError("multi-index " + to_string(j) + " not in the system");
  }
  const Polynomial& operator[](const MultiIndex& j) const { return polys_[index_of(j)]; }

  std::size_t var(int block, std::size_t coord) const { return block * base_.s() + coord; }

  /// All Phi_j at an integer point (length ms).
  std::vector<BigInt> evaluate(std::span<const BigInt> xbar) const {
    if (xbar.size() != num_vars()) throw InputError("dimension mismatch: system has " +
                                                    std::to_string(num_vars()) + " variables");
    std::vector<BigInt> out;
    for (auto& p : polys_) out.push_back(p.evaluate<BigInt>(xbar));
    return out;
  }

private:
  Form base_;
  int m_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<Polynomial> polys_;
};

/// Expand F(t_1 x_1 + ... + t_m x_m) symbolically and collect t^j coefficients.
inline ExpandedSystem expand_system(const Form& f, int m) {
  if (m < 1) throw InputError("expand_system needs m >= 1");
  const std::size_t s = f.s();
  const int d = f.d();
  const std::size_t nv = static_cast<std::size_t>(m) * s;
  std::vector<MultiIndex> indices = multi_index_set(m, d);
  std::vector<Polynomial> polys(indices.size(), Polynomial(nv));

  std::vector<int> t_exp(m, 0);
  Exponents x_exp(nv, 0);
  std::vector<int> part(m, 0);

  for (auto& [e, c] : f.poly().terms()) {
    // distribute e[k] among the m blocks for every coordinate k in turn
    std::function<void(std::size_t, BigInt)> walk = [&](std::size_t k, BigInt coeff) {
      if (k == s) {
        std::vector<int> entries;
        for (int i = 0; i < m; ++i) entries.insert(entries.end(), t_exp[i], i);
        MultiIndex j{entries};
        auto pos = std::lower_bound(indices.begin(), indices.end(), j) - indices.begin();
        polys[pos].add_term(x_exp, coeff);
        return;
      }
      const int total = e[k];
      // compositions of `total` into m parts
      std::function<void(int, int, BigInt)> split = [&](int block, int left, BigInt mult) {
        if (block == m - 1) {
          x_exp[block * s + k] = left;
          t_exp[block] += left;
          walk(k + 1, mult);
          t_exp[block] -= left;
          x_exp[block * s + k] = 0;
          return;
        }
        for (int a = 0; a <= left; ++a) {
          x_exp[block * s + k] = a;
          t_exp[block] += a;
          split(block + 1, left - a, mult * binomial(left, a));
          t_exp[block] -= a;
        }
        x_exp[block * s + k] = 0;
      };
      split(0, total, coeff);
    };
    walk(0, c);
  }
  return ExpandedSystem(f, m, std::move(indices), std::move(polys));
}

/// Phi_j flattened for repeated evaluation.
class CompiledSystem {
public:
  CompiledSystem() = default;
  explicit CompiledSystem(const ExpandedSystem& sys) {
    for (auto& p : sys.polys()) polys_.emplace_back(p);
  }
  explicit CompiledSystem(const std::vector<Polynomial>& polys) {
    for (auto& p : polys) polys_.emplace_back(p);
  }
  std::size_t size() const noexcept { return polys_.size(); }
  const CompiledPolynomial& operator[](std::size_t k) const { return polys_[k]; }

  /// True when every |Phi_j| on prod [-b_v, b_v] stays below 2^62.
  bool fits_int64_on_box(std::span<const std::int64_t> bound) const {
    const BigInt limit = BigInt(1) << 62;
    for (auto& p : polys_)
      if (!p.coefficients_fit_int64() || p.max_abs_on_box(bound) >= limit) return false;
    return true;
  }

  CompiledSystem reduced_mod(std::int64_t q) const {
    CompiledSystem r;
    for (auto& p : polys_) r.polys_.push_back(p.reduced_mod(q));
    return r;
  }

private:
  std::vector<CompiledPolynomial> polys_;
};

} // namespace repcount
