#pragma once

#include "bigint.hpp"
#include "errors.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace repcount {

using Exponents = std::vector<int>;

/// Lexicographic monomial order with x1 > x2 > ... (largest first).
struct LexDescending {
  bool operator()(const Exponents& a, const Exponents& b) const { return a > b; }
};

/// Sparse multivariate polynomial with arbitrary-precision integer coefficients.
class Polynomial {
public:
  using TermMap = std::map<Exponents, BigInt, LexDescending>;

  Polynomial() = default;
  explicit Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

  std::size_t num_vars() const noexcept { return num_vars_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  void add_term(const Exponents& e, const BigInt& c) {
    if (e.size() != num_vars_) throw std::invalid_argument("exponent vector length mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  BigInt coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? BigInt(0) : it->second;
  }

  int total_degree() const {
    int d = -1;
    for (auto& [e, c] : terms_) d = std::max(d, degree_of(e));
    return d;
  }

  bool is_homogeneous(int d) const {
    for (auto& [e, c] : terms_)
      if (degree_of(e) != d) return false;
    return true;
  }

  /// Degree in the variables [first, first + count).
  int block_degree(std::size_t first, std::size_t count) const {
    int d = 0;
    for (auto& [e, c] : terms_) {
      int k = 0;
      for (std::size_t v = first; v < first + count; ++v) k += e[v];
      d = std::max(d, k);
    }
    return d;
  }

  template <class T>
  T evaluate(std::span<const T> x) const {
    if (x.size() != num_vars_) throw InputError("dimension mismatch in polynomial evaluation");
    T sum = T(0);
    for (auto& [e, c] : terms_) {
      T term = T(c);
      for (std::size_t v = 0; v < num_vars_; ++v)
        for (int k = 0; k < e[v]; ++k) term *= x[v];
      sum += term;
    }
    return sum;
  }

  double evaluate_real(std::span<const double> x) const {
    if (x.size() != num_vars_) throw InputError("dimension mismatch in polynomial evaluation");
    double sum = 0;
    for (auto& [e, c] : terms_) {
      double term = to_double(c);
      for (std::size_t v = 0; v < num_vars_; ++v)
        for (int k = 0; k < e[v]; ++k) term *= x[v];
      sum += term;
    }
    return sum;
  }

  /// Substitute x_v -> x_v + shift[v] for every variable.
  Polynomial shifted(std::span<const BigInt> shift) const;

  Polynomial& operator+=(const Polynomial& o) {
    check_compatible(o);
    for (auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_compatible(o);
    for (auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const BigInt& k) {
    if (k == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= k;
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const BigInt& k) { return a *= k; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    Polynomial r(a.num_vars_);
    Exponents e(a.num_vars_);
    for (auto& [ea, ca] : a.terms_)
      for (auto& [eb, cb] : b.terms_) {
        for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  static int degree_of(const Exponents& e) {
    int d = 0;
    for (int k : e) d += k;
    return d;
  }

private:
  void check_compatible(const Polynomial& o) const {
    if (o.num_vars_ != num_vars_) throw std::invalid_argument("polynomial variable count mismatch");
  }

  std::size_t num_vars_ = 0;
  TermMap terms_;
};

inline Polynomial Polynomial::shifted(std::span<const BigInt> shift) const {
  if (shift.size() != num_vars_) throw InputError("shift length mismatch");
  Polynomial out(num_vars_);
  for (auto& [e, c] : terms_) {
    // expand prod_v (x_v + h_v)^{e_v} one variable at a time
    Polynomial acc(num_vars_);
    acc.add_term(Exponents(num_vars_, 0), c);
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (e[v] == 0) continue;
      Polynomial factor(num_vars_);
      for (int k = 0; k <= e[v]; ++k) {
        Exponents ek(num_vars_, 0);
        ek[v] = k;
        factor.add_term(ek, binomial(e[v], k) * ipow(shift[v], e[v] - k));
      }
      acc = acc * factor;
    }
    out += acc;
  }
  return out;
}

/// Canonical text: terms in descending lexicographic exponent order, e.g.
/// "x1^2 + 2*x1*x2 - x2^2". The zero polynomial prints as "0".
inline std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto& [e, c] : p.terms()) {
    BigInt mag = c < 0 ? BigInt(-c) : c;
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    bool constant = true;
    for (int k : e) constant = constant && k == 0;
    std::string mono;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(v + 1);
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    if (constant) {
      out += mag.str();
    } else if (mag == 1) {
      out += mono;
    } else {
      out += mag.str() + "*" + mono;
    }
  }
  return out;
}

/// Flattened polynomial for hot loops. Each term stores its coefficient and
/// the variable indices of its factors (with repetition). Callers must bound
/// the value range with `max_abs_on_box` before trusting 64-bit results.
class CompiledPolynomial {
public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p) : num_vars_(p.num_vars()) {
    for (auto& [e, c] : p.terms()) {
      Term t;
      t.big = c;
      t.real = to_double(c);
      t.coeff = fits_int64(c) ? c.convert_to<std::int64_t>() : 0;
      t.begin = static_cast<std::uint32_t>(factors_.size());
      for (std::size_t v = 0; v < e.size(); ++v)
        for (int k = 0; k < e[v]; ++k) factors_.push_back(static_cast<std::uint32_t>(v));
      t.end = static_cast<std::uint32_t>(factors_.size());
      fits64_ = fits64_ && fits_int64(c);
      terms_.push_back(std::move(t));
    }
  }

  std::size_t num_vars() const noexcept { return num_vars_; }
  bool empty() const noexcept { return terms_.empty(); }
  bool coefficients_fit_int64() const noexcept { return fits64_; }

  std::int64_t operator()(const std::int64_t* x) const {
    std::int64_t sum = 0;
    for (auto& t : terms_) {
      std::int64_t v = t.coeff;
      for (std::uint32_t f = t.begin; f < t.end; ++f) v *= x[factors_[f]];
      sum += v;
    }
    return sum;
  }

  BigInt eval_big(const std::int64_t* x) const {
    BigInt sum = 0;
    for (auto& t : terms_) {
      BigInt v = t.big;
      for (std::uint32_t f = t.begin; f < t.end; ++f) v *= x[factors_[f]];
      sum += v;
    }
    return sum;
  }

  /// Copy with every coefficient reduced into [0, q); pair with eval_mod.
  CompiledPolynomial reduced_mod(std::int64_t q) const {
    CompiledPolynomial r = *this;
    for (auto& t : r.terms_) {
      BigInt c = t.big % q;
      if (c < 0) c += q;
      t.coeff = c.convert_to<std::int64_t>();
    }
    return r;
  }

  /// Value mod q in [0, q) for a polynomial produced by reduced_mod(q);
  /// inputs must be residues in [0, q).
  std::int64_t eval_mod(const std::int64_t* x, std::int64_t q) const {
    using u128 = unsigned __int128;
    const std::uint64_t uq = static_cast<std::uint64_t>(q);
    std::uint64_t sum = 0;
    for (auto& t : terms_) {
      u128 v = static_cast<std::uint64_t>(t.coeff);
      for (std::uint32_t f = t.begin; f < t.end; ++f)
        v = (v * static_cast<std::uint64_t>(x[factors_[f]])) % uq;
      sum = static_cast<std::uint64_t>((u128(sum) + v) % uq);
    }
    return static_cast<std::int64_t>(sum);
  }

  double eval_real(const double* x) const {
    double sum = 0;
    for (auto& t : terms_) {
      double v = t.real;
      for (std::uint32_t f = t.begin; f < t.end; ++f) v *= x[factors_[f]];
      sum += v;
    }
    return sum;
  }

  /// Sum of |c| * prod |bound_v| over terms; an upper bound for |p| on the box.
  BigInt max_abs_on_box(std::span<const std::int64_t> bound) const {
    BigInt total = 0;
    for (auto& t : terms_) {
      BigInt v = abs(t.big);
      for (std::uint32_t f = t.begin; f < t.end; ++f) v *= bound[factors_[f]];
      total += v;
    }
    return total;
  }

  /// Range [lo, hi] containing every value of p on the box prod [-b_v, b_v].
  std::pair<BigInt, BigInt> range_on_box(std::span<const std::int64_t> bound) const {
    BigInt lo = 0, hi = 0;
    for (auto& t : terms_) {
      BigInt mag = abs(t.big);
      bool all_even = true;
      for (std::uint32_t f = t.begin; f < t.end; ++f) mag *= bound[factors_[f]];
      // a monomial with all exponents even is sign-definite
      std::vector<int> count(num_vars_, 0);
      for (std::uint32_t f = t.begin; f < t.end; ++f) ++count[factors_[f]];
      for (int k : count) all_even = all_even && (k % 2 == 0);
      if (all_even) {
        if (t.big > 0) hi += mag; else lo -= mag;
      } else {
        hi += mag;
        lo -= mag;
      }
    }
    return {lo, hi};
  }

private:
  struct Term {
    std::int64_t coeff = 0;
    double real = 0;
    BigInt big;
    std::uint32_t begin = 0, end = 0;
  };

  std::size_t num_vars_ = 0;
  bool fits64_ = true;
  std::vector<Term> terms_;
  std::vector<std::uint32_t> factors_;
};

} // namespace repcount
