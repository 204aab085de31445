#pragma once

#include "bigint.hpp"
#include "errors.hpp"
#include "polynomial.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace repcount {

/// Integral homogeneous form of degree d >= 2 in s >= 1 variables.
class Form {
public:
  Form() = default;

  static Form from_polynomial(Polynomial p) {
    if (p.num_vars() < 1) throw InputError("form needs at least one variable");
    if (p.is_zero()) throw InputError("form has no nonzero terms");
    const int d = p.terms().begin()->first.size() ? Polynomial::degree_of(p.terms().begin()->first) : 0;
    if (!p.is_homogeneous(d)) throw InputError("form is not homogeneous");
    if (d < 2) throw InputError("form degree must be at least 2");
    Form f;
    f.d_ = d;
    f.poly_ = std::move(p);
    return f;
  }

  std::size_t s() const noexcept { return poly_.num_vars(); }
  int d() const noexcept { return d_; }
  const Polynomial& poly() const noexcept { return poly_; }
  BigInt coefficient(const Exponents& e) const { return poly_.coefficient(e); }

  friend bool operator==(const Form&, const Form&) = default;

private:
  int d_ = 0;
  Polynomial poly_;
};

inline std::string to_string(const Form& f) { return to_string(f.poly()); }

namespace detail {

class FormParser {
public:
  FormParser(std::string_view text, std::size_t s) : text_(text), s_(s) {}

  Form parse() {
    if (s_ < 1) throw InputError("variable count s must be at least 1");
    Polynomial poly(s_);
    std::vector<std::pair<std::size_t, int>> term_degrees;
    skip_ws();
    if (at_end()) throw ParseError("empty form", pos_);
    bool first = true;
    while (!at_end()) {
      const std::size_t term_start = pos_;
      bool negative = false;
      if (peek() == '+' || peek() == '-') {
        negative = peek() == '-';
        ++pos_;
        skip_ws();
      } else if (!first) {
        throw ParseError("expected '+' or '-'", pos_);
      }
      first = false;
      auto [exps, coeff] = parse_term();
      if (negative) coeff = -coeff;
      term_degrees.emplace_back(term_start, Polynomial::degree_of(exps));
      poly.add_term(exps, coeff);
      skip_ws();
    }
    const int d = term_degrees.front().second;
    for (auto& [at, deg] : term_degrees)
      if (deg != d) throw ParseError("non-homogeneous form (term of degree " + std::to_string(deg) +
                                         ", expected " + std::to_string(d) + ")",
                                     at);
    if (d < 2) throw ParseError("form degree must be at least 2", 0);
    if (poly.is_zero()) throw ParseError("form has no nonzero terms", 0);
    return Form::from_polynomial(std::move(poly));
  }

private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_digits() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::pair<Exponents, BigInt> parse_term() {
    Exponents e(s_, 0);
    BigInt coeff = 1;
    bool have_coeff = false, have_factor = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coeff = BigInt(read_digits());
      have_coeff = true;
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (peek() != 'x') throw ParseError("expected variable after '*'", pos_);
      }
    }
    while (peek() == 'x') {
      ++pos_;
      const std::size_t idx_pos = pos_;
      std::string idx = read_digits();
      if (idx.empty()) throw ParseError("expected variable index after 'x'", idx_pos);
      if (idx.size() > 9) throw ParseError("variable index too large", idx_pos);
      const std::size_t k = std::stoul(idx);
      if (k < 1 || k > s_)
        throw ParseError("variable index " + idx + " outside 1.." + std::to_string(s_), idx_pos);
      skip_ws();
      int exponent = 1;
      if (peek() == '^') {
        ++pos_;
        skip_ws();
        const std::size_t exp_pos = pos_;
        std::string ex = read_digits();
        if (ex.empty()) throw ParseError("expected exponent after '^'", exp_pos);
        if (ex.size() > 4) throw ParseError("exponent too large", exp_pos);
        exponent = std::stoi(ex);
        skip_ws();
      }
      e[k - 1] += exponent;
      have_factor = true;
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (peek() != 'x') throw ParseError("expected variable after '*'", pos_);
      }
    }
    if (!have_coeff && !have_factor) throw ParseError("expected term", pos_);
    if (!at_end() && peek() != '+' && peek() != '-')
      throw ParseError(std::string("unexpected character '") + peek() + "'", pos_);
    return {e, coeff};
  }

  std::string_view text_;
  std::size_t s_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parse a form in the grammar `[±] [coeff] [*] x<k>[^e] ([*|ws] x<k>[^e])* (± term)*`.
inline Form parse_form(std::string_view text, std::size_t s) {
  return detail::FormParser(text, s).parse();
}

inline BigInt evaluate_form(const Form& f, std::span<const BigInt> x) {
  if (x.size() != f.s()) throw InputError("dimension mismatch: expected " + std::to_string(f.s()) +
                                          " coordinates, got " + std::to_string(x.size()));
  return f.poly().evaluate<BigInt>(x);
}

inline BigInt evaluate_form(const Form& f, std::span<const std::int64_t> x) {
  std::vector<BigInt> big(x.begin(), x.end());
  return evaluate_form(f, std::span<const BigInt>(big));
}

/// Quadratic form x^T A x for a symmetric integer matrix A.
inline Form quadratic_form_from_gram(const IntMatrix& a) {
  if (!a.is_symmetric()) throw InputError("Gram matrix must be symmetric");
  const std::size_t s = a.rows();
  Polynomial p(s);
  for (std::size_t k = 0; k < s; ++k)
    for (std::size_t l = k; l < s; ++l) {
      Exponents e(s, 0);
      e[k] += 1;
      e[l] += 1;
      p.add_term(e, k == l ? a(k, k) : BigInt(2 * a(k, l)));
    }
  return Form::from_polynomial(std::move(p));
}

/// Gram matrix G with F(x) = x^T G x (entries may be half-integers).
inline RationalMatrix gram_matrix(const Form& f) {
  if (f.d() != 2) throw InputError("Gram matrix requires a quadratic form");
  const std::size_t s = f.s();
  RationalMatrix g(s, s);
  for (auto& [e, c] : f.poly().terms()) {
    std::vector<std::size_t> vars;
    for (std::size_t v = 0; v < s; ++v)
      for (int k = 0; k < e[v]; ++k) vars.push_back(v);
    if (vars[0] == vars[1]) {
      g(vars[0], vars[0]) += Rational(c);
    } else {
      g(vars[0], vars[1]) += Rational(c, 2);
      g(vars[1], vars[0]) += Rational(c, 2);
    }
  }
  return g;
}

enum class Definiteness { ProvenPositive, ProvenNot, HeuristicPositive, HeuristicNot };

inline const char* to_string(Definiteness d) {
  switch (d) {
  case Definiteness::ProvenPositive: return "proven-positive";
  case Definiteness::ProvenNot: return "proven-not";
  case Definiteness::HeuristicPositive: return "heuristic-positive";
  case Definiteness::HeuristicNot: return "heuristic-not";
  }
  return "?";
}

inline bool is_positive(Definiteness d) {
  return d == Definiteness::ProvenPositive || d == Definiteness::HeuristicPositive;
}

/// Sylvester's criterion: all leading principal minors positive.
template <class T>
bool leading_minors_positive(const Matrix<T>& g) {
  for (std::size_t k = 1; k <= g.rows(); ++k) {
    Matrix<T> sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = g(i, j);
    if (determinant(sub) <= 0) return false;
  }
  return true;
}

namespace detail {

inline double coefficient_l1(const Form& f) {
  double n = 0;
  for (auto& [e, c] : f.poly().terms()) n += std::abs(to_double(c));
  return n;
}

/// Sampled minimum of F on a compact surface with local descent refinement.
/// `project` maps an arbitrary nonzero point back onto the surface.
template <class Sample, class Project>
std::pair<double, std::vector<double>> sampled_minimum(const Form& f, int samples, int refinements,
                                                       CounterRng& rng, Sample&& sample,
                                                       Project&& project) {
  CompiledPolynomial cp(f.poly());
  const std::size_t s = f.s();
  std::vector<std::pair<double, std::vector<double>>> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    std::vector<double> x = sample(rng);
    pts.emplace_back(cp.eval_real(x.data()), std::move(x));
  }
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  const int keep = std::min<int>(refinements, static_cast<int>(pts.size()));
  for (int i = 0; i < keep; ++i) {
    auto& [val, x] = pts[i];
    double step = 0.1;
    std::vector<double> y(s);
    while (step > 1e-7) {
      bool improved = false;
      for (std::size_t k = 0; k < s; ++k)
        for (double dir : {1.0, -1.0}) {
          y = x;
          y[k] += dir * step;
          if (!project(y)) continue;
          double v = cp.eval_real(y.data());
          if (v < val) {
            val = v;
            x = y;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
  }
  auto best = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  return {best->first, best->second};
}

} // namespace detail

/// Positive definiteness. Exact for d = 2 (Sylvester on the Gram matrix) and
/// for odd d; for even d >= 4 a randomized search on the unit sphere decides,
/// and a negative value found there is confirmed at a rational point.
inline Definiteness is_positive_definite(const Form& f) {
  if (f.d() == 2) {
    return leading_minors_positive(gram_matrix(f)) ? Definiteness::ProvenPositive
                                                   : Definiteness::ProvenNot;
  }
  if (f.d() % 2 == 1) return Definiteness::ProvenNot;
  const std::size_t s = f.s();
  for (std::size_t k = 0; k < s; ++k) {
    Exponents e(s, 0);
    e[k] = f.d();
    if (f.coefficient(e) <= 0) return Definiteness::ProvenNot;
  }
  CounterRng rng("is_positive_definite", 0);
  std::normal_distribution<double> normal;
  auto project = [](std::vector<double>& x) {
    double n = 0;
    for (double v : x) n += v * v;
    if (n == 0) return false;
    n = std::sqrt(n);
    for (double& v : x) v /= n;
    return true;
  };
  auto sample = [&](CounterRng& g) {
    std::vector<double> x(s);
    do {
      for (double& v : x) v = normal(g);
    } while (!project(x));
    return x;
  };
  auto [min_value, argmin] = detail::sampled_minimum(f, 5000, 100, rng, sample, project);
  const double normalized = min_value / detail::coefficient_l1(f);
  if (normalized > 1e-9) return Definiteness::HeuristicPositive;
  // try to certify with an exact rational witness
  std::vector<BigInt> witness(s);
  for (std::size_t k = 0; k < s; ++k)
    witness[k] = BigInt(static_cast<long long>(std::llround(argmin[k] * 1e6)));
  const bool nonzero = std::any_of(witness.begin(), witness.end(), [](const BigInt& v) { return v != 0; });
  if (nonzero && evaluate_form(f, std::span<const BigInt>(witness)) <= 0) return Definiteness::ProvenNot;
  return Definiteness::HeuristicNot;
}

/// Estimated minimum of F on the boundary of the unit sup-norm ball.
inline double sup_norm_sphere_minimum(const Form& f) {
  const std::size_t s = f.s();
  CounterRng rng("sup_norm_sphere_minimum", 0);
  auto project = [](std::vector<double>& x) {
    double n = 0;
    for (double v : x) n = std::max(n, std::abs(v));
    if (n == 0) return false;
    for (double& v : x) v /= n;
    return true;
  };
  auto sample = [&](CounterRng& g) {
    std::vector<double> x(s);
    for (double& v : x) v = g.uniform(-1.0, 1.0);
    x[g.below(s)] = g.uniform01() < 0.5 ? -1.0 : 1.0;
    return x;
  };
  return detail::sampled_minimum(f, 5000, 100, rng, sample, project).first;
}

/// s - rank of the Gram matrix, computed exactly.
inline std::size_t quadratic_singular_dim(const Form& f) {
  if (f.d() != 2) throw InputError("quadratic_singular_dim requires degree 2");
  return f.s() - rank(gram_matrix(f));
}

} // namespace repcount
