#pragma once

#include "bigint.hpp"
#include "errors.hpp"
#include "expand.hpp"
#include "form.hpp"
#include "multi_index.hpp"
#include "parallel.hpp"
#include "snf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace repcount {

using IntVec = std::vector<std::int64_t>;
using Count = std::uint64_t;

struct EnumerationOptions {
  unsigned threads = 1;
  double max_candidates = 1e8;  // per enumeration stage
};

/// Per-block symmetric box [-P_i, P_i]^s.
struct Box {
  std::vector<double> bounds;

  Box() = default;
  explicit Box(std::vector<double> b) : bounds(std::move(b)) {
    if (bounds.empty()) throw InputError("box needs at least one block");
    for (double p : bounds)
      if (!(p > 0) || !std::isfinite(p)) throw InputError("box bounds must be positive");
  }
  static Box uniform(int m, double p) { return Box(std::vector<double>(m, p)); }

  int m() const noexcept { return static_cast<int>(bounds.size()); }
  std::int64_t int_bound(int i) const { return static_cast<std::int64_t>(std::floor(bounds[i] + 1e-12)); }
  /// Lattice points per block side, 2 floor(P_i) + 1.
  std::int64_t side(int i) const { return 2 * int_bound(i) + 1; }
  /// Integer bound for each of the ms variables, block by block.
  std::vector<std::int64_t> variable_bounds(std::size_t s) const {
    std::vector<std::int64_t> out;
    for (int i = 0; i < m(); ++i) out.insert(out.end(), s, int_bound(i));
    return out;
  }
  double volume(std::size_t s) const {
    double v = 1;
    for (double p : bounds) v *= std::pow(2 * p, static_cast<double>(s));
    return v;
  }
  double lattice_points(std::size_t s) const {
    double n = 1;
    for (int i = 0; i < m(); ++i) n *= std::pow(static_cast<double>(side(i)), static_cast<double>(s));
    return n;
  }
};

namespace detail {

inline void require_budget(double estimate, const EnumerationOptions& opt, const char* what) {
  if (estimate > opt.max_candidates)
    throw BudgetExceeded(std::string(what) + " exceeds the enumeration limit", estimate);
}

/// Visit every point of prod_v [-b_v, b_v] in lexicographic order,
/// restricted to the linear index range [begin, end).
template <class Fn>
void for_each_in_box(std::span<const std::int64_t> bounds, std::uint64_t begin, std::uint64_t end, Fn&& fn) {
  const std::size_t n = bounds.size();
  if (begin >= end) return;
  IntVec x(n);
  std::uint64_t rest = begin;
  for (std::size_t k = n; k-- > 0;) {
    const auto side = static_cast<std::uint64_t>(2 * bounds[k] + 1);
    x[k] = static_cast<std::int64_t>(rest % side) - bounds[k];
    rest /= side;
  }
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    fn(std::as_const(x));
    for (std::size_t k = n; k-- > 0;) {
      if (x[k] < bounds[k]) {
        ++x[k];
        break;
      }
      x[k] = -bounds[k];
    }
  }
}

inline std::uint64_t box_size(std::span<const std::int64_t> bounds) {
  std::uint64_t n = 1;
  for (auto b : bounds) n *= static_cast<std::uint64_t>(2 * b + 1);
  return n;
}

template <class Fn>
void for_each_in_cube(std::size_t s, std::int64_t b, Fn&& fn) {
  std::vector<std::int64_t> bounds(s, b);
  for_each_in_box(bounds, 0, box_size(bounds), fn);
}

/// F(x) = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2 for a positive definite quadratic F.
struct QuadraticDecomposition {
  std::vector<Rational> q;
  RationalMatrix mu;
};

inline QuadraticDecomposition decompose_quadratic(const Form& f) {
  RationalMatrix a = gram_matrix(f);
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      a(j, i) = a(i, j);
      a(i, j) = a(i, j) / a(i, i);
    }
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) a(k, l) -= a(k, i) * a(i, l);
  }
  QuadraticDecomposition out;
  out.mu = RationalMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.q.push_back(a(i, i));
    for (std::size_t j = i + 1; j < n; ++j) out.mu(i, j) = a(i, j);
  }
  return out;
}

/// Integer interval {x : q (x + c)^2 <= R}, found from a floating guess and
/// corrected with exact rational comparisons.
inline std::pair<BigInt, BigInt> quadratic_interval(const Rational& q, const Rational& c, const Rational& rem) {
  auto inside = [&](const BigInt& x) {
    Rational t = Rational(x) + c;
    return q * t * t <= rem;
  };
  const double width = std::sqrt(std::max(0.0, to_double(rem) / to_double(q)));
  const double center = -to_double(c);
  BigInt lo = BigInt(static_cast<long long>(std::ceil(center - width)));
  BigInt hi = BigInt(static_cast<long long>(std::floor(center + width)));
  while (inside(lo - 1)) --lo;
  while (lo <= hi + 1 && !inside(lo)) ++lo;
  while (inside(hi + 1)) ++hi;
  while (hi >= lo && !inside(hi)) --hi;
  return {lo, hi};
}

inline void fincke_pohst(const QuadraticDecomposition& dec, std::size_t i, const Rational& rem, IntVec& x,
                         std::vector<IntVec>& out) {
  Rational c = 0;
  for (std::size_t j = i + 1; j < x.size(); ++j)
    if (dec.mu(i, j) != 0) c += dec.mu(i, j) * x[j];
  auto [lo, hi] = quadratic_interval(dec.q[i], c, rem);
  for (BigInt v = lo; v <= hi; ++v) {
    x[i] = v.convert_to<std::int64_t>();
    Rational t = Rational(v) + c;
    Rational next = rem - dec.q[i] * t * t;
    if (i == 0) {
      if (next == 0) out.push_back(x);
    } else {
      fincke_pohst(dec, i - 1, next, x, out);
    }
  }
  x[i] = 0;
}

/// Signed-permutation symmetries of F: coordinates whose sign can be
/// flipped and classes of coordinates that can be permuted freely.
struct CoordinateSymmetry {
  std::vector<bool> flippable;
  std::vector<int> cls;  // class label per coordinate

  explicit CoordinateSymmetry(const Form& f) {
    const std::size_t s = f.s();
    flippable.assign(s, true);
    for (auto& [e, c] : f.poly().terms())
      for (std::size_t k = 0; k < s; ++k)
        if (e[k] % 2) flippable[k] = false;
    cls.resize(s);
    std::iota(cls.begin(), cls.end(), 0);
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = a + 1; b < s; ++b) {
        if (cls[b] != static_cast<int>(b)) continue;
        bool invariant = true;
        for (auto& [e, c] : f.poly().terms()) {
          Exponents sw = e;
          std::swap(sw[a], sw[b]);
          if (f.coefficient(sw) != c) {
            invariant = false;
            break;
          }
        }
        if (invariant) cls[b] = cls[a];
      }
  }

  /// Canonical orbit representative key.
  IntVec key(const IntVec& x) const {
    IntVec y = x;
    for (std::size_t k = 0; k < y.size(); ++k)
      if (flippable[k]) y[k] = std::abs(y[k]);
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t k = 0; k < y.size(); ++k) members[cls[k]].push_back(k);
    for (auto& [label, idx] : members) {
      if (idx.size() < 2) continue;
      std::vector<std::int64_t> vals;
      for (auto k : idx) vals.push_back(y[k]);
      std::sort(vals.rbegin(), vals.rend());
      for (std::size_t t = 0; t < idx.size(); ++t) y[idx[t]] = vals[t];
    }
    return y;
  }
};

struct Weighted {
  IntVec v;
  Count weight = 1;
};

/// Count tuples (x_b) with x_b drawn from lists[b] and every non-diagonal
/// Phi_j equal to its target. Blocks are assigned in `order`; each Phi_j is
/// checked as soon as its last block is assigned. Diagonal equations are
/// assumed to hold already (the lists are pre-filtered).
class TupleSearch {
public:
  TupleSearch(const ExpandedSystem& sys, const TargetForm& psi, std::vector<int> order,
              const std::vector<std::vector<IntVec>>& lists, std::vector<Weighted> first)
      : sys_(sys), compiled_(sys), order_(std::move(order)), lists_(lists), first_(std::move(first)) {
    const std::size_t s = sys.s();
    const int m = sys.m();
    std::vector<int> depth_of(m);
    for (int k = 0; k < m; ++k) depth_of[order_[k]] = k;
    checks_.assign(m, {});
    for (std::size_t p = 0; p < sys.r(); ++p) {
      const MultiIndex& j = sys.indices()[p];
      if (j.is_diagonal()) continue;
      int deepest = 0;
      for (int b : j.entries) deepest = std::max(deepest, depth_of[b]);
      checks_[deepest].push_back(p);
    }
    std::vector<std::int64_t> bound(sys.num_vars(), 0);
    for (int b = 0; b < m; ++b) {
      std::int64_t mx = 0;
      for (auto& v : lists_[b])
        for (auto c : v) mx = std::max(mx, std::abs(c));
      for (auto& w : first_)
        if (b == order_[0])
          for (auto c : w.v) mx = std::max(mx, std::abs(c));
      for (std::size_t n = 0; n < s; ++n) bound[b * s + n] = mx;
    }
    use64_ = compiled_.fits_int64_on_box(bound);
    for (auto& j : sys.indices()) {
      const BigInt& n = psi[j];
      target_.push_back(n);
      use64_ = use64_ && fits_int64(n);
      target64_.push_back(use64_ ? n.convert_to<std::int64_t>() : 0);
    }
  }

  Count run(unsigned threads) const {
    const std::size_t chunks = std::min<std::size_t>(first_.size(), 256);
    std::vector<Count> partial(chunks, 0);
    parallel_for_chunks(chunks, threads, [&](std::size_t c) {
      auto [begin, end] = chunk_range(first_.size(), chunks, c);
      IntVec xbar(sys_.num_vars(), 0);
      Count total = 0;
      for (std::size_t t = begin; t < end; ++t) {
        place(xbar, order_[0], first_[t].v);
        if (!passes(xbar, 0)) continue;
        total += first_[t].weight * descend(xbar, 1);
      }
      partial[c] = total;
    });
    Count sum = 0;
    for (Count p : partial) sum += p;
    return sum;
  }

private:
  void place(IntVec& xbar, int block, const IntVec& v) const {
    std::copy(v.begin(), v.end(), xbar.begin() + block * sys_.s());
  }

  bool passes(const IntVec& xbar, std::size_t depth) const {
    for (std::size_t p : checks_[depth]) {
      if (use64_) {
        if (compiled_[p](xbar.data()) != target64_[p]) return false;
      } else if (compiled_[p].eval_big(xbar.data()) != target_[p]) {
        return false;
      }
    }
    return true;
  }

  Count descend(IntVec& xbar, std::size_t depth) const {
    if (depth == order_.size()) return 1;
    const int block = order_[depth];
    Count total = 0;
    for (auto& v : lists_[block]) {
      place(xbar, block, v);
      if (passes(xbar, depth)) total += descend(xbar, depth + 1);
    }
    return total;
  }

  const ExpandedSystem& sys_;
  CompiledSystem compiled_;
  std::vector<int> order_;
  const std::vector<std::vector<IntVec>>& lists_;
  std::vector<Weighted> first_;
  std::vector<std::vector<std::size_t>> checks_;
  std::vector<BigInt> target_;
  std::vector<std::int64_t> target64_;
  bool use64_ = true;
};

inline void require_same_degree(const Form& f, const TargetForm& psi) {
  if (f.d() != psi.d())
    throw InputError("F has degree " + std::to_string(f.d()) + " but psi has degree " + std::to_string(psi.d()));
}

} // namespace detail

/// Every x in Z^s with F(x) = n, each exactly once, for positive definite F.
inline std::vector<IntVec> list_representations(const Form& f, const BigInt& n,
                                                const EnumerationOptions& opt = {}) {
  if (!is_positive(is_positive_definite(f)))
    throw InputError("list_representations needs a positive definite form");
  const std::size_t s = f.s();
  if (n < 0) return {};
  if (n == 0) return {IntVec(s, 0)};
  std::vector<IntVec> out;
  if (f.d() == 2) {
    auto dec = detail::decompose_quadratic(f);
    IntVec x(s, 0);
    detail::fincke_pohst(dec, s - 1, Rational(n), x, out);
    std::sort(out.begin(), out.end());
    return out;
  }
  const double mu = sup_norm_sphere_minimum(f) * 0.9;
  if (!(mu > 0)) throw InputError("could not bound the form away from zero on the unit sphere");
  const auto bound = static_cast<std::int64_t>(std::floor(std::pow(to_double(n) / mu, 1.0 / f.d()) + 1e-9));
  detail::require_budget(std::pow(2.0 * bound + 1, static_cast<double>(s)), opt, "representation box");
  CompiledPolynomial cp(f.poly());
  std::vector<std::int64_t> b(s, bound);
  const bool use64 = cp.coefficients_fit_int64() && cp.max_abs_on_box(b) < (BigInt(1) << 62) && fits_int64(n);
  const std::int64_t n64 = use64 ? n.convert_to<std::int64_t>() : 0;
  detail::for_each_in_cube(s, bound, [&](const IntVec& x) {
    if (use64 ? cp(x.data()) == n64 : cp.eval_big(x.data()) == n) out.push_back(x);
  });
  return out;
}

/// N(F; psi): m-tuples in Z^s with Phi_j(x_1..x_m) = n_j for all j.
/// The first block is reduced modulo the signed-permutation symmetries of F.
inline Count count_representations(const Form& f, const TargetForm& psi, const EnumerationOptions& opt = {}) {
  detail::require_same_degree(f, psi);
  if (!is_positive(is_positive_definite(f)))
    throw InputError("count_representations needs a positive definite form (the count may be infinite)");
  const int m = psi.m();
  for (int i = 0; i < m; ++i)
    if (psi.diagonal(i) < 0) return 0;
  ExpandedSystem sys = expand_system(f, m);
  std::vector<std::vector<IntVec>> lists(m);
  std::map<BigInt, int> seen;
  for (int i = 0; i < m; ++i) {
    auto [it, fresh] = seen.try_emplace(psi.diagonal(i), i);
    lists[i] = fresh ? list_representations(f, psi.diagonal(i), opt) : lists[it->second];
    if (lists[i].empty()) return 0;
  }
  detail::CoordinateSymmetry sym(f);
  std::map<IntVec, detail::Weighted> orbits;
  for (auto& v : lists[0]) {
    auto [it, fresh] = orbits.try_emplace(sym.key(v), detail::Weighted{v, 0});
    ++it->second.weight;
  }
  std::vector<detail::Weighted> first;
  for (auto& [k, w] : orbits) first.push_back(w);
  double work = static_cast<double>(first.size());
  for (int i = 1; i < m; ++i) work *= static_cast<double>(lists[i].size());
  detail::require_budget(work, opt, "representation tuple search");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  return detail::TupleSearch(sys, psi, order, lists, std::move(first)).run(opt.threads);
}

/// N_psi(P_1..P_m): x_i in [-P_i, P_i]^s with Phi_j = n_j. Works for any F.
inline Count count_boxed(const Form& f, const TargetForm& psi, const Box& box, const EnumerationOptions& opt = {}) {
  detail::require_same_degree(f, psi);
  const int m = psi.m();
  if (box.m() != m) throw InputError("box has " + std::to_string(box.m()) + " blocks but psi has m = " + std::to_string(m));
  const std::size_t s = f.s();
  double filter_work = 0;
  for (int i = 0; i < m; ++i) filter_work += std::pow(static_cast<double>(box.side(i)), static_cast<double>(s));
  detail::require_budget(filter_work, opt, "box filtering");

  CompiledPolynomial cp(f.poly());
  std::vector<std::vector<IntVec>> lists(m);
  for (int i = 0; i < m; ++i) {
    const std::int64_t b = box.int_bound(i);
    const BigInt& n = psi.diagonal(i);
    std::vector<std::int64_t> bound(s, b);
    const bool use64 = cp.coefficients_fit_int64() && cp.max_abs_on_box(bound) < (BigInt(1) << 62) && fits_int64(n);
    const std::int64_t n64 = use64 ? n.convert_to<std::int64_t>() : 0;
    detail::for_each_in_cube(s, b, [&](const IntVec& x) {
      if (use64 ? cp(x.data()) == n64 : cp.eval_big(x.data()) == n) lists[i].push_back(x);
    });
    if (lists[i].empty()) return 0;
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return box.bounds[a] < box.bounds[b]; });
  double work = 1;
  for (int i = 0; i < m; ++i) work *= static_cast<double>(lists[i].size());
  detail::require_budget(work / std::max<double>(1.0, lists[order.back()].size()), opt, "boxed tuple search");
  ExpandedSystem sys = expand_system(f, m);
  std::vector<detail::Weighted> first;
  for (auto& v : lists[order[0]]) first.push_back({v, 1});
  return detail::TupleSearch(sys, psi, order, lists, std::move(first)).run(opt.threads);
}

/// N_C(P): X in Z^{s x m} C with every entry in [-P, P] and F(X t) = 0
/// identically in t. Rows of X = Y C range over the lattice Z^m C cut by
/// the cube; the preimage box for Y comes from C^{-1} in exact arithmetic.
inline Count count_lattice(const Form& f, const IntMatrix& c, double p, const EnumerationOptions& opt = {}) {
  const std::size_t m = c.rows();
  if (c.cols() != m || m < 1) throw InputError("count_lattice needs a square matrix C");
  if (determinant(c) == 0) throw InputError("count_lattice needs a nonsingular matrix C");
  if (!(p > 0)) throw InputError("height bound P must be positive");
  const std::size_t s = f.s();
  const auto height = static_cast<std::int64_t>(std::floor(p + 1e-12));
  RationalMatrix cinv = inverse(c);

  std::vector<std::int64_t> ybound(m);
  double box_points = 1;
  for (std::size_t k = 0; k < m; ++k) {
    Rational col = 0;
    for (std::size_t l = 0; l < m; ++l) col += abs(cinv(l, k));
    ybound[k] = floor_div(col * height).convert_to<std::int64_t>();
    box_points *= 2.0 * ybound[k] + 1;
  }
  detail::require_budget(box_points, opt, "lattice row preimage box");

  std::vector<IntVec> rows;
  IntVec y(m);
  std::function<void(std::size_t)> walk = [&](std::size_t k) {
    if (k == m) {
      IntVec x(m, 0);
      for (std::size_t j = 0; j < m; ++j) {
        BigInt acc = 0;
        for (std::size_t l = 0; l < m; ++l) acc += BigInt(y[l]) * c(l, j);
        if (abs(acc) > height) return;
        x[j] = acc.convert_to<std::int64_t>();
      }
      rows.push_back(std::move(x));
      return;
    }
    for (std::int64_t v = -ybound[k]; v <= ybound[k]; ++v) {
      y[k] = v;
      walk(k + 1);
    }
  };
  walk(0);

  detail::require_budget(std::pow(static_cast<double>(rows.size()), static_cast<double>(s)), opt,
                         "lattice matrix enumeration");
  ExpandedSystem sys = expand_system(f, static_cast<int>(m));
  CompiledSystem compiled(sys);
  std::vector<std::int64_t> vb(sys.num_vars(), height);
  const bool use64 = compiled.fits_int64_on_box(vb);

  const std::size_t chunks = std::min<std::size_t>(rows.size(), 256);
  std::vector<Count> partial(chunks, 0);
  parallel_for_chunks(chunks, opt.threads, [&](std::size_t ch) {
    auto [begin, end] = chunk_range(rows.size(), chunks, ch);
    IntVec xbar(sys.num_vars(), 0);
    std::vector<std::size_t> pick(s, 0);
    Count total = 0;
    auto set_row = [&](std::size_t n, const IntVec& row) {
      for (std::size_t i = 0; i < m; ++i) xbar[i * s + n] = row[i];
    };
    for (std::size_t first = begin; first < end; ++first) {
      set_row(0, rows[first]);
      std::function<void(std::size_t)> rec = [&](std::size_t n) {
        if (n == s) {
          for (std::size_t q = 0; q < compiled.size(); ++q) {
            if (use64 ? compiled[q](xbar.data()) != 0 : compiled[q].eval_big(xbar.data()) != 0) return;
          }
          ++total;
          return;
        }
        for (auto& row : rows) {
          set_row(n, row);
          rec(n + 1);
        }
      };
      rec(1);
    }
    partial[ch] = total;
  });
  Count sum = 0;
  for (Count v : partial) sum += v;
  return sum;
}

/// prod_{j in J} gamma_{j_1}...gamma_{j_d} and (prod_i gamma_i)^{rd/m}.
inline std::pair<BigInt, BigInt> gamma_product_identity(const std::vector<BigInt>& gammas, int d) {
  const int m = static_cast<int>(gammas.size());
  if (m < 1) throw InputError("gamma_product_identity needs at least one gamma");
  for (auto& g : gammas)
    if (g < 1) throw InputError("gamma_product_identity needs gamma_i >= 1");
  BigInt lhs = 1;
  auto indices = multi_index_set(m, d);
  for (auto& j : indices)
    for (int k : j.entries) lhs *= gammas[k];
  const std::size_t rd = indices.size() * static_cast<std::size_t>(d);
  if (rd % static_cast<std::size_t>(m) != 0) throw std::logic_error("r*d is not divisible by m");
  BigInt det = 1;
  for (auto& g : gammas) det *= g;
  return {lhs, ipow(det, static_cast<unsigned>(rd / m))};
}

} // namespace repcount
