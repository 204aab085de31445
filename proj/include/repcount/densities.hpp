#pragma once

#include "circle.hpp"
#include "expand.hpp"
#include "form.hpp"
#include "multi_index.hpp"
#include "parallel.hpp"
#include "psi.hpp"
#include "residues.hpp"
#include "rng.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace repcount {

enum class DensityMethod { Exact, Sampled, Quadrature, ClosedForm };

inline const char* to_string(DensityMethod m) {
  switch (m) {
  case DensityMethod::Exact: return "exact";
  case DensityMethod::Sampled: return "sampled";
  case DensityMethod::Quadrature: return "quadrature";
  case DensityMethod::ClosedForm: return "closed-form";
  }
  return "?";
}

struct DensityEstimate {
  double value = 0;
  DensityMethod method = DensityMethod::Exact;
  int level = 0;             // l for p-adic factors, Q_max for the series
  double eps = 0;            // slab half-width for the real density
  std::uint64_t samples = 0;
  double std_error = 0;
  std::optional<Rational> exact;
};

struct LocalOptions {
  unsigned threads = 1;
  double max_evaluations = 1e8;
};

namespace detail {

inline std::vector<BigInt> targets_in_order(const ExpandedSystem& sys, const TargetForm& psi) {
  if (psi.m() != sys.m() || psi.d() != sys.d()) throw InputError("psi does not match the system");
  std::vector<BigInt> out;
  for (auto& j : sys.indices()) out.push_back(psi[j]);
  return out;
}

inline std::int64_t prime_power(std::int64_t p, int l) {
  if (!is_prime(static_cast<std::uint64_t>(p))) throw InputError(std::to_string(p) + " is not prime");
  if (l < 1) throw InputError("level l must be at least 1");
  double approx = std::pow(static_cast<double>(p), l);
  if (approx > 1e9) throw BudgetExceeded("modulus p^l is too large", approx);
  return ipow64(p, static_cast<unsigned>(l));
}

inline std::vector<std::int64_t> residues(const std::vector<BigInt>& v, std::int64_t n) {
  std::vector<std::int64_t> out;
  for (auto& x : v) {
    BigInt t = x % n;
    if (t < 0) t += n;
    out.push_back(t.convert_to<std::int64_t>());
  }
  return out;
}

/// Number of y in (Z/N)^nv, N = p^l, with polys(y) = targets mod N. The
/// variables split into independent groups; the count is the target
/// coefficient of the convolution of per-group value histograms over
/// (Z/N)^r, evaluated with number-theoretic transforms modulo several
/// primes and recombined by CRT.
inline BigInt local_solution_count(const std::vector<Polynomial>& polys, std::size_t nv,
                                   const std::vector<BigInt>& targets, std::int64_t p, int l,
                                   const LocalOptions& opt) {
  const std::int64_t n = prime_power(p, l);
  const std::size_t r = polys.size();
  const auto t = residues(targets, n);
  auto groups = split_variable_groups(polys, nv);

  if (groups.size() == 1) {
    const double work = std::pow(static_cast<double>(n), static_cast<double>(nv)) * static_cast<double>(r);
    if (work > opt.max_evaluations) throw BudgetExceeded("local density count exceeds the evaluation limit", work);
    std::vector<CompiledPolynomial> cp;
    for (auto& q : polys) cp.push_back(CompiledPolynomial(q).reduced_mod(n));
    const std::uint64_t total = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), nv)));
    const std::size_t chunks = std::min<std::uint64_t>(64, total);
    std::vector<std::uint64_t> partial(chunks, 0);
    parallel_for_chunks(chunks, opt.threads, [&](std::size_t c) {
      auto [begin, end] = chunk_range(total, chunks, c);
      std::vector<std::int64_t> y(nv);
      std::uint64_t rest = begin;
      for (std::size_t v = nv; v-- > 0;) {
        y[v] = static_cast<std::int64_t>(rest % n);
        rest /= n;
      }
      for (std::uint64_t it = begin; it < end; ++it) {
        bool ok = true;
        for (std::size_t j = 0; j < r && ok; ++j) ok = cp[j].eval_mod(y.data(), n) == t[j];
        if (ok) ++partial[c];
        for (std::size_t v = nv; v-- > 0;) {
          if (++y[v] < n) break;
          y[v] = 0;
        }
      }
    });
    BigInt sum = 0;
    for (auto v : partial) sum += v;
    return sum;
  }

  std::map<std::string, std::pair<const VariableGroup*, unsigned>> distinct;
  for (auto& g : groups) {
    auto [it, fresh] = distinct.try_emplace(g.key, &g, 0u);
    ++it->second.second;
  }
  const double cells_d = std::pow(static_cast<double>(n), static_cast<double>(r));
  const double transform = cells_d * static_cast<double>(n) * static_cast<double>(r);
  const double log2_total = static_cast<double>(nv) * std::log2(static_cast<double>(n));
  const std::size_t moduli_count = static_cast<std::size_t>(log2_total / 30.0) + 1;
  const double work = residue_work(groups, n) * static_cast<double>(r) +
                      transform * static_cast<double>(distinct.size() * moduli_count);
  if (cells_d > 2e7 || work > opt.max_evaluations)
    throw BudgetExceeded("local density count exceeds the evaluation limit", work);
  const auto cells = static_cast<std::size_t>(cells_d);

  std::vector<std::vector<std::uint64_t>> hists;
  std::vector<unsigned> mult;
  for (auto& [key, entry] : distinct) {
    hists.push_back(residue_histogram(*entry.first, n));
    mult.push_back(entry.second);
  }

  // exponent of w^{-<a, t>} for every cell a
  std::vector<std::uint32_t> dot(cells);
  {
    std::vector<std::int64_t> a(r, 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < r; ++j) s = (s + a[j] * t[j]) % n;
      dot[idx] = static_cast<std::uint32_t>((n - s) % n);
      for (std::size_t j = 0; j < r; ++j) {
        if (++a[j] < n) break;
        a[j] = 0;
      }
    }
  }

  const auto moduli = ModularTransform::moduli(static_cast<std::uint64_t>(n), moduli_count);
  std::vector<std::uint64_t> residue_of_count;
  for (std::uint64_t mod : moduli) {
    const std::uint64_t w = ModularTransform::root_of_order(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p), mod);
    ModularTransform tr(static_cast<std::uint64_t>(n), mod, w);
    std::vector<std::uint64_t> prod(cells, 1);
    for (std::size_t g = 0; g < hists.size(); ++g) {
      std::vector<std::uint64_t> a(cells);
      for (std::size_t i = 0; i < cells; ++i) a[i] = hists[g][i] % mod;
      tr.forward(a, r);
      for (std::size_t i = 0; i < cells; ++i) prod[i] = mulmod(prod[i], powmod(a[i], mult[g], mod), mod);
    }
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < cells; ++i) acc = (acc + mulmod(prod[i], tr.root_power(dot[i]), mod)) % mod;
    const std::uint64_t inv_cells = powmod(static_cast<std::uint64_t>(cells % mod), mod - 2, mod);
    residue_of_count.push_back(mulmod(acc, inv_cells, mod));
  }

  BigInt value = 0, modulus = 1;
  for (std::size_t k = 0; k < moduli.size(); ++k) {
    const BigInt mk = moduli[k];
    // value + modulus * u = residue (mod mk)
    BigInt diff = (BigInt(residue_of_count[k]) - value % mk + mk) % mk;
    const std::uint64_t inv = powmod(static_cast<std::uint64_t>(modulus % mk), moduli[k] - 2, moduli[k]);
    const BigInt u = diff * inv % mk;
    value += modulus * u;
    modulus *= mk;
  }
  return value;
}

inline DensityEstimate exact_estimate(const Rational& v, int level) {
  DensityEstimate d;
  d.exact = v;
  d.value = to_double(v);
  d.method = DensityMethod::Exact;
  d.level = level;
  return d;
}

} // namespace detail

/// (p^l)^{r - ms} #{xbar mod p^l : Phi_j(xbar) = n_j mod p^l for all j}.
inline DensityEstimate chi_p_exact(const ExpandedSystem& sys, const TargetForm& psi, std::int64_t p, int l,
                                   const LocalOptions& opt = {}) {
  const BigInt count = detail::local_solution_count(sys.polys(), sys.num_vars(), detail::targets_in_order(sys, psi),
                                                    p, l, opt);
  const BigInt n = ipow(BigInt(p), static_cast<unsigned>(l));
  const Rational v = Rational(count) / Rational(ipow(n, static_cast<unsigned>(sys.num_vars() - sys.r())));
  return detail::exact_estimate(v, l);
}

/// (p^l)^r times the fraction of uniform xbar mod p^l solving all congruences.
inline DensityEstimate chi_p_sampled(const ExpandedSystem& sys, const TargetForm& psi, std::int64_t p, int l,
                                     std::uint64_t samples, std::uint64_t seed, const LocalOptions& opt = {}) {
  if (samples < 10000) throw InputError("chi_p_sampled needs at least 10^4 samples");
  const std::int64_t n = detail::prime_power(p, l);
  const auto t = detail::residues(detail::targets_in_order(sys, psi), n);
  const CompiledSystem cs = CompiledSystem(sys).reduced_mod(n);
  const std::size_t nv = sys.num_vars();
  const std::size_t shards = 64;
  std::vector<std::uint64_t> hits(shards, 0);
  parallel_for_chunks(shards, opt.threads, [&](std::size_t c) {
    auto [begin, end] = chunk_range(samples, shards, c);
    CounterRng rng("chi_p_sampled", seed, c);
    std::vector<std::int64_t> y(nv);
    for (std::uint64_t it = begin; it < end; ++it) {
      for (auto& v : y) v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
      bool ok = true;
      for (std::size_t j = 0; j < cs.size() && ok; ++j) ok = cs[j].eval_mod(y.data(), n) == t[j];
      if (ok) ++hits[c];
    }
  });
  std::uint64_t h = 0;
  for (auto v : hits) h += v;
  const double f = static_cast<double>(h) / static_cast<double>(samples);
  const double scale = std::pow(static_cast<double>(n), static_cast<double>(sys.r()));
  DensityEstimate d;
  d.method = DensityMethod::Sampled;
  d.level = l;
  d.samples = samples;
  d.value = scale * f;
  d.std_error = scale * std::sqrt(f * (1 - f) / static_cast<double>(samples));
  return d;
}

/// Level l per prime: `small_level` for p <= small_prime_max, else `default_level`.
struct LevelSchedule {
  int small_prime_max = 5;
  int small_level = 2;
  int default_level = 1;
  std::map<std::int64_t, int> overrides;

  int level(std::int64_t p) const {
    if (auto it = overrides.find(p); it != overrides.end()) return it->second;
    return p <= small_prime_max ? small_level : default_level;
  }
};

struct EulerProduct {
  DensityEstimate total;
  bool local_obstruction = false;
  std::vector<std::pair<std::int64_t, DensityEstimate>> factors;
};

/// prod_{p <= p_max} chi_p with exact factors.
inline EulerProduct euler_product(const ExpandedSystem& sys, const TargetForm& psi, int p_max,
                                  const LevelSchedule& schedule = {}, const LocalOptions& opt = {}) {
  EulerProduct out;
  out.total.value = 1;
  out.total.exact = Rational(1);
  out.total.level = p_max;
  double rel_var = 0;
  for (int p : primes_up_to(p_max)) {
    DensityEstimate f = chi_p_exact(sys, psi, p, schedule.level(p), opt);
    out.total.value *= f.value;
    if (f.exact && out.total.exact) *out.total.exact *= *f.exact;
    if (f.method != DensityMethod::Exact) {
      out.total.method = DensityMethod::Sampled;
      out.total.exact.reset();
    }
    if (f.value == 0) out.local_obstruction = true;
    else rel_var += std::pow(f.std_error / f.value, 2);
    out.factors.emplace_back(p, f);
  }
  if (out.local_obstruction) out.total.value = 0;
  out.total.std_error = std::abs(out.total.value) * std::sqrt(rel_var);
  return out;
}

/// sum_{q <= Q} q^{-ms} sum_{a mod q, gcd(a, q) = 1} S_q(a) e(-a.n/q).
inline DensityEstimate singular_series_truncated(const ExpandedSystem& sys, const TargetForm& psi, int q_max,
                                                 const LocalOptions& opt = {}) {
  if (q_max < 1) throw InputError("Q_max must be at least 1");
  const auto targets = detail::targets_in_order(sys, psi);
  const std::size_t r = sys.r(), nv = sys.num_vars();
  auto groups = split_variable_groups(sys.polys(), nv);
  std::map<std::string, std::pair<const VariableGroup*, unsigned>> distinct;
  for (auto& g : groups) {
    auto [it, fresh] = distinct.try_emplace(g.key, &g, 0u);
    ++it->second.second;
  }
  double work = 0;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const double cells = std::pow(static_cast<double>(q), static_cast<double>(r));
    work += residue_work(groups, q) * static_cast<double>(r) +
            cells * static_cast<double>(q * r) * static_cast<double>(distinct.size());
    if (cells > 2e7) work = std::numeric_limits<double>::infinity();
  }
  if (work > opt.max_evaluations) throw BudgetExceeded("singular series exceeds the evaluation limit", work);

  detail::ComplexSum total;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const auto t = detail::residues(targets, q);
    const auto table = phase_table(q);
    const auto cells = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(q), static_cast<double>(r))));
    std::vector<Complex> prod(cells, Complex(1, 0));
    for (auto& [key, entry] : distinct) {
      auto hist = residue_histogram(*entry.first, q);
      std::vector<Complex> a(hist.begin(), hist.end());
      std::vector<Complex> line(q), out(q);
      std::size_t stride = 1;
      for (std::size_t axis = 0; axis < r; ++axis) {
        const std::size_t block = stride * q;
        for (std::size_t base = 0; base < cells; base += block)
          for (std::size_t off = 0; off < stride; ++off) {
            for (std::int64_t k = 0; k < q; ++k) line[k] = a[base + off + k * stride];
            for (std::int64_t f = 0; f < q; ++f) {
              detail::ComplexSum acc;
              for (std::int64_t k = 0; k < q; ++k)
                if (line[k] != Complex(0, 0)) acc.add(line[k] * table[(f * k) % q]);
              out[f] = acc.value();
            }
            for (std::int64_t k = 0; k < q; ++k) a[base + off + k * stride] = out[k];
          }
        stride = block;
      }
      for (std::size_t i = 0; i < cells; ++i) prod[i] *= std::pow(a[i], static_cast<int>(entry.second));
    }
    const double norm = std::pow(static_cast<double>(q), static_cast<double>(nv));
    std::vector<std::int64_t> a(r, 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      std::int64_t g = q, dot = 0;
      for (std::size_t j = 0; j < r; ++j) {
        g = std::gcd(g, a[j]);
        dot = (dot + a[j] * t[j]) % q;
      }
      if (g == 1) total.add(prod[idx] * table[(q - dot) % q] / norm);
      for (std::size_t j = 0; j < r; ++j) {
        if (++a[j] < q) break;
        a[j] = 0;
      }
    }
  }
  const Complex v = total.value();
  if (std::abs(v.imag()) > 1e-6 * std::max(1.0, std::abs(v.real())))
    throw Error("singular series has a non-negligible imaginary part");
  DensityEstimate d;
  d.value = v.real();
  d.method = DensityMethod::Exact;
  d.level = q_max;
  return d;
}

/// Normalized targets n~_j in system order.
inline std::vector<double> normalized_targets(const ExpandedSystem& sys, const TargetForm& psi) {
  if (psi.m() != sys.m() || psi.d() != sys.d()) throw InputError("psi does not match the system");
  auto nt = normalize_psi(psi);
  std::vector<double> out;
  for (auto& j : sys.indices()) out.push_back(nt.at(j));
  return out;
}

struct SlabOptions {
  unsigned threads = 1;
};

/// 2^{ms} (fraction of xi in [-1,1]^{ms} with |Phi_j(xi) - n~_j| <= eps) / (2 eps)^r.
inline DensityEstimate chi_inf_slab(const ExpandedSystem& sys, std::span<const double> ntilde, double eps,
                                    std::uint64_t samples, std::uint64_t seed, const SlabOptions& opt = {}) {
  detail::require_alpha(sys, ntilde.size(), "normalized target");
  if (!(eps > 0)) throw InputError("eps must be positive");
  if (samples < 100000) throw InputError("chi_inf_slab needs at least 10^5 samples");
  std::vector<CompiledPolynomial> polys;
  for (auto& p : sys.polys()) polys.emplace_back(p);
  // diagonal equations first: they reject most samples
  std::vector<std::size_t> order(polys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_partition(order.begin(), order.end(), [&](std::size_t j) { return sys.indices()[j].is_diagonal(); });
  const std::size_t nv = sys.num_vars();
  const std::size_t shards = 64;
  std::vector<std::uint64_t> hits(shards, 0);
  parallel_for_chunks(shards, opt.threads, [&](std::size_t c) {
    auto [begin, end] = chunk_range(samples, shards, c);
    CounterRng rng("chi_inf_slab", seed, c);
    std::vector<double> x(nv);
    for (std::uint64_t it = begin; it < end; ++it) {
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      bool ok = true;
      for (std::size_t k = 0; k < order.size() && ok; ++k) {
        const std::size_t j = order[k];
        ok = std::abs(polys[j].eval_real(x.data()) - ntilde[j]) <= eps;
      }
      if (ok) ++hits[c];
    }
  });
  std::uint64_t h = 0;
  for (auto v : hits) h += v;
  const double n = static_cast<double>(samples);
  const double scale = std::pow(2.0, static_cast<double>(nv)) / std::pow(2 * eps, static_cast<double>(sys.r()));
  const double f = static_cast<double>(h) / n;
  DensityEstimate d;
  d.method = DensityMethod::Sampled;
  d.eps = eps;
  d.samples = samples;
  d.value = scale * f;
  d.std_error = h == 0 ? scale * 3.0 / n : scale * std::sqrt(f * (1 - f) / n);
  return d;
}

/// (sqrt pi)^{ms - m(m+1)/2} prod_{j=m+1}^{s} Gamma((j-m)/2)^{-1}.
inline double raghavan_constant(int s, int m) {
  if (m < 1 || s <= m) throw InputError("raghavan_constant needs s > m >= 1");
  double log_v = (m * s - m * (m + 1) / 2.0) * 0.5 * std::log(std::numbers::pi);
  for (int j = m + 1; j <= s; ++j) log_v -= std::lgamma((j - m) / 2.0);
  return std::exp(log_v);
}

/// (det A)^{-m/2} (det B / prod b_ii)^{(s-m-1)/2} c_{s,m}.
inline double chi_inf_closed_quadratic(const RationalMatrix& a, const RationalMatrix& b) {
  const auto s = static_cast<int>(a.rows()), m = static_cast<int>(b.rows());
  if (!a.is_symmetric() || !b.is_symmetric()) throw InputError("Gram matrices must be symmetric");
  if (!leading_minors_positive(a) || !leading_minors_positive(b)) throw InputError("Gram matrices must be positive definite");
  if (s < m + 2) throw InputError("closed form needs s >= m + 2");
  Rational diag = 1;
  for (int i = 0; i < m; ++i) diag *= b(i, i);
  const double det_a = to_double(determinant(a));
  const double ratio = to_double(determinant(b) / diag);
  return std::pow(det_a, -m / 2.0) * std::pow(ratio, (s - m - 1) / 2.0) * raghavan_constant(s, m);
}

struct DensityConfig {
  int p_max = 53;
  LevelSchedule schedule;
  double eps = 0.05;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double max_evaluations = 1e8;
  bool check_half_eps = false;
};

struct MainTermReport {
  double magnitude_factor = 0;  // <psi>^{(ms - rd)/(md)}
  double boxed_factor = 0;      // (prod P_i)^{s - rd/m}, P_i = n_i^{1/d}
  DensityEstimate chi_inf;
  std::optional<DensityEstimate> chi_inf_half;
  EulerProduct euler;
  double prediction = 0;
  double prediction_std_error = 0;
};

/// <psi>^{(ms - rd)/(md)} chi_inf prod_p chi_p.
inline MainTermReport main_term(const Form& f, const TargetForm& psi, const DensityConfig& cfg) {
  if (f.d() != psi.d()) throw InputError("F and psi have different degrees");
  const BigInt mag = magnitude(psi);
  const ExpandedSystem sys = expand_system(f, psi.m());
  const double s = static_cast<double>(f.s()), m = psi.m(), r = static_cast<double>(psi.r()), d = f.d();
  MainTermReport rep;
  rep.magnitude_factor = std::exp(std::log(to_double(mag)) * (m * s - r * d) / (m * d));
  double log_p = 0;
  for (auto& n : psi.diagonals()) log_p += std::log(to_double(n)) / d;
  rep.boxed_factor = std::exp(log_p * (s - r * d / m));
  const auto nt = normalized_targets(sys, psi);
  rep.chi_inf = chi_inf_slab(sys, nt, cfg.eps, cfg.samples, cfg.seed, SlabOptions{cfg.threads});
  if (cfg.check_half_eps)
    rep.chi_inf_half = chi_inf_slab(sys, nt, cfg.eps / 2, cfg.samples, cfg.seed + 1, SlabOptions{cfg.threads});
  rep.euler = euler_product(sys, psi, cfg.p_max, cfg.schedule, LocalOptions{cfg.threads, cfg.max_evaluations});
  rep.prediction = rep.magnitude_factor * rep.chi_inf.value * rep.euler.total.value;
  double rel = 0;
  if (rep.chi_inf.value > 0) rel += std::pow(rep.chi_inf.std_error / rep.chi_inf.value, 2);
  if (rep.euler.total.value > 0) rel += std::pow(rep.euler.total.std_error / rep.euler.total.value, 2);
  rep.prediction_std_error = rep.prediction * std::sqrt(rel);
  if (rep.prediction == 0) rep.prediction_std_error = rep.magnitude_factor * rep.chi_inf.std_error * rep.euler.total.value;
  return rep;
}

/// x_i^T A x_j for i <= j, in multi-index order, in ms variables.
inline std::vector<Polynomial> raghavan_system(const IntMatrix& a, int m) {
  const std::size_t s = a.rows();
  if (a.cols() != s || !a.is_symmetric()) throw InputError("A must be a symmetric square matrix");
  std::vector<Polynomial> out;
  for (auto& j : multi_index_set(m, 2)) {
    Polynomial p(static_cast<std::size_t>(m) * s);
    const int bi = j.entries[0], bj = j.entries[1];
    for (std::size_t k = 0; k < s; ++k)
      for (std::size_t l = 0; l < s; ++l) {
        if (a(k, l) == 0) continue;
        Exponents e(static_cast<std::size_t>(m) * s, 0);
        ++e[bi * s + k];
        ++e[bj * s + l];
        p.add_term(e, a(k, l));
      }
    out.push_back(std::move(p));
  }
  return out;
}

/// (p^l)^{m(m+1)/2 - ms} #{X mod p^l : X^T A X = B mod p^l}.
inline DensityEstimate chi_p_raghavan(const IntMatrix& a, const IntMatrix& b, std::int64_t p, int l,
                                      const LocalOptions& opt = {}) {
  const int m = static_cast<int>(b.rows());
  if (b.cols() != b.rows() || !b.is_symmetric()) throw InputError("B must be a symmetric square matrix");
  const auto polys = raghavan_system(a, m);
  std::vector<BigInt> targets;
  for (auto& j : multi_index_set(m, 2)) targets.push_back(b(j.entries[0], j.entries[1]));
  const std::size_t nv = static_cast<std::size_t>(m) * a.rows();
  const BigInt count = detail::local_solution_count(polys, nv, targets, p, l, opt);
  const BigInt n = ipow(BigInt(p), static_cast<unsigned>(l));
  const Rational v = Rational(count) / Rational(ipow(n, static_cast<unsigned>(nv - polys.size())));
  return detail::exact_estimate(v, l);
}

/// c_{s,m} (det A)^{-m/2} (det B)^{(s-m-1)/2} prod chi_p.
inline double raghavan_main_term(const IntMatrix& a, const IntMatrix& b, std::span<const double> chi_p_values) {
  const auto s = static_cast<int>(a.rows()), m = static_cast<int>(b.rows());
  if (!leading_minors_positive(a) || !leading_minors_positive(b)) throw InputError("Gram matrices must be positive definite");
  double prod = 1;
  for (double v : chi_p_values) prod *= v;
  if (prod == 0) return 0;
  return raghavan_constant(s, m) * std::pow(to_double(determinant(a)), -m / 2.0) *
         std::pow(to_double(determinant(b)), (s - m - 1) / 2.0) * prod;
}

} // namespace repcount
