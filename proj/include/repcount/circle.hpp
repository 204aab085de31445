#pragma once

#include "enumeration.hpp"
#include "expand.hpp"
#include "multi_index.hpp"
#include "parallel.hpp"
#include "residues.hpp"
#include "rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace repcount {

using Complex = std::complex<double>;

struct SumOptions {
  unsigned threads = 1;
  double max_evaluations = 1e8;
};

namespace detail {

/// Neumaier-compensated complex accumulator.
class ComplexSum {
public:
  void add(Complex z) {
    add(re_, cre_, z.real());
    add(im_, cim_, z.imag());
  }
  void add(const ComplexSum& o) { add(o.value()); }
  Complex value() const { return {re_ + cre_, im_ + cim_}; }

private:
  static void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double re_ = 0, cre_ = 0, im_ = 0, cim_ = 0;
};

inline Complex e(double x) {
  const double f = x - std::floor(x);
  return std::polar(1.0, 2 * std::numbers::pi * f);
}

inline void require_alpha(const ExpandedSystem& sys, std::size_t n, const char* what) {
  if (n != sys.r())
    throw InputError(std::string(what) + " has " + std::to_string(n) + " entries but r = " + std::to_string(sys.r()));
}

inline void require_box(const ExpandedSystem& sys, const Box& box) {
  if (box.m() != sys.m())
    throw InputError("box has " + std::to_string(box.m()) + " blocks but the system has m = " + std::to_string(sys.m()));
}

constexpr std::size_t kSumChunks = 64;

/// Sum of e(phase(Phi(x))) over the lattice points of the box. `phase`
/// receives the r integer values Phi_j(x) and returns a real phase.
template <class Phase>
Complex box_phase_sum(const ExpandedSystem& sys, const Box& box, const SumOptions& opt, Phase&& phase) {
  require_box(sys, box);
  const auto bounds = box.variable_bounds(sys.s());
  const double points = box.lattice_points(sys.s());
  if (points * static_cast<double>(sys.r()) > opt.max_evaluations)
    throw BudgetExceeded("exponential sum exceeds the evaluation limit", points);
  CompiledSystem cs(sys);
  if (!cs.fits_int64_on_box(bounds)) throw InputError("polynomial values exceed the 64-bit range on this box");
  const std::uint64_t total = box_size(bounds);
  const std::size_t chunks = std::min<std::uint64_t>(kSumChunks, total);
  std::vector<ComplexSum> partial(chunks);
  parallel_for_chunks(chunks, opt.threads, [&](std::size_t c) {
    auto [begin, end] = chunk_range(total, chunks, c);
    std::vector<std::int64_t> vals(cs.size());
    for_each_in_box(bounds, begin, end, [&](const IntVec& x) {
      for (std::size_t j = 0; j < cs.size(); ++j) vals[j] = cs[j](x.data());
      partial[c].add(e(phase(vals)));
    });
  });
  ComplexSum sum;
  for (auto& p : partial) sum.add(p);
  return sum.value();
}

inline double frac_product(double a, std::int64_t v) {
  const long double t = static_cast<long double>(a) * static_cast<long double>(v);
  return static_cast<double>(t - std::floor(t));
}

} // namespace detail

/// T(alpha; P) = sum over the box of e(sum_j alpha_j Phi_j(x)).
inline Complex exponential_sum(const ExpandedSystem& sys, std::span<const double> alpha, const Box& box,
                               const SumOptions& opt = {}) {
  detail::require_alpha(sys, alpha.size(), "alpha");
  return detail::box_phase_sum(sys, box, opt, [&](const std::vector<std::int64_t>& v) {
    double t = 0;
    for (std::size_t j = 0; j < v.size(); ++j) t += detail::frac_product(alpha[j], v[j]);
    return t;
  });
}

/// T at alpha = a/q + beta with the rational part reduced exactly.
inline Complex exponential_sum_at(const ExpandedSystem& sys, std::span<const std::int64_t> a, std::int64_t q,
                                  std::span<const double> beta, const Box& box, const SumOptions& opt = {}) {
  detail::require_alpha(sys, a.size(), "a");
  detail::require_alpha(sys, beta.size(), "beta");
  if (q < 1) throw InputError("modulus q must be positive");
  return detail::box_phase_sum(sys, box, opt, [&](const std::vector<std::int64_t>& v) {
    __int128 num = 0;
    double t = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      num = (num + static_cast<__int128>(a[j]) * v[j]) % q;
      t += detail::frac_product(beta[j], v[j]);
    }
    if (num < 0) num += q;
    return t + static_cast<double>(num) / static_cast<double>(q);
  });
}

/// Smallest modulus for which counting by orthogonality on the box is exact:
/// one more than the largest |Phi_j - n_j| on the box.
inline BigInt fourier_modulus(const ExpandedSystem& sys, const TargetForm& psi, const Box& box) {
  detail::require_box(sys, box);
  const auto bounds = box.variable_bounds(sys.s());
  BigInt q = 1;
  for (std::size_t j = 0; j < sys.r(); ++j) {
    auto [lo, hi] = CompiledPolynomial(sys.polys()[j]).range_on_box(bounds);
    const BigInt& n = psi[sys.indices()[j]];
    q = std::max(q, std::max<BigInt>(abs(lo - n) + 1, abs(hi - n) + 1));
  }
  return q;
}

/// (1/Q^r) sum_{a mod Q} T(a/Q) e(-n.a/Q), with T(a/Q) obtained from the
/// histogram of Phi mod Q by a length-Q transform along each axis.
inline Count fourier_inversion_count(const ExpandedSystem& sys, const TargetForm& psi, const Box& box,
                                     std::int64_t q = 0, const SumOptions& opt = {}) {
  if (psi.m() != sys.m() || psi.d() != sys.d()) throw InputError("psi does not match the system");
  const BigInt qmin = fourier_modulus(sys, psi, box);
  if (q == 0) {
    if (!fits_int64(qmin)) throw BudgetExceeded("modulus Q exceeds the configured limit", to_double(qmin));
    q = qmin.convert_to<std::int64_t>();
  } else if (q < qmin) {
    throw InputError("Q = " + std::to_string(q) + " is too small; need at least " + qmin.str());
  }
  const std::size_t r = sys.r();
  const double cells = std::pow(static_cast<double>(q), static_cast<double>(r));
  const double work = cells * static_cast<double>(q) * static_cast<double>(r);
  if (cells > 4e6 || work > opt.max_evaluations)
    throw BudgetExceeded("modulus Q = " + std::to_string(q) + " exceeds the configured limit", work);
  const auto bounds = box.variable_bounds(sys.s());
  const double points = box.lattice_points(sys.s());
  if (points * static_cast<double>(r) > opt.max_evaluations)
    throw BudgetExceeded("box exceeds the evaluation limit", points);
  CompiledSystem cs(sys);
  if (!cs.fits_int64_on_box(bounds)) throw InputError("polynomial values exceed the 64-bit range on this box");

  std::vector<Complex> t(static_cast<std::size_t>(cells), Complex(0, 0));
  detail::for_each_in_box(bounds, 0, detail::box_size(bounds), [&](const IntVec& x) {
    std::size_t idx = 0, stride = 1;
    for (std::size_t j = 0; j < r; ++j) {
      std::int64_t v = cs[j](x.data()) % q;
      if (v < 0) v += q;
      idx += static_cast<std::size_t>(v) * stride;
      stride *= static_cast<std::size_t>(q);
    }
    t[idx] += 1.0;
  });

  const auto table = phase_table(q);
  std::vector<Complex> line(q), out(q);
  std::size_t stride = 1;
  for (std::size_t axis = 0; axis < r; ++axis) {
    const std::size_t block = stride * q;
    for (std::size_t base = 0; base < t.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::int64_t k = 0; k < q; ++k) line[k] = t[base + off + k * stride];
        for (std::int64_t f = 0; f < q; ++f) {
          detail::ComplexSum acc;
          for (std::int64_t k = 0; k < q; ++k)
            if (line[k] != Complex(0, 0)) acc.add(line[k] * table[(f * k) % q]);
          out[f] = acc.value();
        }
        for (std::int64_t k = 0; k < q; ++k) t[base + off + k * stride] = out[k];
      }
    stride = block;
  }

  std::vector<std::int64_t> n(r);
  for (std::size_t j = 0; j < r; ++j) {
    BigInt v = psi[sys.indices()[j]] % q;
    if (v < 0) v += q;
    n[j] = v.convert_to<std::int64_t>();
  }
  detail::ComplexSum total;
  std::vector<std::int64_t> a(r, 0);
  for (std::size_t idx = 0; idx < t.size(); ++idx) {
    std::int64_t dot = 0;
    for (std::size_t j = 0; j < r; ++j) dot = (dot + a[j] * n[j]) % q;
    total.add(t[idx] * table[(q - dot) % q]);
    for (std::size_t j = 0; j < r; ++j) {
      if (++a[j] < q) break;
      a[j] = 0;
    }
  }
  const double count = total.value().real() / cells;
  return static_cast<Count>(std::llround(count));
}

namespace detail {

/// Sum over y mod q of e(G(y)/q) for one polynomial G, factored over
/// variable groups.
inline Complex complete_sum(const Polynomial& g, std::int64_t q, double limit) {
  auto groups = split_variable_groups({g}, g.num_vars());
  if (residue_work(groups, q) > limit)
    throw BudgetExceeded("Gauss sum exceeds the evaluation limit", residue_work(groups, q));
  const auto table = phase_table(q);
  std::map<std::string, Complex> cache;
  Complex total(1, 0);
  for (auto& grp : groups) {
    auto [it, fresh] = cache.try_emplace(grp.key);
    if (fresh) {
      auto hist = residue_histogram(grp, q);
      ComplexSum acc;
      for (std::int64_t k = 0; k < q; ++k)
        if (hist[k]) acc.add(static_cast<double>(hist[k]) * table[k]);
      it->second = acc.value();
    }
    total *= it->second;
  }
  return total;
}

} // namespace detail

/// S_q(a) = sum over xbar mod q of e(sum_j a_j Phi_j(xbar) / q).
inline Complex gauss_sum(const ExpandedSystem& sys, std::span<const std::int64_t> a, std::int64_t q,
                         const SumOptions& opt = {}) {
  detail::require_alpha(sys, a.size(), "a");
  if (q < 1) throw InputError("modulus q must be positive");
  for (auto v : a)
    if (v < 0 || v >= q) throw InputError("residues a_j must satisfy 0 <= a_j < q");
  Polynomial g(sys.num_vars());
  for (std::size_t j = 0; j < sys.r(); ++j)
    if (a[j]) g += sys.polys()[j] * BigInt(a[j]);
  if (g.terms().empty()) return Complex(std::pow(static_cast<double>(q), static_cast<double>(sys.num_vars())), 0);
  return detail::complete_sum(g, q, opt.max_evaluations);
}

enum class IntegralMethod { Quadrature, MonteCarlo };

inline const char* to_string(IntegralMethod m) {
  return m == IntegralMethod::Quadrature ? "quadrature" : "montecarlo";
}

struct IntegralOptions {
  IntegralMethod method = IntegralMethod::Quadrature;
  double rel_tol = 1e-6;  // error target relative to the box volume
  double max_evaluations = 2e7;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ComplexEstimate {
  Complex value;
  double error = 0;
  std::uint64_t evaluations = 0;
};

namespace detail {

inline Complex tensor_gauss(const std::vector<CompiledPolynomial>& polys, std::span<const double> beta,
                            const std::vector<double>& half_width, int panels, unsigned threads) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  const std::size_t dims = half_width.size();
  std::vector<std::vector<double>> node(dims), weight(dims);
  for (std::size_t v = 0; v < dims; ++v) {
    const double h = 2 * half_width[v] / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = -half_width[v] + (p + 0.5) * h;
      for (std::size_t k = 0; k < xs.size(); ++k)
        for (double sgn : {-1.0, 1.0}) {
          node[v].push_back(mid + sgn * xs[k] * h / 2);
          weight[v].push_back(ws[k] * h / 2);
        }
    }
  }
  const std::size_t per_axis = node[0].size();
  std::uint64_t total = 1;
  for (std::size_t v = 0; v < dims; ++v) total *= per_axis;
  const std::size_t chunks = std::min<std::uint64_t>(kSumChunks, total);
  std::vector<ComplexSum> partial(chunks);
  parallel_for_chunks(chunks, threads, [&](std::size_t c) {
    auto [begin, end] = chunk_range(total, chunks, c);
    std::vector<std::size_t> idx(dims);
    std::uint64_t rest = begin;
    for (std::size_t v = dims; v-- > 0;) {
      idx[v] = rest % per_axis;
      rest /= per_axis;
    }
    std::vector<double> x(dims);
    for (std::uint64_t it = begin; it < end; ++it) {
      double w = 1;
      for (std::size_t v = 0; v < dims; ++v) {
        x[v] = node[v][idx[v]];
        w *= weight[v][idx[v]];
      }
      double phase = 0;
      for (std::size_t j = 0; j < polys.size(); ++j)
        if (beta[j] != 0) phase += beta[j] * polys[j].eval_real(x.data());
      partial[c].add(w * e(phase));
      for (std::size_t v = dims; v-- > 0;) {
        if (++idx[v] < per_axis) break;
        idx[v] = 0;
      }
    }
  });
  ComplexSum sum;
  for (auto& p : partial) sum.add(p);
  return sum.value();
}

} // namespace detail

/// v_P(beta) = integral over prod_i [-P_i, P_i]^s of e(sum_j beta_j Phi_j).
/// Quadrature doubles the panel count of a tensor 10-point Gauss-Legendre
/// rule until consecutive levels agree; Monte Carlo reports its standard
/// error.
inline ComplexEstimate oscillatory_integral(const ExpandedSystem& sys, std::span<const double> beta,
                                            const Box& box, const IntegralOptions& opt = {}) {
  detail::require_alpha(sys, beta.size(), "beta");
  detail::require_box(sys, box);
  const std::size_t dims = sys.num_vars();
  std::vector<CompiledPolynomial> polys;
  for (auto& p : sys.polys()) polys.emplace_back(p);
  std::vector<double> half;
  for (int i = 0; i < box.m(); ++i) half.insert(half.end(), sys.s(), box.bounds[i]);
  const double volume = box.volume(sys.s());
  const double target = opt.rel_tol * volume;

  if (opt.method == IntegralMethod::Quadrature) {
    ComplexEstimate out;
    std::optional<Complex> previous;
    for (int panels = 1;; panels *= 2) {
      const double evals = std::pow(10.0 * panels, static_cast<double>(dims));
      if (static_cast<double>(out.evaluations) + evals > opt.max_evaluations)
        throw BudgetExceeded("quadrature did not reach the error target within the evaluation budget",
                             static_cast<double>(out.evaluations) + evals);
      Complex value = detail::tensor_gauss(polys, beta, half, panels, opt.threads);
      out.evaluations += static_cast<std::uint64_t>(evals);
      if (previous) {
        out.value = value;
        out.error = std::abs(value - *previous);
        if (out.error <= target) return out;
      }
      previous = value;
    }
  }

  const auto samples = static_cast<std::uint64_t>(opt.max_evaluations);
  const std::size_t shards = std::min<std::uint64_t>(detail::kSumChunks, std::max<std::uint64_t>(samples, 1));
  struct Moments {
    detail::ComplexSum sum;
    double sq = 0;
  };
  std::vector<Moments> partial(shards);
  parallel_for_chunks(shards, opt.threads, [&](std::size_t c) {
    auto [begin, end] = chunk_range(samples, shards, c);
    CounterRng rng("oscillatory_integral", opt.seed, c);
    std::vector<double> x(dims);
    for (std::uint64_t it = begin; it < end; ++it) {
      for (std::size_t v = 0; v < dims; ++v) x[v] = rng.uniform(-half[v], half[v]);
      double phase = 0;
      for (std::size_t j = 0; j < polys.size(); ++j)
        if (beta[j] != 0) phase += beta[j] * polys[j].eval_real(x.data());
      Complex z = detail::e(phase);
      partial[c].sum.add(z);
    }
  });
  detail::ComplexSum sum;
  for (auto& p : partial) sum.add(p.sum);
  const double n = static_cast<double>(samples);
  const Complex mean = sum.value() / n;
  // |e(.)| = 1, so E|z - mean|^2 = 1 - |mean|^2
  const double var = std::max(0.0, 1.0 - std::norm(mean));
  ComplexEstimate out{mean * volume, volume * std::sqrt(var / n), samples};
  if (out.error > target)
    throw BudgetExceeded("Monte Carlo standard error above target after the sample budget", out.error);
  return out;
}

/// beta rescaled to the unit box: v_P(beta) = (prod P_i)^s v_1(beta').
inline std::vector<double> unit_box_beta(const ExpandedSystem& sys, std::span<const double> beta, const Box& box) {
  detail::require_alpha(sys, beta.size(), "beta");
  std::vector<double> out(beta.begin(), beta.end());
  for (std::size_t j = 0; j < sys.r(); ++j)
    for (int k : sys.indices()[j].entries) out[j] *= box.bounds[k];
  return out;
}

struct Homogenized {
  std::vector<std::int64_t> a;
  std::int64_t q = 1;
  std::vector<double> beta;
};

struct ArcPoint {
  std::vector<double> alpha;
  std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> approx;  // (a_j, q_j)
  std::optional<Homogenized> homogenized;

  /// alpha = a/q + beta, already homogenized.
  static ArcPoint rational(std::vector<std::int64_t> a, std::int64_t q, std::vector<double> beta) {
    if (a.size() != beta.size()) throw InputError("a and beta lengths differ");
    ArcPoint p;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double x = static_cast<double>(a[j]) / static_cast<double>(q) + beta[j];
      p.alpha.push_back(x - std::floor(x));
    }
    p.homogenized = Homogenized{std::move(a), q, std::move(beta)};
    return p;
  }

  /// q = lcm q_j, a_j scaled to the common denominator.
  void homogenize() {
    if (!approx) throw InputError("arc point has no rational approximation");
    std::int64_t q = 1;
    for (auto& [a, qj] : *approx) {
      q = std::lcm(q, qj);
      if (q > (std::int64_t{1} << 40)) throw InputError("common denominator too large");
    }
    Homogenized h;
    h.q = q;
    for (std::size_t j = 0; j < approx->size(); ++j) {
      auto [a, qj] = (*approx)[j];
      h.a.push_back(a * (q / qj));
      double b = alpha[j] - static_cast<double>(a) / static_cast<double>(qj);
      if (b > 0.5) b -= 1;
      h.beta.push_back(b);
    }
    homogenized = std::move(h);
  }
};

struct ArcParams {
  double theta = 0.5;
  double c = 1;
  double P = 10;
  double eta = 0;
  int d = 2;
  std::vector<double> gamma_hat;  // per j; empty means all 1

  void validate() const {
    if (!(theta > 0) || theta > 1 - eta + 1e-12) throw InputError("arc parameters need 0 < theta <= 1 - eta");
    if (!(c > 0) || !(P >= 1)) throw InputError("arc parameters need c > 0 and P >= 1");
    if (d < 2) throw InputError("arc parameters need d >= 2");
  }
};

struct ArcClassification {
  bool major = false;
  ArcPoint point;
};

inline constexpr std::int64_t kMaxContinuedFractionDenominator = 1000000;

/// Last continued-fraction convergent p/q of x in [0, 1) with q <= cutoff.
inline std::pair<std::int64_t, std::int64_t> best_convergent(double x, std::int64_t cutoff) {
  std::int64_t h0 = 1, h1 = 0, k0 = 0, k1 = 1;  // (h_{n-1}, h_{n-2}), (k_{n-1}, k_{n-2})
  std::int64_t bp = 0, bq = 1;
  double rest = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double fl = std::floor(rest);
    const auto an = static_cast<std::int64_t>(fl);
    const std::int64_t h = an * h0 + h1, k = an * k0 + k1;
    if (k > cutoff) break;
    bp = h;
    bq = k;
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    const double f = rest - fl;
    if (f < 1e-12 || std::abs(x * static_cast<double>(k) - static_cast<double>(h)) < 1e-15) break;
    rest = 1 / f;
    if (rest > 1e18) break;
  }
  return {bp, bq};
}

/// Major iff every alpha_j has a_j/q_j with q_j <= c P^{(d-1) theta} and
/// |alpha_j q_j - a_j| <= c P^{-d + (d-1) theta} gamma_hat_j.
inline ArcClassification classify_arc(std::span<const double> alpha, const ArcParams& params) {
  params.validate();
  const double qmax = params.c * std::pow(params.P, (params.d - 1) * params.theta);
  const auto cutoff = static_cast<std::int64_t>(
      std::min<double>(std::floor(qmax + 1e-9), static_cast<double>(kMaxContinuedFractionDenominator)));
  const double width = params.c * std::pow(params.P, -params.d + (params.d - 1) * params.theta);
  ArcClassification out;
  out.point.alpha.assign(alpha.begin(), alpha.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> approx;
  bool major = cutoff >= 1;
  for (std::size_t j = 0; j < alpha.size() && major; ++j) {
    const double x = alpha[j] - std::floor(alpha[j]);
    auto [p, q] = best_convergent(x, cutoff);
    const double err = std::abs(x * static_cast<double>(q) - static_cast<double>(p));
    const double g = params.gamma_hat.empty() ? 1.0 : params.gamma_hat.at(j);
    if (err > width * g) major = false;
    approx.emplace_back(p == q ? 0 : p, p == q ? 1 : q);
  }
  out.major = major;
  if (major) {
    out.point.approx = std::move(approx);
    out.point.homogenize();
  }
  return out;
}

struct MajorArcReport {
  Complex T;
  Complex gauss;
  ComplexEstimate integral;
  Complex approx;
  double residual = 0;
};

/// T(alpha) versus q^{-ms} S_q(a) v_P(beta) at a homogenized arc point.
inline MajorArcReport major_arc_residual(const ExpandedSystem& sys, const ArcPoint& arc, const Box& box,
                                         const SumOptions& opt = {}, const IntegralOptions& iopt = {}) {
  if (!arc.homogenized) throw InputError("arc point is not homogenized");
  const auto& h = *arc.homogenized;
  MajorArcReport out;
  out.T = exponential_sum_at(sys, h.a, h.q, h.beta, box, opt);
  std::vector<std::int64_t> a_red(h.a.size());
  for (std::size_t j = 0; j < h.a.size(); ++j) a_red[j] = ((h.a[j] % h.q) + h.q) % h.q;
  out.gauss = gauss_sum(sys, a_red, h.q, opt);
  out.integral = oscillatory_integral(sys, h.beta, box, iopt);
  out.approx = out.gauss * out.integral.value /
               std::pow(static_cast<double>(h.q), static_cast<double>(sys.num_vars()));
  out.residual = std::abs(out.T - out.approx);
  return out;
}

/// For each j, Phi_j with block x_i shifted by h, minus Phi_j.
inline std::vector<Polynomial> weyl_difference(const ExpandedSystem& sys, int block, std::span<const BigInt> h) {
  if (block < 0 || block >= sys.m()) throw InputError("block index out of range");
  if (h.size() != sys.s()) throw InputError("shift h must have s entries");
  std::vector<BigInt> shift(sys.num_vars(), 0);
  for (std::size_t n = 0; n < sys.s(); ++n) shift[sys.var(block, n)] = h[n];
  std::vector<Polynomial> out;
  for (auto& p : sys.polys()) out.push_back(p.shifted(shift) - p);
  return out;
}

struct WeylCheck {
  double lhs_squared = 0;
  double rhs_bound = 0;
  bool holds = false;
};

/// |T|^2 <= (prod_{i != j1} (2 floor P_i + 1)^s) * sum_h |sum_x e(Delta_{j1,h} F(x; alpha))|,
/// the inner sum over x with x_{j1} and x_{j1} + h both in the box.
inline WeylCheck weyl_cs_check(const ExpandedSystem& sys, std::span<const double> alpha, const Box& box, int j1,
                               const SumOptions& opt = {}) {
  detail::require_alpha(sys, alpha.size(), "alpha");
  detail::require_box(sys, box);
  if (j1 < 0 || j1 >= sys.m()) throw InputError("block index out of range");
  const std::size_t s = sys.s(), nv = sys.num_vars();
  const auto bounds = box.variable_bounds(s);
  const std::uint64_t points = detail::box_size(bounds);
  const std::int64_t b = box.int_bound(j1);
  std::vector<std::int64_t> hbounds(s, 2 * b);
  const std::uint64_t shifts = detail::box_size(hbounds);
  if (static_cast<double>(points) * static_cast<double>(shifts) > opt.max_evaluations)
    throw BudgetExceeded("Weyl check exceeds the evaluation limit",
                         static_cast<double>(points) * static_cast<double>(shifts));
  CompiledSystem cs(sys);
  if (!cs.fits_int64_on_box(bounds)) throw InputError("polynomial values exceed the 64-bit range on this box");

  std::vector<Complex> z;
  z.reserve(points);
  std::vector<std::int64_t> vals(cs.size());
  detail::for_each_in_box(bounds, 0, points, [&](const IntVec& x) {
    double t = 0;
    for (std::size_t j = 0; j < cs.size(); ++j) t += detail::frac_product(alpha[j], cs[j](x.data()));
    z.push_back(detail::e(t));
  });
  std::vector<std::uint64_t> stride(nv);
  std::uint64_t acc = 1;
  for (std::size_t v = nv; v-- > 0;) {
    stride[v] = acc;
    acc *= static_cast<std::uint64_t>(2 * bounds[v] + 1);
  }

  detail::ComplexSum total;
  for (auto& w : z) total.add(w);
  WeylCheck out;
  out.lhs_squared = std::norm(total.value());

  std::vector<double> inner(shifts);
  parallel_for_chunks(std::min<std::uint64_t>(detail::kSumChunks, shifts), opt.threads, [&](std::size_t c) {
    const std::size_t chunks = std::min<std::uint64_t>(detail::kSumChunks, shifts);
    auto [begin, end] = chunk_range(shifts, chunks, c);
    std::uint64_t hidx = begin;
    detail::for_each_in_box(hbounds, begin, end, [&](const IntVec& h) {
      std::int64_t delta = 0;
      for (std::size_t n = 0; n < s; ++n) delta += h[n] * static_cast<std::int64_t>(stride[sys.var(j1, n)]);
      detail::ComplexSum sum;
      std::uint64_t lin = 0;
      detail::for_each_in_box(bounds, 0, points, [&](const IntVec& x) {
        bool inside = true;
        for (std::size_t n = 0; n < s && inside; ++n) inside = std::abs(x[sys.var(j1, n)] + h[n]) <= b;
        if (inside) sum.add(z[lin + delta] * std::conj(z[lin]));
        ++lin;
      });
      inner[hidx++] = std::abs(sum.value());
    });
  });
  double others = 1;
  for (int i = 0; i < sys.m(); ++i)
    if (i != j1) others *= std::pow(static_cast<double>(box.side(i)), static_cast<double>(s));
  double sum = 0;
  for (double v : inner) sum += v;
  out.rhs_bound = others * sum;
  out.holds = out.lhs_squared <= out.rhs_bound * (1 + 1e-9) + 1e-9;
  return out;
}

} // namespace repcount
