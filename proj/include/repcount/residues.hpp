#pragma once

#include "bigint.hpp"
#include "errors.hpp"
#include "polynomial.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace repcount {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

/// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int k = 1; k < s; ++k) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline std::vector<int> primes_up_to(int n) {
  std::vector<int> out;
  for (int k = 2; k <= n; ++k)
    if (is_prime(static_cast<std::uint64_t>(k))) out.push_back(k);
  return out;
}

/// (p, e) pairs with q = prod p^e.
inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t q) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= q; ++p) {
    int e = 0;
    while (q % p == 0) {
      q /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (q > 1) out.emplace_back(q, 1);
  return out;
}

/// A set of variables that no monomial links to the rest, with every input
/// polynomial restricted to it (in local variable numbering).
struct VariableGroup {
  std::vector<std::size_t> vars;
  std::vector<Polynomial> polys;
  std::string key;  // canonical text; equal keys give equal residue statistics
};

/// Connected components of the variable co-occurrence graph. Each term of
/// each polynomial lies in exactly one group, so sums over all variables
/// factor into products over groups.
inline std::vector<VariableGroup> split_variable_groups(const std::vector<Polynomial>& polys, std::size_t nv) {
  std::vector<std::size_t> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (auto& p : polys)
    for (auto& [e, c] : p.terms()) {
      std::size_t first = nv;
      for (std::size_t v = 0; v < nv; ++v) {
        if (!e[v]) continue;
        if (first == nv) first = v;
        else parent[find(v)] = find(first);
      }
    }
  std::map<std::size_t, std::size_t> slot;
  std::vector<VariableGroup> groups;
  std::vector<std::size_t> local(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    auto [it, fresh] = slot.try_emplace(find(v), groups.size());
    if (fresh) groups.emplace_back();
    local[v] = groups[it->second].vars.size();
    groups[it->second].vars.push_back(v);
  }
  for (auto& g : groups) g.polys.assign(polys.size(), Polynomial(g.vars.size()));
  for (std::size_t j = 0; j < polys.size(); ++j)
    for (auto& [e, c] : polys[j].terms()) {
      std::size_t g = nv;
      for (std::size_t v = 0; v < nv && g == nv; ++v)
        if (e[v]) g = slot[find(v)];
      if (g == nv) throw InputError("constant terms are not supported in residue sums");
      Exponents le(groups[g].vars.size(), 0);
      for (std::size_t v = 0; v < nv; ++v)
        if (e[v]) le[local[v]] = e[v];
      groups[g].polys[j].add_term(le, c);
    }
  for (auto& g : groups) {
    g.key = std::to_string(g.vars.size());
    for (auto& p : g.polys) g.key += "|" + to_string(p);
  }
  return groups;
}

/// Histogram of (P_1(y), ..., P_r(y)) mod q over y in (Z/q)^{|g|}. Cell
/// index is sum_j v_j q^j.
inline std::vector<std::uint64_t> residue_histogram(const VariableGroup& g, std::int64_t q) {
  const std::size_t r = g.polys.size();
  std::size_t cells = 1;
  for (std::size_t j = 0; j < r; ++j) cells *= static_cast<std::size_t>(q);
  std::vector<std::uint64_t> hist(cells, 0);
  std::vector<CompiledPolynomial> cp;
  for (auto& p : g.polys) cp.push_back(CompiledPolynomial(p).reduced_mod(q));
  const std::size_t n = g.vars.size();
  std::vector<std::int64_t> y(n, 0);
  for (;;) {
    std::size_t idx = 0, stride = 1;
    for (std::size_t j = 0; j < r; ++j) {
      idx += static_cast<std::size_t>(cp[j].eval_mod(y.data(), q)) * stride;
      stride *= static_cast<std::size_t>(q);
    }
    ++hist[idx];
    std::size_t k = n;
    while (k > 0 && y[k - 1] == q - 1) y[--k] = 0;
    if (k == 0) break;
    ++y[k - 1];
  }
  return hist;
}

/// Residue points enumerated by residue_histogram for these groups.
inline double residue_work(const std::vector<VariableGroup>& groups, std::int64_t q) {
  std::map<std::string, double> distinct;
  for (auto& g : groups) distinct[g.key] = std::pow(static_cast<double>(q), static_cast<double>(g.vars.size()));
  double w = 0;
  for (auto& [k, v] : distinct) w += v;
  return w;
}

/// e(k/q) for k = 0..q-1.
inline std::vector<std::complex<double>> phase_table(std::int64_t q) {
  std::vector<std::complex<double>> t(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k)
    t[k] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q));
  return t;
}

/// Length-n number-theoretic transform along each of `dims` axes of a
/// cube of side n, modulo a prime M = 1 mod n.
class ModularTransform {
public:
  ModularTransform(std::uint64_t n, std::uint64_t modulus, std::uint64_t root)
      : n_(n), mod_(modulus), pow_(n) {
    pow_[0] = 1;
    for (std::uint64_t k = 1; k < n; ++k) pow_[k] = pow_[k - 1] * root % mod_;
  }

  std::uint64_t modulus() const noexcept { return mod_; }
  std::uint64_t root_power(std::uint64_t k) const { return pow_[k % n_]; }

  /// a[idx] <- sum_v a[v] w^{<idx, v>} over all axes.
  void forward(std::vector<std::uint64_t>& a, std::size_t dims) const {
    std::vector<std::uint64_t> line(n_), out(n_);
    std::size_t stride = 1;
    for (std::size_t axis = 0; axis < dims; ++axis) {
      const std::size_t block = stride * n_;
      for (std::size_t base = 0; base < a.size(); base += block)
        for (std::size_t off = 0; off < stride; ++off) {
          for (std::uint64_t k = 0; k < n_; ++k) line[k] = a[base + off + k * stride];
          for (std::uint64_t f = 0; f < n_; ++f) {
            std::uint64_t acc = 0, e = 0;
            for (std::uint64_t k = 0; k < n_; ++k) {
              if (line[k]) acc += line[k] * pow_[e] % mod_;
              e += f;
              if (e >= n_) e -= n_;
            }
            out[f] = acc % mod_;
          }
          for (std::uint64_t k = 0; k < n_; ++k) a[base + off + k * stride] = out[k];
        }
      stride = block;
    }
  }

  /// Primes M < 2^31 with M = 1 mod n, largest first.
  static std::vector<std::uint64_t> moduli(std::uint64_t n, std::size_t count) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = ((1ULL << 31) - 2) / n; k > 0 && out.size() < count; --k) {
      const std::uint64_t m = k * n + 1;
      if (is_prime(m)) out.push_back(m);
    }
    if (out.size() < count) throw Error("not enough transform moduli");
    return out;
  }

  /// Element of exact order n = p^l modulo M.
  static std::uint64_t root_of_order(std::uint64_t n, std::uint64_t p, std::uint64_t m) {
    for (std::uint64_t x = 2; x < m; ++x) {
      const std::uint64_t w = powmod(x, (m - 1) / n, m);
      if (powmod(w, n / p, m) != 1) return w;
    }
    throw Error("no root of unity found");
  }

private:
  std::uint64_t n_, mod_;
  std::vector<std::uint64_t> pow_;
};

} // namespace repcount
