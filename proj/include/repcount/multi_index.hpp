#pragma once

#include "bigint.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace repcount {

/// Non-decreasing d-tuple over {0, ..., m-1}; printed 1-based ("12" for t1*t2).
struct MultiIndex {
  std::vector<int> entries;

  int degree() const noexcept { return static_cast<int>(entries.size()); }
  int multiplicity(int block) const {
    return static_cast<int>(std::count(entries.begin(), entries.end(), block));
  }
  bool is_diagonal() const {
    return std::all_of(entries.begin(), entries.end(), [&](int v) { return v == entries.front(); });
  }
  static MultiIndex diagonal(int block, int d) { return MultiIndex{std::vector<int>(d, block)}; }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

inline std::string to_string(const MultiIndex& j) {
  std::string s;
  for (int v : j.entries) s += std::to_string(v + 1);
  return s;
}

/// All multisets of size d from m blocks, lexicographically sorted.
inline std::vector<MultiIndex> multi_index_set(int m, int d) {
  if (m < 1 || d < 1) throw InputError("multi_index_set needs m >= 1 and d >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> cur(d, 0);
  for (;;) {
    out.push_back(MultiIndex{cur});
    int k = d - 1;
    while (k >= 0 && cur[k] == m - 1) --k;
    if (k < 0) break;
    ++cur[k];
    for (int i = k + 1; i < d; ++i) cur[i] = cur[k];
  }
  return out;
}

/// The target form psi(t) = sum_j n_j t_{j1}...t_{jd}; every j in J is stored.
class TargetForm {
public:
  TargetForm() = default;
  TargetForm(int m, int d) : m_(m), d_(d) {
    if (m < 1) throw InputError("target form needs m >= 1");
    if (d < 2) throw InputError("target form needs degree >= 2");
    for (auto& j : multi_index_set(m, d)) coeffs_.emplace(j, 0);
  }

  /// Quadratic target t^T B t: n_ii = b_ii and n_ij = 2 b_ij.
  static TargetForm from_gram(const IntMatrix& b) {
    if (!b.is_symmetric()) throw InputError("target Gram matrix must be symmetric");
    TargetForm t(static_cast<int>(b.rows()), 2);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t k = i; k < b.rows(); ++k)
        t.set(MultiIndex{{int(i), int(k)}}, i == k ? b(i, i) : BigInt(2 * b(i, k)));
    return t;
  }

  int m() const noexcept { return m_; }
  int d() const noexcept { return d_; }
  std::size_t r() const noexcept { return coeffs_.size(); }

  const BigInt& operator[](const MultiIndex& j) const {
    auto it = coeffs_.find(j);
    if (it == coeffs_.end()) throw InputError("multi-index " + to_string(j) + " not in J");
    return it->second;
  }
  void set(const MultiIndex& j, BigInt v) {
    check_index(j);
    coeffs_[j] = std::move(v);
  }
  const BigInt& diagonal(int block) const { return (*this)[MultiIndex::diagonal(block, d_)]; }
  std::vector<BigInt> diagonals() const {
    std::vector<BigInt> out;
    for (int i = 0; i < m_; ++i) out.push_back(diagonal(i));
    return out;
  }
  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](auto& kv) { return kv.second == 0; });
  }
  const std::map<MultiIndex, BigInt>& coefficients() const noexcept { return coeffs_; }

  /// Coefficients in the order of multi_index_set(m, d).
  std::vector<BigInt> coefficient_vector() const {
    std::vector<BigInt> out;
    for (auto& [j, n] : coeffs_) out.push_back(n);
    return out;
  }

  friend bool operator==(const TargetForm&, const TargetForm&) = default;

private:
  void check_index(const MultiIndex& j) const {
    if (j.degree() != d_) throw InputError("multi-index " + to_string(j) + " has wrong degree");
    if (!std::is_sorted(j.entries.begin(), j.entries.end()))
      throw InputError("multi-index entries must be non-decreasing");
    for (int v : j.entries)
      if (v < 0 || v >= m_) throw InputError("multi-index " + to_string(j) + " out of range");
  }

  int m_ = 0, d_ = 0;
  std::map<MultiIndex, BigInt> coeffs_;
};

/// Parse a coefficient list such as "11:2,12:1,22:2". Each key is the
/// 1-based digits of j (so m <= 9); the degree is the key length. Missing
/// coefficients are zero. `m` fixes the parameter count.
inline TargetForm parse_psi(std::string_view text, int m) {
  if (m < 1 || m > 9) throw InputError("coefficient-list notation supports 1 <= m <= 9");
  std::vector<std::pair<MultiIndex, BigInt>> items;
  std::size_t pos = 0;
  int degree = -1;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos == text.size()) throw ParseError("empty coefficient list", pos);
  while (pos < text.size()) {
    skip_ws();
    const std::size_t key_pos = pos;
    std::vector<int> entries;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      entries.push_back(text[pos++] - '1');
    if (entries.size() < 2) throw ParseError("multi-index needs at least two digits", key_pos);
    for (int v : entries)
      if (v < 0 || v >= m) throw ParseError("multi-index digit outside 1.." + std::to_string(m), key_pos);
    if (degree >= 0 && int(entries.size()) != degree)
      throw ParseError("multi-indices of differing length", key_pos);
    degree = static_cast<int>(entries.size());
    std::sort(entries.begin(), entries.end());
    skip_ws();
    if (pos >= text.size() || text[pos] != ':') throw ParseError("expected ':'", pos);
    ++pos;
    skip_ws();
    const std::size_t num_pos = pos;
    std::string num;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) num += text[pos++];
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) num += text[pos++];
    if (num.empty() || num == "-" || num == "+") throw ParseError("expected integer coefficient", num_pos);
    if (num[0] == '+') num.erase(0, 1);
    items.emplace_back(MultiIndex{entries}, BigInt(num));
    skip_ws();
    if (pos < text.size()) {
      if (text[pos] != ',') throw ParseError("expected ','", pos);
      ++pos;
    }
  }
  TargetForm t(m, degree);
  std::map<MultiIndex, bool> seen;
  for (auto& [j, n] : items) {
    if (seen[j]) throw InputError("duplicate multi-index " + to_string(j));
    seen[j] = true;
    t.set(j, n);
  }
  return t;
}

inline std::string to_string(const TargetForm& t) {
  std::string out;
  for (auto& [j, n] : t.coefficients()) {
    if (!out.empty()) out += ",";
    out += to_string(j) + ":" + n.str();
  }
  return out;
}

} // namespace repcount
