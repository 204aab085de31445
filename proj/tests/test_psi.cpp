#include "repcount/psi.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace repcount;

namespace {

TargetForm diag(std::vector<long long> n, int d = 2) {
  TargetForm t(static_cast<int>(n.size()), d);
  for (int i = 0; i < static_cast<int>(n.size()); ++i) t.set(MultiIndex::diagonal(i, d), n[i]);
  return t;
}

} // namespace

TEST(Magnitude, Examples) {
  EXPECT_EQ(magnitude(diag({1, 1})), 1);
  EXPECT_EQ(magnitude(diag({4, 16})), 64);
  EXPECT_THROW(magnitude(diag({0, 5})), InputError);
  EXPECT_THROW(magnitude(diag({-1, 5})), InputError);
}

TEST(Eccentricity, Examples) {
  EXPECT_DOUBLE_EQ(eccentricity(diag({7, 7, 7})), 1.0);
  EXPECT_NEAR(eccentricity(diag({4, 16})), 1.5, 1e-12);
  EXPECT_THROW(eccentricity(diag({1, 5})), InputError);
}

TEST(Eccentricity, AtLeastOne) {
  std::mt19937_64 g(2);
  std::uniform_int_distribution<long long> u(2, 1000);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + trial % 4;
    std::vector<long long> n(m);
    for (auto& v : n) v = u(g);
    EXPECT_GE(eccentricity(diag(n, 2 + trial % 3)), 1.0 - 1e-12);
  }
}

TEST(PseudoDiagonal, Examples) {
  EXPECT_TRUE(is_pseudo_diagonal(diag({3, 5, 7})));
  EXPECT_TRUE(is_pseudo_diagonal(parse_psi("11:2,12:2,22:2", 2)));
  EXPECT_FALSE(is_pseudo_diagonal(parse_psi("11:1,12:3,22:1", 2)));
  EXPECT_FALSE(is_pseudo_diagonal(parse_psi("11:1,12:-3,22:1", 2)));
  EXPECT_THROW(is_pseudo_diagonal(parse_psi("11:0,22:1", 2)), InputError);
}

TEST(PseudoDiagonal, MatrixCriterion) {
  EXPECT_TRUE(quadratic_matrix_pseudo_diagonal(IntMatrix{{2, 1}, {1, 2}}));
  EXPECT_FALSE(quadratic_matrix_pseudo_diagonal(IntMatrix{{1, 2}, {2, 1}}));
  EXPECT_TRUE(quadratic_matrix_pseudo_diagonal(IntMatrix{{3, 0, 0}, {0, 5, 0}, {0, 0, 9}}));
  EXPECT_THROW(quadratic_matrix_pseudo_diagonal(IntMatrix{{1, 2}, {3, 1}}), InputError);
}

TEST(PseudoDiagonal, PolynomialAndMatrixCriteriaDifferByTwo) {
  // B = [[1,1],[1,1]] passes the matrix test, but its cross coefficient 2 fails n_j^2 <= n_i n_j
  EXPECT_TRUE(quadratic_matrix_pseudo_diagonal(IntMatrix{{1, 1}, {1, 1}}));
  EXPECT_FALSE(is_pseudo_diagonal(TargetForm::from_gram(IntMatrix{{1, 1}, {1, 1}})));
}

TEST(PseudoDiagonal, RandomPositiveDefiniteGramMatrices) {
  for (int m : {2, 3, 4})
    for (std::uint64_t seed = 0; seed < 200; ++seed)
      EXPECT_TRUE(quadratic_matrix_pseudo_diagonal(random_pd_quadratic(m, 10, seed)));
}

TEST(NormalizePsi, Examples) {
  auto nd = normalize_psi(diag({5, 9}));
  EXPECT_EQ(nd.at(MultiIndex{{0, 0}}), 1.0);
  EXPECT_EQ(nd.at(MultiIndex{{1, 1}}), 1.0);
  EXPECT_EQ(nd.at(MultiIndex{{0, 1}}), 0.0);
  auto n = normalize_psi(parse_psi("11:4,12:8,22:16", 2));
  EXPECT_DOUBLE_EQ(n.at(MultiIndex{{0, 1}}), 1.0);
  auto c = normalize_psi(parse_psi("11:2,12:1,22:3", 2));
  EXPECT_NEAR(c.at(MultiIndex{{0, 1}}), 1.0 / std::sqrt(6.0), 1e-15);
}

TEST(NormalizePsi, PseudoDiagonalTargetsAreBounded) {
  std::mt19937_64 g(8);
  std::uniform_int_distribution<long long> u(-30, 30);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    TargetForm t(3, 2);
    for (auto& j : multi_index_set(3, 2)) t.set(j, j.is_diagonal() ? std::abs(u(g)) + 1 : u(g));
    if (!is_pseudo_diagonal(t)) continue;
    ++checked;
    for (auto& [j, v] : normalize_psi(t)) EXPECT_LE(std::abs(v), 1.0 + 1e-15);
  }
  EXPECT_GT(checked, 20);
}

TEST(NormalizePsi, IdempotentOnUnitDiagonal) {
  auto t = parse_psi("11:1,12:-1,13:0,22:1,23:1,33:1", 3);
  for (auto& [j, v] : normalize_psi(t)) EXPECT_EQ(v, to_double(t[j]));
}

TEST(Hypotheses, Examples) {
  Form f13 = quadratic_form_from_gram(IntMatrix::identity(13));
  auto h = check_hypotheses(f13, diag({5, 5}), 0);
  EXPECT_DOUBLE_EQ(h.rhs, 12.0);
  EXPECT_EQ(h.lhs, 13);
  EXPECT_TRUE(h.satisfied);
  Form f12 = quadratic_form_from_gram(IntMatrix::identity(12));
  EXPECT_FALSE(check_hypotheses(f12, diag({5, 5}), 0).satisfied);
  EXPECT_NEAR(check_hypotheses(f13, diag({4, 16}), 0).rhs, 18.0, 1e-12);
  EXPECT_FALSE(check_hypotheses(f13, diag({5, 5}), 13).satisfied);
  EXPECT_THROW(check_hypotheses(f13, diag({1, 5}), 0), InputError);
}

TEST(RandomPdQuadratic, Properties) {
  auto one = random_pd_quadratic(1, 4, 17);
  EXPECT_GE(one(0, 0), 1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto b = random_pd_quadratic(3, 5, seed);
    EXPECT_TRUE(b.is_symmetric());
    EXPECT_TRUE(leading_minors_positive(b));
    EXPECT_EQ(b, random_pd_quadratic(3, 5, seed));
  }
  EXPECT_FALSE(random_pd_quadratic(3, 5, 1) == random_pd_quadratic(3, 5, 2));
}
