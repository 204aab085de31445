#include "repcount/enumeration.hpp"
#include "repcount/snf.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace repcount;

namespace {

Form squares(int s) { return quadratic_form_from_gram(IntMatrix::identity(s)); }

// Full product enumeration over the box, every Phi_j evaluated exactly.
Count naive_boxed(const Form& f, const TargetForm& psi, const std::vector<std::int64_t>& p) {
  const int m = psi.m();
  const std::size_t s = f.s();
  auto sys = expand_system(f, m);
  std::vector<BigInt> target;
  for (auto& j : sys.indices()) target.push_back(psi[j]);
  std::vector<std::int64_t> x(m * s);
  for (int i = 0; i < m; ++i)
    for (std::size_t n = 0; n < s; ++n) x[i * s + n] = -p[i];
  Count count = 0;
  for (;;) {
    std::vector<BigInt> big(x.begin(), x.end());
    if (sys.evaluate(big) == target) ++count;
    std::size_t k = x.size();
    while (k > 0 && x[k - 1] == p[(k - 1) / s]) {
      --k;
      x[k] = -p[k / s];
    }
    if (k == 0) break;
    ++x[k - 1];
  }
  return count;
}

std::vector<std::vector<std::int64_t>> brute_sphere(const Form& f, std::int64_t n, std::int64_t bound) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(f.s(), -bound);
  for (;;) {
    if (evaluate_form(f, std::span<const std::int64_t>(x)) == n) out.push_back(x);
    std::size_t k = x.size();
    while (k > 0 && x[k - 1] == bound) x[--k] = -bound;
    if (k == 0) break;
    ++x[k - 1];
  }
  return out;
}

// Pairs from the two representation lists with matching cross coefficient.
Count sphere_pairs(const Form& f, const IntMatrix& b) {
  auto l1 = list_representations(f, b(0, 0));
  auto l2 = list_representations(f, b(1, 1));
  auto g = gram_matrix(f);
  Count c = 0;
  for (auto& u : l1)
    for (auto& v : l2) {
      Rational dot = 0;
      for (std::size_t k = 0; k < f.s(); ++k)
        for (std::size_t l = 0; l < f.s(); ++l) dot += g(k, l) * u[k] * v[l];
      if (dot == Rational(b(0, 1))) ++c;
    }
  return c;
}

TargetForm zero_target(int m, int d) { return TargetForm(m, d); }

} // namespace

TEST(ListRepresentations, Examples) {
  EXPECT_EQ(list_representations(squares(2), 1).size(), 4u);
  EXPECT_EQ(list_representations(squares(3), 1).size(), 6u);
  auto l = list_representations(squares(2), 25);
  EXPECT_EQ(l.size(), brute_sphere(squares(2), 25, 5).size());
  EXPECT_EQ(l.size(), 12u);
  EXPECT_EQ(list_representations(squares(2), 0).size(), 1u);
  EXPECT_TRUE(list_representations(squares(2), -3).empty());
  EXPECT_THROW(list_representations(parse_form("x1^2 - x2^2", 2), 1), InputError);
}

TEST(ListRepresentations, MatchesBruteForceOnGeneralForms) {
  std::vector<IntMatrix> grams = {IntMatrix{{2, 1}, {1, 3}}, IntMatrix{{5, -2, 1}, {-2, 4, 0}, {1, 0, 3}},
                                  IntMatrix{{1, 0, 0, 0}, {0, 2, 1, 0}, {0, 1, 2, 0}, {0, 0, 0, 7}}};
  for (auto& a : grams) {
    Form f = quadratic_form_from_gram(a);
    for (long long n : {1, 2, 5, 12, 20}) {
      auto fast = list_representations(f, n);
      auto slow = brute_sphere(f, n, 6);
      std::sort(fast.begin(), fast.end());
      std::sort(slow.begin(), slow.end());
      EXPECT_EQ(fast, slow) << "n=" << n;
    }
  }
  // odd cross term: half-integral Gram entries
  Form f = parse_form("x1^2 + x1 x2 + x2^2 + 2 x3^2", 3);
  for (long long n : {1, 3, 7, 9}) {
    auto fast = list_representations(f, n);
    auto slow = brute_sphere(f, n, 5);
    std::sort(fast.begin(), fast.end());
    std::sort(slow.begin(), slow.end());
    EXPECT_EQ(fast, slow) << "n=" << n;
  }
}

TEST(ListRepresentations, QuarticForms) {
  Form f = parse_form("x1^4 + x2^4 + x3^4", 3);
  for (long long n : {1, 2, 17, 32, 98}) EXPECT_EQ(list_representations(f, n).size(), brute_sphere(f, n, 4).size());
  Form g = parse_form("x1^4 + x1^2 x2^2 + 2 x2^4", 2);
  for (long long n : {1, 2, 4, 16, 20, 36}) EXPECT_EQ(list_representations(g, n).size(), brute_sphere(g, n, 4).size());
}

TEST(ListRepresentations, UnionOfOrbits) {
  auto l = list_representations(squares(4), 18);
  std::set<std::vector<std::int64_t>> set(l.begin(), l.end());
  EXPECT_EQ(set.size(), l.size());
  for (auto v : l) {
    auto w = v;
    w[1] = -w[1];
    EXPECT_TRUE(set.count(w));
    std::swap(w[0], w[3]);
    EXPECT_TRUE(set.count(w));
  }
}

TEST(CountRepresentations, Examples) {
  EXPECT_EQ(count_representations(squares(2), TargetForm::from_gram(IntMatrix::identity(2))), 8u);
  const Count three = count_representations(squares(3), TargetForm::from_gram(IntMatrix::identity(2)));
  EXPECT_EQ(three, naive_boxed(squares(3), TargetForm::from_gram(IntMatrix::identity(2)), {1, 1}));
  EXPECT_EQ(three, 24u);
  EXPECT_EQ(count_representations(squares(2), TargetForm::from_gram(IntMatrix{{3, 0}, {0, 1}})), 0u);
  EXPECT_EQ(count_representations(squares(2), TargetForm::from_gram(IntMatrix{{-1, 0}, {0, 1}})), 0u);
  EXPECT_THROW(count_representations(parse_form("x1 x2", 2), TargetForm::from_gram(IntMatrix::identity(2))),
               InputError);
}

TEST(CountRepresentations, SphereDecomposition) {
  for (int s = 2; s <= 6; ++s)
    for (auto b : {IntMatrix{{1, 0}, {0, 1}}, IntMatrix{{2, 1}, {1, 3}}, IntMatrix{{5, 2}, {2, 5}}})
      EXPECT_EQ(count_representations(squares(s), TargetForm::from_gram(b)), sphere_pairs(squares(s), b))
          << "s=" << s;
  Form f = quadratic_form_from_gram(IntMatrix{{2, 1, 0}, {1, 2, 1}, {0, 1, 3}});
  for (auto b : {IntMatrix{{2, 1}, {1, 2}}, IntMatrix{{3, -1}, {-1, 7}}})
    EXPECT_EQ(count_representations(f, TargetForm::from_gram(b)), sphere_pairs(f, b));
}

TEST(CountRepresentations, ThreeParameters) {
  Form f = squares(3);
  auto psi = TargetForm::from_gram(IntMatrix{{2, 1, 0}, {1, 2, 0}, {0, 0, 1}});
  EXPECT_EQ(count_representations(f, psi), naive_boxed(f, psi, {2, 2, 1}));
}

TEST(CountRepresentations, PermutationInvariance) {
  Form f = squares(4);
  auto a = TargetForm::from_gram(IntMatrix{{3, 1}, {1, 6}});
  auto b = TargetForm::from_gram(IntMatrix{{6, 1}, {1, 3}});
  EXPECT_EQ(count_representations(f, a), count_representations(f, b));
}

TEST(CountRepresentations, ThreadCountDoesNotChangeResult) {
  auto psi = TargetForm::from_gram(IntMatrix{{9, 0}, {0, 9}});
  EXPECT_EQ(count_representations(squares(5), psi, {1, 1e8}), count_representations(squares(5), psi, {3, 1e8}));
}

TEST(CountRepresentations, QuarticTarget) {
  Form f = parse_form("x1^4 + x2^4", 2);
  TargetForm psi(2, 4);
  psi.set(MultiIndex::diagonal(0, 4), 17);
  psi.set(MultiIndex::diagonal(1, 4), 1);
  EXPECT_EQ(count_representations(f, psi), naive_boxed(f, psi, {2, 1}));
}

TEST(CountBoxed, DefiniteZeroTarget) {
  EXPECT_EQ(count_boxed(squares(2), zero_target(2, 2), Box({2, 3})), 1u);
  EXPECT_EQ(count_boxed(parse_form("x1^4 + x2^4", 2), zero_target(2, 4), Box({2, 2})), 1u);
}

TEST(CountBoxed, IndefiniteMatchesNaive) {
  Form f = parse_form("x1 x2", 2);
  EXPECT_EQ(count_boxed(f, zero_target(2, 2), Box({2, 2})), naive_boxed(f, zero_target(2, 2), {2, 2}));
  Form g = parse_form("x1^2 - 2 x2^2 + x1 x3", 3);
  auto psi = parse_psi("11:1,12:0,22:-1", 2);
  EXPECT_EQ(count_boxed(g, psi, Box({1, 2})), naive_boxed(g, psi, {1, 2}));
  EXPECT_EQ(count_boxed(g, psi, Box({2, 1})), naive_boxed(g, psi, {2, 1}));
  Form c = parse_form("x1^3 - x2^3 + x1 x2 x3", 3);
  TargetForm z(2, 3);
  EXPECT_EQ(count_boxed(c, z, Box({1, 2})), naive_boxed(c, z, {1, 2}));
}

TEST(CountBoxed, RandomInstancesMatchNaive) {
  std::mt19937_64 g(42);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t s = 2;
    Polynomial p(s);
    for (int t = 0; t < 3; ++t) {
      Exponents e(s, 0);
      e[g() % s]++;
      e[g() % s]++;
      p.add_term(e, coef(g));
    }
    if (p.is_zero()) continue;
    Form f = Form::from_polynomial(p);
    TargetForm psi(2, 2);
    for (auto& j : multi_index_set(2, 2)) psi.set(j, coef(g));
    EXPECT_EQ(count_boxed(f, psi, Box({2, 2})), naive_boxed(f, psi, {2, 2})) << to_string(f);
  }
}

TEST(CountBoxed, CoversAllSolutionsOfDefiniteInstance) {
  auto psi = TargetForm::from_gram(IntMatrix{{5, 2}, {2, 5}});
  EXPECT_EQ(count_boxed(squares(3), psi, Box({3, 3})), count_representations(squares(3), psi));
}

TEST(CountBoxed, UnsortedBoundsAllowed) {
  Form f = parse_form("x1 x2 - x3^2", 3);
  auto psi = parse_psi("11:0,12:1,22:0", 2);
  EXPECT_EQ(count_boxed(f, psi, Box({2, 1})), naive_boxed(f, psi, {2, 1}));
}

TEST(CountBoxed, BudgetRefusal) {
  try {
    count_boxed(squares(6), zero_target(2, 2), Box({40, 40}), {1, 1e6});
    FAIL() << "expected refusal";
  } catch (const BudgetExceeded& e) {
    EXPECT_GT(e.estimate(), 1e6);
  }
}

TEST(SmithNormalForm, Examples) {
  auto id = smith_normal_form(IntMatrix::identity(3));
  EXPECT_EQ(id.D, IntMatrix::identity(3));
  auto r = smith_normal_form(IntMatrix{{2, 1}, {0, 2}});
  EXPECT_EQ(r.D, (IntMatrix{{1, 0}, {0, 4}}));
  EXPECT_EQ(r.U * IntMatrix({{2, 1}, {0, 2}}) * r.V, r.D);
  EXPECT_EQ(smith_normal_form(IntMatrix{{2, 0}, {0, 4}}).D, (IntMatrix{{2, 0}, {0, 4}}));
  EXPECT_EQ(smith_normal_form(IntMatrix{{4, 0}, {0, 6}}).D, (IntMatrix{{2, 0}, {0, 12}}));
  EXPECT_THROW(smith_normal_form(IntMatrix{{1, 2}, {2, 4}}), InputError);
}

TEST(SmithNormalForm, RandomMatrices) {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> u(-20, 20);
  int done = 0;
  while (done < 100) {
    const std::size_t m = 1 + done % 4;
    IntMatrix c(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) c(i, j) = u(g);
    if (determinant(c) == 0) continue;
    ++done;
    auto r = smith_normal_form(c);
    EXPECT_EQ(r.U * c * r.V, r.D);
    EXPECT_EQ(abs(determinant(r.U)), 1);
    EXPECT_EQ(abs(determinant(r.V)), 1);
    auto gam = r.invariants();
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_GT(gam[i], 0);
      if (i + 1 < m) EXPECT_EQ(gam[i + 1] % gam[i], 0);
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) EXPECT_EQ(r.D(i, j), 0);
    }
    Rational prod = 1;
    for (auto& v : gam) prod *= v;
    EXPECT_EQ(prod, abs(determinant(c)));
  }
}

TEST(CountLattice, IdentityMatchesBoxed) {
  for (auto text : {"x1 x2", "x1^2 - x2^2", "x1^2 + x2^2"}) {
    Form f = parse_form(text, 2);
    EXPECT_EQ(count_lattice(f, IntMatrix::identity(2), 3), count_boxed(f, zero_target(2, 2), Box({3, 3})));
  }
}

TEST(CountLattice, DefiniteFormGivesOne) {
  EXPECT_EQ(count_lattice(squares(2), IntMatrix{{2, 1}, {1, 3}}, 5), 1u);
}

TEST(CountLattice, ScalingBijection) {
  Form f = parse_form("x1 x2", 2);
  for (int gamma : {1, 2, 3})
    for (int p : {3, 6}) {
      IntMatrix c = IntMatrix::identity(2);
      c(0, 0) = c(1, 1) = gamma;
      EXPECT_EQ(count_lattice(f, c, p), count_boxed(f, zero_target(2, 2), Box::uniform(2, double(p) / gamma)));
    }
}

TEST(CountLattice, GeneralMatrixMatchesMembershipOracle) {
  Form f = parse_form("x1^2 - x2^2", 2);
  IntMatrix c{{1, 1}, {0, 2}};
  auto inv = inverse(c);
  const std::int64_t p = 3;
  // X in the cube with F(Xt) = 0 and every row of X in Z^2 C
  auto sys = expand_system(f, 2);
  Count expected = 0;
  std::vector<std::int64_t> x(4, -p);
  for (;;) {
    std::vector<BigInt> big(x.begin(), x.end());
    bool zero = true;
    for (auto& v : sys.evaluate(big)) zero = zero && v == 0;
    bool member = true;
    for (std::size_t n = 0; n < 2 && member; ++n)
      for (std::size_t k = 0; k < 2; ++k) {
        Rational y = Rational(x[0 * 2 + n]) * inv(0, k) + Rational(x[1 * 2 + n]) * inv(1, k);
        member = member && denominator(y) == 1;
      }
    if (zero && member) ++expected;
    std::size_t k = 4;
    while (k > 0 && x[k - 1] == p) x[--k] = -p;
    if (k == 0) break;
    ++x[k - 1];
  }
  EXPECT_EQ(count_lattice(f, c, p), expected);
  EXPECT_THROW(count_lattice(f, IntMatrix{{1, 2}, {2, 4}}, 3), InputError);
}

TEST(GammaProduct, Examples) {
  auto [l1, r1] = gamma_product_identity({1, 1, 1}, 3);
  EXPECT_EQ(l1, 1);
  EXPECT_EQ(r1, 1);
  auto [l2, r2] = gamma_product_identity({2, 3}, 2);
  EXPECT_EQ(l2, 216);
  EXPECT_EQ(r2, 216);
  std::mt19937_64 g(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BigInt> gam(3);
    for (auto& v : gam) v = 1 + g() % 5;
    auto [l, r] = gamma_product_identity(gam, 2);
    EXPECT_EQ(l, r);
  }
}
