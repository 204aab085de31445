#include "repcount/circle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace repcount;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

Complex unit(double t) { return std::polar(1.0, kTwoPi * t); }

template <class Fn>
void for_each_point(std::vector<std::int64_t> lo, std::vector<std::int64_t> hi, Fn&& fn) {
  std::vector<std::int64_t> x = lo;
  for (;;) {
    fn(x);
    std::size_t k = x.size();
    while (k > 0 && x[k - 1] == hi[k - 1]) {
      --k;
      x[k] = lo[k];
    }
    if (k == 0) return;
    ++x[k - 1];
  }
}

std::vector<std::int64_t> box_hi(const ExpandedSystem& sys, const Box& box) {
  std::vector<std::int64_t> hi;
  for (int i = 0; i < sys.m(); ++i) hi.insert(hi.end(), sys.s(), box.int_bound(i));
  return hi;
}

Complex naive_sum(const ExpandedSystem& sys, const std::vector<double>& alpha, const Box& box) {
  auto hi = box_hi(sys, box);
  std::vector<std::int64_t> lo(hi.size());
  for (std::size_t k = 0; k < hi.size(); ++k) lo[k] = -hi[k];
  Complex total = 0;
  for_each_point(lo, hi, [&](const std::vector<std::int64_t>& x) {
    auto v = sys.evaluate(std::vector<BigInt>(x.begin(), x.end()));
    double t = 0;
    for (std::size_t j = 0; j < v.size(); ++j) t += alpha[j] * to_double(v[j]);
    total += unit(t);
  });
  return total;
}

Complex naive_gauss(const ExpandedSystem& sys, const std::vector<std::int64_t>& a, std::int64_t q) {
  std::vector<std::int64_t> lo(sys.num_vars(), 0), hi(sys.num_vars(), q - 1);
  Complex total = 0;
  for_each_point(lo, hi, [&](const std::vector<std::int64_t>& x) {
    auto v = sys.evaluate(std::vector<BigInt>(x.begin(), x.end()));
    BigInt t = 0;
    for (std::size_t j = 0; j < v.size(); ++j) t += a[j] * v[j];
    t %= q;
    if (t < 0) t += q;
    total += unit(to_double(t) / static_cast<double>(q));
  });
  return total;
}

// integral over [-p, p] of e(beta x^2)
Complex fresnel(double beta, double p) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = gauss_kronrod<double, 61>::integrate([&](double x) { return std::cos(kTwoPi * beta * x * x); }, -p, p,
                                                 15, 1e-13);
  auto im = gauss_kronrod<double, 61>::integrate([&](double x) { return std::sin(kTwoPi * beta * x * x); }, -p, p,
                                                 15, 1e-13);
  return {re, im};
}

} // namespace

TEST(ExponentialSum, AtZeroCountsBoxPoints) {
  auto sys = expand_system(parse_form("x1^2 + x2^2 + x3^2", 3), 2);
  Box box({2, 3.5});
  std::vector<double> zero(sys.r(), 0);
  EXPECT_NEAR(exponential_sum(sys, zero, box).real(), std::pow(5.0, 3) * std::pow(7.0, 3), 1e-6);
  EXPECT_NEAR(exponential_sum(sys, zero, box).imag(), 0, 1e-6);
}

TEST(ExponentialSum, SingleSquareHalf) {
  auto sys = expand_system(parse_form("x1^2", 1), 1);
  std::vector<double> half{0.5};
  Complex t = exponential_sum(sys, half, Box({2}));
  EXPECT_NEAR(t.real(), 1, 1e-12);
  EXPECT_NEAR(t.imag(), 0, 1e-12);
  std::vector<std::int64_t> a{1};
  std::vector<double> beta{0};
  EXPECT_NEAR(std::abs(exponential_sum_at(sys, a, 2, beta, Box({2})) - Complex(1, 0)), 0, 1e-12);
}

TEST(ExponentialSum, MatchesNaiveAndConjugates) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto text : {"x1^2 + 2 x2^2 - x1 x2", "x1^3 + x2^3", "x1 x2 + x2^2"}) {
    auto sys = expand_system(parse_form(text, 2), 2);
    Box box({2, 3});
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> alpha(sys.r()), neg(sys.r());
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        alpha[j] = u(g);
        neg[j] = -alpha[j];
      }
      Complex t = exponential_sum(sys, alpha, box);
      EXPECT_LT(std::abs(t - naive_sum(sys, alpha, box)), 1e-8);
      EXPECT_LT(std::abs(exponential_sum(sys, neg, box) - std::conj(t)), 1e-8);
    }
  }
}

TEST(ExponentialSum, RationalPointMatchesFloatingPoint) {
  auto sys = expand_system(parse_form("x1^2 + x2^2 + x3^2", 3), 1);
  std::vector<std::int64_t> a{2};
  std::vector<double> beta{1e-3};
  std::vector<double> alpha{2.0 / 7 + 1e-3};
  EXPECT_LT(std::abs(exponential_sum_at(sys, a, 7, beta, Box({6})) - exponential_sum(sys, alpha, Box({6}))), 1e-8);
}

TEST(FourierInversion, MatchesBoxedCount) {
  struct Case {
    const char* form;
    std::size_t s;
    const char* psi;
    std::vector<double> box;
  };
  std::vector<Case> cases = {{"x1^2 + x2^2", 2, "11:1,12:0,22:1", {2, 2}},
                             {"x1^2 + x2^2 + x3^2", 3, "11:2,12:1,22:2", {1, 2}},
                             {"x1 x2", 2, "11:0,12:0,22:0", {2, 2}},
                             {"x1^2 - x2^2", 2, "11:0,12:1,22:3", {2, 3}}};
  for (auto& c : cases) {
    auto f = parse_form(c.form, c.s);
    auto psi = parse_psi(c.psi, 2);
    auto sys = expand_system(f, 2);
    const Count expected = count_boxed(f, psi, Box(c.box));
    EXPECT_EQ(fourier_inversion_count(sys, psi, Box(c.box)), expected) << c.form;
    const auto q = fourier_modulus(sys, psi, Box(c.box)).convert_to<std::int64_t>();
    EXPECT_EQ(fourier_inversion_count(sys, psi, Box(c.box), q + 3), expected) << c.form;
    EXPECT_THROW(fourier_inversion_count(sys, psi, Box(c.box), q - 1), InputError);
  }
}

TEST(FourierInversion, SingleParameterCubic) {
  auto f = parse_form("x1^3 + x2^3 + x3^3", 3);
  TargetForm psi(1, 3);
  psi.set(MultiIndex::diagonal(0, 3), 2);
  EXPECT_EQ(fourier_inversion_count(expand_system(f, 1), psi, Box({3})), count_boxed(f, psi, Box({3})));
}

TEST(GaussSum, TrivialCases) {
  auto sys = expand_system(parse_form("x1^2 + x1 x2 + 3 x2^2", 2), 2);
  std::vector<std::int64_t> zero(sys.r(), 0);
  EXPECT_NEAR(std::abs(gauss_sum(sys, zero, 1) - Complex(1, 0)), 0, 1e-12);
  EXPECT_NEAR(std::abs(gauss_sum(sys, zero, 5) - Complex(625, 0)), 0, 1e-9);
  std::vector<std::int64_t> bad{5, 0, 0};
  EXPECT_THROW(gauss_sum(sys, bad, 5), InputError);
}

TEST(GaussSum, ClassicalQuadraticSums) {
  auto sys = expand_system(parse_form("x1^2", 1), 1);
  std::vector<std::int64_t> one{1};
  EXPECT_LT(std::abs(gauss_sum(sys, one, 13) - Complex(std::sqrt(13.0), 0)), 1e-9);
  EXPECT_LT(std::abs(gauss_sum(sys, one, 11) - Complex(0, std::sqrt(11.0))), 1e-9);
  EXPECT_LT(std::abs(gauss_sum(sys, one, 2)), 1e-12);
  EXPECT_LT(std::abs(gauss_sum(sys, one, 4) - Complex(2, 2)), 1e-12);
}

TEST(GaussSum, MatchesNaive) {
  std::mt19937_64 g(11);
  for (auto text : {"x1^2 + x1 x2 + 3 x2^2", "x1^3 - x2^3 + x1 x2^2"}) {
    auto sys = expand_system(parse_form(text, 2), 2);
    for (std::int64_t q : {2, 3, 4, 6}) {
      std::vector<std::int64_t> a(sys.r());
      for (auto& v : a) v = static_cast<std::int64_t>(g() % q);
      EXPECT_LT(std::abs(gauss_sum(sys, a, q) - naive_gauss(sys, a, q)), 1e-7) << text << " q=" << q;
    }
  }
}

TEST(GaussSum, Multiplicativity) {
  auto sys = expand_system(parse_form("x1^2 + 2 x2^2 + x2 x3 + x3^2", 3), 2);
  std::mt19937_64 g(17);
  for (auto [q1, q2] : {std::pair<std::int64_t, std::int64_t>{3, 4}, {5, 3}, {2, 7}}) {
    std::vector<std::int64_t> a1(sys.r()), a2(sys.r()), a(sys.r());
    for (std::size_t j = 0; j < sys.r(); ++j) {
      a1[j] = static_cast<std::int64_t>(g() % q1);
      a2[j] = static_cast<std::int64_t>(g() % q2);
      a[j] = (q2 * a1[j] + q1 * a2[j]) % (q1 * q2);
    }
    Complex lhs = gauss_sum(sys, a1, q1) * gauss_sum(sys, a2, q2);
    EXPECT_LT(std::abs(lhs - gauss_sum(sys, a, q1 * q2)), 1e-6 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(OscillatoryIntegral, ZeroBetaGivesVolume) {
  auto sys = expand_system(parse_form("x1^2 + x2^2", 2), 2);
  std::vector<double> zero(sys.r(), 0);
  Box box({1.5, 2});
  auto est = oscillatory_integral(sys, zero, box);
  EXPECT_NEAR(est.value.real(), std::pow(3.0, 2) * std::pow(4.0, 2), 1e-9);
  EXPECT_NEAR(est.value.imag(), 0, 1e-9);
}

TEST(OscillatoryIntegral, SeparableFresnelProduct) {
  auto sys = expand_system(parse_form("x1^2 + x2^2", 2), 1);
  for (double beta : {0.01, 0.05, -0.2}) {
    std::vector<double> b{beta};
    Complex one = fresnel(beta, 2);
    auto est = oscillatory_integral(sys, b, Box({2}));
    EXPECT_LT(std::abs(est.value - one * one), 1e-5) << beta;
  }
}

TEST(OscillatoryIntegral, UnitBoxRescaling) {
  auto sys = expand_system(parse_form("x1^2 + x2^2", 2), 2);
  std::vector<double> beta{0.01, -0.02, 0.015};
  Box box({2, 3});
  auto direct = oscillatory_integral(sys, beta, box);
  auto scaled_beta = unit_box_beta(sys, beta, box);
  auto unit_value = oscillatory_integral(sys, scaled_beta, Box({1, 1}));
  EXPECT_LT(std::abs(direct.value - std::pow(6.0, 2) * unit_value.value), 1e-4);
}

TEST(OscillatoryIntegral, MonteCarloAgreesWithQuadrature) {
  auto sys = expand_system(parse_form("x1^2 + x2^2", 2), 2);
  std::vector<double> beta{0.02, 0.01, -0.03};
  Box box({1, 2});
  auto quad = oscillatory_integral(sys, beta, box);
  IntegralOptions mc{IntegralMethod::MonteCarlo, 0.01, 2e6, 5, 1};
  auto est = oscillatory_integral(sys, beta, box, mc);
  EXPECT_LT(std::abs(est.value - quad.value), 5 * est.error);
  IntegralOptions strict{IntegralMethod::MonteCarlo, 1e-6, 1e4, 5, 1};
  EXPECT_THROW(oscillatory_integral(sys, beta, box, strict), BudgetExceeded);
}

TEST(MajorArc, TrivialArcClosedForm) {
  auto sys = expand_system(parse_form("x1^2 + x2^2", 2), 1);
  auto arc = ArcPoint::rational({0}, 1, {0.0});
  auto rep = major_arc_residual(sys, arc, Box({5}));
  EXPECT_NEAR(rep.T.real(), 121, 1e-9);
  EXPECT_NEAR(rep.approx.real(), 100, 1e-6);
  EXPECT_NEAR(rep.residual, 21, 1e-6);
}

TEST(MajorArc, RelativeResidualDecreasesWithP) {
  auto sys = expand_system(parse_form("x1^2 + x2^2 + x3^2", 3), 1);
  auto arc = ArcPoint::rational({1}, 3, {0.0});
  double previous = 1e9;
  // P a multiple of q keeps the residue classes balanced on the box
  for (double p : {6.0, 12.0, 24.0, 48.0}) {
    auto rep = major_arc_residual(sys, arc, Box({p}));
    const double rel = rep.residual / std::pow(2 * p, 3);
    EXPECT_LT(rel, previous) << p;
    previous = rel;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(MajorArc, ResidualSmallAcrossArcWidth) {
  auto sys = expand_system(parse_form("x1^2 + x2^2 + x3^2 + x4^2", 4), 1);
  const double p = 12;
  for (double beta : {0.0, 1e-4, 5e-4, 1e-3}) {
    auto arc = ArcPoint::rational({1}, 5, {beta});
    auto rep = major_arc_residual(sys, arc, Box({p}));
    EXPECT_LT(rep.residual, 0.1 * std::pow(2 * p, 4)) << beta;
  }
}

TEST(ClassifyArc, Examples) {
  ArcParams params;
  params.P = 100;
  std::vector<double> zero{0.0};
  auto c0 = classify_arc(zero, params);
  ASSERT_TRUE(c0.major);
  EXPECT_EQ(c0.point.homogenized->q, 1);
  EXPECT_EQ(c0.point.homogenized->a[0], 0);

  std::vector<double> golden{(std::sqrt(5.0) - 1) / 2};
  EXPECT_FALSE(classify_arc(golden, params).major);

  std::vector<double> third{1.0 / 3 + 1e-5};
  auto c1 = classify_arc(third, params);
  ASSERT_TRUE(c1.major);
  EXPECT_EQ(c1.point.homogenized->q, 3);
  EXPECT_EQ(c1.point.homogenized->a[0], 1);
  EXPECT_NEAR(c1.point.homogenized->beta[0], 1e-5, 1e-12);

  std::vector<double> pair{0.5, 1.0 / 3};
  auto c2 = classify_arc(pair, params);
  ASSERT_TRUE(c2.major);
  EXPECT_EQ(c2.point.homogenized->q, 6);
  EXPECT_EQ(c2.point.homogenized->a, (std::vector<std::int64_t>{3, 2}));

  std::vector<double> near_one{1 - 1e-6};
  auto c3 = classify_arc(near_one, params);
  ASSERT_TRUE(c3.major);
  EXPECT_EQ(c3.point.homogenized->q, 1);
  EXPECT_NEAR(c3.point.homogenized->beta[0], -1e-6, 1e-12);

  ArcParams bad = params;
  bad.theta = 0;
  EXPECT_THROW(classify_arc(zero, bad), InputError);
}

TEST(ClassifyArc, MonotoneInTheta) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> alpha{u(g)};
    bool was_major = false;
    for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      ArcParams params;
      params.P = 50;
      params.theta = theta;
      const bool major = classify_arc(alpha, params).major;
      if (was_major) EXPECT_TRUE(major) << alpha[0] << " theta=" << theta;
      was_major = major;
    }
  }
}

TEST(WeylDifference, MatchesDirectShift) {
  auto sys = expand_system(parse_form("x1^3 + x1 x2^2 - 2 x2^3", 2), 2);
  std::vector<BigInt> h{2, -1};
  auto diff = weyl_difference(sys, 1, h);
  std::mt19937_64 g(29);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BigInt> x(sys.num_vars());
    for (auto& v : x) v = static_cast<int>(g() % 11) - 5;
    auto y = x;
    y[sys.var(1, 0)] += h[0];
    y[sys.var(1, 1)] += h[1];
    auto fx = sys.evaluate(x), fy = sys.evaluate(y);
    for (std::size_t j = 0; j < sys.r(); ++j)
      EXPECT_EQ(diff[j].evaluate<BigInt>(std::span<const BigInt>(x)), fy[j] - fx[j]);
  }
  for (std::size_t j = 0; j < sys.r(); ++j) {
    const int before = sys.polys()[j].block_degree(sys.var(1, 0), 2);
    if (before > 0) EXPECT_EQ(diff[j].block_degree(sys.var(1, 0), 2), before - 1);
  }
}

TEST(WeylCheck, EqualityAtZeroAndBoundElsewhere) {
  auto sys = expand_system(parse_form("x1^2 + x2^2", 2), 2);
  Box box({2, 1});
  std::vector<double> zero(sys.r(), 0);
  auto w0 = weyl_cs_check(sys, zero, box, 0);
  EXPECT_TRUE(w0.holds);
  EXPECT_NEAR(w0.lhs_squared, w0.rhs_bound, 1e-6 * w0.rhs_bound);
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> alpha(sys.r());
    for (auto& v : alpha) v = u(g);
    EXPECT_TRUE(weyl_cs_check(sys, alpha, box, trial % 2).holds);
  }
}
