#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <shearframe/trigpoly.hpp>

using namespace shearframe;

namespace {

// Direct sum Σ c_k e^{-ikξ} with no argument reduction.
std::complex<double> naive_eval(const TrigPoly& p, double xi) {
  std::complex<double> s{};
  for (int k = p.k_min(); k <= p.k_max(); ++k) s += p.coeff(k) * std::polar(1.0, -k * xi);
  return s;
}

}  // namespace

TEST(TrigPoly, EmptyPolynomialEvaluatesToZero) {
  TrigPoly p(3, {0.0, 0.0});
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p(1.3), std::complex<double>(0.0, 0.0));
}

TEST(TrigPoly, TrimsZeroEnds) {
  TrigPoly p(-2, {0.0, 1.0, 2.0, 0.0});
  EXPECT_EQ(p.k_min(), -1);
  EXPECT_EQ(p.k_max(), 0);
  EXPECT_EQ(p.coeff(-1), std::complex<double>(1.0, 0.0));
  EXPECT_EQ(p.coeff(5), std::complex<double>(0.0, 0.0));
}

TEST(TrigPoly, AgreesWithNaiveSum) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> c(9);
  for (auto& v : c) v = {u(rng), u(rng)};
  const TrigPoly p(-4, c);
  for (int i = 0; i < 200; ++i) {
    const double xi = 3.0 * u(rng);
    EXPECT_LT(std::abs(p(xi) - naive_eval(p, xi)), 1e-13);
  }
}

TEST(TrigPoly, PeriodicProperty) {
  const TrigPoly p = bspline_mask(7);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double xi = u(rng);
    EXPECT_LE(std::abs(p(xi) - p(xi + two_pi)), 1e-12);
  }
}

TEST(TrigPoly, BSplineMaskCoefficientsAreBinomial) {
  const TrigPoly a = bspline_mask(4);
  const double expected[] = {1, 4, 6, 4, 1};
  ASSERT_EQ(a.k_min(), 0);
  ASSERT_EQ(a.k_max(), 4);
  for (int k = 0; k <= 4; ++k) EXPECT_DOUBLE_EQ(a.coeff(k).real(), expected[k] / 16.0);
  EXPECT_NEAR(std::abs(a(0.0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a(pi)), 0.0, 1e-15);
}

TEST(TrigPoly, BSplineMaskRejectsOrderZero) { EXPECT_THROW(bspline_mask(0), std::invalid_argument); }

TEST(TrigPoly, BSplineMaskMatchesClosedForm) {
  for (int n = 1; n <= 12; ++n) {
    const TrigPoly a = bspline_mask(n);
    for (double xi : {-2.9, -1.0, 0.3, 1.7, 3.1}) {
      const auto closed = std::pow(0.5 * (1.0 + std::polar(1.0, -xi)), n);
      EXPECT_LT(std::abs(a(xi) - closed), 1e-13) << n << " " << xi;
    }
  }
}

TEST(TrigPoly, HighpassIsModulatedConjugateShift) {
  const TrigPoly a = bspline_mask(5);
  const TrigPoly b = highpass_from_lowpass(a);
  for (double xi = -pi; xi <= pi; xi += 0.01) {
    const auto expected = std::polar(1.0, -xi) * std::conj(a(xi + pi));
    EXPECT_LT(std::abs(b(xi) - expected), 1e-13);
  }
}

TEST(TrigPoly, HighpassVanishesAtOriginAndKeepsModulusTwice) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> c(6);
  for (auto& v : c) v = {u(rng), u(rng)};
  const TrigPoly a(-2, c);
  const TrigPoly bb = highpass_from_lowpass(highpass_from_lowpass(a));
  for (int k = a.k_min(); k <= a.k_max(); ++k) EXPECT_LT(std::abs(bb.coeff(k) + a.coeff(k)), 1e-15);
  EXPECT_LT(std::abs(highpass_from_lowpass(bspline_mask(3))(0.0)), 1e-15);
  EXPECT_THROW(highpass_from_lowpass(TrigPoly{}), std::invalid_argument);
}

TEST(TrigPoly, DyadicArithmeticIsExact) {
  const DyadicPoly a{0, {1, 1}, 1};
  const DyadicPoly p = power(a, 3);
  EXPECT_EQ(p.num, (std::vector<std::int64_t>{1, 3, 3, 1}));
  EXPECT_EQ(p.log2_den, 3);
  const DyadicPoly s = add(DyadicPoly{-1, {1}, 2}, DyadicPoly{0, {3}, 1});
  const TrigPoly t = TrigPoly::from_dyadic(s);
  EXPECT_DOUBLE_EQ(t.coeff(-1).real(), 0.25);
  EXPECT_DOUBLE_EQ(t.coeff(0).real(), 1.5);
}

TEST(TrigPoly, CsvHasHeaderAndOneRowPerCoefficient) {
  std::ostringstream os;
  write_csv(os, bspline_mask(2));
  EXPECT_EQ(os.str(), "k,re,im\n0,0.25,0\n1,0.5,0\n2,0.25,0\n");
}
