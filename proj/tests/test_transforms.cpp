// Copyright 2026 The axbstar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <chrono>

#include "axb/corpus.hpp"
#include "axb/errors.hpp"
#include "axb/transforms.hpp"

using namespace axb;

namespace {

const Window kWin{8.0, 8.0};

GridFunction2D gauss(double a, double b = -1.0, std::array<cplx, 2> s = {0.0, 0.0}, Window w = kWin) {
  return sample(AnalyticHandle::gaussian2(a, b < 0 ? a : b, s), w, 64, 64);
}

std::vector<GridFunction2D> triple(Window w) {
  return {gauss(1.0, -1, {0, 0}, w), gauss(0.8, 1.3, {0.4, 0.0}, w), gauss(1.5, 0.9, {0.0, -0.5}, w)};
}

double max_abs_vs(const GridFunction2D& g, const std::function<cplx(double, double)>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) m = std::max(m, std::abs(g(i, j) - f(g.x1(i), g.x2(j))));
  }
  return m;
}

}  // namespace

TEST(SymplecticForm, Antisymmetric) {
  EXPECT_EQ(SymplecticForm::omega({1, 2}, {3, 4}), -SymplecticForm::omega({3, 4}, {1, 2}));
  EXPECT_EQ(SymplecticForm::omega({1, 0}, {0, 1}), 1.0);
}

TEST(Fourier, GaussianOracle) {
  const auto f = fourier(gauss(0.5));
  EXPECT_LT(max_abs_vs(f, [](double a, double b) { return 2 * kPi * std::exp(-(a * a + b * b) / 2); }),
            1e-12);
}

TEST(Fourier, FirstMomentMatchesClosedForm) {
  // x1 e^{-|x|^2/2} -> i 2 pi xi1 e^{-|xi|^2/2} with the +i sign kernel
  const auto h = AnalyticHandle(2, Polynomial::monomial(1, 0, 1.0), {0.5, 0, 0, 0.5}, {0, 0}, 1.0);
  const auto f = fourier(sample(h, {9.0, 9.0}, 64, 64));
  EXPECT_LT(max_abs_vs(f, [](double a, double b) {
              return cplx(0.0, 2 * kPi * a) * std::exp(-(a * a + b * b) / 2);
            }),
            1e-11);
  const auto oracle = h.fourier();
  EXPECT_LT(max_abs_vs(f, [&](double a, double b) { return oracle.eval(a, b); }), 1e-11);
}

TEST(Fourier, EvenRealStaysEvenReal) {
  const auto f = fourier(sample(AnalyticHandle::gaussian2(0.7, 0.4), {10.0, 10.0}, 64, 64));
  for (std::size_t i = 1; i < f.n1(); ++i) {
    for (std::size_t j = 1; j < f.n2(); ++j) {
      EXPECT_LT(std::abs(f(i, j).imag()), 1e-12);
      EXPECT_LT(std::abs(f(i, j) - f(f.n1() - i, f.n2() - j)), 1e-12);
    }
  }
}

TEST(Fourier, RejectsUndecayedInput) {
  const GridFunction2D u(kWin, 16, 16, std::vector<cplx>(256, 1.0));
  try {
    fourier(u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowTooSmall);
  }
}

TEST(SymplecticFourier, RadialGaussian) {
  const auto f = symplectic_fourier(gauss(0.5));
  EXPECT_LT(max_abs_vs(f, [](double a, double b) { return 2 * kPi * std::exp(-(a * a + b * b) / 2); }),
            1e-12);
}

TEST(SymplecticFourier, AnisotropicSwapsAxes) {
  // e^{-x1^2 - x2^2/2}: SF = F(y2, -y1) = 2 pi / sqrt2 e^{-y2^2/4 - y1^2/2}
  const auto u = sample(AnalyticHandle::gaussian2(1.0, 0.5), kWin, 64, 64);
  const auto f = symplectic_fourier(u);
  EXPECT_LT(max_abs_vs(f, [](double a, double b) {
              return kPi * std::sqrt(2.0) * std::exp(-b * b / 4 - a * a / 2);
            }),
            1e-12);
}

TEST(SymplecticFourier, InvolutionOnCorpus) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& e : default_corpus()) {
    const auto u = sample(e.handle, kWin, 128, 128);
    auto back = symplectic_fourier(symplectic_fourier(u));
    back *= 1.0 / (4 * kPi * kPi);
    EXPECT_TRUE(back.same_shape(u));
    EXPECT_LT(relative_l2(back, u), 1e-6) << e.name;
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
}

TEST(SymplecticFourier, OddStaysOdd) {
  const auto h = AnalyticHandle(2, Polynomial::monomial(0, 1, 1.0), {1.0, 0.2, 0.2, 0.6}, {0, 0}, 1.0);
  const auto f = symplectic_fourier(sample(h, kWin, 64, 64));
  for (std::size_t i = 1; i < 64; ++i) {
    for (std::size_t j = 1; j < 64; ++j) EXPECT_LT(std::abs(f(i, j) + f(64 - i, 64 - j)), 1e-12);
  }
}

TEST(TwistedConvolution, FftMatchesDirect) {
  const auto c = default_corpus();
  const auto u = sample(c[1].handle, {9.0, 9.0}, 32, 32);
  const auto v = sample(c[0].handle, {9.0, 9.0}, 32, 32);
  for (double q : {0.1, 0.5, 1.0}) {
    const auto a = twisted_convolution(u, v, q, ConvolutionMethod::Direct);
    const auto b = twisted_convolution(u, v, q, ConvolutionMethod::Fft);
    EXPECT_LT(max_abs_difference(a, b), 1e-8) << q;
  }
}

TEST(TwistedConvolution, SmallQIsPlainConvolution) {
  const auto u = gauss(1.0);
  const auto v = gauss(0.5, 1.5, {0.3, 0.0});
  EXPECT_LT(max_abs_difference(twisted_convolution(u, v, 1e-6), convolution(u, v)), 1e-5);
  EXPECT_THROW(twisted_convolution(u, v, 0.0), Error);
}

TEST(TwistedConvolution, CenteredGaussianOracle) {
  const double a = 1.0, b = 0.5, q = 0.7;
  const auto r = twisted_convolution(gauss(a), gauss(b), q);
  const double k = a * b / (a + b) + q * q / (4 * (a + b));
  EXPECT_LT(max_abs_vs(r, [&](double x, double y) { return kPi / (a + b) * std::exp(-k * (x * x + y * y)); }),
            1e-10);
}

TEST(TwistedConvolution, Associativity) {
  const auto g = triple({11.0, 11.0});
  const double q = 0.5;
  for (const auto& u : g) {
    for (const auto& v : g) {
      for (const auto& w : g) {
        const auto l = twisted_convolution(twisted_convolution(u, v, q), w, q);
        const auto r = twisted_convolution(u, twisted_convolution(v, w, q), q);
        EXPECT_LT(relative_l2(l, r), 1e-6);
      }
    }
  }
}

TEST(TwistedConvolution, Conjugation) {
  const auto c = default_corpus();
  const auto u = sample(c[1].handle, {9.0, 9.0}, 32, 32);
  const auto v = sample(c[4].handle, {9.0, 9.0}, 32, 32);
  auto conj = [](GridFunction2D g) {
    for (std::size_t i = 0; i < g.n1(); ++i)
      for (std::size_t j = 0; j < g.n2(); ++j) g(i, j) = std::conj(g(i, j));
    return g;
  };
  const auto l = conj(twisted_convolution(u, v, 0.4, ConvolutionMethod::Direct));
  const auto r = twisted_convolution(conj(u), conj(v), -0.4, ConvolutionMethod::Direct);
  EXPECT_LT(max_abs_difference(l, r), 1e-12);
}

TEST(Weyl, ZeroQIsPointwise) {
  const auto c = default_corpus();
  const auto u = sample(c[1].handle, kWin, 128, 128);
  const auto v = sample(c[3].handle, kWin, 128, 128);
  EXPECT_LT(max_abs_difference(weyl_product(u, v, 0.0), u * v), 1e-10 * (u * v).max_abs());
}

TEST(Weyl, SmallQConcentricPair) {
  const auto u = gauss(1.0);
  const auto v = gauss(0.5);
  EXPECT_LT(max_abs_difference(weyl_product(u, v, 1e-3), u * v), 1e-4);
}

TEST(Weyl, SmallQFirstOrderBound) {
  const auto f = AnalyticHandle::gaussian2(1.0, 1.0);
  const auto g = AnalyticHandle::gaussian2(1.0, 1.0, {1.0, -1.0});
  const auto u = sample(f, kWin, 64, 64);
  const auto v = sample(g, kWin, 64, 64);
  const double q = 1e-3;
  const double bound = q * poisson_bracket(f, g, kWin, 64, 64).max_abs();
  EXPECT_LT(max_abs_difference(weyl_product(u, v, q), u * v), 1.01 * bound + 1e-8);
}

TEST(Weyl, RouteAMatchesRouteB) {
  const auto c = default_corpus();
  const auto u = sample(c[0].handle, kWin, 64, 64);
  const auto v = sample(c[2].handle, kWin, 64, 64);
  const auto a = weyl_product(u, v, 0.5);
  const auto b = weyl_product_route_b(u, v, 0.5);
  EXPECT_LT(relative_l2(a, b), 1e-6);
}

TEST(Weyl, KappaIsConstantAcrossPairs) {
  const auto c = default_corpus();
  std::vector<std::pair<AnalyticHandle, AnalyticHandle>> pairs;
  for (std::size_t k = 0; k < 5; ++k) pairs.emplace_back(c[k].handle, c[(k + 2) % 5].handle);
  const auto fit = fit_kappa(pairs, 1e-2, kWin, 64, 64);
  EXPECT_LT(fit.spread, 1e-3);
  EXPECT_LT(std::abs(fit.kappa - cplx(0.0, 1.0)), 1e-3);
}

TEST(Weyl, Associativity) {
  const auto g = triple(kWin);
  const double q = 0.5;
  for (const auto& u : g) {
    for (const auto& v : g) {
      for (const auto& w : g) {
        const auto l = weyl_product(weyl_product(u, v, q), w, q);
        const auto r = weyl_product(u, weyl_product(v, w, q), q);
        EXPECT_LT(relative_l2(l, r), 1e-5);
      }
    }
  }
}
