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

#include <random>
#include <sstream>

#include "axb/errors.hpp"
#include "axb/numfield.hpp"

using namespace axb;

namespace {

AnalyticHandle sample_handle() {
  Polynomial p = Polynomial::monomial(1, 0, {1.0, 0.5}) + Polynomial::monomial(0, 2, -0.25);
  return AnalyticHandle(2, p, {{{1.0, 0.2}, 0.3, 0.3, {0.7, -0.1}}}, {{{0.1, 0.0}, {0.0, -0.4}}},
                        {2.0, 0.0});
}

}  // namespace

TEST(Handle, ProductMatchesPointwise) {
  const auto f = sample_handle();
  const auto g = AnalyticHandle::gaussian2(0.5, {1.0, 0.3}, {{0.2, {0.0, 1.0}}}, 3.0);
  const auto fg = f * g;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const cplx z1(d(rng), d(rng));
    const cplx z2(d(rng), d(rng));
    const cplx want = f.eval(z1, z2) * g.eval(z1, z2);
    EXPECT_LT(std::abs(fg.eval(z1, z2) - want), 1e-12 * (1.0 + std::abs(want)));
  }
}

TEST(Handle, DerivativeMatchesFiniteDifference) {
  const auto f = sample_handle();
  for (int axis = 0; axis < 2; ++axis) {
    const auto df = f.derivative(axis);
    const double h = 1e-5;
    for (double x : {-0.7, 0.0, 1.3}) {
      const cplx z1(x, 0.2);
      const cplx z2(0.4, -x);
      const cplx e = axis == 0 ? cplx(h) : 0.0;
      const cplx e2 = axis == 1 ? cplx(h) : 0.0;
      const cplx fd = (f.eval(z1 + e, z2 + e2) - f.eval(z1 - e, z2 - e2)) / (2.0 * h);
      EXPECT_LT(std::abs(df.eval(z1, z2) - fd), 1e-8);
    }
  }
}

TEST(Handle, FourierOfGaussian1D) {
  // int e^{ix xi} e^{-x^2} dx = sqrt(pi) e^{-xi^2/4}
  const auto f = AnalyticHandle::gaussian1(1.0);
  const auto F = f.fourier();
  for (double xi : {0.0, 0.5, 2.0, -3.0}) {
    EXPECT_NEAR(std::abs(F.eval(xi) - std::sqrt(kPi) * std::exp(-xi * xi / 4)), 0.0, 1e-14);
  }
}

TEST(Handle, FourierAgainstQuadrature) {
  const auto f = AnalyticHandle(1, Polynomial::monomial(2, 0, 1.0) + Polynomial(0.5),
                                {{{0.8, 0.3}, 0, 0, 0}}, {{{0.3, -0.2}, 0.0}}, {1.0, -1.0});
  const auto F = f.fourier();
  for (double xi : {-1.5, 0.0, 0.7, 2.2}) {
    cplx acc = 0.0;
    const double h = 0.01;
    for (double x = -20.0; x <= 20.0; x += h) acc += std::exp(cplx(0.0, x * xi)) * f.eval(x);
    acc *= h;
    EXPECT_LT(std::abs(F.eval(xi) - acc), 1e-10) << xi;
  }
}

TEST(Handle, Fourier2DWithCoupling) {
  const auto f = sample_handle();
  const auto F = f.fourier();
  const cplx xi1 = 0.4;
  const cplx xi2 = -0.9;
  cplx acc = 0.0;
  const double h = 0.05;
  for (double x1 = -12.0; x1 <= 12.0; x1 += h) {
    for (double x2 = -12.0; x2 <= 12.0; x2 += h) {
      acc += std::exp(cplx(0.0, 1.0) * (x1 * xi1 + x2 * xi2)) * f.eval(x1, x2);
    }
  }
  acc *= h * h;
  EXPECT_LT(std::abs(F.eval(xi1, xi2) - acc), 1e-9);
}

TEST(Handle, LaplaceOfGaussian) {
  const auto f = AnalyticHandle::gaussian1(1.0);
  for (cplx z : {cplx(0.0), cplx(1.0, 0.5), cplx(-2.0, 3.0)}) {
    EXPECT_LT(std::abs(f.laplace(z) - std::sqrt(kPi) * std::exp(z * z / 4.0)), 1e-12);
  }
}

TEST(Handle, SliceAndSubstitute) {
  const auto f = sample_handle();
  const auto s = f.slice(cplx(0.3, 0.1));
  EXPECT_LT(std::abs(s.eval(cplx(-0.5, 0.2)) - f.eval(cplx(0.3, 0.1), cplx(-0.5, 0.2))), 1e-13);
  const std::array<double, 4> a{0.0, 1.0, -1.0, 0.0};
  const auto g = f.substitute(a);
  const cplx z1(0.3, -0.2), z2(-1.1, 0.4);
  EXPECT_LT(std::abs(g.eval(z1, z2) - f.eval(z2, -z1)), 1e-13);
}

TEST(Handle, RejectsNonPositiveQuadratic) {
  EXPECT_THROW(AnalyticHandle::gaussian1(-1.0), Error);
  EXPECT_THROW(AnalyticHandle(2, Polynomial(1.0), {{1.0, 2.0, 2.0, 1.0}}, {{0.0, 0.0}}, 1.0), Error);
}

TEST(Handle, JsonRoundtrip) {
  const auto f = sample_handle();
  const auto g = handle_from_json(to_json(f));
  EXPECT_EQ(f.eval(0.3, 0.4), g.eval(0.3, 0.4));
  EXPECT_THROW(handle_from_json(nlohmann::json::parse(R"({"Q": 1})")), Error);
}

TEST(Grid, SampleAndWindowCheck) {
  const auto g = AnalyticHandle::gaussian2(1.0, 1.0);
  const auto u = sample(g, {8.0, 8.0}, 64, 64);
  EXPECT_EQ(u.x1(32), 0.0);
  EXPECT_NEAR(std::abs(u(32, 32)), 1.0, 1e-15);
  // L2 norm of e^{-|x|^2}: sqrt(pi/2)
  EXPECT_NEAR(l2_norm(u), std::sqrt(kPi / 2.0), 1e-12);
  const auto wide = AnalyticHandle::gaussian2(0.05, 0.05);
  EXPECT_THROW(sample(wide, {4.0, 4.0}, 32, 32), Error);
  try {
    sample(wide, {4.0, 4.0}, 32, 32);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowTooSmall);
  }
}

TEST(Grid, ShapeErrors) {
  EXPECT_THROW(GridFunction2D::zeros({8, 8}, 12, 16), Error);
  const auto a = GridFunction2D::zeros({8, 8}, 16, 16);
  const auto b = GridFunction2D::zeros({8, 8}, 32, 16);
  EXPECT_THROW(l2_distance(a, b), Error);
}

TEST(Grid, BinaryRoundtrip) {
  std::mt19937 rng(3);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<cplx> v(16 * 32);
    for (auto& x : v) x = {d(rng), d(rng)};
    const GridFunction2D u({3.5, 6.0}, 16, 32, v);
    std::stringstream ss;
    u.write_binary(ss);
    EXPECT_EQ(ss.str().size(), 4 * 8 + 2 * 4 + v.size() * 16);
    const auto w = GridFunction2D::read_binary(ss);
    EXPECT_TRUE(u.same_shape(w));
    EXPECT_EQ(u.values(), w.values());
  }
  std::stringstream bad("abc");
  EXPECT_THROW(GridFunction2D::read_binary(bad), Error);
}

TEST(Grid, Metrics) {
  const auto g = AnalyticHandle::gaussian2(1.0, 1.0);
  const auto u = sample(g, {8, 8}, 32, 32);
  auto v = u;
  v *= 1.5;
  EXPECT_NEAR(relative_l2(v, u), 0.5, 1e-14);
  EXPECT_NEAR(max_abs_difference(v, u), 0.5, 1e-14);
}

TEST(Contour, SampleLayout) {
  const auto c = sample_contour([](cplx z) { return std::exp(-z * z); }, 0.5, 4.0, 33);
  EXPECT_DOUBLE_EQ(c.t(0), -4.0);
  EXPECT_DOUBLE_EQ(c.t(32), 4.0);
  EXPECT_DOUBLE_EQ(c.t(16), 0.0);
  EXPECT_THROW(ContourSamples(0.0, 1.0, std::vector<cplx>(8)), Error);
}
