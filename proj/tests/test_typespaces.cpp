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

#include "axb/errors.hpp"
#include "axb/transforms.hpp"
#include "axb/typespaces.hpp"

using namespace axb;

namespace {
const std::vector<double> kHalf{0.5};
const std::vector<double> kHalf2{0.5, 0.5};
}  // namespace

TEST(Certify, GaussianExactConstants) {
  const auto c = certify(AnalyticHandle::gaussian1(1.0), kHalf, kHalf);
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.a, std::vector<double>{1.0});
  EXPECT_EQ(c.b, std::vector<double>{1.0});
  EXPECT_EQ(c.C, 1.0);
  EXPECT_LE(c.residual, 0.0);
  EXPECT_EQ(c.residual, 0.0);
}

TEST(Certify, RejectsTooFastDecay) {
  const auto c = certify(AnalyticHandle::gaussian1(1.0), {0.25}, {0.75});
  EXPECT_FALSE(c.certified());
  EXPECT_GT(c.residual, 0.0);
  EXPECT_EQ(c.a[0], constant_grid().front());
  // the violation shows up outside the base box, where a x^4 overtakes x^2
  ASSERT_EQ(c.worst_probe.size(), 1u);
  EXPECT_GT(std::abs(c.worst_probe[0].real()), 8.0);
}

TEST(Certify, InvalidExponents) {
  const auto f = AnalyticHandle::gaussian1(1.0);
  EXPECT_THROW(certify(f, {0.25}, {0.5}), Error);
  EXPECT_THROW(certify(f, {0.0}, {0.5}), Error);
  EXPECT_THROW(certify(f, {0.5}, {1.0}), Error);
  try {
    certify(f, {0.25}, {0.5});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidExponents);
  }
}

TEST(Certify, TwoDimensionalGaussian) {
  const auto c = certify(AnalyticHandle::gaussian2(1.0, 1.0), kHalf2, kHalf2);
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.a, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(c.b, (std::vector<double>{1.0, 1.0}));
}

TEST(Certify, MonotoneInConstants) {
  const auto f = AnalyticHandle::gaussian1(1.0, 0.3);
  const auto c = certify(f, kHalf, kHalf);
  ASSERT_TRUE(c.certified());
  EXPECT_LE(bound_residual(f, kHalf, kHalf, c.a, c.b, c.C), 0.0);
  for (double s : {1.0, 2.0, 8.0}) {
    EXPECT_LE(bound_residual(f, kHalf, kHalf, {c.a[0] / s}, {c.b[0] * s}, c.C * s), 0.0);
  }
}

TEST(Certify, DensityStable) {
  const auto f = AnalyticHandle::gaussian1(1.0);
  ProbeSpec dense;
  dense.points = 128;
  const auto c1 = certify(f, kHalf, kHalf);
  const auto c2 = certify(f, kHalf, kHalf, dense);
  EXPECT_LT(std::abs(c1.residual - c2.residual), 1e-9);
  EXPECT_EQ(c1.a, c2.a);
}

TEST(Sigma, Examples) {
  EXPECT_EQ(sigma({0.5, 0.7}), (std::vector<double>{0.7, 0.5}));
  EXPECT_EQ(sigma({0.3, 0.3}), (std::vector<double>{0.3, 0.3}));
  EXPECT_EQ(sigma(sigma({0.1, 0.9})), (std::vector<double>{0.1, 0.9}));
  EXPECT_THROW(sigma({0.5}), Error);
}

TEST(ProductExponents, Mult) {
  const auto r = product_exponents({0.5}, {0.5}, {0.75}, {1.0 / 3.0});
  EXPECT_EQ(r.alpha, std::vector<double>{0.5});
  EXPECT_EQ(r.beta, std::vector<double>{0.5});
  const auto same = product_exponents({0.6}, {0.7}, {0.6}, {0.7});
  EXPECT_EQ(same.alpha, std::vector<double>{0.6});
  const auto f = AnalyticHandle::gaussian1(1.0);
  const auto g = AnalyticHandle::gaussian1(2.0);
  const auto e = product_exponents(kHalf, kHalf, kHalf, kHalf);
  EXPECT_TRUE(certify(f * g, e.alpha, e.beta).certified());
}

TEST(Multiplier, ExponentialFactor) {
  const auto f = AnalyticHandle::gaussian1(1.0);
  for (double xi : {-2.0, -0.5, 1.0, 2.0}) {
    EXPECT_TRUE(certify(f.times_exp_linear({-xi, 0.0}), kHalf, kHalf).certified()) << xi;
  }
}

TEST(SfLemma, RadialGaussian) {
  const auto r = check_sf_lemma(AnalyticHandle::gaussian2(1.0, 1.0), kHalf2, kHalf2);
  EXPECT_TRUE(r.passed());
}

TEST(SfLemma, AnisotropicSwapsWidths) {
  const auto r = check_sf_lemma(AnalyticHandle::gaussian2(1.0, 0.5), kHalf2, kHalf2);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.input.a, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(r.output.a, (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(r.swapped_a, r.output.a);
  EXPECT_GT(r.unswapped_residual, 1.0);
}

TEST(WeylStability, ProductStaysCertified) {
  const Window w{8.0, 8.0};
  const auto f = AnalyticHandle::gaussian2(1.0, 1.0);
  const auto g = AnalyticHandle::gaussian2(0.8, 1.2, {0.3, -0.2});
  ASSERT_TRUE(certify(f, kHalf2, sigma(kHalf2)).certified());
  ASSERT_TRUE(certify(g, kHalf2, sigma(kHalf2)).certified());
  const auto p = weyl_product(sample(f, w, 64, 64), sample(g, w, 64, 64), 0.5);
  EXPECT_TRUE(certify(p, kHalf2, sigma(kHalf2)).certified());
}

TEST(Certificate, Json) {
  const auto c = certify(AnalyticHandle::gaussian1(1.0), kHalf, kHalf);
  const auto j = to_json(c);
  EXPECT_EQ(j["certified"], true);
  EXPECT_EQ(j["C"], 1.0);
  EXPECT_EQ(j["probe_spec"]["points"], 64);
}
