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

#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "axb/corpus.hpp"
#include "axb/errors.hpp"
#include "axb/transforms.hpp"
#include "axb/twisted_weyl.hpp"

using namespace axb;

namespace {

// k = 1 at q = 0.3: T-images decay like e^{-(pi/4q)|x|}, so the window is wide.
constexpr Window kWide{14.0, 14.0};
constexpr std::size_t kWideN = 128;
// k = 0 at q = 0.5: Laplace weights reach e^{pi |x|}; a small window keeps the
// roundoff plateau low.
constexpr Window kNarrow{6.0, 6.0};
constexpr std::size_t kNarrowN = 64;

AnalyticHandle unit_gaussian() { return AnalyticHandle::gaussian2(1.0, 1.0); }

AnalyticHandle corpus_handle(const std::string& name) {
  for (const auto& e : default_corpus()) {
    if (e.name == name) return e.handle;
  }
  throw std::runtime_error("no corpus entry " + name);
}

// Gaussian-family triple with widths >= 1, for k = 0.
std::vector<AnalyticHandle> narrow_triple() {
  Polynomial p(1.0);
  p.add({1, 1}, 0.5);
  return {unit_gaussian(), corpus_handle("shifted"),
          AnalyticHandle(2, p, {1.3, 0.0, 0.0, 1.5}, {0.2, 0.0})};
}

TwistedObservable k0_element(const AnalyticHandle& f) {
  return tau_partial(0, 0.5, TwistedObservable::from_handle(f, kNarrow, kNarrowN, 0, 0.5));
}

bool bitwise_equal(const GridFunction2D& a, const GridFunction2D& b) {
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    if (a.values()[i] != b.values()[i]) return false;
  }
  return true;
}

PipelineOptions samples_only() {
  PipelineOptions o;
  o.use_image = false;
  return o;
}

// Closed form of the Weyl product of two pure Gaussian handles at complex w:
// a Gaussian integral over (a, b) in R^4.
cplx weyl_gaussian_oracle(const AnalyticHandle& u, const AnalyticHandle& v, double q, cplx w1, cplx w2) {
  using M4 = Eigen::Matrix<cplx, 4, 4>;
  using V4 = Eigen::Matrix<cplx, 4, 1>;
  using M2 = Eigen::Matrix<cplx, 2, 2>;
  using V2 = Eigen::Matrix<cplx, 2, 1>;
  auto qm = [](const AnalyticHandle& f) {
    M2 m;
    m << f.q()[0], f.q()[1], f.q()[2], f.q()[3];
    return m;
  };
  const M2 qu = qm(u);
  const M2 qv = qm(v);
  const V2 su(u.s()[0], u.s()[1]);
  const V2 sv(v.s()[0], v.s()[1]);
  const V2 w(w1, w2);
  M4 m = M4::Zero();
  m.block<2, 2>(0, 0) = qu;
  m.block<2, 2>(2, 2) = qv;
  const cplx iq(0.0, 1.0 / q);
  // i omega(a, b) / q = (i/q)(a1 b2 - a2 b1)
  m(0, 3) -= 0.5 * iq;
  m(3, 0) -= 0.5 * iq;
  m(1, 2) += 0.5 * iq;
  m(2, 1) += 0.5 * iq;
  V4 beta;
  beta.head<2>() = -2.0 * qu * w + su;
  beta.tail<2>() = -2.0 * qv * w + sv;
  const cplx g0 = -(w.transpose() * qu * w)(0) + (su.transpose() * w)(0) - (w.transpose() * qv * w)(0) +
                  (sv.transpose() * w)(0);
  Eigen::ComplexEigenSolver<M4> es(m);
  cplx sqrt_det = 1.0;
  for (int i = 0; i < 4; ++i) sqrt_det *= std::sqrt(es.eigenvalues()(i));
  const cplx quad = (beta.transpose() * m.inverse() * beta)(0) / 4.0;
  const double pref = 1.0 / ((2.0 * kPi * q) * (2.0 * kPi * q));
  return pref * u.scale() * v.scale() * kPi * kPi / sqrt_det * std::exp(quad + g0);
}

}  // namespace

// ------------------------------------------------------------ intertwiners

TEST(PartialIntertwiners, IdentityAtZeroQ) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), {8.0, 8.0}, 64);
  for (int k : {0, 1}) {
    const auto t = T_partial(k, 0.0, u);
    const auto s = tau_partial(k, 0.0, u);
    EXPECT_LT(max_abs_difference(t.samples(), u.samples()), 1e-8);
    EXPECT_LT(max_abs_difference(s.samples(), u.samples()), 1e-8);
  }
}

TEST(PartialIntertwiners, TauAfterTFromSamples) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN);
  const auto t = T_partial(1, 0.3, u, 0.0, samples_only());
  EXPECT_NO_THROW(check_window(t.samples()));
  const auto back = tau_partial(1, 0.3, t, std::nullopt, samples_only());
  EXPECT_LT(relative_l2(back.samples(), u.samples()), 1e-6);
}

TEST(PartialIntertwiners, TAfterTauThroughCarriedImage) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN);
  const auto s = tau_partial(1, 0.3, u);
  ASSERT_TRUE(s.image().has_value());
  EXPECT_LT(relative_l2(T_partial(1, 0.3, s).samples(), u.samples()), 1e-6);

  const auto u0 = TwistedObservable::from_handle(unit_gaussian(), kNarrow, kNarrowN, 0, 0.5);
  const auto s0 = tau_partial(0, 0.5, u0);
  EXPECT_LT(relative_l2(T_partial(0, 0.5, s0).samples(), u0.samples()), 1e-6);
}

TEST(PartialIntertwiners, TauImageIsNotBandLimited) {
  // tau u has a spectrum decaying like e^{-log^2|s| / 4q^2}; going back through
  // its samples alone has to be refused rather than answered wrongly.
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN);
  const auto s = tau_partial(1, 0.3, u);
  try {
    T_partial(1, 0.3, s, 0.0, samples_only());
    FAIL() << "expected ContourDivergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContourDivergence);
  }
}

TEST(PartialIntertwiners, K0OnPlainGaussianDiverges) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kNarrow, kNarrowN, 0, 0.5);
  try {
    T_partial(0, 0.5, u);
    FAIL() << "expected ContourDivergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContourDivergence);
  }
}

TEST(PartialIntertwiners, Linearity) {
  const auto a = sample(unit_gaussian(), kWide, kWideN, kWideN);
  const auto b = sample(corpus_handle("chiral"), kWide, kWideN, kWideN);
  const auto ta = T_partial(1, 0.3, TwistedObservable(a), 0.0, samples_only()).samples();
  const auto tb = T_partial(1, 0.3, TwistedObservable(b), 0.0, samples_only()).samples();
  const auto tab = T_partial(1, 0.3, TwistedObservable(a + b), 0.0, samples_only()).samples();
  EXPECT_LT(max_abs_difference(tab, ta + tb), 1e-10);
}

TEST(PartialIntertwiners, ContourDomains) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kNarrow, kNarrowN);
  auto code_of = [&](int k, double c) {
    try {
      tau_partial(k, 0.5, u, c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;  // sentinel: nothing thrown
  };
  EXPECT_EQ(code_of(0, 0.0), ErrorCode::PreconditionViolation);
  EXPECT_EQ(code_of(0, -1.0), ErrorCode::PreconditionViolation);
  EXPECT_EQ(code_of(1, 2.5), ErrorCode::OnBranchCut);              // |c| >= 1/q
  EXPECT_EQ(code_of(1, 3.5), ErrorCode::PreconditionViolation);    // outside the strip
  EXPECT_DOUBLE_EQ(default_contour(0), 1.0);
  EXPECT_DOUBLE_EQ(default_contour(1), 0.0);
  EXPECT_THROW(TwistedObservable(u.samples(), 2), Error);
}

// ------------------------------------------------------------ star product

TEST(TwistedStar, ZeroTwistIsWeyl) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), {8.0, 8.0}, 64);
  const auto v = TwistedObservable::from_handle(corpus_handle("shifted"), {8.0, 8.0}, 64);
  const auto s = star(1, 0.0, 0.5, u, v);
  EXPECT_LT(relative_l2(s.samples(), weyl_product(u.samples(), v.samples(), 0.5)), 1e-6);
}

TEST(TwistedStar, TwistChangesTheProduct) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN);
  const auto v = TwistedObservable::from_handle(corpus_handle("shifted"), kWide, kWideN);
  const auto s = star(1, 0.3, 0.3, u, v);
  EXPECT_GT(relative_l2(s.samples(), weyl_product(u.samples(), v.samples(), 0.3)), 1e-3);
}

TEST(TwistedStar, AssociativeK1) {
  std::vector<TwistedObservable> el;
  for (const char* n : {"radial", "chiral", "shifted"}) {
    el.push_back(TwistedObservable::from_handle(corpus_handle(n), kWide, kWideN));
  }
  const auto lhs = star(1, 0.3, 0.3, star(1, 0.3, 0.3, el[0], el[1]), el[2]);
  const auto rhs = star(1, 0.3, 0.3, el[0], star(1, 0.3, 0.3, el[1], el[2]));
  EXPECT_LT(relative_l2(lhs.samples(), rhs.samples()), 1e-4);
}

TEST(TwistedStar, AssociativeK0) {
  std::vector<TwistedObservable> el;
  for (const auto& f : narrow_triple()) el.push_back(k0_element(f));
  const auto lhs = star(0, 0.5, 0.5, star(0, 0.5, 0.5, el[0], el[1]), el[2]);
  const auto rhs = star(0, 0.5, 0.5, el[0], star(0, 0.5, 0.5, el[1], el[2]));
  EXPECT_LT(relative_l2(lhs.samples(), rhs.samples()), 1e-4);
}

TEST(TwistedStar, ContourIndependence) {
  const auto t = narrow_triple();
  const auto a = k0_element(t[0]);
  const auto b = k0_element(t[2]);
  const auto ref = star(0, 0.5, 0.5, a, b);
  for (double c : {0.75, 1.5}) {
    EXPECT_LT(relative_l2(star(0, 0.5, 0.5, a, b, c).samples(), ref.samples()), 1e-6) << c;
  }
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN);
  const auto v = TwistedObservable::from_handle(corpus_handle("saddle"), kWide, kWideN);
  const auto r1 = star(1, 0.3, 0.3, u, v);
  EXPECT_LT(relative_l2(star(1, 0.3, 0.3, u, v, 0.5).samples(), r1.samples()), 1e-6);
}

TEST(TwistedStar, CommutatorAntisymmetry) {
  const auto u = TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN);
  const auto v = TwistedObservable::from_handle(corpus_handle("chiral"), kWide, kWideN);
  const auto uv = star(1, 0.3, 0.3, u, v).samples();
  const auto vu = star(1, 0.3, 0.3, v, u).samples();
  auto neg = vu - uv;
  neg *= -1.0;
  EXPECT_TRUE(bitwise_equal(uv - vu, neg));
  EXPECT_GT(relative_l2(uv, vu), 1e-3);  // genuinely noncommutative
}

TEST(TwistedStar, Bilinear) {
  const auto a = sample(unit_gaussian(), kWide, kWideN, kWideN);
  const auto b = sample(corpus_handle("saddle"), kWide, kWideN, kWideN);
  const auto c = TwistedObservable::from_handle(corpus_handle("shifted"), kWide, kWideN);
  const auto sum = star(1, 0.3, 0.3, TwistedObservable(a + b), c).samples();
  const auto parts =
      star(1, 0.3, 0.3, TwistedObservable(a), c).samples() + star(1, 0.3, 0.3, TwistedObservable(b), c).samples();
  EXPECT_LT(relative_l2(sum, parts), 1e-10);
}

// ------------------------------------------------------------ bullet product

class Bullet : public ::testing::Test {
 protected:
  BulletParams p;
  BulletGrid g;
  GridFunction2D grid_of(const std::string& name) const {
    return sample(corpus_handle(name), g.window, g.n_a, g.n_l);
  }
};

TEST_F(Bullet, Commutative) {
  const auto f = Z_transform(grid_of("radial"), p);
  const auto h = Z_transform(grid_of("chiral"), p);
  EXPECT_LT(max_abs_difference(bullet(f, h, p).on_real_grid(2.0, 64), bullet(h, f, p).on_real_grid(2.0, 64)),
            1e-10);
}

TEST_F(Bullet, Associative) {
  g.n_l = 128;  // the triple product is narrow in l
  const auto f = Z_transform(grid_of("radial"), p);
  const auto h = Z_transform(grid_of("chiral"), p);
  const auto k = Z_transform(grid_of("coupled"), p);
  const auto lhs = bullet(bullet(f, h, p), k, p).on_real_grid(2.0, 64);
  const auto rhs = bullet(f, bullet(h, k, p), p).on_real_grid(2.0, 64);
  EXPECT_LT(relative_l2(lhs, rhs), 1e-6);
}

TEST_F(Bullet, InverseRecoversSamples) {
  const auto u = grid_of("saddle");
  EXPECT_LT(relative_l2(Z_inverse(Z_transform(u, p), p), u), 1e-10);
}

TEST_F(Bullet, SmallNuLimitIsLaplaceConjugatedProduct) {
  BulletParams small = p;
  small.nu = cplx(0.0, 1e-3);
  BulletParams zero = p;
  zero.nu = 0.0;
  const auto u = grid_of("radial");
  const auto v = grid_of("shifted");
  const auto b = bullet(Z_transform(u, small), Z_transform(v, small), small).on_real_grid(2.0, 64);
  const auto lim = Z_transform(u * v, zero).on_real_grid(2.0, 64);
  EXPECT_LT(relative_l2(b, lim), 1e-5);
  // at nu = 0 psi_Z(z) = -gamma z: Z is the Laplace transform at -z
  EXPECT_NEAR(std::abs(psi_Z(zero, cplx(0.3, 0.2)) - cplx(-0.3, -0.2)), 0.0, 1e-15);
}

TEST_F(Bullet, TruncatedUnit) {
  auto one = GridFunction2D::zeros(g.window, g.n_a, g.n_l);
  for (auto& x : one.values()) x = 1.0;
  // the box has no spectral decay, so the contour must cover the full band
  PipelineOptions full;
  full.band_fraction = 1.0;
  full.tail_tol = 1.0;
  const auto f = Z_transform(grid_of("chiral"), p);
  EXPECT_LT(relative_l2(bullet(f, Z_transform(one, p), p, full).on_real_grid(2.0, 64), f.on_real_grid(2.0, 64)),
            1e-8);
}

TEST_F(Bullet, DerivationOnCorpus) {
  const auto corpus = default_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& u = corpus[i].handle;
    const auto& v = corpus[(i + 1) % corpus.size()].handle;
    EXPECT_LT(check_bullet_derivation(sym::LieGen::E, p, u, v, g).residual, 1e-6) << corpus[i].name;
    EXPECT_LT(check_bullet_derivation(sym::LieGen::A, p, u, v, g).residual, 1e-5) << corpus[i].name;
  }
}

TEST_F(Bullet, DerivationOtherGamma) {
  BulletParams q = p;
  q.gamma = std::polar(1.0, 0.4);
  const auto r = check_bullet_derivation(sym::LieGen::E, q, unit_gaussian(), corpus_handle("saddle"), g);
  EXPECT_LT(r.residual, 1e-6);
}

TEST_F(Bullet, AIndependentInputs) {
  const Evaluator2 u = [](double, double l) { return cplx(std::exp(-l * l)); };
  const Evaluator2 v = [](double, double l) { return cplx((1.0 + l) * std::exp(-0.8 * l * l)); };
  EXPECT_LT(check_bullet_derivation(sym::LieGen::A, p, u, v, g).residual, 1e-12);
}

TEST_F(Bullet, ParameterDomain) {
  const auto u = grid_of("radial");
  BulletParams bad = p;
  bad.nu = cplx(0.1, 0.5);
  EXPECT_THROW(Z_transform(u, bad), Error);
  bad = p;
  bad.gamma = 1.5;
  EXPECT_THROW(Z_transform(u, bad), Error);
  bad = p;
  bad.gamma = cplx(0.0, 1.0);  // slits on the imaginary axis
  try {
    Z_transform(u, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OnBranchCut);
  }
  bad.c = 0.5;
  EXPECT_NO_THROW(Z_transform(u, bad));
}

// ------------------------------------------------------------ hat presentation

TEST(Hat, ModulusOfGaussian) {
  const auto fh = hat(unit_gaussian());
  double worst = 0.0;
  for (int i = 0; i <= 80; ++i) {
    for (int j = 0; j <= 80; ++j) {
      const double y = -4.0 + 0.1 * i;
      const double x = -4.0 + 0.1 * j;
      const double want = std::exp(y * y - x * x);
      worst = std::max(worst, std::abs(std::abs(fh(y, x)) - want) / want);
    }
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_NEAR(std::abs(fh(4.0, 0.0)) / std::exp(16.0), 1.0, 1e-12);
}

TEST(Hat, InjectiveOnCorpus) {
  const auto corpus = default_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      const auto a = hat(corpus[i].handle);
      const auto b = hat(corpus[j].handle);
      double diff = 0.0;
      for (double y : {-1.0, 0.0, 0.5}) {
        for (double x : {-1.0, 0.0, 1.0}) diff = std::max(diff, std::abs(a(y, x) - b(y, x)));
      }
      EXPECT_GT(diff, 1e-3) << corpus[i].name << " vs " << corpus[j].name;
    }
  }
}

TEST(HatStar, ZeroTwistIsTransportedWeyl) {
  const auto f = unit_gaussian();
  const auto h = AnalyticHandle::gaussian2(1.0, 1.0, {0.5, -0.3});
  const HatObservable a(f, {8.0, 8.0}, 64);
  const HatObservable b(h, {8.0, 8.0}, 64);
  const auto grid = hat_star(1, 0.0, 0.5, a, b).on_grid(2.0, 8);
  GridFunction2D want = grid;
  for (std::size_t r = 0; r < grid.n1(); ++r) {
    for (std::size_t j = 0; j < grid.n2(); ++j) {
      want(r, j) = weyl_gaussian_oracle(f, h, 0.5, cplx(0.0, grid.x1(r)), grid.x2(j));
    }
  }
  EXPECT_LT(relative_l2(grid, want), 1e-6);
}

TEST(HatStar, RouteBAtImaginaryX1) {
  // independent route: direct quadrature at w = (i y1, x2) on the shifted handles
  const HatObservable a(unit_gaussian(), {8.0, 8.0}, 64);
  const HatObservable b(corpus_handle("shifted"), {8.0, 8.0}, 64);
  const auto grid = hat_star(1, 0.0, 0.5, a, b).on_grid(1.0, 8);
  double err = 0.0;
  double mx = 0.0;
  for (std::size_t r = 0; r < grid.n1(); ++r) {
    const double y = grid.x1(r);
    const auto row = weyl_product_route_b_row(a.shifted(y).samples(), b.shifted(y).samples(), 0.5, 32);
    for (std::size_t j = 0; j < row.size(); ++j) {
      err = std::max(err, std::abs(row[j] - grid(r, j)));
      mx = std::max(mx, std::abs(row[j]));
    }
  }
  EXPECT_LT(err / mx, 1e-6);
}

TEST(HatStar, ExponentialGrowthStaysFinite) {
  const HatObservable a(unit_gaussian(), kWide, kWideN);
  const HatObservable b(AnalyticHandle::gaussian2(1.0, 1.0, {0.5, -0.3}), kWide, kWideN);
  const auto prod = hat_star(1, 0.3, 0.3, a, b);
  const auto grid = prod.on_grid(4.0, 8);
  for (const auto& v : grid.values()) ASSERT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
  EXPECT_GT(grid.max_abs(), 1e6);  // e^{y1^2} growth reaches the grid
  // the y1 = 0 row is the real-grid product
  const auto real = star(1, 0.3, 0.3, TwistedObservable::from_handle(unit_gaussian(), kWide, kWideN),
                         TwistedObservable::from_handle(AnalyticHandle::gaussian2(1.0, 1.0, {0.5, -0.3}), kWide,
                                                        kWideN));
  for (std::size_t j = 0; j < kWideN; ++j) EXPECT_EQ(grid(4, j), real.samples()(kWideN / 2, j));
}

TEST(HatStar, Associative) {
  const HatObservable a(unit_gaussian(), kWide, kWideN);
  const HatObservable b(AnalyticHandle::gaussian2(1.0, 1.0, {0.5, -0.3}), kWide, kWideN);
  const HatObservable c(AnalyticHandle::gaussian2(1.2, 1.0, {0.0, 0.4}), kWide, kWideN);
  const auto lhs = hat_star(1, 0.3, 0.3, hat_star(1, 0.3, 0.3, a, b), c).on_grid(0.5, 8);
  const auto rhs = hat_star(1, 0.3, 0.3, a, hat_star(1, 0.3, 0.3, b, c)).on_grid(0.5, 8);
  EXPECT_LT(relative_l2(lhs, rhs), 1e-4);
}
