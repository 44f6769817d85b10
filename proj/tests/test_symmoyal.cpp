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
#include "axb/symmoyal.hpp"

namespace axb::sym {
namespace {

const SymElem kL = SymElem::l();
const SymElem kE = SymElem::exp_m2a();
const SymElem kNu = SymElem::nu();

TEST(LambdaMap, Generators) {
  EXPECT_EQ(lambda_map(LieGen::A), SymElem::monomial(0, 1, 0, 2));
  EXPECT_EQ(lambda_map(LieGen::E), kE);
  EXPECT_EQ(eval(lambda_map(LieGen::A), 0.0, 0.0, 1.0), std::complex<double>(2.0));
}

TEST(MoyalProduct, UnitIsOne) {
  const SymElem u = kL * kL * kE + kNu * kL;
  EXPECT_EQ(moyal_product(SymElem(1), u), u);
  EXPECT_EQ(moyal_product(u, SymElem(1)), u);
}

TEST(MoyalProduct, HandExpansion) {
  // 2l * e^{-2a} = 2l e^{-2a} + 4 nu e^{-2a}
  const SymElem expected = Rational(2) * kL * kE + Rational(4) * kNu * kE;
  EXPECT_EQ(moyal_product(lambda_map(LieGen::A), lambda_map(LieGen::E)), expected);
}

TEST(MoyalProduct, CommutatorOfGenerators) {
  const SymElem c = moyal_commutator(lambda_map(LieGen::A), lambda_map(LieGen::E));
  EXPECT_EQ(c, Rational(8) * kNu * kE);
  const SymElem pb = poisson_bracket(lambda_map(LieGen::A), lambda_map(LieGen::E));
  EXPECT_EQ(c, Rational(2) * kNu * pb);
}

TEST(MoyalProduct, NuZeroIsPointwise) {
  for (const auto& u : basis(4, 3)) {
    for (const auto& v : basis(4, 3)) {
      EXPECT_EQ(moyal_product(u, v).nu_coefficient(0), u * v);
    }
  }
}

TEST(PoissonBracket, Examples) {
  EXPECT_EQ(poisson_bracket(lambda_map(LieGen::A), kE), Rational(4) * kE);
  const SymElem u = kL * kL * kE + kL;
  EXPECT_TRUE(poisson_bracket(u, u).is_zero());
  EXPECT_TRUE(poisson_bracket(SymElem(1), u).is_zero());
}

TEST(PoissonBracket, FirstOrderOfCommutator) {
  // [u,v]_nu / 2nu at order nu^0 is {u,v}
  for (const auto& u : basis(3, 2)) {
    for (const auto& v : basis(3, 2)) {
      const SymElem c = moyal_commutator(u, v);
      EXPECT_TRUE(c.nu_coefficient(0).is_zero());
      EXPECT_EQ(c.nu_coefficient(1) * Rational(1, 2), poisson_bracket(u, v));
    }
  }
}

TEST(Rho, Examples) {
  EXPECT_EQ(rho(LieGen::A, -1, kE), Rational(2) * kE);
  EXPECT_EQ(rho(LieGen::E, -1, kL), -kE);
  EXPECT_TRUE(rho(LieGen::A, -1, SymElem(1)).is_zero());
  EXPECT_TRUE(rho(LieGen::E, -1, SymElem(1)).is_zero());
}

TEST(Rho, ExponentShiftStaysNonNegative) {
  const SymElem u = kL * kL * kL * kL * kL;
  const SymElem r = rho(LieGen::E, -1, u);
  EXPECT_GE(r.min_nu_power(), 0);
  // l^5: sinh(2nu d_l)/(2nu) gives 5 l^4 + (4/6) nu^2 * 60 l^2 + (16/120) nu^4 * 120
  const SymElem expected = -(Rational(5) * kL * kL * kL * kL +
                             Rational(40) * kNu * kNu * kL * kL +
                             Rational(16) * kNu * kNu * kNu * kNu) * kE;
  EXPECT_EQ(r, expected);
  EXPECT_EQ(rho(LieGen::E, 2, u), -(Rational(5) * kL * kL * kL * kL +
                                    Rational(40) * kNu * kNu * kL * kL) * kE);
}

TEST(Rho, IsInnerDerivationOfLambda) {
  // rho(E) = [lambda_E, .]_nu / 4nu  and rho(A) = [lambda_A, .]_nu / 4nu
  for (const auto& u : basis(5, 3)) {
    for (LieGen x : {LieGen::A, LieGen::E}) {
      const SymElem c = moyal_commutator(lambda_map(x), u) * Rational(1, 4);
      EXPECT_EQ(c.shift_nu(-1), rho(x, -1, u));
    }
  }
}

TEST(CheckHomomorphism, ExactZero) {
  const auto res = check_homomorphism({SymElem(1), kL * kL, kL * kE, kL * kL * kL * kE * kE});
  EXPECT_TRUE(res.commutator_identity.is_zero());
  for (const auto& r : res.rho_homomorphism) EXPECT_TRUE(r.is_zero()) << r.to_string();
  EXPECT_EQ(res.poisson_vs_table, Rational(2) * kE);
}

TEST(CheckDerivation, Examples) {
  EXPECT_TRUE(check_derivation(LieGen::A, lambda_map(LieGen::A), kE).is_zero());
  EXPECT_TRUE(check_derivation(LieGen::E, kL * kL, kL * kE).is_zero());
  EXPECT_TRUE(check_derivation(LieGen::A, SymElem(1), SymElem(1)).is_zero());
}

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(eval(lambda_map(LieGen::A), 0.0, 0.0, 3.0).real(), 6.0);
  EXPECT_DOUBLE_EQ(eval(kE, 0.0, 0.5, 0.0).real(), std::exp(-1.0));
  EXPECT_NEAR(eval(Rational(8) * kNu * kE, 0.1, 0.0, 0.0).real(), 0.8, 1e-15);
}

TEST(Eval, ProductMatchesPointwiseAtSmallNu) {
  const SymElem u = kL * kL + kE;
  const SymElem v = kL * kE;
  const double nu = 1e-4;
  for (double a : {-0.3, 0.2}) {
    for (double l : {-1.0, 0.5}) {
      const auto lhs = eval(moyal_product(u, v), nu, a, l);
      const auto first = eval(u * v + kNu * poisson_bracket(u, v), nu, a, l);
      EXPECT_NEAR(std::abs(lhs - first), 0.0, 10 * nu * nu);
    }
  }
}

TEST(Json, RoundTripIncludingBigCoefficients) {
  SymElem u = kL * kE + Rational(mpz_class("123456789012345678901234567890"), 7) * kNu * kL;
  const auto j = to_json(u);
  EXPECT_EQ(from_json(j), u);
  EXPECT_EQ(from_json(nlohmann::json::parse(j.dump())), u);
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"terms":[{"p":0,"m":0,"n":0,"num":1,"den":0}]})")),
               Error);
}

}  // namespace
}  // namespace axb::sym

TEST(FormalSuite, SmallBasisIsExact) {
  const auto r = axb::sym::formal_suite(3, 2);
  EXPECT_EQ(r.basis_size, 12u);
  EXPECT_EQ(r.derivation_pairs, 2u * 12u * 12u);
  EXPECT_EQ(r.associativity_triples, 12u * 12u * 12u);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(axb::sym::to_json(r)["passed"].get<bool>());
}
