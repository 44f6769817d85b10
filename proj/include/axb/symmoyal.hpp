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

#pragma once

// Exact formal calculus on the ax+b group manifold R^2 = {(a, l)}.
//
// Elements live in the span of nu^p l^m e^{-2na} with rational coefficients.
// On that span d_l is nilpotent and d_a is diagonal (eigenvalue -2n), so the
// Moyal series and the sinh(d_l) series terminate and everything below is
// exact.

#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace axb::sym {

using Rational = mpq_class;

struct MonomialKey {
  std::int64_t p = 0;  // power of nu; negative only inside rho(E)
  std::int64_t m = 0;  // degree in l
  std::int64_t n = 0;  // degree in e^{-2a}

  auto operator<=>(const MonomialKey&) const = default;
};

class SymElem {
 public:
  using TermMap = std::map<MonomialKey, Rational>;

  SymElem() = default;
  explicit SymElem(const Rational& c);

  static SymElem monomial(std::int64_t p, std::int64_t m, std::int64_t n,
                          const Rational& coeff = 1);
  static SymElem nu() { return monomial(1, 0, 0); }
  static SymElem l() { return monomial(0, 1, 0); }
  static SymElem exp_m2a() { return monomial(0, 0, 1); }

  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Coefficient of nu^p as an element of the (a, l) function space.
  SymElem nu_coefficient(std::int64_t p) const;
  std::int64_t min_nu_power() const;
  std::int64_t max_nu_power() const;

  void add_term(const MonomialKey& key, const Rational& coeff);

  SymElem& operator+=(const SymElem& other);
  SymElem& operator-=(const SymElem& other);
  SymElem& operator*=(const Rational& c);

  friend SymElem operator+(SymElem a, const SymElem& b) { return a += b; }
  friend SymElem operator-(SymElem a, const SymElem& b) { return a -= b; }
  friend SymElem operator-(SymElem a) { return a *= Rational(-1); }
  friend SymElem operator*(SymElem a, const Rational& c) { return a *= c; }
  friend SymElem operator*(const Rational& c, SymElem a) { return a *= c; }
  /// Commutative pointwise product.
  friend SymElem operator*(const SymElem& a, const SymElem& b);

  friend bool operator==(const SymElem& a, const SymElem& b) { return a.terms_ == b.terms_; }

  /// Multiplies by nu^shift by moving exponents; never divides coefficients.
  SymElem shift_nu(std::int64_t shift) const;

  std::string to_string() const;

 private:
  TermMap terms_;
};

enum class LieGen { A, E };

/// A real linear combination of the two generators; used to express [A, E] = 2E.
struct LieElem {
  Rational a_coeff = 0;
  Rational e_coeff = 0;
};

inline std::ostream& operator<<(std::ostream& os, const SymElem& u) {
  return os << u.to_string();
}

LieElem bracket(LieGen x, LieGen y);

SymElem d_a(const SymElem& u);
SymElem d_l(const SymElem& u);

/// lambda_A = 2l, lambda_E = e^{-2a}.
SymElem lambda_map(LieGen x);

/// u exp(nu <-d_a ^ ->d_l) v, summed exactly.
SymElem moyal_product(const SymElem& u, const SymElem& v);
SymElem moyal_commutator(const SymElem& u, const SymElem& v);
SymElem poisson_bracket(const SymElem& u, const SymElem& v);

/// The derivations rho_nu(A) u = -d_a u and
/// rho_nu(E) u = -(e^{-2a} / 2nu) sinh(2nu d_l) u.
/// Terms with nu-power above `nu_power_budget` are dropped; pass a negative
/// budget to keep everything.
SymElem rho(LieGen x, std::int64_t nu_power_budget, const SymElem& u);
SymElem rho(const LieElem& x, std::int64_t nu_power_budget, const SymElem& u);

struct HomomorphismResidual {
  /// [lambda_A, lambda_E]_nu - 2 nu {lambda_A, lambda_E}.
  SymElem commutator_identity;
  /// rho([A,E]) u - [rho(A), rho(E)] u, one entry per test element.
  std::vector<SymElem> rho_homomorphism;
  /// {lambda_A, lambda_E} - lambda_{[A,E]}; reported, nonzero (= 2 e^{-2a}).
  SymElem poisson_vs_table;
};

HomomorphismResidual check_homomorphism(const std::vector<SymElem>& test_basis);

/// rho(X)(u*v) - rho(X)u * v - u * rho(X)v under the Moyal product.
SymElem check_derivation(LieGen x, const SymElem& u, const SymElem& v);

/// Everything checked over basis(max_m, max_n): the commutator identity, the
/// rho homomorphism, the derivation property on every ordered pair and
/// associativity on every ordered triple. All counts are of nonzero residuals.
struct FormalSuiteReport {
  std::int64_t max_m = 0;
  std::int64_t max_n = 0;
  std::size_t basis_size = 0;
  bool commutator_identity = false;
  std::size_t homomorphism_failures = 0;
  std::size_t derivation_pairs = 0;
  std::size_t derivation_failures = 0;
  std::size_t associativity_triples = 0;
  std::size_t associativity_failures = 0;
  double seconds = 0.0;

  bool passed() const noexcept {
    return commutator_identity && homomorphism_failures == 0 && derivation_failures == 0 &&
           associativity_failures == 0;
  }
};

FormalSuiteReport formal_suite(std::int64_t max_m, std::int64_t max_n);
nlohmann::json to_json(const FormalSuiteReport& r);

std::complex<double> eval(const SymElem& u, std::complex<double> nu, double a, double l);

/// All monomials l^m e^{-2na} with m <= max_m, n <= max_n (nu-power 0).
std::vector<SymElem> basis(std::int64_t max_m, std::int64_t max_n);

nlohmann::json to_json(const SymElem& u);
SymElem from_json(const nlohmann::json& j);

}  // namespace axb::sym
