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

#include "axb/symmoyal.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>

#include "axb/errors.hpp"

namespace axb::sym {

namespace {

mpz_class falling_factorial(std::int64_t m, std::int64_t j) {
  mpz_class r = 1;
  for (std::int64_t t = 0; t < j; ++t) r *= static_cast<long>(m - t);
  return r;
}

mpz_class factorial(std::int64_t j) { return falling_factorial(j, j); }

mpz_class ipow(long base, std::int64_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(std::labs(base)),
                static_cast<unsigned long>(e));
  if (base < 0 && (e % 2) == 1) r = -r;
  return r;
}

// Public results never carry negative nu-powers.
const SymElem& checked(const SymElem& u) {
  assert(u.is_zero() || u.min_nu_power() >= 0);
  return u;
}

}  // namespace

SymElem::SymElem(const Rational& c) {
  add_term(MonomialKey{}, c);
}

SymElem SymElem::monomial(std::int64_t p, std::int64_t m, std::int64_t n, const Rational& coeff) {
  if (m < 0 || n < 0) {
    throw Error(ErrorCode::PreconditionViolation, "monomial degrees must be non-negative");
  }
  SymElem r;
  r.add_term({p, m, n}, coeff);
  return r;
}

void SymElem::add_term(const MonomialKey& key, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(key, coeff);
  if (inserted) {
    it->second.canonicalize();
    return;
  }
  it->second += coeff;
  if (it->second == 0) terms_.erase(it);
}

SymElem SymElem::nu_coefficient(std::int64_t p) const {
  SymElem r;
  for (const auto& [k, c] : terms_) {
    if (k.p == p) r.terms_.emplace(MonomialKey{0, k.m, k.n}, c);
  }
  return r;
}

std::int64_t SymElem::min_nu_power() const {
  std::int64_t r = 0;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (first || k.p < r) r = k.p;
    first = false;
  }
  return r;
}

std::int64_t SymElem::max_nu_power() const {
  std::int64_t r = 0;
  for (const auto& [k, c] : terms_) r = std::max(r, k.p);
  return r;
}

SymElem& SymElem::operator+=(const SymElem& other) {
  for (const auto& [k, c] : other.terms_) add_term(k, c);
  return *this;
}

SymElem& SymElem::operator-=(const SymElem& other) {
  for (const auto& [k, c] : other.terms_) add_term(k, -c);
  return *this;
}

SymElem& SymElem::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

SymElem operator*(const SymElem& a, const SymElem& b) {
  SymElem r;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      r.add_term({ka.p + kb.p, ka.m + kb.m, ka.n + kb.n}, ca * cb);
    }
  }
  return r;
}

SymElem SymElem::shift_nu(std::int64_t shift) const {
  SymElem r;
  for (const auto& [k, c] : terms_) r.terms_.emplace(MonomialKey{k.p + shift, k.m, k.n}, c);
  return r;
}

std::string SymElem::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.get_str() << ")";
    if (k.p != 0) os << "*nu^" << k.p;
    if (k.m != 0) os << "*l^" << k.m;
    if (k.n != 0) os << "*e^{-" << 2 * k.n << "a}";
  }
  return os.str();
}

LieElem bracket(LieGen x, LieGen y) {
  if (x == y) return {};
  // [A, E] = 2E
  return x == LieGen::A ? LieElem{0, 2} : LieElem{0, -2};
}

SymElem d_a(const SymElem& u) {
  SymElem r;
  for (const auto& [k, c] : u.terms()) {
    if (k.n != 0) r.add_term(k, c * Rational(-2 * k.n));
  }
  return r;
}

SymElem d_l(const SymElem& u) {
  SymElem r;
  for (const auto& [k, c] : u.terms()) {
    if (k.m != 0) r.add_term({k.p, k.m - 1, k.n}, c * Rational(k.m));
  }
  return r;
}

SymElem lambda_map(LieGen x) {
  return x == LieGen::A ? SymElem::monomial(0, 1, 0, 2) : SymElem::exp_m2a();
}

SymElem moyal_product(const SymElem& u, const SymElem& v) {
  // For monomials c1 l^m1 e^{-2n1 a}, c2 l^m2 e^{-2n2 a} the order-(i+j) term
  // with j derivatives d_l on u (and d_a on v) and i derivatives d_a on u
  // (and d_l on v) is
  //   c1 c2 (-1)^j (-2n1)^i (-2n2)^j [m1]_j [m2]_i / (i! j!)
  // times nu^{i+j} l^{m1+m2-i-j} e^{-2(n1+n2)a}.
  SymElem r;
  for (const auto& [ku, cu] : u.terms()) {
    for (const auto& [kv, cv] : v.terms()) {
      const Rational base = cu * cv;
      for (std::int64_t j = 0; j <= ku.m; ++j) {
        if (j > 0 && kv.n == 0) break;
        const mpz_class jpart = falling_factorial(ku.m, j) * ipow(-2 * kv.n, j) *
                                ((j % 2) ? -1 : 1);
        const mpz_class jfact = factorial(j);
        for (std::int64_t i = 0; i <= kv.m; ++i) {
          if (i > 0 && ku.n == 0) break;
          mpz_class num = jpart * falling_factorial(kv.m, i) * ipow(-2 * ku.n, i);
          Rational coeff(num, jfact * factorial(i));
          coeff.canonicalize();
          r.add_term({ku.p + kv.p + i + j, ku.m + kv.m - i - j, ku.n + kv.n}, base * coeff);
        }
      }
    }
  }
  return checked(r);
}

SymElem moyal_commutator(const SymElem& u, const SymElem& v) {
  return moyal_product(u, v) - moyal_product(v, u);
}

SymElem poisson_bracket(const SymElem& u, const SymElem& v) {
  return d_a(u) * d_l(v) - d_l(u) * d_a(v);
}

namespace {

SymElem truncate(const SymElem& u, std::int64_t budget) {
  if (budget < 0) return u;
  SymElem r;
  for (const auto& [k, c] : u.terms()) {
    if (k.p <= budget) r.add_term(k, c);
  }
  return r;
}

// -(e^{-2a} / 2nu) sinh(2nu d_l) u, with the 1/nu done as an exponent shift.
SymElem rho_e(const SymElem& u) {
  SymElem sinh_part;  // sinh(2nu d_l) u, every term carries nu^{odd >= 1}
  for (const auto& [k, c] : u.terms()) {
    for (std::int64_t j = 1; j <= k.m; j += 2) {
      Rational coeff(falling_factorial(k.m, j) * ipow(2, j), factorial(j));
      coeff.canonicalize();
      sinh_part.add_term({k.p + j, k.m - j, k.n + 1}, c * coeff);
    }
  }
  SymElem r = sinh_part.shift_nu(-1);
  r *= Rational(-1, 2);
  return r;
}

}  // namespace

SymElem rho(LieGen x, std::int64_t nu_power_budget, const SymElem& u) {
  if (!u.is_zero() && u.min_nu_power() < 0) {
    throw Error(ErrorCode::PreconditionViolation, "rho expects non-negative nu-powers");
  }
  SymElem r = x == LieGen::A ? -d_a(u) : rho_e(u);
  return checked(truncate(r, nu_power_budget));
}

SymElem rho(const LieElem& x, std::int64_t nu_power_budget, const SymElem& u) {
  SymElem r = rho(LieGen::A, nu_power_budget, u) * x.a_coeff;
  r += rho(LieGen::E, nu_power_budget, u) * x.e_coeff;
  return r;
}

HomomorphismResidual check_homomorphism(const std::vector<SymElem>& test_basis) {
  HomomorphismResidual out;
  const SymElem la = lambda_map(LieGen::A);
  const SymElem le = lambda_map(LieGen::E);
  const SymElem pb = poisson_bracket(la, le);
  out.commutator_identity = moyal_commutator(la, le) - SymElem::nu() * pb * Rational(2);

  const LieElem ae = bracket(LieGen::A, LieGen::E);
  out.poisson_vs_table = pb - (lambda_map(LieGen::A) * ae.a_coeff + le * ae.e_coeff);

  for (const auto& u : test_basis) {
    const SymElem lhs = rho(ae, -1, u);
    const SymElem rhs = rho(LieGen::A, -1, rho(LieGen::E, -1, u)) -
                        rho(LieGen::E, -1, rho(LieGen::A, -1, u));
    out.rho_homomorphism.push_back(lhs - rhs);
  }
  return out;
}

SymElem check_derivation(LieGen x, const SymElem& u, const SymElem& v) {
  return rho(x, -1, moyal_product(u, v)) - moyal_product(rho(x, -1, u), v) -
         moyal_product(u, rho(x, -1, v));
}

std::complex<double> eval(const SymElem& u, std::complex<double> nu, double a, double l) {
  std::complex<double> acc = 0.0;
  for (const auto& [k, c] : u.terms()) {
    std::complex<double> term = c.get_d() * std::exp(-2.0 * static_cast<double>(k.n) * a);
    for (std::int64_t i = 0; i < k.m; ++i) term *= l;
    for (std::int64_t i = 0; i < k.p; ++i) term *= nu;
    for (std::int64_t i = k.p; i < 0; ++i) term /= nu;
    acc += term;
  }
  return acc;
}

std::vector<SymElem> basis(std::int64_t max_m, std::int64_t max_n) {
  std::vector<SymElem> out;
  for (std::int64_t m = 0; m <= max_m; ++m) {
    for (std::int64_t n = 0; n <= max_n; ++n) out.push_back(SymElem::monomial(0, m, n));
  }
  return out;
}

namespace {

nlohmann::json integer_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) return mpz_class(j.get<std::string>());
  throw Error(ErrorCode::ParseError, "expected integer or integer string");
}

}  // namespace

FormalSuiteReport formal_suite(std::int64_t max_m, std::int64_t max_n) {
  const auto t0 = std::chrono::steady_clock::now();
  FormalSuiteReport r;
  r.max_m = max_m;
  r.max_n = max_n;
  const std::vector<SymElem> b = basis(max_m, max_n);
  const std::size_t n = b.size();
  r.basis_size = n;

  const HomomorphismResidual h = check_homomorphism(b);
  r.commutator_identity = h.commutator_identity.is_zero();
  for (const auto& e : h.rho_homomorphism) r.homomorphism_failures += e.is_zero() ? 0 : 1;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (LieGen x : {LieGen::A, LieGen::E}) {
        ++r.derivation_pairs;
        if (!check_derivation(x, b[i], b[j]).is_zero()) ++r.derivation_failures;
      }
    }
  }

  // pair products are reused on both sides of every triple
  std::vector<SymElem> pair(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pair[i * n + j] = moyal_product(b[i], b[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        ++r.associativity_triples;
        if (!(moyal_product(pair[i * n + j], b[k]) == moyal_product(b[i], pair[j * n + k])))
          ++r.associativity_failures;
      }
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

nlohmann::json to_json(const FormalSuiteReport& r) {
  return {{"max_m", r.max_m},
          {"max_n", r.max_n},
          {"basis_size", r.basis_size},
          {"commutator_identity", r.commutator_identity},
          {"homomorphism_failures", r.homomorphism_failures},
          {"derivation_pairs", r.derivation_pairs},
          {"derivation_failures", r.derivation_failures},
          {"associativity_triples", r.associativity_triples},
          {"associativity_failures", r.associativity_failures},
          {"passed", r.passed()}};
}

nlohmann::json to_json(const SymElem& u) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [k, c] : u.terms()) {
    terms.push_back({{"p", k.p},
                     {"m", k.m},
                     {"n", k.n},
                     {"num", integer_json(c.get_num())},
                     {"den", integer_json(c.get_den())}});
  }
  return {{"terms", terms}};
}

SymElem from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    throw Error(ErrorCode::ParseError, "SymElem JSON needs a 'terms' array");
  }
  SymElem r;
  for (const auto& t : j["terms"]) {
    Rational c(integer_from_json(t.at("num")), integer_from_json(t.at("den")));
    if (c.get_den() == 0) throw Error(ErrorCode::ParseError, "zero denominator");
    c.canonicalize();
    const auto m = t.at("m").get<std::int64_t>();
    const auto n = t.at("n").get<std::int64_t>();
    if (m < 0 || n < 0) throw Error(ErrorCode::ParseError, "negative degree");
    r.add_term({t.at("p").get<std::int64_t>(), m, n}, c);
  }
  return r;
}

}  // namespace axb::sym
