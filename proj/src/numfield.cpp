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

#include "axb/numfield.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "axb/errors.hpp"

namespace axb {

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(cplx constant) { add({0, 0}, constant); }

Polynomial Polynomial::monomial(int e1, int e2, cplx coeff) {
  Polynomial p;
  p.add({e1, e2}, coeff);
  return p;
}

void Polynomial::add(Exponent e, cplx c) {
  if (c == cplx(0.0)) return;
  auto [it, inserted] = coeffs_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) coeffs_.erase(it);
  }
}

int Polynomial::degree(int axis) const {
  int d = 0;
  for (const auto& [e, c] : coeffs_) d = std::max(d, e[axis]);
  return d;
}

cplx Polynomial::eval(cplx z1, cplx z2) const {
  cplx acc = 0.0;
  for (const auto& [e, c] : coeffs_) {
    cplx term = c;
    for (int i = 0; i < e[0]; ++i) term *= z1;
    for (int j = 0; j < e[1]; ++j) term *= z2;
    acc += term;
  }
  return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.coeffs_) add(e, c);
  return *this;
}

Polynomial& Polynomial::operator*=(cplx c) {
  if (c == cplx(0.0)) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [e, v] : coeffs_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ea, ca] : a.coeffs_) {
    for (const auto& [eb, cb] : b.coeffs_) r.add({ea[0] + eb[0], ea[1] + eb[1]}, ca * cb);
  }
  return r;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial r;
  for (const auto& [e, c] : coeffs_) {
    if (e[axis] == 0) continue;
    Exponent d = e;
    d[axis] -= 1;
    r.add(d, c * static_cast<double>(e[axis]));
  }
  return r;
}

Polynomial Polynomial::substitute(const std::array<cplx, 4>& a) const {
  // (A z)_1 = a0 z1 + a1 z2, (A z)_2 = a2 z1 + a3 z2
  Polynomial row1;
  row1.add({1, 0}, a[0]);
  row1.add({0, 1}, a[1]);
  Polynomial row2;
  row2.add({1, 0}, a[2]);
  row2.add({0, 1}, a[3]);
  std::vector<Polynomial> pow1{Polynomial(1.0)};
  std::vector<Polynomial> pow2{Polynomial(1.0)};
  for (int i = 1; i <= degree(0); ++i) pow1.push_back(pow1.back() * row1);
  for (int j = 1; j <= degree(1); ++j) pow2.push_back(pow2.back() * row2);
  Polynomial r;
  for (const auto& [e, c] : coeffs_) r += pow1[e[0]] * pow2[e[1]] * c;
  return r;
}

// ----------------------------------------------------------- AnalyticHandle

namespace {

void validate_quadratic(int dims, const std::array<cplx, 4>& q) {
  if (dims == 1) {
    if (!(q[0].real() > 0.0)) throw Error(ErrorCode::InvalidHandle, "Re(Q) must be positive");
    return;
  }
  if (std::abs(q[1] - q[2]) > 1e-14 * (std::abs(q[1]) + std::abs(q[2]) + 1.0)) {
    throw Error(ErrorCode::InvalidHandle, "Q must be symmetric");
  }
  const double r00 = q[0].real();
  const double r01 = q[1].real();
  const double r11 = q[3].real();
  if (!(r00 > 0.0) || !(r00 * r11 - r01 * r01 > 0.0)) {
    throw Error(ErrorCode::InvalidHandle, "Re(Q) must be positive definite");
  }
}

// sqrt(det Q) on the branch continuous from real positive definite Q:
// the product of the principal roots of the eigenvalues (all in Re > 0).
cplx sqrt_det(int dims, const std::array<cplx, 4>& q) {
  if (dims == 1) return std::sqrt(q[0]);
  const cplx tr = q[0] + q[3];
  const cplx det = q[0] * q[3] - q[1] * q[2];
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  const cplx l1 = 0.5 * (tr + disc);
  const cplx l2 = 0.5 * (tr - disc);
  return std::sqrt(l1) * std::sqrt(l2);
}

}  // namespace

AnalyticHandle::AnalyticHandle(int dims, Polynomial poly, std::array<cplx, 4> q,
                               std::array<cplx, 2> s, cplx scale)
    : dims_(dims), poly_(std::move(poly)), q_(q), s_(s), scale_(scale) {
  if (dims != 1 && dims != 2) throw Error(ErrorCode::InvalidHandle, "dims must be 1 or 2");
  if (dims == 1) {
    q_ = {q[0], 0.0, 0.0, 0.0};
    s_ = {s[0], 0.0};
    if (poly_.degree(1) != 0) throw Error(ErrorCode::InvalidHandle, "1-D polynomial uses z2");
  }
  validate_quadratic(dims_, q_);
}

AnalyticHandle AnalyticHandle::gaussian1(cplx q1, cplx s1, cplx scale) {
  return AnalyticHandle(1, Polynomial(1.0), {q1, 0.0, 0.0, 0.0}, {s1, 0.0}, scale);
}

AnalyticHandle AnalyticHandle::gaussian2(cplx q1, cplx q2, std::array<cplx, 2> s, cplx scale) {
  return AnalyticHandle(2, Polynomial(1.0), {q1, 0.0, 0.0, q2}, s, scale);
}

cplx AnalyticHandle::exponent(cplx z1, cplx z2) const {
  if (dims_ == 1) return -q_[0] * z1 * z1 + s_[0] * z1;
  return -(q_[0] * z1 * z1 + 2.0 * q_[1] * z1 * z2 + q_[3] * z2 * z2) + s_[0] * z1 + s_[1] * z2;
}

cplx AnalyticHandle::eval(cplx z1, cplx z2) const {
  if (dims_ == 1) z2 = 0.0;
  return scale_ * poly_.eval(z1, z2) * std::exp(exponent(z1, z2));
}

cplx AnalyticHandle::eval(std::span<const cplx> z) const {
  if (z.size() != static_cast<std::size_t>(dims_)) {
    throw Error(ErrorCode::ShapeMismatch, "argument length differs from handle dimension");
  }
  return dims_ == 1 ? eval(z[0]) : eval(z[0], z[1]);
}

double AnalyticHandle::log_abs(cplx z1, cplx z2) const {
  if (dims_ == 1) z2 = 0.0;
  return std::log(std::abs(scale_)) + std::log(std::abs(poly_.eval(z1, z2))) +
         exponent(z1, z2).real();
}

AnalyticHandle operator*(const AnalyticHandle& a, const AnalyticHandle& b) {
  if (a.dims_ != b.dims_) throw Error(ErrorCode::ShapeMismatch, "handle dimensions differ");
  std::array<cplx, 4> q;
  for (int i = 0; i < 4; ++i) q[i] = a.q_[i] + b.q_[i];
  return AnalyticHandle(a.dims_, a.poly_ * b.poly_, q, {a.s_[0] + b.s_[0], a.s_[1] + b.s_[1]},
                        a.scale_ * b.scale_);
}

AnalyticHandle AnalyticHandle::scaled(cplx c) const {
  AnalyticHandle r = *this;
  r.scale_ *= c;
  return r;
}

AnalyticHandle AnalyticHandle::times_poly(const Polynomial& p) const {
  AnalyticHandle r = *this;
  r.poly_ = poly_ * p;
  return r;
}

AnalyticHandle AnalyticHandle::times_exp_linear(std::array<cplx, 2> t) const {
  AnalyticHandle r = *this;
  r.s_[0] += t[0];
  if (dims_ == 2) r.s_[1] += t[1];
  return r;
}

AnalyticHandle AnalyticHandle::derivative(int axis) const {
  if (axis < 0 || axis >= dims_) throw Error(ErrorCode::ShapeMismatch, "bad derivative axis");
  // d(P e^E) = (dP + P dE) e^E with dE = -2 (Q z)_axis + s_axis
  Polynomial de;
  if (dims_ == 1) {
    de.add({1, 0}, -2.0 * q_[0]);
  } else {
    de.add({1, 0}, -2.0 * q_[2 * axis]);
    de.add({0, 1}, -2.0 * q_[2 * axis + 1]);
  }
  de.add({0, 0}, s_[axis]);
  AnalyticHandle r = *this;
  r.poly_ = poly_.derivative(axis) + poly_ * de;
  return r;
}

AnalyticHandle AnalyticHandle::substitute(const std::array<double, 4>& a) const {
  if (dims_ == 1) {
    const double k = a[0];
    if (k == 0.0) throw Error(ErrorCode::InvalidHandle, "singular substitution");
    return AnalyticHandle(1, poly_.substitute({k, 0.0, 0.0, 0.0}), {q_[0] * k * k, 0, 0, 0},
                          {s_[0] * k, 0.0}, scale_);
  }
  if (a[0] * a[3] - a[1] * a[2] == 0.0) {
    throw Error(ErrorCode::InvalidHandle, "singular substitution");
  }
  // Q' = A^T Q A, s' = A^T s
  std::array<cplx, 4> qa{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      qa[2 * i + j] = q_[2 * i] * a[j] + q_[2 * i + 1] * a[2 + j];
    }
  }
  std::array<cplx, 4> qn{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) qn[2 * i + j] = a[i] * qa[j] + a[2 + i] * qa[2 + j];
  }
  qn[1] = qn[2] = 0.5 * (qn[1] + qn[2]);
  const std::array<cplx, 2> sn{a[0] * s_[0] + a[2] * s_[1], a[1] * s_[0] + a[3] * s_[1]};
  return AnalyticHandle(2, poly_.substitute({a[0], a[1], a[2], a[3]}), qn, sn, scale_);
}

AnalyticHandle AnalyticHandle::fourier() const {
  // Gaussian part: pi^{d/2} / sqrt(det Q) exp((s + i xi)^T Q^{-1} (s + i xi) / 4)
  std::array<cplx, 4> m{};
  if (dims_ == 1) {
    m[0] = 1.0 / q_[0];
  } else {
    const cplx det = q_[0] * q_[3] - q_[1] * q_[2];
    m = {q_[3] / det, -q_[1] / det, -q_[2] / det, q_[0] / det};
  }
  const cplx ms0 = m[0] * s_[0] + m[1] * s_[1];
  const cplx ms1 = m[2] * s_[0] + m[3] * s_[1];
  const cplx sms = s_[0] * ms0 + s_[1] * ms1;
  const cplx i(0.0, 1.0);
  const cplx pre = std::pow(kPi, 0.5 * dims_) / sqrt_det(dims_, q_);
  const AnalyticHandle g(dims_, Polynomial(1.0), {0.25 * m[0], 0.25 * m[1], 0.25 * m[2], 0.25 * m[3]},
                         {0.5 * i * ms0, 0.5 * i * ms1}, scale_ * pre * std::exp(0.25 * sms));

  // x^a g  ->  (-i d_xi)^a F(g)
  Polynomial out_poly;
  for (const auto& [e, c] : poly_.coeffs()) {
    AnalyticHandle d = g;
    cplx phase = 1.0;
    for (int k = 0; k < e[0]; ++k) {
      d = d.derivative(0);
      phase *= -i;
    }
    for (int k = 0; k < e[1]; ++k) {
      d = d.derivative(1);
      phase *= -i;
    }
    out_poly += d.poly_ * (c * phase);
  }
  AnalyticHandle r = g;
  r.poly_ = out_poly;
  return r;
}

cplx AnalyticHandle::laplace(cplx z) const {
  if (dims_ != 1) throw Error(ErrorCode::ShapeMismatch, "laplace needs a 1-D handle");
  // int e^{-z l} f = F(f)(xi) with i xi = -z
  return fourier().eval(cplx(0.0, 1.0) * z);
}

AnalyticHandle AnalyticHandle::slice(cplx z1) const {
  if (dims_ != 2) throw Error(ErrorCode::ShapeMismatch, "slice needs a 2-D handle");
  Polynomial p;
  for (const auto& [e, c] : poly_.coeffs()) {
    cplx w = c;
    for (int i = 0; i < e[0]; ++i) w *= z1;
    p.add({e[1], 0}, w);
  }
  const cplx sc = scale_ * std::exp(-q_[0] * z1 * z1 + s_[0] * z1);
  return AnalyticHandle(1, p, {q_[3], 0, 0, 0}, {s_[1] - 2.0 * q_[1] * z1, 0.0}, sc);
}

namespace {

nlohmann::json cjson(cplx c) { return nlohmann::json::array({c.real(), c.imag()}); }

cplx cfrom(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::ParseError, "complex value must be a number or [re, im]");
}

}  // namespace

nlohmann::json to_json(const AnalyticHandle& f) {
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& [e, c] : f.poly().coeffs()) {
    poly.push_back({{"e", {e[0], e[1]}}, {"c", cjson(c)}});
  }
  nlohmann::json q = nlohmann::json::array();
  for (const auto& v : f.q()) q.push_back(cjson(v));
  return {{"dims", f.dims()},
          {"poly", poly},
          {"Q", q},
          {"s", {cjson(f.s()[0]), cjson(f.s()[1])}},
          {"scale", cjson(f.scale())}};
}

AnalyticHandle handle_from_json(const nlohmann::json& j) {
  try {
    const int dims = j.at("dims").get<int>();
    Polynomial p;
    if (j.contains("poly")) {
      for (const auto& t : j.at("poly")) {
        const auto& e = t.at("e");
        p.add({e.at(0).get<int>(), e.size() > 1 ? e.at(1).get<int>() : 0}, cfrom(t.at("c")));
      }
    } else {
      p = Polynomial(1.0);
    }
    std::array<cplx, 4> q{};
    const auto& jq = j.at("Q");
    if (dims == 1) {
      q[0] = cfrom(jq.is_array() && jq.size() == 1 ? jq[0] : jq);
    } else {
      for (int i = 0; i < 4; ++i) q[i] = cfrom(jq.at(i));
    }
    std::array<cplx, 2> s{};
    if (j.contains("s")) {
      for (std::size_t i = 0; i < j["s"].size() && i < 2; ++i) s[i] = cfrom(j["s"][i]);
    }
    const cplx scale = j.contains("scale") ? cfrom(j["scale"]) : cplx(1.0);
    return AnalyticHandle(dims, p, q, s, scale);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("handle JSON: ") + e.what());
  }
}

// ------------------------------------------------------------ GridFunction2D

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

GridFunction2D::GridFunction2D(Window w, std::size_t n1, std::size_t n2, std::vector<cplx> values)
    : window_(w), n1_(n1), n2_(n2), values_(std::move(values)) {
  if (!is_power_of_two(n1) || !is_power_of_two(n2) || n1 < 8 || n2 < 8) {
    throw Error(ErrorCode::ShapeMismatch, "grid sizes must be powers of two >= 8");
  }
  if (!(w.half1 > 0.0) || !(w.half2 > 0.0)) {
    throw Error(ErrorCode::ShapeMismatch, "window half-widths must be positive");
  }
  if (values_.size() != n1 * n2) throw Error(ErrorCode::ShapeMismatch, "value count != n1*n2");
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::PreconditionViolation, "grid values must be finite");
    }
  }
}

GridFunction2D GridFunction2D::zeros(Window w, std::size_t n1, std::size_t n2) {
  return GridFunction2D(w, n1, n2, std::vector<cplx>(n1 * n2));
}

double GridFunction2D::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void require_same_shape(const GridFunction2D& a, const GridFunction2D& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, "grids differ in window or size");
}

}  // namespace

GridFunction2D& GridFunction2D::operator+=(const GridFunction2D& o) {
  require_same_shape(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

GridFunction2D& GridFunction2D::operator-=(const GridFunction2D& o) {
  require_same_shape(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

GridFunction2D& GridFunction2D::operator*=(cplx c) {
  for (auto& v : values_) v *= c;
  return *this;
}

GridFunction2D operator*(const GridFunction2D& a, const GridFunction2D& b) {
  require_same_shape(a, b);
  GridFunction2D r = a;
  for (std::size_t k = 0; k < r.values_.size(); ++k) r.values_[k] *= b.values_[k];
  return r;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw Error(ErrorCode::ParseError, "truncated grid file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void GridFunction2D::write_binary(std::ostream& os) const {
  put_le(os, -window_.half1);
  put_le(os, window_.half1);
  put_le(os, -window_.half2);
  put_le(os, window_.half2);
  put_le(os, static_cast<std::uint32_t>(n1_));
  put_le(os, static_cast<std::uint32_t>(n2_));
  for (const auto& v : values_) {
    put_le(os, v.real());
    put_le(os, v.imag());
  }
}

GridFunction2D GridFunction2D::read_binary(std::istream& is) {
  const double x1min = get_le<double>(is);
  const double x1max = get_le<double>(is);
  const double x2min = get_le<double>(is);
  const double x2max = get_le<double>(is);
  if (x1min != -x1max || x2min != -x2max) {
    throw Error(ErrorCode::ParseError, "grid window must be symmetric about the origin");
  }
  const auto n1 = get_le<std::uint32_t>(is);
  const auto n2 = get_le<std::uint32_t>(is);
  if (static_cast<std::uint64_t>(n1) * n2 > (1ULL << 28)) {
    throw Error(ErrorCode::ParseError, "grid too large");
  }
  std::vector<cplx> values(static_cast<std::size_t>(n1) * n2);
  for (auto& v : values) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = {re, im};
  }
  return GridFunction2D({x1max, x2max}, n1, n2, std::move(values));
}

void GridFunction2D::write_csv(std::ostream& os) const {
  os << "x1,x2,re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < n1_; ++i) {
    for (std::size_t j = 0; j < n2_; ++j) {
      const cplx v = (*this)(i, j);
      os << x1(i) << ',' << x2(j) << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

ContourSamples::ContourSamples(double c_, double t_max_, std::vector<cplx> values_)
    : c(c_), t_max(t_max_), values(std::move(values_)) {
  if (!(t_max > 0.0)) throw Error(ErrorCode::PreconditionViolation, "contour half-length T must be > 0");
  if (values.size() < 16) throw Error(ErrorCode::PreconditionViolation, "contour needs >= 16 samples");
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::PreconditionViolation, "contour values must be finite");
    }
  }
}

void ContourSamples::write_csv(std::ostream& os) const {
  os << "re_z,im_z,re,im\n";
  os.precision(17);
  for (std::size_t j = 0; j < values.size(); ++j) {
    os << c << ',' << t(j) << ',' << values[j].real() << ',' << values[j].imag() << '\n';
  }
}

void check_window(const GridFunction2D& u) {
  double edge = 0.0;
  double interior = 0.0;
  for (std::size_t i = 0; i < u.n1(); ++i) {
    for (std::size_t j = 0; j < u.n2(); ++j) {
      const double a = std::abs(u(i, j));
      const bool boundary = i == 0 || j == 0 || i + 1 == u.n1() || j + 1 == u.n2();
      (boundary ? edge : interior) = std::max(boundary ? edge : interior, a);
    }
  }
  if (edge > kEdgeTolerance * interior) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "boundary magnitude %.3e vs interior maximum %.3e", edge, interior);
    throw Error(ErrorCode::WindowTooSmall, msg);
  }
}

GridFunction2D sample(const Evaluator2& f, Window w, std::size_t n1, std::size_t n2) {
  GridFunction2D g = GridFunction2D::zeros(w, n1, n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) g(i, j) = f(g.x1(i), g.x2(j));
  }
  check_window(g);
  return g;
}

GridFunction2D sample(const AnalyticHandle& f, Window w, std::size_t n1, std::size_t n2) {
  if (f.dims() != 2) throw Error(ErrorCode::ShapeMismatch, "grid sampling needs a 2-D handle");
  return sample([&f](double a, double b) { return f.eval(a, b); }, w, n1, n2);
}

ContourSamples sample_contour(const Evaluator1& f, double c, double t_max, std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = -t_max + 2.0 * t_max * static_cast<double>(j) / static_cast<double>(n - 1);
    v[j] = f(cplx(c, t));
  }
  return ContourSamples(c, t_max, std::move(v));
}

double l2_distance(const GridFunction2D& u, const GridFunction2D& v) {
  require_same_shape(u, v);
  double acc = 0.0;
  for (std::size_t k = 0; k < u.values().size(); ++k) acc += std::norm(u.values()[k] - v.values()[k]);
  return std::sqrt(acc * u.h1() * u.h2());
}

double l2_norm(const GridFunction2D& u) {
  double acc = 0.0;
  for (const auto& v : u.values()) acc += std::norm(v);
  return std::sqrt(acc * u.h1() * u.h2());
}

double relative_l2(const GridFunction2D& u, const GridFunction2D& v) {
  return l2_distance(u, v) / l2_norm(v);
}

double max_abs_difference(const GridFunction2D& u, const GridFunction2D& v) {
  require_same_shape(u, v);
  double m = 0.0;
  for (std::size_t k = 0; k < u.values().size(); ++k) {
    m = std::max(m, std::abs(u.values()[k] - v.values()[k]));
  }
  return m;
}

}  // namespace axb
