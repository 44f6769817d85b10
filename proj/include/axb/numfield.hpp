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

// Function carriers shared by the numeric modules.
//
// AnalyticHandle is the closed-form test family P(z) exp(-z^T Q z + s^T z),
// entire in one or two complex variables. It is closed under products,
// partial derivatives, real linear changes of variables and the Fourier
// transform, which gives every numeric transform an exact oracle.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace axb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Polynomial in up to two complex variables.
class Polynomial {
 public:
  using Exponent = std::array<int, 2>;

  Polynomial() = default;
  explicit Polynomial(cplx constant);
  static Polynomial monomial(int e1, int e2, cplx coeff = 1.0);

  const std::map<Exponent, cplx>& coeffs() const noexcept { return coeffs_; }
  void add(Exponent e, cplx c);
  bool is_zero() const noexcept { return coeffs_.empty(); }
  int degree(int axis) const;

  cplx eval(cplx z1, cplx z2 = 0.0) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator*=(cplx c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(Polynomial a, cplx c) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial derivative(int axis) const;
  /// P(A z) for a 2x2 matrix A given row-major.
  Polynomial substitute(const std::array<cplx, 4>& a) const;

 private:
  std::map<Exponent, cplx> coeffs_;
};

class AnalyticHandle {
 public:
  /// scale * poly(z) * exp(-z^T Q z + s^T z). Q is row-major 2x2 (dims 2) or
  /// Q[0] (dims 1); it must be symmetric with positive definite real part.
  AnalyticHandle(int dims, Polynomial poly, std::array<cplx, 4> q, std::array<cplx, 2> s,
                 cplx scale = 1.0);

  /// exp(-q1 z^2) or exp(-q1 z1^2 - q2 z2^2).
  static AnalyticHandle gaussian1(cplx q1, cplx s1 = 0.0, cplx scale = 1.0);
  static AnalyticHandle gaussian2(cplx q1, cplx q2, std::array<cplx, 2> s = {0.0, 0.0},
                                  cplx scale = 1.0);

  int dims() const noexcept { return dims_; }
  const Polynomial& poly() const noexcept { return poly_; }
  const std::array<cplx, 4>& q() const noexcept { return q_; }
  const std::array<cplx, 2>& s() const noexcept { return s_; }
  cplx scale() const noexcept { return scale_; }

  cplx eval(cplx z1, cplx z2 = 0.0) const;
  cplx eval(std::span<const cplx> z) const;
  /// log|f(z)| computed without forming exp(); -inf at zeros of the polynomial.
  double log_abs(cplx z1, cplx z2 = 0.0) const;
  cplx exponent(cplx z1, cplx z2 = 0.0) const;

  friend AnalyticHandle operator*(const AnalyticHandle& a, const AnalyticHandle& b);
  AnalyticHandle scaled(cplx c) const;
  AnalyticHandle times_poly(const Polynomial& p) const;
  /// Multiplies by exp(t^T z); stays in the family since only s moves.
  AnalyticHandle times_exp_linear(std::array<cplx, 2> t) const;
  AnalyticHandle derivative(int axis) const;
  /// f(A z) for real invertible A (row-major; for dims 1 only A[0] is used).
  AnalyticHandle substitute(const std::array<double, 4>& a) const;

  /// Closed-form transform  int e^{i xi.x} f(x) dx  as a handle in xi.
  AnalyticHandle fourier() const;
  /// Closed-form  int e^{-z l} f(l) dl  for dims 1.
  cplx laplace(cplx z) const;
  /// The 1-variable handle z2 -> f(z1, z2).
  AnalyticHandle slice(cplx z1) const;

 private:
  int dims_;
  Polynomial poly_;
  std::array<cplx, 4> q_;
  std::array<cplx, 2> s_;
  cplx scale_;
};

nlohmann::json to_json(const AnalyticHandle& f);
AnalyticHandle handle_from_json(const nlohmann::json& j);

/// Symmetric rectangle [-half1, half1] x [-half2, half2].
struct Window {
  double half1 = 8.0;
  double half2 = 8.0;
  bool operator==(const Window&) const = default;
};

/// Complex samples at nodes x_i = -half + i h, h = 2 half / n (row-major,
/// first index along x1). The node with index n/2 is the origin.
class GridFunction2D {
 public:
  GridFunction2D(Window w, std::size_t n1, std::size_t n2, std::vector<cplx> values);
  static GridFunction2D zeros(Window w, std::size_t n1, std::size_t n2);

  const Window& window() const noexcept { return window_; }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  double h1() const noexcept { return 2.0 * window_.half1 / static_cast<double>(n1_); }
  double h2() const noexcept { return 2.0 * window_.half2 / static_cast<double>(n2_); }
  double x1(std::size_t i) const noexcept { return -window_.half1 + static_cast<double>(i) * h1(); }
  double x2(std::size_t j) const noexcept { return -window_.half2 + static_cast<double>(j) * h2(); }

  cplx& operator()(std::size_t i, std::size_t j) { return values_[i * n2_ + j]; }
  cplx operator()(std::size_t i, std::size_t j) const { return values_[i * n2_ + j]; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& values() noexcept { return values_; }

  bool same_shape(const GridFunction2D& o) const noexcept {
    return window_ == o.window_ && n1_ == o.n1_ && n2_ == o.n2_;
  }
  double max_abs() const;

  GridFunction2D& operator+=(const GridFunction2D& o);
  GridFunction2D& operator-=(const GridFunction2D& o);
  GridFunction2D& operator*=(cplx c);
  friend GridFunction2D operator+(GridFunction2D a, const GridFunction2D& b) { return a += b; }
  friend GridFunction2D operator-(GridFunction2D a, const GridFunction2D& b) { return a -= b; }
  friend GridFunction2D operator*(GridFunction2D a, cplx c) { return a *= c; }
  friend GridFunction2D operator*(cplx c, GridFunction2D a) { return a *= c; }
  /// Pointwise product.
  friend GridFunction2D operator*(const GridFunction2D& a, const GridFunction2D& b);

  /// Little-endian: 4 x f64 window (x1min, x1max, x2min, x2max), u32 n1, u32 n2,
  /// then n1*n2 interleaved (re, im) f64 pairs.
  void write_binary(std::ostream& os) const;
  static GridFunction2D read_binary(std::istream& is);
  void write_csv(std::ostream& os) const;

 private:
  Window window_;
  std::size_t n1_;
  std::size_t n2_;
  std::vector<cplx> values_;
};

/// Samples t_j = -T + 2T j / (N - 1) of F(c + i t_j).
struct ContourSamples {
  double c = 0.0;
  double t_max = 1.0;
  std::vector<cplx> values;

  ContourSamples(double c, double t_max, std::vector<cplx> values);
  double t(std::size_t j) const noexcept {
    return -t_max + 2.0 * t_max * static_cast<double>(j) / static_cast<double>(values.size() - 1);
  }
  void write_csv(std::ostream& os) const;
};

using Evaluator1 = std::function<cplx(cplx)>;
using Evaluator2 = std::function<cplx(double, double)>;

inline constexpr double kEdgeTolerance = 1e-12;

/// Fails with WindowTooSmall when the boundary rows/columns exceed
/// kEdgeTolerance times the interior maximum.
GridFunction2D sample(const AnalyticHandle& f, Window w, std::size_t n1, std::size_t n2);
GridFunction2D sample(const Evaluator2& f, Window w, std::size_t n1, std::size_t n2);
void check_window(const GridFunction2D& u);

ContourSamples sample_contour(const Evaluator1& f, double c, double t_max, std::size_t n);

/// sqrt(h1 h2 sum |u - v|^2); ShapeMismatch on different grids.
double l2_distance(const GridFunction2D& u, const GridFunction2D& v);
double l2_norm(const GridFunction2D& u);
/// l2_distance(u, v) / l2_norm(v).
double relative_l2(const GridFunction2D& u, const GridFunction2D& v);
double max_abs_difference(const GridFunction2D& u, const GridFunction2D& v);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace axb
