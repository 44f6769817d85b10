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

#include "axb/laplace_twist.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "axb/errors.hpp"

namespace axb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

// ---------------------------------------------------------------- Laplace

cplx laplace(const AnalyticHandle& f, cplx z) {
  if (f.dims() != 1) throw Error(ErrorCode::ShapeMismatch, "laplace needs a 1-D handle");
  const double rq = f.q()[0].real();
  const auto logmag = [&](double l) { return f.log_abs(l) - z.real() * l; };
  const double l0 = (f.s()[0].real() - z.real()) / (2.0 * rq);
  double d = std::sqrt(60.0 / rq) + 2.0 * f.poly().degree(0) + 2.0;
  double peak = -kInf;
  for (int k = -100; k <= 100; ++k) peak = std::max(peak, logmag(l0 + d * k / 100.0));
  while (std::max(logmag(l0 - d), logmag(l0 + d)) > peak - 55.0) d *= 1.5;

  const auto g = [&](double l) { return std::exp(-z * l) * f.eval(l); };
  std::size_t n = 64;
  double h = 2.0 * d / static_cast<double>(n);
  cplx sum = 0.5 * (g(l0 - d) + g(l0 + d));
  for (std::size_t j = 1; j < n; ++j) sum += g(l0 - d + static_cast<double>(j) * h);
  cplx prev = sum * h;
  for (int level = 0; level < 18; ++level) {
    cplx mid = 0.0;
    for (std::size_t j = 0; j < n; ++j) mid += g(l0 - d + (static_cast<double>(j) + 0.5) * h);
    sum += mid;
    n *= 2;
    h /= 2.0;
    const cplx cur = sum * h;
    if (!finite(cur)) break;
    if (level >= 1 && std::abs(cur - prev) < 1e-10) return cur;
    prev = cur;
  }
  throw Error(ErrorCode::QuadratureFailure, "laplace quadrature did not converge");
}

cplx inverse_laplace(const Evaluator1& F, double c, double x, const InverseOptions& opts) {
  const auto val = [&](double t) {
    const cplx v = F(cplx(c, t));
    if (!finite(v)) throw Error(ErrorCode::ContourDivergence, "non-finite value on the contour");
    return v;
  };
  double scale = 0.0;
  for (int k = -64; k <= 64; ++k) scale = std::max(scale, std::abs(val(opts.t_start * k / 64.0)));
  if (scale == 0.0) return 0.0;
  double t = opts.t_start;
  // stop once the neglected tail is well below the quadrature tolerance
  const double tail_cut = 1e-2 * opts.tolerance * std::max(1.0, scale) / std::max(1.0, std::exp(c * x));
  const auto tail = [&](double T) {
    double m = 0.0;
    for (double f : {0.75, 0.875, 1.0}) m = std::max({m, std::abs(val(f * T)), std::abs(val(-f * T))});
    return m;
  };
  while (2.0 * t * tail(t) > tail_cut) {
    t *= 2.0;
    if (t > opts.t_max) throw Error(ErrorCode::ContourDivergence, "integrand does not decay along the contour");
    for (int k = -64; k <= 64; ++k) scale = std::max(scale, std::abs(val(t * k / 64.0)));
  }
  const auto g = [&](double s) { return std::exp(cplx(c, s) * x) * val(s); };
  std::size_t n = 256;
  double h = 2.0 * t / static_cast<double>(n);
  cplx sum = 0.5 * (g(-t) + g(t));
  for (std::size_t j = 1; j < n; ++j) sum += g(-t + static_cast<double>(j) * h);
  cplx prev = sum * h;
  while (n < opts.max_points) {
    cplx mid = 0.0;
    for (std::size_t j = 0; j < n; ++j) mid += g(-t + (static_cast<double>(j) + 0.5) * h);
    sum += mid;
    n *= 2;
    h /= 2.0;
    const cplx cur = sum * h;
    if (std::abs(cur - prev) < opts.tolerance) return cur / kTwoPi;
    prev = cur;
  }
  throw Error(ErrorCode::QuadratureFailure, "contour quadrature did not converge");
}

LaplaceImage::LaplaceImage(AnalyticHandle source) : source_(std::move(source)) {
  if (source_.dims() != 1) throw Error(ErrorCode::ShapeMismatch, "LaplaceImage needs a 1-D source");
}

Evaluator1 LaplaceImage::evaluator() const {
  return [src = source_](cplx z) { return laplace(src, z); };
}

const ContourSamples& LaplaceImage::cache_contour(double c, double t_max, std::size_t n) {
  cache_ = sample_contour(evaluator(), c, t_max, n);
  return *cache_;
}

Evaluator1 j_pullback(Evaluator1 F) {
  return [F = std::move(F)](cplx z) { return F(cplx(0.0, 1.0) * z); };
}

nlohmann::json to_json(const OGammaReport& r) {
  return {{"bounded", r.bounded}, {"degree", r.degree}, {"t_levels", r.t_levels},
          {"log_envelope", r.log_envelope}};
}

OGammaReport check_O_gamma(const Evaluator1& F, double k0, double k1, int degree_cap) {
  const std::vector<double> levels{8, 16, 32, 64, 128, 256};
  // log|F| on the bands T/2 <= |eta| <= T
  std::vector<std::vector<std::pair<double, double>>> bands;
  for (double T : levels) {
    std::vector<std::pair<double, double>> band;
    for (int i = 0; i <= 8; ++i) {
      const double xi = k0 + (k1 - k0) * i / 8.0;
      for (int j = 0; j <= 64; ++j) {
        const double eta = T / 2 + (T / 2) * j / 64.0;
        for (double s : {eta, -eta}) band.emplace_back(s, std::log(std::abs(F(cplx(xi, s)))));
      }
    }
    bands.push_back(std::move(band));
  }
  OGammaReport r;
  r.t_levels = levels;
  for (int d = 0; d <= degree_cap; ++d) {
    std::vector<double> env;
    bool ok = true;
    for (const auto& band : bands) {
      double m = -kInf;
      for (const auto& [eta, lf] : band) {
        if (std::isnan(lf) || lf == kInf) ok = false;
        m = std::max(m, lf - d * std::log1p(std::abs(eta)));
      }
      env.push_back(m);
    }
    // bounded once the envelope stops growing over the last three doublings
    for (std::size_t i = env.size() - 3; ok && i < env.size(); ++i) {
      if (env[i] - env[i - 1] > 0.25) ok = false;
    }
    if (ok) {
      r.bounded = true;
      r.degree = d;
      r.log_envelope = env;
      return r;
    }
  }
  return r;
}

// ---------------------------------------------------------------- Twisting

TwistParams::TwistParams(double q_, int k_) : q(q_), k(k_) {
  if (k != 0 && k != 1) throw Error(ErrorCode::PreconditionViolation, "theta must be 0 or pi/2");
  if (!std::isfinite(q) || q < 0.0) throw Error(ErrorCode::PreconditionViolation, "q must be finite and >= 0");
}

double TwistParams::theta() const noexcept { return k * kPi / 2.0; }

cplx TwistParams::rotation() const noexcept { return k == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0); }

double TwistParams::strip_half_width() const noexcept { return q == 0.0 ? kInf : kPi / (2.0 * q); }

cplx phi(const TwistParams& p, cplx z) {
  if (p.identity()) return z;
  return p.rotation() * std::sinh(cplx(0.0, p.q) * z) / p.q;
}

cplx phi_derivative(const TwistParams& p, cplx z) {
  if (p.identity()) return 1.0;
  return p.rotation() * cplx(0.0, 1.0) * std::cosh(cplx(0.0, p.q) * z);
}

double slit_distance(const TwistParams& p, cplx w) {
  if (p.identity()) return kInf;
  // rotate so the slits sit on the imaginary axis
  const cplx u = std::conj(p.rotation()) * w;
  const double r = 1.0 / p.q;
  const double y = std::abs(u.imag());
  if (y >= r) return std::abs(u.real());
  return std::hypot(u.real(), r - y);
}

cplx phi_inv(const TwistParams& p, cplx w) {
  if (p.identity()) return w;
  if (slit_distance(p, w) < 1e-12) throw Error(ErrorCode::OnBranchCut, "point lies on a slit of the twisting map");
  return cplx(0.0, -1.0 / p.q) * std::asinh(p.q * std::conj(p.rotation()) * w);
}

double jacobian(const TwistParams& p, cplx w) {
  if (p.identity()) return 1.0;
  const double c = std::cos(p.q * w.real());
  const double s = std::sinh(p.q * w.imag());
  return c * c + s * s;
}

std::vector<cplx> line_image(const TwistParams& p, double c, const std::vector<double>& t) {
  std::vector<cplx> out;
  out.reserve(t.size());
  for (double s : t) out.push_back(phi(p, cplx(c / p.q, s)));
  return out;
}

double hyperbola_residual(const TwistParams& p, double c, cplx w) {
  const double a = p.q * w.real() / std::cos(c);
  const double b = p.q * w.imag() / std::sin(c);
  return -a * a + b * b - 1.0;
}

nlohmann::json to_json(const IKEstimate& e) {
  return {{"value", e.value},   {"tail", e.tail},         {"y_cut", e.y_cut},
          {"z_space", e.z_space}, {"y_levels", e.y_levels}, {"values", e.values}};
}

namespace {

using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

// 2 int int_{region, -Y < v} |F(u + iv)| Jac(u + iv) du dv
double ik_strip(const Evaluator1& F, double k0, double k1, const TwistParams& p, double Y) {
  const double q = p.q;
  const double v0 = -std::asinh(q * k0) / q;
  const double v1 = -std::asinh(q * k1) / q;
  const auto integrand = [&](double u, double v) {
    const cplx w(u, v);
    return std::abs(F(w)) * jacobian(p, w);
  };
  const auto u_bound = [&](double k, double v) {
    const double r = q * k / std::sinh(-q * v);
    return r >= 1.0 ? 0.0 : std::acos(r) / q;
  };
  const auto slice = [&](double v) {
    const double lo = u_bound(k1, v);
    const double hi = u_bound(k0, v);
    if (hi <= lo) return 0.0;
    const auto fu = [&](double u) { return integrand(u, v) + integrand(-u, v); };
    return gauss_kronrod<double, 31>::integrate(fu, lo, hi, 3, 1e-12);
  };
  tanh_sinh<double> ts;
  double total = ts.integrate(slice, v1, v0, 1e-12);
  if (-Y < v1) total += ts.integrate(slice, -Y, v1, 1e-12);
  return 2.0 * total;
}

double ik_zplane(const Evaluator1& F, double k0, double k1, const TwistParams& p, double s_max) {
  const auto inner = [&](double x) {
    const auto fs = [&](double s) {
      return std::cosh(s) * std::abs(F(phi_inv(p, cplx(x, std::sinh(s)))));
    };
    return gauss_kronrod<double, 61>::integrate(fs, -s_max, s_max, 8, 1e-11);
  };
  return 2.0 * gauss_kronrod<double, 31>::integrate(inner, k0, k1, 2, 1e-11);
}

}  // namespace

IKEstimate estimate_IK(const Evaluator1& F, double k0, double k1, const TwistParams& p,
                       double tail_target, double y_start) {
  if (!(k0 > 0.0) || !(k1 > k0)) {
    throw Error(ErrorCode::PreconditionViolation, "K must be an interval in (0, inf)");
  }
  if (p.k != 0 || p.identity()) {
    throw Error(ErrorCode::PreconditionViolation, "I_K estimator covers q > 0, theta = 0");
  }
  // The integrand along the band edge at depth Y must fall as Y grows.
  const auto edge = [&](double Y) {
    const double q = p.q;
    const double r0 = q * k0 / std::sinh(q * Y);
    const double r1 = q * k1 / std::sinh(q * Y);
    const double lo = r1 >= 1.0 ? 0.0 : std::acos(r1) / q;
    const double hi = r0 >= 1.0 ? 0.0 : std::acos(r0) / q;
    double m = 0.0;
    for (int j = 0; j <= 8; ++j) {
      const cplx w(lo + (hi - lo) * j / 8.0, -Y);
      m = std::max(m, std::abs(F(w)) * jacobian(p, w));
    }
    return m;
  };
  {
    const double e1 = edge(y_start);
    const double e2 = edge(2.0 * y_start);
    if (!std::isfinite(e1) || !std::isfinite(e2) || e2 >= e1) {
      throw Error(ErrorCode::TailDivergence, "pulled-back integrand grows along the strip");
    }
  }
  IKEstimate e;
  double y = y_start;
  double prev = ik_strip(F, k0, k1, p, y);
  e.y_levels.push_back(y);
  e.values.push_back(prev);
  double last_change = kInf;
  for (int it = 0; it < 6; ++it) {
    const double cur = ik_strip(F, k0, k1, p, 2.0 * y);
    e.y_levels.push_back(2.0 * y);
    e.values.push_back(cur);
    const double change = std::abs(cur - prev);
    if (!std::isfinite(cur) || !(change < last_change) ) {
      throw Error(ErrorCode::TailDivergence, "I_K truncation error does not shrink as Y grows");
    }
    if (change < tail_target) {
      e.value = cur;
      e.tail = change;
      e.y_cut = y;
      e.z_space = ik_zplane(F, k0, k1, p, 2.0 * p.q * y + 4.0);
      return e;
    }
    last_change = change;
    prev = cur;
    y *= 2.0;
  }
  throw Error(ErrorCode::TailDivergence, "I_K did not settle within the Y budget");
}

}  // namespace axb
