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

#include "axb/typespaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axb/errors.hpp"
#include "axb/transforms.hpp"

namespace axb {

namespace {

constexpr int kMaxPoints2D = 16;

// Probe data flattened for repeated evaluation under different constants.
struct ProbeTable {
  int m = 1;
  std::vector<cplx> z;     // m entries per probe
  std::vector<double> lf;  // log|f|
  std::vector<double> px;  // |x_j|^{1/alpha_j}, m per probe
  std::vector<double> py;  // |y_j|^{1/(1-beta_j)}, m per probe
  std::vector<char> base;
  std::size_t size() const { return lf.size(); }
};

struct Eval {
  double log_c = -std::numeric_limits<double>::infinity();
  double residual = -std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
};

Eval evaluate(const ProbeTable& t, const std::vector<double>& a, const std::vector<double>& b) {
  Eval e;
  std::vector<double> v(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    double x = t.lf[k];
    for (int j = 0; j < t.m; ++j) x += a[j] * t.px[k * t.m + j];
    for (int j = 0; j < t.m; ++j) x -= b[j] * t.py[k * t.m + j];
    v[k] = x;
    if (t.base[k]) e.log_c = std::max(e.log_c, x);
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (v[k] > worst) {
      worst = v[k];
      e.worst = k;
    }
  }
  e.residual = worst - e.log_c;
  return e;
}

void add_probe(ProbeTable& t, const std::vector<cplx>& z, double lf, bool base,
               const std::vector<double>& alpha, const std::vector<double>& beta) {
  t.z.insert(t.z.end(), z.begin(), z.end());
  t.lf.push_back(lf);
  for (int j = 0; j < t.m; ++j) {
    t.px.push_back(std::pow(std::abs(z[j].real()), 1.0 / alpha[j]));
    t.py.push_back(std::pow(std::abs(z[j].imag()), 1.0 / (1.0 - beta[j])));
  }
  t.base.push_back(base ? 1 : 0);
}

// Cell-centred lattice on [-ext*half, ext*half]; flag marks the inner [-half, half].
std::vector<std::pair<double, bool>> lattice(double half, int points, int ext) {
  std::vector<std::pair<double, bool>> out;
  const double h = 2.0 * half / points;
  const int lo = -(ext - 1) * points / 2;
  const int hi = points + (ext - 1) * points / 2;
  for (int k = lo; k < hi; ++k) out.emplace_back(-half + (k + 0.5) * h, k >= 0 && k < points);
  return out;
}

ProbeTable handle_probes(const AnalyticHandle& f, const std::vector<double>& alpha,
                         const std::vector<double>& beta, const ProbeSpec& p) {
  ProbeTable t;
  t.m = f.dims();
  const auto xs = lattice(p.x_max, p.points, p.extension);
  const auto ys = p.real_axis_only ? std::vector<std::pair<double, bool>>{{0.0, true}}
                                   : lattice(p.y_max, p.points, p.extension);
  if (t.m == 1) {
    for (const auto& [x, bx] : xs) {
      for (const auto& [y, by] : ys) {
        const cplx z(x, y);
        add_probe(t, {z}, f.log_abs(z), bx && by, alpha, beta);
      }
    }
    return t;
  }
  for (const auto& [x1, b1] : xs) {
    for (const auto& [y1, c1] : ys) {
      for (const auto& [x2, b2] : xs) {
        for (const auto& [y2, c2] : ys) {
          const cplx z1(x1, y1);
          const cplx z2(x2, y2);
          add_probe(t, {z1, z2}, f.log_abs(z1, z2), b1 && c1 && b2 && c2, alpha, beta);
        }
      }
    }
  }
  return t;
}

TypeSCertificate search(const ProbeTable& t, const std::vector<double>& alpha,
                        const std::vector<double>& beta, const ProbeSpec& p,
                        const CertifyOptions& opts) {
  const auto& grid = constant_grid();
  const auto m = static_cast<std::size_t>(t.m);
  std::vector<double> a = opts.a.value_or(std::vector<double>(m, grid.front()));
  std::vector<double> b = opts.b.value_or(std::vector<double>(m, grid.back()));
  if (a.size() != m || b.size() != m) throw Error(ErrorCode::ShapeMismatch, "constant vector length");
  const auto ok = [&] { return evaluate(t, a, b).residual <= p.tolerance; };
  if (ok()) {
    if (!opts.a) {
      for (std::size_t j = 0; j < m; ++j) {
        for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
          a[j] = *it;
          if (ok()) break;
        }
      }
    }
    if (!opts.b) {
      for (std::size_t j = 0; j < m; ++j) {
        for (double c : grid) {
          b[j] = c;
          if (ok()) break;
        }
      }
    }
  }
  const Eval e = evaluate(t, a, b);
  TypeSCertificate cert;
  cert.alpha = alpha;
  cert.beta = beta;
  cert.a = a;
  cert.b = b;
  cert.log_C = e.log_c;
  cert.C = std::exp(e.log_c);
  cert.residual = e.residual;
  cert.worst_probe.assign(t.z.begin() + static_cast<std::ptrdiff_t>(e.worst * m),
                          t.z.begin() + static_cast<std::ptrdiff_t>((e.worst + 1) * m));
  cert.probe_spec = p;
  return cert;
}

nlohmann::json cjson(cplx c) { return nlohmann::json::array({c.real(), c.imag()}); }

}  // namespace

ProbeSpec grid_probe_defaults() {
  ProbeSpec p;
  p.real_axis_only = true;
  p.tolerance = 1e-6;
  return p;
}

nlohmann::json to_json(const ProbeSpec& p) {
  return {{"x_max", p.x_max},
          {"y_max", p.y_max},
          {"points", p.points},
          {"extension", p.extension},
          {"real_axis_only", p.real_axis_only},
          {"noise_floor", p.noise_floor},
          {"tolerance", p.tolerance}};
}

ProbeSpec probe_spec_from_json(const nlohmann::json& j) {
  ProbeSpec p;
  p.x_max = j.value("x_max", p.x_max);
  p.y_max = j.value("y_max", p.y_max);
  p.points = j.value("points", p.points);
  p.extension = j.value("extension", p.extension);
  p.real_axis_only = j.value("real_axis_only", p.real_axis_only);
  p.noise_floor = j.value("noise_floor", p.noise_floor);
  p.tolerance = j.value("tolerance", p.tolerance);
  if (p.points < 2 || p.points % 2 != 0 || p.extension < 1 || !(p.x_max > 0) || !(p.y_max > 0)) {
    throw Error(ErrorCode::InvalidManifest, "invalid probe spec");
  }
  return p;
}

nlohmann::json to_json(const TypeSCertificate& c) {
  nlohmann::json worst = nlohmann::json::array();
  for (const auto& z : c.worst_probe) worst.push_back(cjson(z));
  return {{"alpha", c.alpha},       {"beta", c.beta},       {"a", c.a},
          {"b", c.b},               {"C", c.C},             {"log_C", c.log_C},
          {"residual", c.residual}, {"certified", c.certified()},
          {"worst_probe", worst},   {"probe_spec", to_json(c.probe_spec)},
          {"source", c.source}};
}

void validate_exponents(const std::vector<double>& alpha, const std::vector<double>& beta) {
  if (alpha.empty() || alpha.size() != beta.size() || alpha.size() > 2) {
    throw Error(ErrorCode::InvalidExponents, "exponent vectors must have equal length 1 or 2");
  }
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const double a = alpha[j];
    const double b = beta[j];
    if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) || a + b < 1.0) {
      throw Error(ErrorCode::InvalidExponents,
                  "need 0 < alpha, beta < 1 and alpha + beta >= 1 on every axis");
    }
  }
}

const std::vector<double>& constant_grid() {
  static const std::vector<double> g = [] {
    std::vector<double> v;
    for (int k = -12; k <= 12; ++k) v.push_back(std::exp2(0.5 * k));
    return v;
  }();
  return g;
}

TypeSCertificate certify(const AnalyticHandle& f, const std::vector<double>& alpha,
                         const std::vector<double>& beta, const ProbeSpec& probes,
                         const CertifyOptions& opts) {
  validate_exponents(alpha, beta);
  if (alpha.size() != static_cast<std::size_t>(f.dims())) {
    throw Error(ErrorCode::InvalidExponents, "exponent length differs from handle dimension");
  }
  ProbeSpec p = probes;
  if (f.dims() == 2) p.points = std::min(p.points, kMaxPoints2D);
  if (p.points < 2 || p.points % 2 != 0) throw Error(ErrorCode::PreconditionViolation, "probe points must be even");
  auto cert = search(handle_probes(f, alpha, beta, p), alpha, beta, p, opts);
  cert.source = "closed-form";
  return cert;
}

TypeSCertificate certify(const GridFunction2D& f, const std::vector<double>& alpha,
                         const std::vector<double>& beta, ProbeSpec probes,
                         const CertifyOptions& opts) {
  validate_exponents(alpha, beta);
  if (alpha.size() != 2) throw Error(ErrorCode::InvalidExponents, "grid data needs 2 exponents");
  // Base box: inner half of the region where |f| clears the noise floor.
  const double floor = probes.noise_floor * f.max_abs();
  double r1 = 0.0;
  double r2 = 0.0;
  for (std::size_t i = 0; i < f.n1(); ++i) {
    for (std::size_t j = 0; j < f.n2(); ++j) {
      if (std::abs(f(i, j)) < floor) continue;
      r1 = std::max(r1, std::abs(f.x1(i)));
      r2 = std::max(r2, std::abs(f.x2(j)));
    }
  }
  probes.real_axis_only = true;
  probes.x_max = std::max(r1, r2) / 2.0;
  probes.extension = 2;
  ProbeTable t;
  t.m = 2;
  for (std::size_t i = 0; i < f.n1(); ++i) {
    for (std::size_t j = 0; j < f.n2(); ++j) {
      const double mag = std::abs(f(i, j));
      if (mag < floor || mag == 0.0) continue;
      const bool base = std::abs(f.x1(i)) <= r1 / 2 && std::abs(f.x2(j)) <= r2 / 2;
      add_probe(t, {f.x1(i), f.x2(j)}, std::log(mag), base, alpha, beta);
    }
  }
  if (t.size() == 0) throw Error(ErrorCode::PreconditionViolation, "grid is identically zero");
  auto cert = search(t, alpha, beta, probes, opts);
  cert.source = "grid (real axis)";
  return cert;
}

double bound_residual(const AnalyticHandle& f, const std::vector<double>& alpha,
                      const std::vector<double>& beta, const std::vector<double>& a,
                      const std::vector<double>& b, double C, const ProbeSpec& probes) {
  validate_exponents(alpha, beta);
  ProbeSpec p = probes;
  if (f.dims() == 2) p.points = std::min(p.points, kMaxPoints2D);
  const auto t = handle_probes(f, alpha, beta, p);
  const Eval e = evaluate(t, a, b);
  return e.residual + e.log_c - std::log(C);
}

std::vector<double> sigma(const std::vector<double>& v) {
  if (v.size() % 2 != 0) throw Error(ErrorCode::OddLength, "sigma needs an even-length vector");
  const std::size_t h = v.size() / 2;
  std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  out.insert(out.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return out;
}

ExponentPair product_exponents(const std::vector<double>& alpha, const std::vector<double>& beta,
                               const std::vector<double>& alpha2, const std::vector<double>& beta2) {
  validate_exponents(alpha, beta);
  validate_exponents(alpha2, beta2);
  if (alpha.size() != alpha2.size()) throw Error(ErrorCode::InvalidExponents, "exponent lengths differ");
  ExponentPair r;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    r.alpha.push_back(std::min(alpha[j], alpha2[j]));
    r.beta.push_back(std::max(beta[j], beta2[j]));
  }
  return r;
}

nlohmann::json to_json(const SfLemmaReport& r) {
  return {{"input", to_json(r.input)},
          {"output", to_json(r.output)},
          {"swapped_a", r.swapped_a},
          {"unswapped_a", r.unswapped_a},
          {"swapped_residual", r.swapped_residual},
          {"unswapped_residual", r.unswapped_residual},
          {"passed", r.passed()}};
}

SfLemmaReport check_sf_lemma(const AnalyticHandle& f, const std::vector<double>& alpha,
                             const std::vector<double>& beta, Window w, std::size_t n) {
  SfLemmaReport r;
  r.input = certify(f, alpha, beta);
  const auto g = symplectic_fourier(sample(f, w, n, n));
  r.output = certify(g, sigma(alpha), sigma(beta));
  r.unswapped_a = {0.25 / r.input.a[0], 0.25 / r.input.a[1]};
  r.swapped_a = sigma(r.unswapped_a);
  CertifyOptions fixed;
  fixed.a = r.swapped_a;
  r.swapped_residual = certify(g, sigma(alpha), sigma(beta), grid_probe_defaults(), fixed).residual;
  fixed.a = r.unswapped_a;
  r.unswapped_residual = certify(g, sigma(alpha), sigma(beta), grid_probe_defaults(), fixed).residual;
  return r;
}

}  // namespace axb
