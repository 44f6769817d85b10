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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "axb/numfield.hpp"

namespace axb {

// Probes form a lattice of `points` nodes per real direction on |x| <= x_max,
// |y| <= y_max (cell-centred, so spacing 2 x_max / points). The extended set is
// the same lattice continued out to `extension` times the box.
struct ProbeSpec {
  double x_max = 8.0;
  double y_max = 4.0;
  int points = 64;
  int extension = 2;
  bool real_axis_only = false;
  // Grid inputs only: samples below noise_floor * max|f| are not probed.
  double noise_floor = 1e-8;
  // Grid inputs only: slack on the residual for floating-point noise.
  double tolerance = 0.0;
};

// Real-axis defaults for sampled data.
ProbeSpec grid_probe_defaults();

nlohmann::json to_json(const ProbeSpec& p);
ProbeSpec probe_spec_from_json(const nlohmann::json& j);

struct TypeSCertificate {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> a;
  std::vector<double> b;
  double C = 0.0;
  double log_C = 0.0;
  // max over the extended probes of log|f| - log(bound); <= 0 means certified.
  double residual = 0.0;
  std::vector<cplx> worst_probe;
  ProbeSpec probe_spec;
  std::string source;  // "closed-form" or "grid (real axis)"
  bool certified() const noexcept { return residual <= probe_spec.tolerance; }
};

nlohmann::json to_json(const TypeSCertificate& c);

// Throws InvalidExponents unless 0 < alpha, beta < 1 and alpha + beta >= 1 per axis.
void validate_exponents(const std::vector<double>& alpha, const std::vector<double>& beta);

// 2^{-6}, 2^{-5.5}, ..., 2^{6}.
const std::vector<double>& constant_grid();

// Fixed constants: C is fitted on the base box and the bound is checked on the
// extended probes. Omitted a/b trigger the greedy search (largest a per axis,
// then smallest b per axis).
struct CertifyOptions {
  std::optional<std::vector<double>> a;
  std::optional<std::vector<double>> b;
};

TypeSCertificate certify(const AnalyticHandle& f, const std::vector<double>& alpha,
                         const std::vector<double>& beta, const ProbeSpec& probes = {},
                         const CertifyOptions& opts = {});

// Real-axis certification of sampled data. The base box is the inner half of the
// grid window, the extended set is the whole window.
TypeSCertificate certify(const GridFunction2D& f, const std::vector<double>& alpha,
                         const std::vector<double>& beta, ProbeSpec probes = grid_probe_defaults(),
                         const CertifyOptions& opts = {});

// Checks a stated bound (a, b, C) directly: max over base and extended probes of
// log|f| - log(bound).
double bound_residual(const AnalyticHandle& f, const std::vector<double>& alpha,
                      const std::vector<double>& beta, const std::vector<double>& a,
                      const std::vector<double>& b, double C, const ProbeSpec& probes = {});

std::vector<double> sigma(const std::vector<double>& v);

struct ExponentPair {
  std::vector<double> alpha;
  std::vector<double> beta;
};

ExponentPair product_exponents(const std::vector<double>& alpha, const std::vector<double>& beta,
                               const std::vector<double>& alpha2, const std::vector<double>& beta2);

struct SfLemmaReport {
  TypeSCertificate input;
  TypeSCertificate output;          // SF(f) against (sigma(alpha), sigma(beta))
  std::vector<double> swapped_a;    // sigma(1 / (4 a_in)): Gaussian dual widths, swapped
  std::vector<double> unswapped_a;  // 1 / (4 a_in)
  double swapped_residual = 0.0;
  double unswapped_residual = 0.0;
  bool passed() const noexcept {
    return input.certified() && output.certified() &&
           swapped_residual <= output.probe_spec.tolerance;
  }
};

nlohmann::json to_json(const SfLemmaReport& r);

SfLemmaReport check_sf_lemma(const AnalyticHandle& f, const std::vector<double>& alpha,
                             const std::vector<double>& beta, Window w = {8.0, 8.0},
                             std::size_t n = 128);

}  // namespace axb
