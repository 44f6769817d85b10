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

#include <optional>
#include <vector>

#include "axb/numfield.hpp"

namespace axb {

// ---------------------------------------------------------------- Laplace

// L(f)(z) = int e^{-z l} f(l) dl by adaptive trapezoid; absolute error target 1e-10.
cplx laplace(const AnalyticHandle& f, cplx z);

struct InverseOptions {
  double tolerance = 1e-10;  // successive refinements must agree to this
  double t_start = 8.0;
  double t_max = 4096.0;
  std::size_t max_points = std::size_t{1} << 20;
};

// (1/2pi) int e^{(c+it)x} F(c+it) dt with adaptive truncation and step.
// Throws ContourDivergence if |F| does not decay along the contour.
cplx inverse_laplace(const Evaluator1& F, double c, double x, const InverseOptions& opts = {});

class LaplaceImage {
 public:
  explicit LaplaceImage(AnalyticHandle source);

  const AnalyticHandle& source() const noexcept { return source_; }
  cplx operator()(cplx z) const { return laplace(source_, z); }
  cplx closed_form(cplx z) const { return source_.laplace(z); }
  Evaluator1 evaluator() const;

  const ContourSamples& cache_contour(double c, double t_max, std::size_t n);
  const std::optional<ContourSamples>& cached() const noexcept { return cache_; }

 private:
  AnalyticHandle source_;
  std::optional<ContourSamples> cache_;
};

// (J* F)(z) := F(iz).
Evaluator1 j_pullback(Evaluator1 F);

struct OGammaReport {
  bool bounded = false;
  int degree = -1;                  // smallest envelope degree found, -1 if none <= cap
  std::vector<double> log_envelope;  // per T level, max log(|F| / (1+|eta|)^degree)
  std::vector<double> t_levels;
};

nlohmann::json to_json(const OGammaReport& r);

// Samples |F| on K + i[-T, T] for doubling T and finds the least polynomial degree
// whose envelope stops growing.
OGammaReport check_O_gamma(const Evaluator1& F, double k0, double k1, int degree_cap);

// ---------------------------------------------------------------- Twisting

struct TwistParams {
  double q = 1.0;
  int k = 0;  // theta = k pi / 2, k in {0, 1}

  TwistParams() = default;
  TwistParams(double q_, int k_);
  double theta() const noexcept;
  cplx rotation() const noexcept;  // e^{i theta}
  bool identity() const noexcept { return q == 0.0; }
  // half-width pi / (2q) of the strip S_q (infinite for q = 0)
  double strip_half_width() const noexcept;
};

cplx phi(const TwistParams& p, cplx z);
cplx phi_derivative(const TwistParams& p, cplx z);

// Principal-branch inverse; lands in the strip S_q. Throws OnBranchCut within
// 1e-12 of the slits (+-i[1/q, inf) for k = 0, +-[1/q, inf) for k = 1).
cplx phi_inv(const TwistParams& p, cplx w);

// Distance from w to the slit set.
double slit_distance(const TwistParams& p, cplx w);

// |phi'(w)|^2 = cos^2(q x) + sinh^2(q y) for w = x + iy.
double jacobian(const TwistParams& p, cplx w);

// Image of the vertical line Re z = c / q under phi (k = 0), and the residual of
// the hyperbola -(qX / cos c)^2 + (qY / sin c)^2 = 1 on it.
std::vector<cplx> line_image(const TwistParams& p, double c, const std::vector<double>& t);
double hyperbola_residual(const TwistParams& p, double c, cplx w);

struct IKEstimate {
  double value = 0.0;
  double tail = 0.0;      // |I(2Y) - I(Y)| at the accepted Y
  double y_cut = 0.0;     // accepted truncation |Im w| <= Y
  double z_space = 0.0;   // independent estimate in the z-plane
  std::vector<double> y_levels;
  std::vector<double> values;
};

nlohmann::json to_json(const IKEstimate& e);

// I_K = int_{K + iR} |F(phi^{-1}(z))| |dz ^ dzbar| for K = [k0, k1] in (0, inf), k = 0.
// Computed in the w-strip with the Jacobian; Y doubles from y_start until the
// change is below tail_target. Throws TailDivergence if the change stops shrinking.
IKEstimate estimate_IK(const Evaluator1& F, double k0, double k1, const TwistParams& p = {},
                       double tail_target = 1e-8, double y_start = 6.0);

}  // namespace axb
