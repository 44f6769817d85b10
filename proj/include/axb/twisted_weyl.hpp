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

// Partial intertwiners acting in the second variable, the twisted Weyl
// product built from them, the commutative product conjugated by Z_nu, and the
// hat presentation f^(y1, x2) = f(i y1, x2).
//
// Every slice operator has the form  L^{-1} o psi^* o L  along x2. Sampled
// inputs get the trapezoid Laplace transform of their samples, which is only
// trustworthy for |Im w| below the grid band pi / h2; contours are cut there.
// Outputs remember their Laplace image (source samples composed with the
// chain of maps) so that applying the inverse operator does not have to go
// back through samples. For k = 0 that is the only route that converges.

#include <functional>
#include <optional>
#include <vector>

#include "axb/numfield.hpp"
#include "axb/symmoyal.hpp"

namespace axb {

using Map1 = std::function<cplx(cplx)>;

/// Per x1 slice i:  G_i(z) = scale_i * multiplier(z) * h2 sum_j e^{-chain(z) x2_j} source(i, j).
struct SliceImage {
  GridFunction2D source;
  Map1 chain;                     // empty = identity
  Map1 multiplier;                // empty = 1
  std::vector<cplx> slice_scale;  // empty = 1

  explicit SliceImage(GridFunction2D s) : source(std::move(s)) {}
  cplx eval(std::size_t slice, cplx z) const;
  /// G_i on real z nodes; rows follow the source slices.
  GridFunction2D on_real_grid(double z_half, std::size_t nz) const;
};

struct PipelineOptions {
  double band_fraction = 0.9;  // cut where |Im(Laplace argument)| reaches this * pi / h2
  double step_factor = 0.25;   // trapezoid step as a fraction of 2 pi / bandwidth
  double tail_tol = 1e-8;      // |G| at the cut, relative to its maximum
  double t_cap = 2e4;
  // Assumed relative noise of sampled sources. For k = 0 the Laplace weights
  // reach e^{(pi/2q)|x|} and turn it into a plateau; contours stop there.
  double sample_noise = 1e-15;
  // Optional Gaussian taper outside the span of samples above this fraction
  // of the maximum (0 = off).
  double noise_floor = 0.0;
  std::size_t max_nodes = 200000;
  bool carry_image = true;  // attach the Laplace image to outputs
  bool use_image = true;    // prefer an input's carried image over its samples
};

/// Runs  x -> (1/2pi) int e^{z x} G(psi(z)) dt  on Re z = c for every slice
/// of the image and returns samples at the source's x2 nodes.
GridFunction2D invert_pulled_back(const SliceImage& in, const Map1& psi, double c,
                                  const PipelineOptions& opts = {});

enum class Representation { Plain, Hat };

class TwistedObservable {
 public:
  explicit TwistedObservable(GridFunction2D samples, int k = 1, double q = 0.0,
                             std::optional<double> c = std::nullopt);
  static TwistedObservable from_handle(const AnalyticHandle& f, Window w, std::size_t n, int k = 1,
                                       double q = 0.0, std::optional<double> c = std::nullopt);

  const GridFunction2D& samples() const noexcept { return samples_; }
  int k() const noexcept { return k_; }
  double q() const noexcept { return q_; }
  double c() const noexcept { return c_; }
  Representation representation() const noexcept { return rep_; }
  const std::optional<SliceImage>& image() const noexcept { return image_; }
  const std::optional<AnalyticHandle>& handle() const noexcept { return handle_; }

  TwistedObservable& with_image(std::optional<SliceImage> im);
  TwistedObservable& with_representation(Representation r);
  /// The image to feed a slice operator: the carried one if present and wanted.
  SliceImage laplace_image(bool use_carried) const;

 private:
  GridFunction2D samples_;
  int k_;
  double q_;
  double c_;
  Representation rep_ = Representation::Plain;
  std::optional<SliceImage> image_;
  std::optional<AnalyticHandle> handle_;
};

/// Midpoint of the admissible interval: 1 for k = 0 (I = (0.5, 2)), 0 for k = 1.
double default_contour(int k);
/// k = 0 needs c > 0; k = 1 needs |c| < min(pi / 2q, 1 / q). Throws
/// PreconditionViolation or OnBranchCut.
void validate_contour(int k, double q, double c);

/// T = tau^{-1}: Laplace image pulled back along phi_{q, k pi/2}, inverted at c_T
/// (default 0, inside the strip). |q| < 1e-12 is the identity.
TwistedObservable T_partial(int k, double q, const TwistedObservable& u, double c_T = 0.0,
                            const PipelineOptions& opts = {});
/// tau: pullback along phi^{-1}, inverted at c (default per k).
TwistedObservable tau_partial(int k, double q, const TwistedObservable& u,
                              std::optional<double> c = std::nullopt,
                              const PipelineOptions& opts = {});

/// tau(T u *^W_{q_weyl} T v). The twist and the Weyl parameter are separate
/// knobs; the single-parameter product uses q_weyl = q_twist.
TwistedObservable star(int k, double q_twist, double q_weyl, const TwistedObservable& u,
                       const TwistedObservable& v, std::optional<double> c = std::nullopt,
                       const PipelineOptions& opts = {});

// ------------------------------------------------------------ bullet product

/// Z_nu u(z) = int exp(gamma sinh(nu z) l / nu) u(l) dl = L(u)(psi_Z(z)),
/// psi_Z(z) = -gamma sinh(nu z) / nu (-gamma z at nu = 0).
struct BulletParams {
  cplx nu{0.0, 0.5};
  cplx gamma{1.0, 0.0};
  double c = 0.0;  // inversion abscissa for Z^{-1}
};

cplx psi_Z(const BulletParams& p, cplx z);
cplx psi_Z_inv(const BulletParams& p, cplx w);
/// nu imaginary, |gamma| = 1, contour clear of the slits.
void validate_bullet(const BulletParams& p);

/// Rows of u are a-slices, columns the l variable.
SliceImage Z_transform(const GridFunction2D& u, const BulletParams& p);
GridFunction2D Z_inverse(const SliceImage& f, const BulletParams& p, const PipelineOptions& opts = {});
SliceImage bullet(const SliceImage& f, const SliceImage& g, const BulletParams& p,
                  const PipelineOptions& opts = {});
/// Multiplication by -(e^{-2a} / nu) sinh(nu z).
SliceImage rho_hat_E(const SliceImage& f, const BulletParams& p);

struct BulletGrid {
  Window window{8.0, 8.0};  // a in [-half1, half1), l in [-half2, half2)
  std::size_t n_a = 32;
  std::size_t n_l = 64;
  double z_half = 2.0;  // evaluation on real z in [-z_half, z_half)
  std::size_t n_z = 64;
  double delta = 1e-3;  // central difference in a
};

struct DerivationReport {
  sym::LieGen generator;
  double residual;  // ||rho(f.g) - rho(f).g - f.rho(g)|| / ||f.g|| on the (a, z) grid
  double product_norm;
};

DerivationReport check_bullet_derivation(sym::LieGen x, const BulletParams& p, const AnalyticHandle& u,
                                         const AnalyticHandle& v, const BulletGrid& grid = {},
                                         const PipelineOptions& opts = {});
/// Same for sampled inputs u(a, l), v(a, l); they must decay in l only.
DerivationReport check_bullet_derivation(sym::LieGen x, const BulletParams& p, const Evaluator2& u,
                                         const Evaluator2& v, const BulletGrid& grid = {},
                                         const PipelineOptions& opts = {});

// ------------------------------------------------------------ hat presentation

/// f^(y1, x2) = f(i y1, x2).
Evaluator2 hat(const AnalyticHandle& f);

/// An element of the hat space, known through its x1-shifted copies
/// u(i y1 + x1, x2) on a real grid. Translation covariance of the Weyl product
/// lets the star pipeline run on shifted copies directly.
class HatObservable {
 public:
  HatObservable(const AnalyticHandle& f, Window w, std::size_t n);

  /// Samples of u(i y1 + x1, x2) (with the carried Laplace image for products).
  TwistedObservable shifted(double y1) const;
  /// (y1, x2) grid of u^; rows are y1 in [-y_half, y_half), columns the x2 grid.
  GridFunction2D on_grid(double y_half, std::size_t ny) const;
  const Window& window() const noexcept { return window_; }
  std::size_t n() const noexcept { return n_; }

  friend HatObservable hat_star(int k, double q_twist, double q_weyl, const HatObservable& a,
                                const HatObservable& b, std::optional<double> c,
                                const PipelineOptions& opts);

 private:
  HatObservable(std::function<TwistedObservable(double)> s, Window w, std::size_t n)
      : shifted_(std::move(s)), window_(w), n_(n) {}
  std::function<TwistedObservable(double)> shifted_;
  Window window_;
  std::size_t n_;
};

HatObservable hat_star(int k, double q_twist, double q_weyl, const HatObservable& a, const HatObservable& b,
                       std::optional<double> c = std::nullopt, const PipelineOptions& opts = {});

}  // namespace axb
