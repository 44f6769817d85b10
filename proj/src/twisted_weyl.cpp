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

#include "axb/twisted_weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "axb/errors.hpp"
#include "axb/laplace_twist.hpp"
#include "axb/transforms.hpp"

namespace axb {

namespace {

constexpr double kIdentityQ = 1e-12;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Map1 compose(const Map1& outer, const Map1& inner) {
  if (!outer) return inner;
  if (!inner) return outer;
  return [outer, inner](cplx z) { return outer(inner(z)); };
}

SliceImage pulled_back(const SliceImage& in, const Map1& psi) {
  SliceImage r = in;
  r.chain = compose(in.chain, psi);
  if (in.multiplier) r.multiplier = compose(in.multiplier, psi);
  return r;
}

// source as an n2 x n1 matrix with the slice scales folded in
Eigen::MatrixXcd source_columns(const SliceImage& in) {
  const auto& s = in.source;
  Eigen::MatrixXcd m(s.n2(), s.n1());
  for (std::size_t i = 0; i < s.n1(); ++i) {
    const cplx sc = in.slice_scale.empty() ? cplx(1.0) : in.slice_scale.at(i);
    for (std::size_t j = 0; j < s.n2(); ++j) m(j, i) = sc * s(i, j);
  }
  return m;
}

struct Node {
  cplx w;     // argument handed to the sampled Laplace transform
  cplx mult;  // multiplier at psi(z)
};

}  // namespace

cplx SliceImage::eval(std::size_t slice, cplx z) const {
  const cplx w = chain ? chain(z) : z;
  const double h = source.h2();
  cplx acc = 0.0;
  for (std::size_t j = 0; j < source.n2(); ++j) acc += std::exp(-w * source.x2(j)) * source(slice, j);
  acc *= h;
  if (multiplier) acc *= multiplier(z);
  if (!slice_scale.empty()) acc *= slice_scale.at(slice);
  return acc;
}

GridFunction2D SliceImage::on_real_grid(double z_half, std::size_t nz) const {
  auto out = GridFunction2D::zeros(Window{source.window().half1, z_half}, source.n1(), nz);
  for (std::size_t i = 0; i < source.n1(); ++i) {
    for (std::size_t j = 0; j < nz; ++j) out(i, j) = eval(i, out.x2(j));
  }
  return out;
}

GridFunction2D invert_pulled_back(const SliceImage& in, const Map1& psi, double c,
                                  const PipelineOptions& o) {
  const auto& src = in.source;
  const std::size_t n1 = src.n1();
  const std::size_t n2 = src.n2();
  const double h = src.h2();
  const double xmax = src.window().half2;
  const double band = o.band_fraction * kPi / h;
  const Eigen::MatrixXcd S = source_columns(in);
  Eigen::RowVectorXd x(n2);
  for (std::size_t j = 0; j < n2; ++j) x(j) = src.x2(j);

  auto node = [&](double t) {
    const cplx z(c, t);
    const cplx p = psi ? psi(z) : z;
    return Node{in.chain ? in.chain(p) : p, in.multiplier ? in.multiplier(p) : cplx(1.0)};
  };
  auto g_row = [&](const Node& nd) -> Eigen::RowVectorXcd {
    Eigen::RowVectorXcd e(n2);
    for (std::size_t j = 0; j < n2; ++j) e(j) = std::exp(-nd.w * x(j));
    return (h * nd.mult) * (e * S);
  };

  // Scan each half-line for the cut: band edge, decay of G down to its
  // roundoff plateau, or the cap. The plateau is what sample noise of relative
  // size o.sample_noise turns into after the Laplace weights e^{-w x}.
  const double smax = S.cwiseAbs().maxCoeff();
  auto plateau = [&](const Node& nd) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n2; ++j) acc += std::norm(std::exp(-nd.w * x(j)));
    return o.sample_noise * smax * h * std::abs(nd.mult) * std::sqrt(acc);
  };
  const double dt0 = o.step_factor * kTwoPi / (2.0 * xmax);
  double dmax = 0.0;
  double gmax = 0.0;
  std::array<double, 2> cut{};
  std::array<double, 2> edge_g{};
  std::array<double, 2> edge_noise{};
  std::array<bool, 2> decayed{};
  for (int side = 0; side < 2; ++side) {
    const double sgn = side == 0 ? 1.0 : -1.0;
    double t = 0.0;
    int quiet = 0;
    for (int m = 0;; ++m) {
      const Node nd = node(sgn * t);
      const double eps = 1e-6 * std::max(1.0, t);
      const cplx wp = node(sgn * t + eps).w;
      if (!finite(nd.w) || !finite(nd.mult) || !finite(wp)) {
        throw Error(ErrorCode::ContourDivergence, "pulled-back argument is not finite on the contour");
      }
      dmax = std::max(dmax, std::abs(wp - nd.w) / eps);
      const double g = g_row(nd).cwiseAbs().maxCoeff();
      if (!std::isfinite(g)) {
        throw Error(ErrorCode::ContourDivergence, "Laplace image overflows on the contour");
      }
      gmax = std::max(gmax, g);
      edge_g[side] = g;
      edge_noise[side] = plateau(nd);
      if (std::abs(nd.w.imag()) >= band || t >= o.t_cap) break;
      const bool low = g <= 1e-15 * gmax || (g <= 4.0 * edge_noise[side] && g <= 1e-4 * gmax);
      quiet = (low && m > 8) ? quiet + 1 : 0;
      if (quiet >= 3) {
        decayed[side] = true;
        break;
      }
      t = m < 64 ? t + dt0 : t * 1.05;
    }
    cut[side] = t;
  }
  if (gmax == 0.0) return GridFunction2D::zeros(src.window(), n1, n2);
  for (int side = 0; side < 2; ++side) {
    if (!decayed[side] && edge_g[side] > o.tail_tol * gmax && edge_g[side] > 4.0 * edge_noise[side]) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "integrand at the cut t = %.3g is %.3e of its maximum", cut[side],
                    edge_g[side] / gmax);
      throw Error(ErrorCode::ContourDivergence, msg);
    }
  }

  const double dt = o.step_factor * kTwoPi / (xmax + xmax * std::max(dmax, 1e-3));
  const auto n_pos = static_cast<long>(std::ceil(cut[0] / dt));
  const auto n_neg = static_cast<long>(std::ceil(cut[1] / dt));
  if (static_cast<std::size_t>(n_pos + n_neg + 1) > o.max_nodes) {
    throw Error(ErrorCode::ContourDivergence, "inversion contour needs more nodes than allowed");
  }

  // Accumulate  Y = E G  in node blocks; E(i, n) = dt/2pi e^{z_n x_i}.
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n2, n1);
  constexpr long kBlock = 2048;
  for (long b0 = -n_neg; b0 <= n_pos; b0 += kBlock) {
    const long b1 = std::min(n_pos + 1, b0 + kBlock);
    const long nb = b1 - b0;
    Eigen::MatrixXcd A(nb, n2);
    Eigen::MatrixXcd E(n2, nb);
    for (long m = 0; m < nb; ++m) {
      const double t = static_cast<double>(b0 + m) * dt;
      const Node nd = node(t);
      const cplx z(c, t);
      for (std::size_t j = 0; j < n2; ++j) {
        A(m, j) = h * nd.mult * std::exp(-nd.w * x(j));
        E(j, m) = (dt / kTwoPi) * std::exp(z * x(j));
      }
    }
    Y.noalias() += E * (A * S);
  }
  if (!Y.allFinite()) throw Error(ErrorCode::ContourDivergence, "inversion produced non-finite values");

  auto out = GridFunction2D::zeros(src.window(), n1, n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) out(i, j) = Y(j, i);
  }
  return out;
}

// ------------------------------------------------------------ observables

TwistedObservable::TwistedObservable(GridFunction2D samples, int k, double q, std::optional<double> c)
    : samples_(std::move(samples)), k_(k), q_(q), c_(c.value_or(default_contour(k))) {
  if (k != 0 && k != 1) throw Error(ErrorCode::PreconditionViolation, "k must be 0 or 1");
}

TwistedObservable TwistedObservable::from_handle(const AnalyticHandle& f, Window w, std::size_t n, int k,
                                                 double q, std::optional<double> c) {
  if (f.dims() != 2) throw Error(ErrorCode::InvalidHandle, "twisted observables need two variables");
  TwistedObservable r(sample(f, w, n, n), k, q, c);
  r.handle_ = f;
  return r;
}

TwistedObservable& TwistedObservable::with_image(std::optional<SliceImage> im) {
  image_ = std::move(im);
  return *this;
}

TwistedObservable& TwistedObservable::with_representation(Representation r) {
  if (r == Representation::Hat && !handle_) {
    throw Error(ErrorCode::PreconditionViolation, "hat representation needs a closed-form base");
  }
  rep_ = r;
  return *this;
}

SliceImage TwistedObservable::laplace_image(bool use_carried) const {
  if (use_carried && image_) return *image_;
  return SliceImage(samples_);
}

double default_contour(int k) { return k == 0 ? 1.0 : 0.0; }

void validate_contour(int k, double q, double c) {
  if (k != 0 && k != 1) throw Error(ErrorCode::PreconditionViolation, "k must be 0 or 1");
  if (!std::isfinite(c)) throw Error(ErrorCode::PreconditionViolation, "contour abscissa must be finite");
  if (k == 0) {
    if (!(c > 0.0)) throw Error(ErrorCode::PreconditionViolation, "k = 0 needs a positive contour abscissa");
    return;
  }
  if (std::abs(q) < kIdentityQ) return;
  if (std::abs(c) >= kPi / (2.0 * std::abs(q))) {
    throw Error(ErrorCode::PreconditionViolation, "contour abscissa outside the strip");
  }
  if (std::abs(c) >= 1.0 / std::abs(q)) {
    throw Error(ErrorCode::OnBranchCut, "contour crosses a slit of the inverse map");
  }
}

namespace {

// Beyond the outermost samples above floor * max, multiply by a Gaussian
// taper so that noise there cannot be blown up by the Laplace weights. A
// smooth taper (rather than zeroing) keeps the sampled spectrum decaying.
void taper_below_floor(GridFunction2D& s, double floor_rel) {
  if (!(floor_rel > 0.0)) return;
  const double floor = floor_rel * s.max_abs();
  const double width = std::max(0.5, 3.0 * s.h2());
  for (std::size_t i = 0; i < s.n1(); ++i) {
    std::size_t lo = s.n2();
    std::size_t hi = 0;
    for (std::size_t j = 0; j < s.n2(); ++j) {
      if (std::abs(s(i, j)) >= floor) {
        lo = std::min(lo, j);
        hi = j;
      }
    }
    for (std::size_t j = 0; j < s.n2(); ++j) {
      if (lo == s.n2()) {
        s(i, j) = 0.0;
      } else if (j < lo || j > hi) {
        const double d = (j < lo ? s.x2(lo) - s.x2(j) : s.x2(j) - s.x2(hi)) / width;
        s(i, j) *= std::exp(-d * d);
      }
    }
  }
}

TwistedObservable run_slice_op(int k, double q, const TwistedObservable& u, const Map1& psi, double c,
                               const PipelineOptions& opts) {
  SliceImage in = u.laplace_image(opts.use_image);
  taper_below_floor(in.source, opts.noise_floor);
  TwistedObservable r(invert_pulled_back(in, psi, c, opts), k, q, u.c());
  if (opts.carry_image) r.with_image(pulled_back(in, psi));
  return r;
}

}  // namespace

TwistedObservable T_partial(int k, double q, const TwistedObservable& u, double c_T,
                            const PipelineOptions& opts) {
  if (k != 0 && k != 1) throw Error(ErrorCode::PreconditionViolation, "k must be 0 or 1");
  if (std::abs(q) < kIdentityQ) {
    TwistedObservable r(u.samples(), k, q, u.c());
    return r.with_image(u.image());
  }
  const TwistParams p(q, k);
  if (!(std::abs(c_T) < p.strip_half_width())) {
    throw Error(ErrorCode::PreconditionViolation, "T contour must lie inside the strip");
  }
  return run_slice_op(k, q, u, [p](cplx z) { return phi(p, z); }, c_T, opts);
}

TwistedObservable tau_partial(int k, double q, const TwistedObservable& u, std::optional<double> c,
                              const PipelineOptions& opts) {
  const double cc = c.value_or(default_contour(k));
  validate_contour(k, q, cc);
  if (std::abs(q) < kIdentityQ) {
    TwistedObservable r(u.samples(), k, q, cc);
    return r.with_image(u.image());
  }
  const TwistParams p(q, k);
  TwistedObservable r = run_slice_op(k, q, u, [p](cplx w) { return phi_inv(p, w); }, cc, opts);
  return TwistedObservable(r.samples(), k, q, cc).with_image(r.image());
}

TwistedObservable star(int k, double q_twist, double q_weyl, const TwistedObservable& u,
                       const TwistedObservable& v, std::optional<double> c, const PipelineOptions& opts) {
  const TwistedObservable tu = T_partial(k, q_twist, u, 0.0, opts);
  const TwistedObservable tv = T_partial(k, q_twist, v, 0.0, opts);
  const GridFunction2D w = weyl_product(tu.samples(), tv.samples(), q_weyl);
  return tau_partial(k, q_twist, TwistedObservable(w, k, q_twist), c, opts);
}

// ------------------------------------------------------------ bullet product

cplx psi_Z(const BulletParams& p, cplx z) {
  if (p.nu == cplx(0.0)) return -p.gamma * z;
  return -p.gamma * std::sinh(p.nu * z) / p.nu;
}

cplx psi_Z_inv(const BulletParams& p, cplx w) {
  if (p.nu == cplx(0.0)) return -w / p.gamma;
  const cplx zeta = -p.nu * w / p.gamma;
  if (std::abs(zeta.real()) < 1e-12 && std::abs(zeta.imag()) >= 1.0) {
    throw Error(ErrorCode::OnBranchCut, "point lies on a slit of psi_Z^{-1}");
  }
  return std::asinh(zeta) / p.nu;
}

void validate_bullet(const BulletParams& p) {
  if (std::abs(p.nu.real()) > 1e-14 * std::max(1.0, std::abs(p.nu))) {
    throw Error(ErrorCode::PreconditionViolation, "nu must be imaginary");
  }
  if (std::abs(std::abs(p.gamma) - 1.0) > 1e-12) {
    throw Error(ErrorCode::PreconditionViolation, "gamma must lie on the unit circle");
  }
  if (p.nu == cplx(0.0)) return;
  // slits of psi_Z^{-1} are the rays +-gamma [1/mu, inf), mu = |nu|
  const double mu = std::abs(p.nu);
  const double rg = std::abs(p.gamma.real());
  const bool hits = rg < 1e-14 ? std::abs(p.c) < 1e-14 : std::abs(p.c) >= rg / mu;
  if (hits) throw Error(ErrorCode::OnBranchCut, "Z inversion contour crosses a slit");
}

SliceImage Z_transform(const GridFunction2D& u, const BulletParams& p) {
  validate_bullet(p);
  SliceImage r(u);
  r.chain = [p](cplx z) { return psi_Z(p, z); };
  return r;
}

GridFunction2D Z_inverse(const SliceImage& f, const BulletParams& p, const PipelineOptions& opts) {
  validate_bullet(p);
  return invert_pulled_back(f, [p](cplx w) { return psi_Z_inv(p, w); }, p.c, opts);
}

SliceImage bullet(const SliceImage& f, const SliceImage& g, const BulletParams& p, const PipelineOptions& opts) {
  const GridFunction2D u = Z_inverse(f, p, opts);
  const GridFunction2D v = Z_inverse(g, p, opts);
  if (!u.same_shape(v)) throw Error(ErrorCode::ShapeMismatch, "bullet factors live on different grids");
  return Z_transform(u * v, p);
}

SliceImage rho_hat_E(const SliceImage& f, const BulletParams& p) {
  SliceImage r = f;
  const Map1 m = [p](cplx z) {
    return p.nu == cplx(0.0) ? -z : -std::sinh(p.nu * z) / p.nu;
  };
  if (f.multiplier) {
    const Map1 old = f.multiplier;
    r.multiplier = [old, m](cplx z) { return old(z) * m(z); };
  } else {
    r.multiplier = m;
  }
  if (r.slice_scale.empty()) r.slice_scale.assign(f.source.n1(), 1.0);
  for (std::size_t i = 0; i < f.source.n1(); ++i) r.slice_scale[i] *= std::exp(-2.0 * f.source.x1(i));
  return r;
}

namespace {

// Nothing is integrated over a, so only the l edges have to be quiet.
GridFunction2D sample_shifted(const Evaluator2& f, const BulletGrid& g, double da) {
  auto out = GridFunction2D::zeros(g.window, g.n_a, g.n_l);
  for (std::size_t i = 0; i < g.n_a; ++i) {
    for (std::size_t j = 0; j < g.n_l; ++j) out(i, j) = f(out.x1(i) + da, out.x2(j));
  }
  const double mx = out.max_abs();
  for (std::size_t i = 0; i < g.n_a; ++i) {
    const double edge = std::max(std::abs(out(i, 0)), std::abs(out(i, g.n_l - 1)));
    if (edge > kEdgeTolerance * mx) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "l boundary magnitude %.3e vs maximum %.3e", edge, mx);
      throw Error(ErrorCode::WindowTooSmall, msg);
    }
  }
  return out;
}

}  // namespace

DerivationReport check_bullet_derivation(sym::LieGen x, const BulletParams& p, const AnalyticHandle& u,
                                         const AnalyticHandle& v, const BulletGrid& grid,
                                         const PipelineOptions& opts) {
  if (u.dims() != 2 || v.dims() != 2) throw Error(ErrorCode::InvalidHandle, "inputs are functions of (a, l)");
  return check_bullet_derivation(
      x, p, [u](double a, double l) { return u.eval(a, l); }, [v](double a, double l) { return v.eval(a, l); },
      grid, opts);
}

DerivationReport check_bullet_derivation(sym::LieGen x, const BulletParams& p, const Evaluator2& u,
                                         const Evaluator2& v, const BulletGrid& grid,
                                         const PipelineOptions& opts) {
  validate_bullet(p);
  const GridFunction2D u0 = sample_shifted(u, grid, 0.0);
  const GridFunction2D v0 = sample_shifted(v, grid, 0.0);
  const SliceImage f = Z_transform(u0, p);
  const SliceImage g = Z_transform(v0, p);
  const GridFunction2D prod = bullet(f, g, p, opts).on_real_grid(grid.z_half, grid.n_z);

  GridFunction2D lhs = prod;
  GridFunction2D t1 = prod;
  GridFunction2D t2 = prod;
  if (x == sym::LieGen::E) {
    lhs = rho_hat_E(bullet(f, g, p, opts), p).on_real_grid(grid.z_half, grid.n_z);
    t1 = bullet(rho_hat_E(f, p), g, p, opts).on_real_grid(grid.z_half, grid.n_z);
    t2 = bullet(f, rho_hat_E(g, p), p, opts).on_real_grid(grid.z_half, grid.n_z);
  } else {
    const double d = grid.delta;
    const GridFunction2D up = sample_shifted(u, grid, d);
    const GridFunction2D um = sample_shifted(u, grid, -d);
    const GridFunction2D vp = sample_shifted(v, grid, d);
    const GridFunction2D vm = sample_shifted(v, grid, -d);
    const cplx k = -1.0 / (2.0 * d);  // rho(A) = -d/da
    const GridFunction2D pp = bullet(Z_transform(up, p), Z_transform(vp, p), p, opts).on_real_grid(grid.z_half, grid.n_z);
    const GridFunction2D pm = bullet(Z_transform(um, p), Z_transform(vm, p), p, opts).on_real_grid(grid.z_half, grid.n_z);
    lhs = (pp - pm) * k;
    t1 = bullet(Z_transform((up - um) * k, p), g, p, opts).on_real_grid(grid.z_half, grid.n_z);
    t2 = bullet(f, Z_transform((vp - vm) * k, p), p, opts).on_real_grid(grid.z_half, grid.n_z);
  }
  const double norm = l2_norm(prod);
  const double res = l2_norm(lhs - t1 - t2);
  return DerivationReport{x, norm > 0.0 ? res / norm : res, norm};
}

// ------------------------------------------------------------ hat presentation

Evaluator2 hat(const AnalyticHandle& f) {
  if (f.dims() != 2) throw Error(ErrorCode::InvalidHandle, "hat needs a two-variable handle");
  return [f](double y1, double x2) { return f.eval(cplx(0.0, y1), x2); };
}

HatObservable::HatObservable(const AnalyticHandle& f, Window w, std::size_t n) : window_(w), n_(n) {
  if (f.dims() != 2) throw Error(ErrorCode::InvalidHandle, "hat needs a two-variable handle");
  if (!is_power_of_two(n) || n < 8) throw Error(ErrorCode::ShapeMismatch, "grid size must be a power of two >= 8");
  shifted_ = [f, w, n](double y1) {
    auto g = GridFunction2D::zeros(w, n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) g(i, j) = f.eval(cplx(g.x1(i), y1), g.x2(j));
    }
    return TwistedObservable(std::move(g));
  };
}

TwistedObservable HatObservable::shifted(double y1) const { return shifted_(y1); }

GridFunction2D HatObservable::on_grid(double y_half, std::size_t ny) const {
  auto out = GridFunction2D::zeros(Window{y_half, window_.half2}, ny, n_);
  for (std::size_t r = 0; r < ny; ++r) {
    const TwistedObservable s = shifted_(out.x1(r));
    for (std::size_t j = 0; j < n_; ++j) out(r, j) = s.samples()(n_ / 2, j);
  }
  return out;
}

HatObservable hat_star(int k, double q_twist, double q_weyl, const HatObservable& a, const HatObservable& b,
                       std::optional<double> c, const PipelineOptions& opts) {
  if (!(a.window_ == b.window_) || a.n_ != b.n_) {
    throw Error(ErrorCode::ShapeMismatch, "hat factors live on different grids");
  }
  const double cc = c.value_or(default_contour(k));
  validate_contour(k, q_twist, cc);
  auto sa = a.shifted_;
  auto sb = b.shifted_;
  return HatObservable(
      [=](double y1) { return star(k, q_twist, q_weyl, sa(y1), sb(y1), cc, opts); }, a.window_, a.n_);
}

}  // namespace axb
