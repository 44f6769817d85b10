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

#include "axb/transforms.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>

#include "axb/errors.hpp"

namespace axb {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMat as_matrix(const GridFunction2D& u) {
  return Eigen::Map<const RowMat>(u.values().data(), static_cast<Eigen::Index>(u.n1()),
                                  static_cast<Eigen::Index>(u.n2()));
}

GridFunction2D from_matrix(Window w, const RowMat& m) {
  std::vector<cplx> v(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMat>(v.data(), m.rows(), m.cols()) = m;
  return GridFunction2D(w, static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                        std::move(v));
}

double node(double half, std::size_t n, std::size_t k) {
  return -half + static_cast<double>(k) * (2.0 * half / static_cast<double>(n));
}

// K[k][j] = h_in exp(i sign y_k x_j), y on the dual grid of x.
Eigen::MatrixXcd dft_matrix(double half_in, std::size_t n, double sign) {
  const double half_out = kPi * static_cast<double>(n) / (2.0 * half_in);
  const double h = 2.0 * half_in / static_cast<double>(n);
  Eigen::MatrixXcd k(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const double y = node(half_out, n, a);
    for (std::size_t j = 0; j < n; ++j) {
      k(a, j) = h * std::exp(cplx(0.0, sign * y * node(half_in, n, j)));
    }
  }
  return k;
}

void require_same(const GridFunction2D& u, const GridFunction2D& v) {
  if (!u.same_shape(v)) throw Error(ErrorCode::ShapeMismatch, "inputs differ in window or size");
}

GridFunction2D twisted_direct(const GridFunction2D& u, const GridFunction2D& v, double q) {
  const std::size_t n1 = u.n1();
  const std::size_t n2 = u.n2();
  const std::size_t c1 = n1 / 2;
  const std::size_t c2 = n2 / 2;
  GridFunction2D out = GridFunction2D::zeros(u.window(), n1, n2);
  std::vector<cplx> e1(n2);
  std::vector<cplx> e2(n1);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t l = 0; l < n2; ++l) e1[l] = std::exp(cplx(0.0, q * u.x1(i) * u.x2(l)));
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t k = 0; k < n1; ++k) e2[k] = std::exp(cplx(0.0, -q * u.x2(j) * u.x1(k)));
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n1; ++k) {
        const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(i + c1) - static_cast<std::ptrdiff_t>(k);
        if (m < 0 || m >= static_cast<std::ptrdiff_t>(n1)) continue;
        cplx row = 0.0;
        for (std::size_t l = 0; l < n2; ++l) {
          const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(j + c2) - static_cast<std::ptrdiff_t>(l);
          if (p < 0 || p >= static_cast<std::ptrdiff_t>(n2)) continue;
          row += e1[l] * u(k, l) * v(static_cast<std::size_t>(m), static_cast<std::size_t>(p));
        }
        acc += e2[k] * row;
      }
      out(i, j) = acc * (u.h1() * u.h2());
    }
  }
  return out;
}

class FftwPair {
 public:
  explicit FftwPair(std::size_t m)
      : m_(m), buf_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m))) {
    fwd_ = fftw_plan_dft_1d(static_cast<int>(m), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(m), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftwPair() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  FftwPair(const FftwPair&) = delete;
  FftwPair& operator=(const FftwPair&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }
  std::size_t size() const { return m_; }

 private:
  std::size_t m_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

// For each (x1_i, y1_k) the y2 sum is a linear convolution in the second axis.
GridFunction2D twisted_fft(const GridFunction2D& u, const GridFunction2D& v, double q) {
  const std::size_t n1 = u.n1();
  const std::size_t n2 = u.n2();
  const std::size_t c1 = n1 / 2;
  const std::size_t c2 = n2 / 2;
  const std::size_t m = 2 * n2;
  FftwPair fft(m);
  std::vector<std::vector<cplx>> vhat(n1, std::vector<cplx>(m));
  for (std::size_t r = 0; r < n1; ++r) {
    std::fill(fft.data(), fft.data() + m, cplx(0.0));
    for (std::size_t l = 0; l < n2; ++l) fft.data()[l] = v(r, l);
    fft.forward();
    std::copy(fft.data(), fft.data() + m, vhat[r].begin());
  }
  GridFunction2D out = GridFunction2D::zeros(u.window(), n1, n2);
  const double scale = u.h1() * u.h2() / static_cast<double>(m);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t k = 0; k < n1; ++k) {
      const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(i + c1) - static_cast<std::ptrdiff_t>(k);
      if (r < 0 || r >= static_cast<std::ptrdiff_t>(n1)) continue;
      cplx* b = fft.data();
      std::fill(b, b + m, cplx(0.0));
      for (std::size_t l = 0; l < n2; ++l) b[l] = std::exp(cplx(0.0, q * u.x1(i) * u.x2(l))) * u(k, l);
      fft.forward();
      const auto& vr = vhat[static_cast<std::size_t>(r)];
      for (std::size_t p = 0; p < m; ++p) b[p] *= vr[p];
      fft.backward();
      for (std::size_t j = 0; j < n2; ++j) {
        out(i, j) += std::exp(cplx(0.0, -q * u.x2(j) * u.x1(k))) * b[j + c2] * scale;
      }
    }
  }
  return out;
}

GridFunction2D twisted_any(const GridFunction2D& u, const GridFunction2D& v, double q,
                           ConvolutionMethod method, bool checked = true) {
  require_same(u, v);
  if (checked) {
    check_window(u);
    check_window(v);
  }
  return method == ConvolutionMethod::Direct ? twisted_direct(u, v, q) : twisted_fft(u, v, q);
}

}  // namespace

Window dual_window(const Window& w, std::size_t n1, std::size_t n2) {
  return {kPi * static_cast<double>(n1) / (2.0 * w.half1),
          kPi * static_cast<double>(n2) / (2.0 * w.half2)};
}

GridFunction2D fourier(const GridFunction2D& u) {
  check_window(u);
  const auto k1 = dft_matrix(u.window().half1, u.n1(), 1.0);
  const auto k2 = dft_matrix(u.window().half2, u.n2(), 1.0);
  const RowMat out = k1 * as_matrix(u) * k2.transpose();
  return from_matrix(dual_window(u.window(), u.n1(), u.n2()), out);
}

namespace {

GridFunction2D sf_unchecked(const GridFunction2D& u) {
  // SF(u)(y1, y2) = F(u)(y2, -y1)
  const auto k1 = dft_matrix(u.window().half1, u.n1(), 1.0);
  const auto k2 = dft_matrix(u.window().half2, u.n2(), -1.0);
  const RowMat out = k2 * as_matrix(u).transpose() * k1.transpose();
  const Window d = dual_window(u.window(), u.n1(), u.n2());
  return from_matrix({d.half2, d.half1}, out);
}

}  // namespace

GridFunction2D symplectic_fourier(const GridFunction2D& u) {
  check_window(u);
  return sf_unchecked(u);
}

GridFunction2D twisted_convolution(const GridFunction2D& u, const GridFunction2D& v, double q,
                                   ConvolutionMethod method) {
  if (q == 0.0 || !std::isfinite(q)) {
    throw Error(ErrorCode::PreconditionViolation, "twisted convolution needs finite q != 0");
  }
  return twisted_any(u, v, q, method);
}

GridFunction2D convolution(const GridFunction2D& u, const GridFunction2D& v, ConvolutionMethod method) {
  return twisted_any(u, v, 0.0, method);
}

GridFunction2D weyl_product(const GridFunction2D& u, const GridFunction2D& v, double q) {
  require_same(u, v);
  check_window(u);
  check_window(v);
  const auto su = sf_unchecked(u);
  const auto sv = sf_unchecked(v);
  // Only the caller's inputs are held to the edge tolerance; the transforms are
  // whatever the dual window of the grid makes of them.
  auto out = sf_unchecked(twisted_any(su, sv, q, ConvolutionMethod::Fft, false));
  out *= std::pow(2.0 * kPi, -4.0);
  return out;
}

namespace {

struct RouteB {
  Eigen::MatrixXcd ka;  // exp(i s h1 t h2 / q) over offsets s (axis 1), t (axis 2)
  Eigen::MatrixXcd kb;
  RowMat um;
  Eigen::MatrixXcd vm;
  Eigen::Index n1;
  Eigen::Index n2;
  double pref;

  RouteB(const GridFunction2D& u, const GridFunction2D& v, double q) {
    if (q == 0.0 || !std::isfinite(q)) {
      throw Error(ErrorCode::PreconditionViolation, "route B needs finite q != 0");
    }
    require_same(u, v);
    check_window(u);
    check_window(v);
    n1 = static_cast<Eigen::Index>(u.n1());
    n2 = static_cast<Eigen::Index>(u.n2());
    const double h1 = u.h1();
    const double h2 = u.h2();
    ka.resize(2 * n1 - 1, 2 * n2 - 1);
    for (Eigen::Index s = 0; s < 2 * n1 - 1; ++s) {
      for (Eigen::Index t = 0; t < 2 * n2 - 1; ++t) {
        ka(s, t) = std::exp(cplx(0.0, static_cast<double>(s - (n1 - 1)) * h1 *
                                          static_cast<double>(t - (n2 - 1)) * h2 / q));
      }
    }
    kb = ka.transpose().conjugate();
    um = as_matrix(u);
    vm = as_matrix(v);
    pref = (h1 * h2) * (h1 * h2) / ((2.0 * kPi * q) * (2.0 * kPi * q));
  }

  // G(p) = sum_r e^{i omega(p - w, r - w) / q} v(r), summed against u(p)
  cplx at(Eigen::Index i1, Eigen::Index i2) const {
    const Eigen::MatrixXcd bv = kb.block(n2 - 1 - i2, n1 - 1 - i1, n2, n1) * vm;
    const Eigen::MatrixXcd g = ka.block(n1 - 1 - i1, n2 - 1 - i2, n1, n2) * bv.transpose();
    return (um.array() * g.array()).sum() * pref;
  }
};

}  // namespace

GridFunction2D weyl_product_route_b(const GridFunction2D& u, const GridFunction2D& v, double q) {
  const RouteB rb(u, v, q);
  RowMat out(rb.n1, rb.n2);
  for (Eigen::Index i1 = 0; i1 < rb.n1; ++i1) {
    for (Eigen::Index i2 = 0; i2 < rb.n2; ++i2) out(i1, i2) = rb.at(i1, i2);
  }
  return from_matrix(u.window(), out);
}

std::vector<cplx> weyl_product_route_b_row(const GridFunction2D& u, const GridFunction2D& v, double q,
                                           std::size_t i1) {
  const RouteB rb(u, v, q);
  if (i1 >= u.n1()) throw Error(ErrorCode::ShapeMismatch, "row index outside the grid");
  std::vector<cplx> row(u.n2());
  for (Eigen::Index i2 = 0; i2 < rb.n2; ++i2) row[static_cast<std::size_t>(i2)] = rb.at(static_cast<Eigen::Index>(i1), i2);
  return row;
}

GridFunction2D poisson_bracket(const AnalyticHandle& u, const AnalyticHandle& v, Window w,
                               std::size_t n1, std::size_t n2) {
  const auto u1 = u.derivative(0);
  const auto u2 = u.derivative(1);
  const auto v1 = v.derivative(0);
  const auto v2 = v.derivative(1);
  return sample(
      [&](double a, double b) { return u1.eval(a, b) * v2.eval(a, b) - u2.eval(a, b) * v1.eval(a, b); },
      w, n1, n2);
}

KappaFit fit_kappa(const std::vector<std::pair<AnalyticHandle, AnalyticHandle>>& pairs, double q,
                   Window w, std::size_t n1, std::size_t n2) {
  if (pairs.empty()) throw Error(ErrorCode::PreconditionViolation, "no pairs to fit");
  if (q == 0.0) throw Error(ErrorCode::PreconditionViolation, "kappa fit needs q != 0");
  KappaFit fit;
  fit.q = q;
  for (const auto& [f, g] : pairs) {
    const auto u = sample(f, w, n1, n2);
    const auto v = sample(g, w, n1, n2);
    auto d = weyl_product(u, v, q);
    d -= weyl_product(u, v, -q);
    d *= 1.0 / (2.0 * q);
    const auto pb = poisson_bracket(f, g, w, n1, n2);
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < pb.values().size(); ++k) {
      num += std::conj(pb.values()[k]) * d.values()[k];
      den += std::norm(pb.values()[k]);
    }
    if (den == 0.0) throw Error(ErrorCode::PreconditionViolation, "pair has vanishing Poisson bracket");
    fit.per_pair.push_back(num / den);
  }
  cplx mean = 0.0;
  for (const auto& k : fit.per_pair) mean += k;
  fit.kappa = mean / static_cast<double>(fit.per_pair.size());
  for (const auto& k : fit.per_pair) fit.spread = std::max(fit.spread, std::abs(k - fit.kappa));
  return fit;
}

}  // namespace axb
