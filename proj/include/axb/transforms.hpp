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

#include <array>
#include <utility>
#include <vector>

#include "axb/numfield.hpp"

namespace axb {

// omega(x, y) = x . J y with J = [[0, 1], [-1, 0]] (half-dimension 1).
struct SymplecticForm {
  static constexpr int n = 1;
  static constexpr std::array<double, 4> J{0.0, 1.0, -1.0, 0.0};
  static double omega(const std::array<double, 2>& x, const std::array<double, 2>& y) noexcept {
    return x[0] * y[1] - x[1] * y[0];
  }
};

// Frequency window dual to w on an n1 x n2 grid: half-width pi n / (2 half).
Window dual_window(const Window& w, std::size_t n1, std::size_t n2);

// F(u)(xi) = int e^{i xi.x} u(x) dx. Output lives on the dual window, same sizes.
GridFunction2D fourier(const GridFunction2D& u);

// SF(u)(y) = int e^{i omega(x, y)} u(x) dx. The output axes are swapped relative
// to the input: y1 is dual to x2 and y2 to x1. SF(SF(u)) lands on u's grid.
GridFunction2D symplectic_fourier(const GridFunction2D& u);

enum class ConvolutionMethod { Direct, Fft };

// (u x_q v)(x) = int e^{i q omega(x, y)} u(y) v(x - y) dy, q != 0.
GridFunction2D twisted_convolution(const GridFunction2D& u, const GridFunction2D& v, double q,
                                   ConvolutionMethod method = ConvolutionMethod::Fft);

// Plain convolution (the q = 0 kernel).
GridFunction2D convolution(const GridFunction2D& u, const GridFunction2D& v,
                           ConvolutionMethod method = ConvolutionMethod::Fft);

// Route A: (2 pi)^{-4} SF[SF(u) x_q SF(v)]. q = 0 gives the pointwise product.
GridFunction2D weyl_product(const GridFunction2D& u, const GridFunction2D& v, double q);

// Route B: (2 pi q)^{-2} int int e^{i omega(a, b) / q} u(w + a) v(w + b) da db.
GridFunction2D weyl_product_route_b(const GridFunction2D& u, const GridFunction2D& v, double q);

// Route B restricted to the output row x1 = x1(i1). Inputs may be complex-shifted
// samples u(w + a), which is how the hat presentation evaluates at imaginary x1.
std::vector<cplx> weyl_product_route_b_row(const GridFunction2D& u, const GridFunction2D& v, double q,
                                           std::size_t i1);

// {u, v} = d1 u d2 v - d2 u d1 v, sampled from closed forms.
GridFunction2D poisson_bracket(const AnalyticHandle& u, const AnalyticHandle& v, Window w,
                               std::size_t n1, std::size_t n2);

struct KappaFit {
  double q = 0.0;
  std::vector<cplx> per_pair;
  cplx kappa;
  double spread = 0.0;  // max |kappa_i - kappa|
};

// Least-squares fit of (u*_q v - u*_{-q} v) / (2q) = kappa {u, v} for each pair.
KappaFit fit_kappa(const std::vector<std::pair<AnalyticHandle, AnalyticHandle>>& pairs, double q,
                   Window w, std::size_t n1, std::size_t n2);

}  // namespace axb
