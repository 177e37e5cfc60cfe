#pragma once

// Pointwise harmonic-map machinery for maps u: D^2 -> H^{n+1} given as
// second-order jets of the half-space components (X, Y_1..Y_n):
//
//   pullback metric   g_ab = (dX_a dX_b + sum_k dY_k,a dY_k,b) / X^2
//   Laplace-Beltrami  D_g f = g^{ab} f_ab + (d_a g^{ab}) f_b
//                              + g^{ab} (d_a log sqrt det g) f_b
//   tension field     tau_X   = (1/X) [D_g X + (|dY|_g^2 - |dX|_g^2)/X]
//                     tau_Y_k = (1/X) [D_g Y_k - 2 <dX, dY_k>_g / X]
//
// The components are expressed in the frame X d_X, X d_{Y_k}, which is
// orthonormal for the hyperbolic metric, so |tau|^2 is the plain sum of
// squares. Everything is templated over the scalar type: double for direct
// evaluation, the tape's Var for recording parameter gradients. Derivatives
// of the inverse metric use d(g^-1) = -g^-1 (dg) g^-1 and
// d_a log sqrt det g = (1/2) tr(g^-1 d_a g); no finite differences anywhere.

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "plateau/jet.hpp"

namespace plateau {

class DegenerateImmersionError : public std::runtime_error {
 public:
  DegenerateImmersionError(double det_g, double x, double y)
      : std::runtime_error("degenerate immersion point at (" +
                           std::to_string(x) + ", " + std::to_string(y) +
                           "): det_g = " + std::to_string(det_g)),
        det_g_(det_g) {}
  double det_g() const { return det_g_; }

 private:
  double det_g_;
};

// det_g at or below this is treated as a failed immersion (rounding scale).
inline constexpr double kDegenerateDetG = 1e-14;

template <class S>
struct PullbackMetricT {
  std::array<std::array<S, 2>, 2> g{};
  std::array<std::array<S, 2>, 2> g_inv{};
  S det_g{};
  std::array<std::array<std::array<S, 2>, 2>, 2> dg{};      // dg[a][b][c] = d_a g_bc
  std::array<std::array<std::array<S, 2>, 2>, 2> dg_inv{};  // d_a g^{bc}
  std::array<S, 2> dlog_sqrt_det{};
};
using PullbackMetric = PullbackMetricT<double>;

template <class S>
struct TensionResidualT {
  S tau_X{};
  std::vector<S> tau_Y;
  S sq_norm{};
};
using TensionResidual = TensionResidualT<double>;

namespace detail {
template <class S>
inline const S& d1(const BasicJet<S>& j, int a) {
  return a == 0 ? j.gx : j.gy;
}
template <class S>
inline const S& d2(const BasicJet<S>& j, int a, int b) {
  return (a + b == 0) ? j.hxx : (a + b == 2 ? j.hyy : j.hxy);
}
}  // namespace detail

// comp[0] is X, comp[1..] the Y components. For S = double a failed
// immersion throws immediately; for recorded scalars the caller must test
// the det_g node after running the graph.
template <class S>
PullbackMetricT<S> pullback_metric(std::span<const BasicJet<S>> comp,
                                   double at_x = 0.0, double at_y = 0.0) {
  using detail::d1;
  using detail::d2;
  PullbackMetricT<S> m;

  const S& X = comp[0].v;
  const S inv_X = 1.0 / X;
  const S inv_X2 = inv_X * inv_X;

  // Flat first fundamental form E_bc and its partials dE[a][b][c].
  std::array<std::array<S, 2>, 2> E{};
  std::array<std::array<std::array<S, 2>, 2>, 2> dE{};
  for (int b = 0; b < 2; ++b)
    for (int c = b; c < 2; ++c) {
      S acc = d1(comp[0], b) * d1(comp[0], c);
      for (size_t i = 1; i < comp.size(); ++i)
        acc = acc + d1(comp[i], b) * d1(comp[i], c);
      E[b][c] = acc;
      E[c][b] = acc;
      for (int a = 0; a < 2; ++a) {
        S da = d2(comp[0], a, b) * d1(comp[0], c) +
               d1(comp[0], b) * d2(comp[0], a, c);
        for (size_t i = 1; i < comp.size(); ++i)
          da = da + d2(comp[i], a, b) * d1(comp[i], c) +
               d1(comp[i], b) * d2(comp[i], a, c);
        dE[a][b][c] = da;
        dE[a][c][b] = da;
      }
    }

  const S X_a0 = d1(comp[0], 0), X_a1 = d1(comp[0], 1);
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) {
      m.g[b][c] = E[b][c] * inv_X2;
      m.dg[0][b][c] = dE[0][b][c] * inv_X2 - 2.0 * E[b][c] * X_a0 * inv_X2 * inv_X;
      m.dg[1][b][c] = dE[1][b][c] * inv_X2 - 2.0 * E[b][c] * X_a1 * inv_X2 * inv_X;
    }

  m.det_g = m.g[0][0] * m.g[1][1] - m.g[0][1] * m.g[0][1];
  if constexpr (std::is_same_v<S, double>) {
    if (!(m.det_g > kDegenerateDetG))
      throw DegenerateImmersionError(m.det_g, at_x, at_y);
  }

  const S inv_det = 1.0 / m.det_g;
  m.g_inv[0][0] = m.g[1][1] * inv_det;
  m.g_inv[1][1] = m.g[0][0] * inv_det;
  m.g_inv[0][1] = -m.g[0][1] * inv_det;
  m.g_inv[1][0] = m.g_inv[0][1];

  for (int a = 0; a < 2; ++a) {
    // d_a g^{bc} = -(g^-1 (d_a g) g^-1)_{bc}
    std::array<std::array<S, 2>, 2> t{};  // (d_a g) g^-1
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        t[b][c] = m.dg[a][b][0] * m.g_inv[0][c] + m.dg[a][b][1] * m.g_inv[1][c];
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        m.dg_inv[a][b][c] =
            -(m.g_inv[b][0] * t[0][c] + m.g_inv[b][1] * t[1][c]);
    m.dlog_sqrt_det[a] =
        0.5 * (m.g_inv[0][0] * m.dg[a][0][0] + 2.0 * m.g_inv[0][1] * m.dg[a][0][1] +
               m.g_inv[1][1] * m.dg[a][1][1]);
  }
  return m;
}

template <class S>
S laplace_beltrami(const BasicJet<S>& f, const PullbackMetricT<S>& m) {
  S lap = m.g_inv[0][0] * f.hxx + 2.0 * m.g_inv[0][1] * f.hxy +
          m.g_inv[1][1] * f.hyy;
  lap = lap + (m.dg_inv[0][0][0] + m.dg_inv[1][1][0]) * f.gx +
        (m.dg_inv[0][0][1] + m.dg_inv[1][1][1]) * f.gy;
  const S w0 = m.g_inv[0][0] * m.dlog_sqrt_det[0] +
               m.g_inv[1][0] * m.dlog_sqrt_det[1];
  const S w1 = m.g_inv[0][1] * m.dlog_sqrt_det[0] +
               m.g_inv[1][1] * m.dlog_sqrt_det[1];
  return lap + w0 * f.gx + w1 * f.gy;
}

// <df, dh>_g = g^{ab} f_a h_b
template <class S>
S metric_inner(const BasicJet<S>& f, const BasicJet<S>& h,
               const PullbackMetricT<S>& m) {
  return m.g_inv[0][0] * f.gx * h.gx +
         m.g_inv[0][1] * (f.gx * h.gy + f.gy * h.gx) +
         m.g_inv[1][1] * f.gy * h.gy;
}

template <class S>
TensionResidualT<S> tension(std::span<const BasicJet<S>> comp,
                            const PullbackMetricT<S>& m) {
  TensionResidualT<S> r;
  const S inv_X = 1.0 / comp[0].v;

  S grad_sq_Y = metric_inner(comp[1], comp[1], m);
  for (size_t k = 2; k < comp.size(); ++k)
    grad_sq_Y = grad_sq_Y + metric_inner(comp[k], comp[k], m);
  const S grad_sq_X = metric_inner(comp[0], comp[0], m);

  r.tau_X = inv_X * (laplace_beltrami(comp[0], m) +
                     inv_X * (grad_sq_Y - grad_sq_X));
  r.sq_norm = r.tau_X * r.tau_X;
  r.tau_Y.resize(comp.size() - 1);
  for (size_t k = 1; k < comp.size(); ++k) {
    const S t = inv_X * (laplace_beltrami(comp[k], m) -
                         2.0 * inv_X * metric_inner(comp[0], comp[k], m));
    r.tau_Y[k - 1] = t;
    r.sq_norm = r.sq_norm + t * t;
  }
  return r;
}

template <class S>
TensionResidualT<S> tension(std::span<const BasicJet<S>> comp,
                            double at_x = 0.0, double at_y = 0.0) {
  return tension(comp, pullback_metric(comp, at_x, at_y));
}

}  // namespace plateau
