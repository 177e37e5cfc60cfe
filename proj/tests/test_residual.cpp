#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "plateau/residual.hpp"
#include "plateau/rng.hpp"
#include "plateau/surface.hpp"
#include "test_util.hpp"

using namespace plateau;
using plateau::test::rel_err;

namespace {

ModelConfig model_for(const KnotCurve& curve) {
  ModelConfig cfg;
  cfg.curve = curve;
  cfg.arch.hidden = {4, 4};
  cfg.arch.out_dim = 4;
  return cfg;
}

std::vector<double> random_theta(const MlpArchitecture& arch, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> th(arch.param_count());
  for (double& v : th) v = rng.uniform(-0.4, 0.4);
  return th;
}

// Random smooth scalar field as an exact jet: low-order polynomial.
struct Poly {
  double c0, cx, cy, cxy, cxx, cyy, cxxx;
  Jet2 at(double x, double y) const {
    const Jet2 jx = jet_x(x), jy = jet_y(y);
    return jet_const(c0) + jx * cx + jy * cy + jx * jy * cxy +
           jx * jx * cxx + jy * jy * cyy + jx * jx * jx * cxxx;
  }
  double value(double x, double y) const {
    return c0 + cx * x + cy * y + cxy * x * y + cxx * x * x + cyy * y * y +
           cxxx * x * x * x;
  }
};

Poly random_poly(Rng& rng, double scale) {
  return {rng.uniform(-scale, scale), rng.uniform(-scale, scale),
          rng.uniform(-scale, scale), rng.uniform(-scale, scale),
          rng.uniform(-scale, scale), rng.uniform(-scale, scale),
          rng.uniform(-scale, scale)};
}

}  // namespace

TEST_CASE("hemisphere pullback is the Poincare disc metric") {
  const ModelConfig cfg = model_for(preset_curve(CurvePreset::kUnknot));
  const std::vector<double> theta(cfg.arch.param_count(), 0.0);
  SurfaceEvaluator ev(cfg);
  ev.bind(theta);
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const double r = std::sqrt(rng.uniform()) * 0.95;
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double x = r * std::cos(phi), y = r * std::sin(phi);
    SurfaceJet j;
    ev.eval_jet(x, y, j);
    const auto m = pullback_metric(std::span<const Jet2>(j.comp), x, y);
    const double r2 = x * x + y * y;
    const double want = 4.0 / ((1.0 - r2) * (1.0 - r2));
    CHECK(rel_err(m.g[0][0], want, 1e-9) < 1e-11);
    CHECK(rel_err(m.g[1][1], want, 1e-9) < 1e-11);
    CHECK(std::abs(m.g[0][1]) < 1e-11 * want);
    CHECK(rel_err(m.det_g, want * want, 1e-9) < 1e-10);
    // d_a log sqrt(det g) = 4 x_a / (1 - r^2).
    CHECK(rel_err(m.dlog_sqrt_det[0], 4.0 * x / (1.0 - r2), 1e-6) < 1e-9);
    CHECK(rel_err(m.dlog_sqrt_det[1], 4.0 * y / (1.0 - r2), 1e-6) < 1e-9);
  }
}

TEST_CASE("hemisphere tension vanishes to rounding") {
  const ModelConfig cfg = model_for(preset_curve(CurvePreset::kUnknot));
  const std::vector<double> theta(cfg.arch.param_count(), 0.0);
  SurfaceEvaluator ev(cfg);
  ev.bind(theta);
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const double r = std::sqrt(rng.uniform()) * 0.999;
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    SurfaceJet j;
    ev.eval_jet(r * std::cos(phi), r * std::sin(phi), j);
    const auto res = tension(std::span<const Jet2>(j.comp));
    CHECK(res.sq_norm <= 1e-18);
  }
}

TEST_CASE("horosphere slice has constant tension with exact components") {
  // u = (1, x, y, 0): flat plane at height 1, mean curvature vector of
  // length 2 pointing in the X frame direction.
  std::vector<Jet2> comp = {jet_const(1.0), jet_x(0.3), jet_y(-0.2),
                            jet_const(0.0)};
  const auto m = pullback_metric(std::span<const Jet2>(comp));
  CHECK(m.g[0][0] == 1.0);
  CHECK(m.g[1][1] == 1.0);
  CHECK(m.g[0][1] == 0.0);
  CHECK(m.det_g == 1.0);
  const auto res = tension(std::span<const Jet2>(comp), m);
  CHECK(res.tau_X == 2.0);
  CHECK(res.tau_Y[0] == 0.0);
  CHECK(res.tau_Y[1] == 0.0);
  CHECK(res.tau_Y[2] == 0.0);
  CHECK(res.sq_norm == 4.0);
}

TEST_CASE("any immersion into the geodesic 2-plane slice is tension-free") {
  Rng rng(12);
  for (int t = 0; t < 25; ++t) {
    const Poly pp = random_poly(rng, 0.3);
    const Poly qp = random_poly(rng, 0.2);
    const double x = rng.uniform(-0.5, 0.5), y = rng.uniform(-0.5, 0.5);
    // X = exp(y + p), Y_1 = x + q: gradients stay independent, so the map
    // is an immersion into the slice {Y_2 = Y_3 = 0}.
    const Jet2 X = exp(jet_y(y) + pp.at(x, y));
    const Jet2 Y1 = jet_x(x) + qp.at(x, y);
    std::vector<Jet2> comp = {X, Y1, jet_const(0.0), jet_const(0.0)};
    const auto res = tension(std::span<const Jet2>(comp), x, y);
    CHECK(res.sq_norm < 1e-24);
    CHECK(res.tau_Y[1] == 0.0);
    CHECK(res.tau_Y[2] == 0.0);
  }
}

TEST_CASE("metric derivative blocks match finite differences") {
  const ModelConfig cfg = model_for(torus_knot(2, 3));
  const std::vector<double> theta = random_theta(cfg.arch, 14);
  SurfaceEvaluator ev(cfg);
  ev.bind(theta);
  const auto metric_at = [&](double x, double y) {
    SurfaceJet j;
    ev.eval_jet(x, y, j);
    return pullback_metric(std::span<const Jet2>(j.comp), x, y);
  };
  const double h = 1e-5;
  for (auto [x, y] : {std::pair{0.3, 0.1}, {-0.2, -0.45}, {0.5, 0.4}}) {
    const auto m = metric_at(x, y);
    const auto xp = metric_at(x + h, y), xm = metric_at(x - h, y);
    const auto yp = metric_at(x, y + h), ym = metric_at(x, y - h);
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        CHECK(rel_err(m.dg[0][b][c], (xp.g[b][c] - xm.g[b][c]) / (2 * h),
                      1e-4) < 1e-6);
        CHECK(rel_err(m.dg[1][b][c], (yp.g[b][c] - ym.g[b][c]) / (2 * h),
                      1e-4) < 1e-6);
        CHECK(rel_err(m.dg_inv[0][b][c],
                      (xp.g_inv[b][c] - xm.g_inv[b][c]) / (2 * h), 1e-4) <
              1e-6);
        CHECK(rel_err(m.dg_inv[1][b][c],
                      (yp.g_inv[b][c] - ym.g_inv[b][c]) / (2 * h), 1e-4) <
              1e-6);
      }
    const auto lsd = [](const PullbackMetric& mm) {
      return 0.5 * std::log(mm.det_g);
    };
    CHECK(rel_err(m.dlog_sqrt_det[0], (lsd(xp) - lsd(xm)) / (2 * h), 1e-4) <
          1e-6);
    CHECK(rel_err(m.dlog_sqrt_det[1], (lsd(yp) - lsd(ym)) / (2 * h), 1e-4) <
          1e-6);
    // g g^-1 = I.
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const double id = m.g[b][0] * m.g_inv[0][c] + m.g[b][1] * m.g_inv[1][c];
        CHECK(std::abs(id - (b == c ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("laplace_beltrami reduces to the flat Laplacian for a flat metric") {
  std::vector<Jet2> comp = {jet_const(1.0), jet_x(0.0), jet_y(0.0),
                            jet_const(0.0)};
  const auto m = pullback_metric(std::span<const Jet2>(comp));
  const Jet2 f{1.7, 0.3, -0.8, 2.5, 0.6, -1.1};
  CHECK(laplace_beltrami(f, m) == f.hxx + f.hyy);
  CHECK(metric_inner(f, f, m) == f.gx * f.gx + f.gy * f.gy);
}

TEST_CASE("degenerate first fundamental form is rejected") {
  std::vector<Jet2> comp = {jet_const(1.0), jet_const(0.5), jet_const(-0.3),
                            jet_const(0.0)};
  try {
    pullback_metric(std::span<const Jet2>(comp), 0.25, -0.5);
    FAIL("expected DegenerateImmersionError");
  } catch (const DegenerateImmersionError& e) {
    CHECK(e.det_g() == 0.0);
    CHECK(std::string(e.what()).find("degenerate immersion") !=
          std::string::npos);
    CHECK(std::string(e.what()).find("0.25") != std::string::npos);
  }
  // Rank-one data (parallel gradients) fails too.
  std::vector<Jet2> rank1 = {jet_const(1.0),
                             Jet2{0.0, 1.0, 2.0, 0.0, 0.0, 0.0},
                             Jet2{0.0, 2.0, 4.0, 0.0, 0.0, 0.0},
                             jet_const(0.0)};
  CHECK_THROWS_AS(pullback_metric(std::span<const Jet2>(rank1)),
                  DegenerateImmersionError);
  // A healthy immersion passes.
  std::vector<Jet2> ok = {jet_const(1.0), jet_x(0.0), jet_y(0.0),
                          jet_const(0.0)};
  CHECK_NOTHROW(pullback_metric(std::span<const Jet2>(ok)));
}

TEST_CASE("squared tension norm is invariant under hyperbolic isometries") {
  const ModelConfig cfg = model_for(torus_knot(2, 3));
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> theta = random_theta(cfg.arch, 100 + trial);
    SurfaceEvaluator ev(cfg);
    ev.bind(theta);
    const double r = std::sqrt(rng.uniform()) * 0.9;
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double x = r * std::cos(phi), y = r * std::sin(phi);
    SurfaceJet j;
    ev.eval_jet(x, y, j);
    const double base = tension(std::span<const Jet2>(j.comp)).sq_norm;

    // Translation along the ideal boundary: shift Y values only.
    SurfaceJet tr = j;
    for (size_t i = 1; i < tr.comp.size(); ++i)
      tr.comp[i].v += rng.uniform(-5.0, 5.0);
    CHECK(tension(std::span<const Jet2>(tr.comp)).sq_norm == base);

    // Dilation about the boundary origin: scale every slot of X and Y by
    // a power of two, which commutes with rounding.
    for (double lambda : {0.5, 2.0}) {
      SurfaceJet sc = j;
      for (auto& c : sc.comp) {
        c.v *= lambda;
        c.gx *= lambda;
        c.gy *= lambda;
        c.hxx *= lambda;
        c.hxy *= lambda;
        c.hyy *= lambda;
      }
      CHECK(tension(std::span<const Jet2>(sc.comp)).sq_norm == base);
    }
  }
}
