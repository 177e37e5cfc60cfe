#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "plateau/intersect.hpp"
#include "test_util.hpp"

using namespace plateau;
using plateau::test::temp_dir;

namespace {

// Identifies a record by the magnitude of its preimage x coordinates.
const DoublePointRecord& record_near(
    const std::vector<DoublePointRecord>& recs, double x0) {
  for (const DoublePointRecord& r : recs)
    if (std::abs(std::abs(r.p1.x) - x0) < 0.05) return r;
  REQUIRE(false);
  return recs.front();
}

}  // namespace

TEST_CASE("polynomial fixture evaluates u = (x^2, f(x), y, x y)") {
  PolynomialImmersion fx = two_crossing_fixture();
  // f and f' against the expanded polynomial.
  for (double x : {-0.9, -0.3, 0.0, 0.2, 0.55, 1.0}) {
    const double f_ref =
        0.060025 * x - 0.6125 * x * x * x + x * x * x * x * x;
    const double df_ref =
        0.060025 - 3.0 * 0.6125 * x * x + 5.0 * x * x * x * x;
    CHECK(std::abs(fx.f(x) - f_ref) <= 1e-15);
    CHECK(std::abs(fx.df(x) - df_ref) <= 1e-15);
  }
  std::array<double, 4> u;
  Jac4x2 jac;
  fx.eval(0.4, -0.7, u, jac);
  CHECK(u[0] == 0.4 * 0.4);
  CHECK(u[1] == fx.f(0.4));
  CHECK(u[2] == -0.7);
  CHECK(u[3] == 0.4 * -0.7);
  CHECK(jac[0][0] == 0.8);
  CHECK(jac[0][1] == 0.0);
  CHECK(jac[1][0] == fx.df(0.4));
  CHECK(jac[2][1] == 1.0);
  CHECK(jac[3][0] == -0.7);
  CHECK(jac[3][1] == 0.4);

  CHECK_THROWS_AS(PolynomialImmersion({}), std::invalid_argument);
  CHECK_THROWS_AS(PolynomialImmersion({0.0, 1.0}), std::invalid_argument);

  CHECK(fixture_by_name("one_crossing") != nullptr);
  CHECK(fixture_by_name("two_crossing") != nullptr);
  CHECK(fixture_by_name("offset_plane") != nullptr);
  CHECK(fixture_by_name("three_crossing") == nullptr);
}

TEST_CASE("grid evaluation is row-major, masked, and validated") {
  OffsetPlaneImmersion plane;
  const ImmersionGrid g = eval_grid(plane, 16);
  CHECK(g.res == 16);
  REQUIRE(g.pts.size() == g.img.size());
  CHECK(g.pts.size() > 150);  // pi/4 of 256, minus the rim
  const double rmax2 = (1.0 - kGridMargin) * (1.0 - kGridMargin);
  const double h = 2.0 / 16;
  for (size_t i = 0; i < g.pts.size(); ++i) {
    const DiscPoint& p = g.pts[i];
    CHECK(p.x * p.x + p.y * p.y <= rmax2);
    // Cell centres: odd multiples of h/2.
    const double kx = (p.x + 1.0) / h - 0.5;
    CHECK(std::abs(kx - std::round(kx)) < 1e-12);
    CHECK(g.img[i][1] == p.x);
    CHECK(g.img[i][2] == p.y);
    if (i > 0) {  // scan order: y strictly non-decreasing, x increasing in row
      CHECK(g.pts[i].y >= g.pts[i - 1].y);
      if (g.pts[i].y == g.pts[i - 1].y) CHECK(g.pts[i].x > g.pts[i - 1].x);
    }
  }
  CHECK_THROWS_AS(eval_grid(plane, 15), std::invalid_argument);
}

TEST_CASE("offset plane: proximity equals disc distance, no candidates") {
  OffsetPlaneImmersion plane;
  const ImmersionGrid g = eval_grid(plane, 32);
  const ProximityField f = self_proximity(g, 0.2);
  REQUIRE(f.pts.size() == g.pts.size());
  CHECK(f.grid_res == 32);
  CHECK(f.epsilon == 0.2);
  const double h = 2.0 / 32;
  for (double v : f.values) {
    CHECK(v > 0.2);              // image distance == disc distance > epsilon
    CHECK(v < 0.2 + 2.0 * h);    // some lattice point sits just beyond
  }
  const auto cands = generate_candidates(g, 0.2, 0.15);
  CHECK(cands.empty());
  DoublePointAnalysis an = find_double_points(plane, 32, 0.2, 0.15);
  CHECK(an.records.empty());
  CHECK(an.n_candidates == 0);
  CHECK(an.n_converged == 0);
  CHECK(!an.multiplicity_flag);

  CHECK_THROWS_AS(self_proximity(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(self_proximity(g, 2.5), std::invalid_argument);
}

TEST_CASE("proximity field dips at the crossing of the cubic fixture") {
  PolynomialImmersion fx = one_crossing_fixture();
  const ProximityField f = self_proximity(fx, 64, 0.2);
  double at_crossing = 1e30, generic = 1e30;
  for (size_t i = 0; i < f.pts.size(); ++i) {
    const DiscPoint& p = f.pts[i];
    if (std::abs(p.x - 0.5) < 0.02 && std::abs(p.y) < 0.02)
      at_crossing = std::min(at_crossing, f.values[i]);
    if (std::abs(p.x) < 0.02 && std::abs(p.y - 0.5) < 0.02)
      generic = std::min(generic, f.values[i]);
  }
  CHECK(at_crossing < 0.03);
  CHECK(generic > 0.05);

  const std::string dir = temp_dir("proximity");
  const std::string path = dir + "/field.txt";
  write_proximity_field(f, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == f.pts.size());
}

TEST_CASE("cubic fixture: the one double point is recovered with sign +1") {
  PolynomialImmersion fx = one_crossing_fixture();
  const DoublePointAnalysis an = find_double_points(fx, 128, 0.2, 0.05);
  REQUIRE(an.records.size() == 1);
  const DoublePointRecord& r = an.records[0];
  // Canonical order puts the lexicographically smaller preimage first.
  CHECK(r.p1.x < r.p2.x);
  CHECK(std::abs(r.p1.x + 0.5) <= 1e-10);
  CHECK(std::abs(r.p2.x - 0.5) <= 1e-10);
  CHECK(std::abs(r.p1.y) <= 1e-10);
  CHECK(std::abs(r.p2.y) <= 1e-10);
  CHECK(r.residual <= 1e-12);
  CHECK(r.sign == 1);
  // Pair-system determinant 8 x0^2 f'(x0) = 8 * 0.25 * 0.5 = 1.
  CHECK(std::abs(r.jac_det - 1.0) <= 1e-8);
  CHECK(std::abs(r.image[0] - 0.25) <= 1e-10);
  CHECK(std::abs(r.image[1]) <= 1e-10);
  CHECK(std::abs(r.image[2]) <= 1e-10);
  CHECK(std::abs(r.image[3]) <= 1e-10);
  CHECK(self_intersection_number(an.records) == 1);
  CHECK(!an.multiplicity_flag);
  CHECK(an.n_converged >= 1);
  CHECK(an.n_candidates >= 1);
}

TEST_CASE("quintic fixture: two crossings, opposite signs, count zero") {
  PolynomialImmersion fx = two_crossing_fixture();
  const DoublePointAnalysis an = find_double_points(fx, 256, 0.2, 0.012);
  REQUIRE(an.records.size() == 2);
  const DoublePointRecord& inner = record_near(an.records, 0.35);
  const DoublePointRecord& outer = record_near(an.records, 0.7);

  CHECK(std::abs(inner.p1.x + 0.35) <= 1e-10);
  CHECK(std::abs(inner.p2.x - 0.35) <= 1e-10);
  CHECK(std::abs(inner.p1.y) <= 1e-10);
  CHECK(std::abs(inner.p2.y) <= 1e-10);
  CHECK(inner.residual <= 1e-12);
  CHECK(inner.sign == -1);
  const double det_inner = 8.0 * 0.35 * 0.35 * fx.df(0.35);
  CHECK(std::abs(inner.jac_det - det_inner) <= 1e-8);
  CHECK(det_inner < 0.0);

  CHECK(std::abs(outer.p1.x + 0.7) <= 1e-10);
  CHECK(std::abs(outer.p2.x - 0.7) <= 1e-10);
  CHECK(outer.residual <= 1e-12);
  CHECK(outer.sign == 1);
  const double det_outer = 8.0 * 0.7 * 0.7 * fx.df(0.7);
  CHECK(std::abs(outer.jac_det - det_outer) <= 1e-8);
  CHECK(det_outer > 0.0);

  CHECK(self_intersection_number(an.records) == 0);
  CHECK(!an.multiplicity_flag);
}

TEST_CASE("doubling the scan resolution leaves the double points unchanged") {
  PolynomialImmersion one = one_crossing_fixture();
  const DoublePointAnalysis a1 = find_double_points(one, 128, 0.2, 0.05);
  const DoublePointAnalysis a2 = find_double_points(one, 256, 0.2, 0.05);
  REQUIRE(a1.records.size() == 1);
  REQUIRE(a2.records.size() == 1);
  CHECK(std::abs(a1.records[0].p1.x - a2.records[0].p1.x) <= 1e-9);
  CHECK(std::abs(a1.records[0].p2.x - a2.records[0].p2.x) <= 1e-9);
  CHECK(a1.records[0].sign == a2.records[0].sign);

  PolynomialImmersion two = two_crossing_fixture();
  const DoublePointAnalysis b1 = find_double_points(two, 128, 0.2, 0.012);
  const DoublePointAnalysis b2 = find_double_points(two, 256, 0.2, 0.012);
  CHECK(b1.records.size() == 2);
  CHECK(b2.records.size() == 2);
  CHECK(self_intersection_number(b1.records) ==
        self_intersection_number(b2.records));
}

TEST_CASE("intersection sign from explicit tangent frames") {
  // Plane 1 spans (e1, e2), plane 2 spans (e3, e4): positively oriented R^4.
  Jac4x2 j1{}, j2{};
  j1[0][0] = 1.0;
  j1[1][1] = 1.0;
  j2[2][0] = 1.0;
  j2[3][1] = 1.0;
  double det = 0.0;
  CHECK(intersection_sign(j1, j2, &det) == 1);
  CHECK(det == 1.0);
  // Swapping the roles of the two sheets preserves the sign.
  CHECK(intersection_sign(j2, j1) == 1);

  // Reversing one tangent frame's orientation flips the sign.
  Jac4x2 j3{};
  j3[2][1] = 1.0;
  j3[3][0] = 1.0;
  CHECK(intersection_sign(j1, j3, &det) == -1);
  CHECK(det == -1.0);

  // The floor test runs on unit-normalised columns, so scale cannot fake
  // transversality away.
  Jac4x2 j4{};
  j4[2][0] = 1e-8;
  j4[3][1] = 1e-8;
  CHECK(intersection_sign(j1, j4, &det) == 1);
  CHECK(det == doctest::Approx(1e-16).epsilon(1e-12));

  // Coincident planes are non-transverse.
  CHECK_THROWS_AS(intersection_sign(j1, j1), NonTransverseError);
  try {
    intersection_sign(j1, j1);
  } catch (const NonTransverseError& e) {
    CHECK(std::string(e.what()).find("non-transverse") != std::string::npos);
  }
}

TEST_CASE("newton refinement converges from a coarse candidate") {
  PolynomialImmersion fx = one_crossing_fixture();
  const RefineResult rr =
      newton_refine(fx, DiscPoint{0.52, 0.01}, DiscPoint{-0.47, -0.02});
  REQUIRE(rr.record.has_value());
  CHECK(rr.failure.empty());
  const DoublePointRecord& r = *rr.record;
  CHECK(std::abs(std::abs(r.p1.x) - 0.5) <= 1e-10);
  CHECK(std::abs(std::abs(r.p2.x) - 0.5) <= 1e-10);
  CHECK(r.residual <= 1e-12);
  CHECK(r.sign == 1);
  CHECK(rr.iters <= 20);
  CHECK(r.newton_iters == rr.iters);
}

TEST_CASE("newton refinement rejects pairs that collapse to the diagonal") {
  PolynomialImmersion fx = one_crossing_fixture();
  // Near x = 0 the only root of f is 0, so the pair merges into one point.
  const RefineResult rr =
      newton_refine(fx, DiscPoint{0.06, 0.02}, DiscPoint{-0.05, 0.02});
  CHECK(!rr.record.has_value());
  CHECK(!rr.failure.empty());
}

TEST_CASE("deduplication keeps the best residual per unordered pair") {
  DoublePointRecord a;
  a.p1 = {0.5, 0.0};
  a.p2 = {-0.5, 0.0};
  a.residual = 1e-13;
  a.sign = 1;
  a.jac_det = 1.0;
  DoublePointRecord b;  // same pair, swapped and nudged, better residual
  b.p1 = {-0.5 + 1e-9, 1e-9};
  b.p2 = {0.5 - 1e-9, 0.0};
  b.residual = 1e-14;
  b.sign = 1;
  b.jac_det = 1.0 + 1e-9;
  DoublePointRecord c;
  c.p1 = {0.3, 0.0};
  c.p2 = {-0.3, 0.0};
  c.residual = 1e-13;
  c.sign = -1;

  const auto out = deduplicate({a, b, c}, 1e-6);
  REQUIRE(out.size() == 2);
  CHECK(out[0].residual == 1e-14);
  CHECK(out[0].jac_det == 1.0 + 1e-9);
  // Canonical order: p1 lexicographically before p2.
  for (const DoublePointRecord& r : out) CHECK(r.p1.x < r.p2.x);
  CHECK(self_intersection_number(out) == 0);

  CHECK_THROWS_AS(deduplicate({a}, 0.0), std::invalid_argument);
}

TEST_CASE("image multiplicity flags coincident images only") {
  DoublePointRecord a, b;
  a.image = {0.25, 0.0, 0.0, 0.0};
  b.image = {0.25, 0.0, 0.0, 0.0};
  std::vector<DoublePointRecord> same = {a, b};
  CHECK(has_image_multiplicity(same));
  b.image[1] = 0.5;
  std::vector<DoublePointRecord> apart = {a, b};
  CHECK(!has_image_multiplicity(apart));
  CHECK(has_image_multiplicity(apart, 1.0));
  CHECK(!has_image_multiplicity(std::vector<DoublePointRecord>{a}));
}

TEST_CASE("double point records round trip through text exactly") {
  PolynomialImmersion fx = two_crossing_fixture();
  const DoublePointAnalysis an = find_double_points(fx, 128, 0.2, 0.012);
  REQUIRE(an.records.size() == 2);
  const std::string dir = temp_dir("records");
  const std::string path = dir + "/double_points.txt";
  write_records(an.records, path);
  const auto back = read_records(path);
  REQUIRE(back.size() == an.records.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].p1.x == an.records[i].p1.x);
    CHECK(back[i].p1.y == an.records[i].p1.y);
    CHECK(back[i].p2.x == an.records[i].p2.x);
    CHECK(back[i].p2.y == an.records[i].p2.y);
    CHECK(back[i].image == an.records[i].image);
    CHECK(back[i].residual == an.records[i].residual);
    CHECK(back[i].jac_det == an.records[i].jac_det);
    CHECK(back[i].sign == an.records[i].sign);
    CHECK(back[i].newton_iters == 0);  // diagnostic, not persisted
  }

  std::ofstream(dir + "/bad.txt") << "0.1 0.2 0.3\n";
  CHECK_THROWS_AS(read_records(dir + "/bad.txt"), std::runtime_error);
  std::ofstream(dir + "/badsign.txt")
      << "0 0 0.5 0 0 0 0 0 1e-13 1.0 2\n";
  CHECK_THROWS_AS(read_records(dir + "/badsign.txt"), std::runtime_error);
  CHECK_THROWS_AS(read_records(dir + "/missing.txt"), std::runtime_error);
}

TEST_CASE("candidate overflow names the remedy") {
  OffsetPlaneImmersion plane;
  try {
    generate_candidates(plane, 64, 0.01, 10.0);
    CHECK(false);
  } catch (const CandidateOverflowError& e) {
    CHECK(std::string(e.what()).find("tau_img") != std::string::npos);
  }
}

TEST_CASE("trained-surface immersion exposes values and tangents") {
  ModelConfig cfg;
  cfg.curve = preset_curve(CurvePreset::kUnknot);
  cfg.arch.hidden = {4};
  cfg.arch.out_dim = 4;
  const std::vector<double> theta(cfg.arch.param_count(), 0.0);
  SurfaceImmersion im(cfg, theta);

  std::array<double, 4> u;
  Jac4x2 jac;
  for (const DiscPoint p : {DiscPoint{0.3, -0.2}, DiscPoint{-0.6, 0.1}}) {
    im.eval(p.x, p.y, u, jac);
    const double r2 = p.x * p.x + p.y * p.y;
    const double d = 1.0 + r2;
    CHECK(u[0] == doctest::Approx((1.0 - r2) / d).epsilon(1e-13));
    CHECK(u[1] == doctest::Approx(2.0 * p.x / d).epsilon(1e-13));
    CHECK(u[2] == doctest::Approx(2.0 * p.y / d).epsilon(1e-13));
    CHECK(std::abs(u[3]) <= 1e-15);
    CHECK(jac[0][0] == doctest::Approx(-4.0 * p.x / (d * d)).epsilon(1e-12));
    CHECK(jac[0][1] == doctest::Approx(-4.0 * p.y / (d * d)).epsilon(1e-12));
    CHECK(jac[1][0] ==
          doctest::Approx(2.0 * (1.0 - p.x * p.x + p.y * p.y) / (d * d))
              .epsilon(1e-12));
    CHECK(jac[1][1] == doctest::Approx(-4.0 * p.x * p.y / (d * d))
                           .epsilon(1e-12));
    CHECK(jac[2][0] == doctest::Approx(-4.0 * p.x * p.y / (d * d))
                           .epsilon(1e-12));
    CHECK(jac[2][1] ==
          doctest::Approx(2.0 * (1.0 + p.x * p.x - p.y * p.y) / (d * d))
              .epsilon(1e-12));
  }

  // The half-space pipeline is specific to three ambient dimensions.
  ModelConfig bad = cfg;
  bad.curve.ambient_dim = 4;
  bad.curve.comps.resize(4);
  bad.arch.out_dim = 5;
  CHECK_THROWS_AS(SurfaceImmersion(bad, std::vector<double>(
                                            bad.arch.param_count(), 0.0)),
                  std::invalid_argument);
}
