// Shipping gate: one line per criterion with measured values; the process
// exits nonzero if any non-optional criterion fails. The two long CPU
// reproductions (full-profile training, end-to-end trefoil) run only when
// PLATEAU_FULL=1 is set and report SKIP otherwise.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "plateau/checkpoint.hpp"
#include "plateau/config.hpp"
#include "plateau/curve.hpp"
#include "plateau/extension.hpp"
#include "plateau/homfly.hpp"
#include "plateau/intersect.hpp"
#include "plateau/io_util.hpp"
#include "plateau/loss.hpp"
#include "plateau/residual.hpp"
#include "plateau/rng.hpp"
#include "plateau/surface.hpp"
#include "plateau/threading.hpp"
#include "plateau/train.hpp"
#include "test_util.hpp"

using namespace plateau;
using plateau::test::fd_jet;
using plateau::test::FdJet;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

struct Gate {
  int n_pass = 0, n_fail = 0, n_skip = 0;

  void line(int id, bool pass, const std::string& text) {
    std::printf("[%2d] %s %s\n", id, pass ? "PASS" : "FAIL", text.c_str());
    (pass ? n_pass : n_fail)++;
    std::fflush(stdout);
  }
  void skip(int id, const std::string& text) {
    std::printf("[%2d] SKIP %s\n", id, text.c_str());
    ++n_skip;
    std::fflush(stdout);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool full_runs_enabled() {
  const char* e = std::getenv("PLATEAU_FULL");
  return e && *e && std::string(e) != "0";
}

ModelConfig default_unknot_model() {
  ModelConfig m;
  m.curve = preset_curve(CurvePreset::kUnknot);
  m.arch.out_dim = 4;
  return m;
}

// Richardson-extrapolated central differences: cancels the h^2 truncation
// term, leaving the oracle accurate to ~1e-9 on O(1) second derivatives.
template <class F>
FdJet rich_jet(F&& f, double x, double y, double h) {
  const FdJet a = fd_jet(f, x, y, h);
  const FdJet b = fd_jet(f, x, y, h / 2);
  FdJet r;
  r.gx = (4 * b.gx - a.gx) / 3;
  r.gy = (4 * b.gy - a.gy) / 3;
  r.hxx = (4 * b.hxx - a.hxx) / 3;
  r.hxy = (4 * b.hxy - a.hxy) / 3;
  r.hyy = (4 * b.hyy - a.hyy) / 3;
  return r;
}

// ---- desk-scale training, shared between criteria 6 and 10 ----

const char* kDeskConfig = R"([experiment]
name = desk_gate
[curve]
knot = unknot
sigma = 0.05
sigma_modes = 3
curve_seed = 1
[model]
hidden = 32 32 32 32
init = glorot_zero_head
init_seed = 2
[train]
profile = desk
seed = 3
)";

struct DeskRun {
  std::vector<double> params;
  TrainReport adam, lbfgs;
  McStats mc;
};

DeskRun run_desk(int threads) {
  const ExperimentConfig cfg = parse_config_text(kDeskConfig);
  const ModelConfig model = cfg.build_model();
  ThreadPool pool(threads);
  PhaseResult a = adam_phase(model, cfg.initial_params(), cfg.train, pool);
  PhaseResult l = lbfgs_phase(model, a.params, cfg.train, pool);
  DeskRun out;
  out.params = std::move(l.params);
  out.adam = std::move(a.report);
  out.lbfgs = std::move(l.report);
  out.mc = monte_carlo_eval(model, out.params, 256, 4096, 101, pool);
  return out;
}

// Shared artifacts so the determinism criterion can replay its inputs.
struct Shared {
  bool have_c2 = false;
  double c2_max = 0.0, c2_mean = 0.0;
  std::vector<DiscPoint> c2_pts;

  bool have_desk = false;
  DeskRun desk;
  double desk_seconds = 0.0;

  bool have_fixtures = false;
  DoublePointAnalysis one_128, one_256, two_256, two_512;
};

Shared g_shared;

// ---- criteria ----

bool criterion_param_count(std::string& text) {
  MlpArchitecture arch;  // 2 -> 64 x4 -> 4
  const size_t n = arch.param_count();
  std::ostringstream os;
  os << "parameter count for layers (2,64,64,64,64,4): " << n
     << ", expected 12932";
  text = os.str();
  return n == 12932;
}

bool criterion_exact_solution(std::string& text) {
  const double t0 = now_seconds();
  const ModelConfig model = default_unknot_model();
  const std::vector<double> theta(model.arch.param_count(), 0.0);
  g_shared.c2_pts = sample_disc(10000, 42);

  PlainLossEval pe(model);
  pe.bind(theta);
  double max_sq = 0.0;
  for (const DiscPoint& p : g_shared.c2_pts)
    max_sq = std::max(max_sq, pe.point_sq_norm(p.x, p.y));
  ThreadPool pool(3);
  const double mean = batched_loss_value(model, theta, g_shared.c2_pts, pool);
  const double dt = now_seconds() - t0;

  g_shared.c2_max = max_sq;
  g_shared.c2_mean = mean;
  g_shared.have_c2 = true;

  std::ostringstream os;
  os << "hemisphere residual, zero parameters: max |tau|^2 = " << fmt(max_sq)
     << " over 10000 points (bound 1e-18), mean " << fmt(mean) << ", "
     << fmt(dt) << " s (bound 10)";
  text = os.str();
  return max_sq <= 1e-18 && dt < 10.0;
}

bool criterion_derivative_oracle(std::string& text) {
  const double t0 = now_seconds();
  double worst_jet = 0.0, worst_grad = 0.0;
  ThreadPool pool(1);

  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(derive_seed(2024, trial));

    ModelConfig model;
    switch (trial % 3) {
      case 0: model.curve = preset_curve(CurvePreset::kUnknot); break;
      case 1: model.curve = torus_knot(2, 3); break;
      default:
        model.curve = perturb(preset_curve(CurvePreset::kUnknot), 0.05, 3,
                              rng.bits());
    }
    const int depth = 1 + static_cast<int>(rng.index(2));
    model.arch.hidden.assign(depth, 4 + 2 * static_cast<int>(rng.index(7)));
    model.arch.out_dim = 4;

    std::vector<double> theta =
        init_params(model.arch, InitKind::kGlorotZeroHead, rng.bits());
    for (double& t : theta) t += rng.uniform(-0.3, 0.3);

    // Surface jets against extrapolated differences of plain evaluations.
    const double r = 0.8 * std::sqrt(rng.uniform());
    const double phi = rng.uniform(0.0, 6.283185307179586);
    const double x = r * std::cos(phi), y = r * std::sin(phi);
    const SurfaceJet sj = evaluate_jet(model, theta, x, y);
    for (size_t c = 0; c < sj.comp.size(); ++c) {
      auto comp_val = [&](double px, double py) {
        const HalfSpacePoint hp = evaluate(model, theta, px, py);
        return c == 0 ? hp.X : hp.Y[c - 1];
      };
      const FdJet fd = rich_jet(comp_val, x, y, 2e-3);
      const Jet2& ad = sj.comp[c];
      double scale = 1.0;
      for (double s : {ad.gx, ad.gy, ad.hxx, ad.hxy, ad.hyy})
        scale = std::max(scale, std::abs(s));
      double err = std::abs(ad.gx - fd.gx);
      err = std::max(err, std::abs(ad.gy - fd.gy));
      err = std::max(err, std::abs(ad.hxx - fd.hxx));
      err = std::max(err, std::abs(ad.hxy - fd.hxy));
      err = std::max(err, std::abs(ad.hyy - fd.hyy));
      worst_jet = std::max(worst_jet, err / scale);
    }

    // Parameter gradient of the batch loss against central differences.
    std::vector<DiscPoint> pts(16);
    for (DiscPoint& p : pts) {
      const double pr = 0.8 * std::sqrt(rng.uniform());
      const double pa = rng.uniform(0.0, 6.283185307179586);
      p = {pr * std::cos(pa), pr * std::sin(pa)};
    }
    const BatchedLoss bl = batched_loss(model, theta, pts, pool);
    double gnorm = 1e-3;
    for (double g : bl.grad) gnorm = std::max(gnorm, std::abs(g));
    const double h = 1e-6;
    for (size_t j = 0; j < theta.size(); ++j) {
      const double saved = theta[j];
      theta[j] = saved + h;
      const double fp = batched_loss_value(model, theta, pts, pool);
      theta[j] = saved - h;
      const double fm = batched_loss_value(model, theta, pts, pool);
      theta[j] = saved;
      const double fd = (fp - fm) / (2 * h);
      worst_grad = std::max(worst_grad, std::abs(bl.grad[j] - fd) / gnorm);
    }
  }
  const double dt = now_seconds() - t0;
  std::ostringstream os;
  os << "derivative oracle, 100 randomized trials: jet rel err "
     << fmt(worst_jet) << ", loss-gradient rel err " << fmt(worst_grad)
     << " (bound 1e-6 each), " << fmt(dt) << " s (bound 120)";
  text = os.str();
  return worst_jet <= 1e-6 && worst_grad <= 1e-6 && dt < 120.0;
}

bool criterion_extension(std::string& text) {
  // A curve populating every mode m <= 10 in all three components.
  KnotCurve curve;
  curve.ambient_dim = 3;
  curve.comps.assign(3, std::vector<std::complex<double>>(11));
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m <= 10; ++m)
      curve.comps[j][m] = {1.0 / (1 + m + j),
                           m == 0 ? 0.0 : 1.0 / (2 + m + 2 * j)};

  const ExtensionField harm = build_extension(curve, ExtKind::kStereoHarmonic);
  const ExtensionField bi = build_extension(curve, ExtKind::kStereoBiharmonic);
  double worst_dirichlet = 0.0, worst_neumann = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m <= 10; ++m) {
      const std::complex<double> c = harm.a[j][m];  // harmonic stores raw data
      const std::complex<double> a = bi.a[j][m], b = bi.b[j][m];
      const double scale = std::max(1.0, std::abs(c));
      // Boundary value: a + b = c.  Boundary slope: m a + (m+2) b = c, which
      // makes the radial derivative of the evaluated field vanish at r = 1.
      worst_dirichlet =
          std::max(worst_dirichlet, std::abs(a + b - c) / scale);
      worst_neumann = std::max(
          worst_neumann,
          std::abs(double(m) * a + double(m + 2) * b - c) / scale);
    }

  double worst_dr = 0.0;
  std::vector<Jet2> jets(3);
  for (int i = 0; i < 64; ++i) {
    const double t = 0.09 + 6.283185307179586 * i / 64.0;
    bi.eval(std::cos(t), std::sin(t), jets);
    for (const Jet2& jz : jets)
      worst_dr = std::max(
          std::abs(jz.gx * std::cos(t) + jz.gy * std::sin(t)), worst_dr);
  }

  std::ostringstream os;
  os << "boundary extension, modes 0..10: Dirichlet defect "
     << fmt(worst_dirichlet) << ", Neumann defect " << fmt(worst_neumann)
     << " (bound 1e-14, closed form to rounding); radial derivative at r=1 "
     << fmt(worst_dr) << " (bound 1e-8)";
  text = os.str();
  return worst_dirichlet <= 1e-14 && worst_neumann <= 1e-14 &&
         worst_dr <= 1e-8;
}

bool criterion_isometry(std::string& text) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(derive_seed(5150, trial));
    ModelConfig model;
    model.curve = trial % 2 ? torus_knot(2, 3)
                            : perturb(preset_curve(CurvePreset::kUnknot),
                                      0.05, 3, rng.bits());
    model.arch.hidden = {8, 8};
    model.arch.out_dim = 4;
    std::vector<double> theta =
        init_params(model.arch, InitKind::kGlorotZeroHead, rng.bits());
    for (double& t : theta) t += rng.uniform(-0.3, 0.3);

    SurfaceEvaluator ev(model);
    ev.bind(theta);
    SurfaceJet sj;
    for (int p = 0; p < 5; ++p) {
      const double r = 0.7 * std::sqrt(rng.uniform());
      const double phi = rng.uniform(0.0, 6.283185307179586);
      ev.eval_jet(r * std::cos(phi), r * std::sin(phi), sj);
      const double base = tension<double>(sj.comp).sq_norm;
      const double scale = std::max(1.0, std::abs(base));

      // Horizontal translation: shift the Y values, derivatives untouched.
      std::vector<Jet2> moved = sj.comp;
      moved[1].v += 0.37;
      moved[2].v += -1.25;
      moved[3].v += 0.58;
      worst = std::max(
          worst,
          std::abs(tension<double>(moved).sq_norm - base) / scale);

      // Dilation (X, Y) -> (lambda X, lambda Y), every jet slot scales.
      for (double lambda : {0.5, 2.0}) {
        std::vector<Jet2> scaled = sj.comp;
        for (Jet2& jz : scaled) {
          jz.v *= lambda;
          jz.gx *= lambda;
          jz.gy *= lambda;
          jz.hxx *= lambda;
          jz.hxy *= lambda;
          jz.hyy *= lambda;
        }
        worst = std::max(
            worst,
            std::abs(tension<double>(scaled).sq_norm - base) / scale);
      }
    }
  }
  std::ostringstream os;
  os << "isometry invariance of |tau|^2 on 20 random models: translation and "
        "dilation deviation "
     << fmt(worst) << " (bound 1e-10)";
  text = os.str();
  return worst <= 1e-10;
}

bool criterion_desk_training(std::string& text) {
  const double t0 = now_seconds();
  g_shared.desk = run_desk(3);
  g_shared.desk_seconds = now_seconds() - t0;
  g_shared.have_desk = true;

  const McStats& mc = g_shared.desk.mc;
  const double ratio = mc.std_dev / mc.mean;
  std::ostringstream os;
  os << "desk training (perturbed unknot, width 32, 2000+500): MC mean "
     << fmt(mc.mean) << " (bound 1e-4), std/mean " << fmt(ratio)
     << " (bound 0.1), " << fmt(g_shared.desk_seconds) << " s (bound 600)";
  text = os.str();
  return mc.mean <= 1e-4 && ratio <= 0.1 && g_shared.desk_seconds < 600.0;
}

bool criterion_full_training(std::string& text) {
  const ExperimentConfig cfg = parse_config_text(R"([experiment]
name = full_gate
[curve]
knot = unknot
sigma = 0.05
sigma_modes = 3
curve_seed = 1
[model]
init = glorot_zero_head
init_seed = 2
[train]
profile = full
seed = 3
)");
  const ModelConfig model = cfg.build_model();
  ThreadPool pool(3);
  const double t0 = now_seconds();
  PhaseResult a = adam_phase(model, cfg.initial_params(), cfg.train, pool);
  PhaseResult l = lbfgs_phase(model, a.params, cfg.train, pool);
  const McStats mc = monte_carlo_eval(model, l.params, 1000, 16384, 101, pool);
  const double dt = now_seconds() - t0;
  std::ostringstream os;
  os << "full-profile training (width 64, 10000+10000): MC mean "
     << fmt(mc.mean) << " +- " << fmt(mc.std_dev) << " max " << fmt(mc.max)
     << " (target mean 1e-5), " << fmt(dt) << " s";
  text = os.str();
  return mc.mean <= 1e-5;
}

bool criterion_fixtures(std::string& text) {
  const double t0 = now_seconds();
  PolynomialImmersion one = one_crossing_fixture();
  PolynomialImmersion two = two_crossing_fixture();
  g_shared.one_128 = find_double_points(one, 128, 0.2, 0.05);
  g_shared.one_256 = find_double_points(one, 256, 0.2, 0.05);
  g_shared.two_256 = find_double_points(two, 256, 0.2, 0.012);
  g_shared.two_512 = find_double_points(two, 512, 0.2, 0.012);
  g_shared.have_fixtures = true;

  double worst_pre = 0.0, worst_res = 0.0;
  bool ok = true;
  std::string why;

  auto check_one = [&](const DoublePointAnalysis& an) {
    if (an.records.size() != 1) {
      ok = false;
      why += " one-crossing count " + std::to_string(an.records.size());
      return;
    }
    const DoublePointRecord& r = an.records[0];
    worst_pre = std::max({worst_pre, std::abs(r.p1.x + 0.5), std::abs(r.p1.y),
                          std::abs(r.p2.x - 0.5), std::abs(r.p2.y)});
    worst_res = std::max(worst_res, r.residual);
    if (r.sign != 1) {
      ok = false;
      why += " one-crossing sign";
    }
    if (self_intersection_number(an.records) != 1) {
      ok = false;
      why += " one-crossing total";
    }
  };
  auto check_two = [&](const DoublePointAnalysis& an) {
    if (an.records.size() != 2) {
      ok = false;
      why += " two-crossing count " + std::to_string(an.records.size());
      return;
    }
    for (const DoublePointRecord& r : an.records) {
      const double x0 = std::abs(r.p2.x - 0.35) < 0.1 ? 0.35 : 0.7;
      const int expect = x0 == 0.35 ? -1 : 1;
      worst_pre =
          std::max({worst_pre, std::abs(r.p1.x + x0), std::abs(r.p1.y),
                    std::abs(r.p2.x - x0), std::abs(r.p2.y)});
      worst_res = std::max(worst_res, r.residual);
      if (r.sign != expect) {
        ok = false;
        why += " two-crossing sign at " + fmt(x0);
      }
    }
    if (self_intersection_number(an.records) != 0) {
      ok = false;
      why += " two-crossing total";
    }
  };

  check_one(g_shared.one_128);
  check_one(g_shared.one_256);
  check_two(g_shared.two_256);
  check_two(g_shared.two_512);
  if (g_shared.one_128.records.size() != g_shared.one_256.records.size() ||
      g_shared.two_256.records.size() != g_shared.two_512.records.size()) {
    ok = false;
    why += " grid-doubling count drift";
  }
  const double dt = now_seconds() - t0;

  std::ostringstream os;
  os << "double-point fixtures: preimage err " << fmt(worst_pre)
     << " (bound 1e-10), residual " << fmt(worst_res)
     << " (bound 1e-12), signs/counts/grid-doubling "
     << (why.empty() ? "all correct" : "WRONG:" + why) << ", " << fmt(dt)
     << " s (bound 60)";
  text = os.str();
  return ok && worst_pre <= 1e-10 && worst_res <= 1e-12 && dt < 60.0;
}

bool criterion_trefoil(std::string& text) {
  const ExperimentConfig cfg = parse_config_text(R"([experiment]
name = trefoil_gate
[curve]
knot = 3_1
sigma = 0.05
sigma_modes = 3
curve_seed = 1
[model]
init = glorot_zero_head
init_seed = 2
[train]
profile = full
seed = 3
)");
  const ModelConfig model = cfg.build_model();
  ThreadPool pool(3);
  const double t0 = now_seconds();
  PhaseResult a = adam_phase(model, cfg.initial_params(), cfg.train, pool);
  PhaseResult l = lbfgs_phase(model, a.params, cfg.train, pool);

  SurfaceImmersion srf(model, l.params);
  const DoublePointAnalysis an = find_double_points(srf, 256, 0.2, 0.05);
  const int d = self_intersection_number(an.records);
  const ConsistencyReport verdict = consistency_check(
      d, homfly_table("3_1"), an.multiplicity_flag);
  const double dt = now_seconds() - t0;

  double res = 0.0;
  for (const DoublePointRecord& r : an.records)
    res = std::max(res, r.residual);
  std::ostringstream os;
  os << "end-to-end trefoil: " << an.records.size()
     << " double point(s), d = " << d << ", residual " << fmt(res)
     << " (bound 1e-12), verdict " << verdict.verdict << " ("
     << verdict.term << "), " << fmt(dt) << " s";
  text = os.str();
  return an.records.size() == 1 && an.records[0].sign == 1 &&
         res <= 1e-12 && verdict.verdict == "CONSISTENT" &&
         verdict.term == "2a^2";
}

bool criterion_invariant_tables(std::string& text) {
  // Every stored chiral pair is an exact mirror image.
  bool mirrors_ok = true;
  for (const char* base : {"3_1", "5_1", "5_2", "6_1", "8_19", "10_124"}) {
    const HomflyPolynomial p = homfly_table(base);
    const HomflyPolynomial ps = homfly_table(std::string(base) + "*");
    mirrors_ok = mirrors_ok && mirror_poly(p).terms == ps.terms &&
                 mirror_poly(ps).terms == p.terms;
  }
  const HomflyPolynomial f8 = homfly_table("4_1");
  mirrors_ok = mirrors_ok && mirror_poly(f8).terms == f8.terms;

  // The connected sum multiplies polynomials.
  HomflyPolynomial prod;
  for (const auto& [gd1, c1] : homfly_table("3_1").terms)
    for (const auto& [gd2, c2] : homfly_table("3_1*").terms) {
      const auto key =
          std::make_pair(gd1.first + gd2.first, gd1.second + gd2.second);
      prod.terms[key] += c1 * c2;
    }
  std::erase_if(prod.terms, [](const auto& kv) { return kv.second == 0; });
  const bool square_ok = prod.terms == homfly_table("square").terms;

  // The genus-zero slice reproduces every published prediction row:
  // (table entry, self-intersection number, coefficient, printed term).
  struct Row {
    const char* name;
    int d;
    int coeff;
    const char* term;
  };
  const Row rows[] = {
      {"unknot", 0, 1, "1"},        {"3_1", 1, 2, "2a^2"},
      {"5_1", 2, 3, "3a^4"},        {"8_19", 3, 5, "5a^6"},
      {"10_124", 4, 7, "7a^8"},     {"4_1", 1, 1, "a^2"},
      {"4_1", -1, 1, "a^-2"},       {"5_2", 3, -1, "-a^6"},
      {"5_2*", -3, -1, "-a^-6"},    {"6_1", 1, -1, "-a^2"},
      {"6_1*", -1, -1, "-a^-2"},    {"square", 0, 5, "5"},
  };
  bool rows_ok = true;
  std::string bad;
  for (const Row& row : rows) {
    const auto pred = disc_predictions(homfly_table(row.name));
    const auto it = pred.find(row.d);
    if (it == pred.end() || it->second != row.coeff ||
        monomial(0, row.d, row.coeff) != row.term) {
      rows_ok = false;
      bad += std::string(" ") + row.name + "@" + std::to_string(row.d);
    }
  }

  std::ostringstream os;
  os << "invariant tables: mirrors " << (mirrors_ok ? "exact" : "WRONG")
     << ", square = trefoil * mirror trefoil "
     << (square_ok ? "exact" : "WRONG") << ", 12 prediction rows "
     << (rows_ok ? "all reproduced" : ("WRONG:" + bad));
  text = os.str();
  return mirrors_ok && square_ok && rows_ok;
}

bool criterion_determinism(std::string& text) {
  if (!g_shared.have_c2 || !g_shared.have_desk || !g_shared.have_fixtures) {
    text = "determinism: prerequisite criteria did not run";
    return false;
  }
  std::string bad;

  // Exact-solution statistics across thread counts.
  {
    const ModelConfig model = default_unknot_model();
    const std::vector<double> theta(model.arch.param_count(), 0.0);
    PlainLossEval pe(model);
    pe.bind(theta);
    double max_sq = 0.0;
    for (const DiscPoint& p : g_shared.c2_pts)
      max_sq = std::max(max_sq, pe.point_sq_norm(p.x, p.y));
    if (max_sq != g_shared.c2_max) bad += " pointwise-max";
    for (int threads : {1, 7}) {
      ThreadPool pool(threads);
      if (batched_loss_value(model, theta, g_shared.c2_pts, pool) !=
          g_shared.c2_mean)
        bad += " batched-mean@" + std::to_string(threads);
    }
  }

  // Desk training replayed on a single thread.
  {
    const DeskRun again = run_desk(1);
    if (again.params != g_shared.desk.params) bad += " desk-params";
    if (again.adam.series != g_shared.desk.adam.series) bad += " adam-series";
    if (again.lbfgs.series != g_shared.desk.lbfgs.series)
      bad += " lbfgs-series";
    if (again.lbfgs.best_loss != g_shared.desk.lbfgs.best_loss)
      bad += " best-loss";
    const McStats &a = again.mc, &b = g_shared.desk.mc;
    if (a.mean != b.mean || a.std_dev != b.std_dev || a.max != b.max)
      bad += " desk-mc";
  }

  // Fixture pipeline replayed.
  {
    PolynomialImmersion one = one_crossing_fixture();
    PolynomialImmersion two = two_crossing_fixture();
    const DoublePointAnalysis o = find_double_points(one, 128, 0.2, 0.05);
    const DoublePointAnalysis t = find_double_points(two, 256, 0.2, 0.012);
    auto same = [](const std::vector<DoublePointRecord>& u,
                   const std::vector<DoublePointRecord>& v) {
      if (u.size() != v.size()) return false;
      for (size_t i = 0; i < u.size(); ++i)
        if (u[i].p1.x != v[i].p1.x || u[i].p1.y != v[i].p1.y ||
            u[i].p2.x != v[i].p2.x || u[i].p2.y != v[i].p2.y ||
            u[i].residual != v[i].residual ||
            u[i].jac_det != v[i].jac_det || u[i].sign != v[i].sign)
          return false;
      return true;
    };
    if (!same(o.records, g_shared.one_128.records)) bad += " fixture-one";
    if (!same(t.records, g_shared.two_256.records)) bad += " fixture-two";
  }

  std::ostringstream os;
  os << "determinism across thread counts {1,3,7}: "
     << (bad.empty() ? "all replays bit-identical" : ("DRIFT:" + bad));
  text = os.str();
  return bad.empty();
}

}  // namespace

int main() {
  Gate gate;
  const bool full = full_runs_enabled();

  const struct {
    int id;
    bool optional;
    bool (*fn)(std::string&);
    const char* skip_note;
  } criteria[] = {
      {1, false, criterion_param_count, ""},
      {2, false, criterion_exact_solution, ""},
      {3, false, criterion_derivative_oracle, ""},
      {4, false, criterion_extension, ""},
      {5, false, criterion_isometry, ""},
      {6, false, criterion_desk_training, ""},
      {6, true, criterion_full_training,
       "full-profile training (extended half of 6): set PLATEAU_FULL=1 "
       "(~1 h)"},
      {7, false, criterion_fixtures, ""},
      {8, true, criterion_trefoil,
       "end-to-end trefoil reproduction: set PLATEAU_FULL=1 (~1-2 h)"},
      {9, false, criterion_invariant_tables, ""},
      {10, false, criterion_determinism, ""},
  };

  for (const auto& c : criteria) {
    if (c.optional && !full) {
      gate.skip(c.id, c.skip_note);
      continue;
    }
    std::string text;
    bool pass = false;
    try {
      pass = c.fn(text);
    } catch (const std::exception& e) {
      text += (text.empty() ? "" : "; ") + std::string("exception: ") +
              e.what();
    }
    gate.line(c.id, pass, text);
  }

  std::printf("acceptance: %d passed, %d failed, %d skipped\n", gate.n_pass,
              gate.n_fail, gate.n_skip);
  return gate.n_fail == 0 ? 0 : 1;
}
