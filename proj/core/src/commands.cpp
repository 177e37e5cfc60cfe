#include "plateau/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "plateau/io_util.hpp"
#include "plateau/loss.hpp"

namespace plateau {

std::string output_root() {
  const char* env = std::getenv("PLATEAU_OUT_ROOT");
  return (env && *env) ? env : "runs";
}

std::string ensure_dir(const std::string& path) {
  std::filesystem::create_directories(path);
  return path;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.close();
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string mc_summary(const McStats& st) {
  char line[96];
  std::snprintf(line, sizeof line, "%.2e \xc2\xb1 %.2e (%.2e)", st.mean,
                st.std_dev, st.max);
  return line;
}

std::string resolved_train_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const TrainConfig& t = cfg.train;
  os << "profile = " << cfg.profile << "\n"
     << "n_data = " << t.n_data << "\n"
     << "batch = " << t.batch << "\n"
     << "t_adam = " << t.t_adam << "\n"
     << "eta0 = " << fmt17(t.eta0) << "\n"
     << "eta_min = " << fmt17(t.eta_min) << "\n"
     << "n_lbfgs = " << t.n_lbfgs << "\n"
     << "t_lbfgs = " << t.t_lbfgs << "\n"
     << "history = " << t.history << "\n"
     << "delta_g = " << fmt17(t.delta_g) << "\n"
     << "delta_theta = " << fmt17(t.delta_theta) << "\n"
     << "seed = " << t.seed << "\n";
  return os.str();
}

}  // namespace

TrainOutcome cmd_train(const ExperimentConfig& cfg, const std::string& out_dir,
                       ThreadPool& pool, std::ostream& log) {
  TrainOutcome out;
  out.dir = ensure_dir(out_dir);

  // Provenance echo: source config verbatim, resolved settings alongside.
  {
    auto f = open_out(join(out.dir, "config.cfg"));
    f << cfg.raw_text;
    if (!cfg.raw_text.empty() && cfg.raw_text.back() != '\n') f << "\n";
    f << "\n# resolved training settings\n" << resolved_train_text(cfg);
    finish(f, join(out.dir, "config.cfg"));
  }

  const ModelConfig model = cfg.build_model();
  std::vector<double> params = cfg.initial_params();
  log << "train '" << cfg.name << "': knot "
      << (model.curve.label.empty() ? "(unlabelled)" : model.curve.label)
      << ", " << params.size() << " parameters, profile " << cfg.profile
      << "\n";

  PhaseResult adam = adam_phase(model, std::move(params), cfg.train, pool);
  out.adam = adam.report;
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "adam: %s, best %.3e (epoch %d)\n",
                  adam.report.termination.c_str(), adam.report.best_loss,
                  adam.report.best_index);
    log << buf;
  }

  PhaseResult lb = lbfgs_phase(model, std::move(adam.params), cfg.train, pool);
  out.lbfgs = lb.report;
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lbfgs: %s, best %.3e (iterate %d)\n",
                  lb.report.termination.c_str(), lb.report.best_loss,
                  lb.report.best_index);
    log << buf;
  }

  out.checkpoint.model = model;
  out.checkpoint.params = std::move(lb.params);
  out.checkpoint.meta.phase = cfg.train.t_lbfgs > 0   ? "lbfgs"
                              : cfg.train.t_adam > 0 ? "adam"
                                                     : "init";
  out.checkpoint.meta.seed = cfg.train.seed;
  out.checkpoint.meta.loss = out.lbfgs.best_loss;
  save_checkpoint(join(out.dir, "checkpoint.txt"), out.checkpoint);

  {
    const std::string path = join(out.dir, "train_report.txt");
    auto f = open_out(path);
    f << "# resolved training settings\n"
      << resolved_train_text(cfg) << "\n[adam]\n"
      << to_text(out.adam) << "\n[lbfgs]\n"
      << to_text(out.lbfgs);
    finish(f, path);
  }
  {
    const std::string path = join(out.dir, "loss_curve.csv");
    auto f = open_out(path);
    f << "phase,step,loss\n";
    for (size_t i = 0; i < out.adam.series.size(); ++i)
      f << "adam," << i << "," << fmt17(out.adam.series[i]) << "\n";
    for (size_t i = 0; i < out.lbfgs.series.size(); ++i)
      f << "lbfgs," << i << "," << fmt17(out.lbfgs.series[i]) << "\n";
    finish(f, path);
  }
  log << "wrote " << join(out.dir, "checkpoint.txt") << "\n";
  return out;
}

EvalOutcome cmd_eval(const Checkpoint& ckpt, int samples, int size,
                     uint64_t seed, int heatmap_res,
                     const std::string& out_dir, ThreadPool& pool,
                     std::ostream& log) {
  ckpt.validate();
  const std::string dir = ensure_dir(out_dir);
  EvalOutcome out;
  out.stats =
      monte_carlo_eval(ckpt.model, ckpt.params, samples, size, seed, pool);
  out.summary = mc_summary(out.stats);
  log << "eval: " << out.summary << "\n";

  {
    const std::string path = join(dir, "eval_report.txt");
    auto f = open_out(path);
    f << "# monte carlo interior residual\n"
      << "samples = " << samples << "\n"
      << "size = " << size << "\n"
      << "seed = " << seed << "\n"
      << "mean = " << fmt17(out.stats.mean) << "\n"
      << "std = " << fmt17(out.stats.std_dev) << "\n"
      << "max = " << fmt17(out.stats.max) << "\n"
      << "summary = " << out.summary << "\n";
    finish(f, path);
  }

  if (heatmap_res > 0) {
    const std::string path = join(dir, "residual_grid.txt");
    auto f = open_out(path);
    f << "# x y tension_sq_norm\n";
    PlainLossEval pe(ckpt.model);
    pe.bind(ckpt.params);
    const double h = 2.0 / heatmap_res;
    const double lim2 = (1.0 - kGridMargin) * (1.0 - kGridMargin);
    for (int iy = 0; iy < heatmap_res; ++iy) {
      for (int ix = 0; ix < heatmap_res; ++ix) {
        const double x = -1.0 + (ix + 0.5) * h;
        const double y = -1.0 + (iy + 0.5) * h;
        if (x * x + y * y > lim2) continue;
        double v;
        try {
          v = pe.point_sq_norm(x, y);
        } catch (const DegenerateImmersionError&) {
          v = std::numeric_limits<double>::quiet_NaN();
        }
        f << fmt17(x) << " " << fmt17(y) << " " << fmt17(v) << "\n";
      }
    }
    finish(f, path);
  }
  return out;
}

IntersectOutcome cmd_intersect(ImmersionR4& u, const IntersectConfig& ic,
                               const std::string& out_dir, std::ostream& log) {
  const std::string dir = ensure_dir(out_dir);
  const ImmersionGrid grid = eval_grid(u, ic.grid_res);
  const ProximityField field = self_proximity(grid, ic.epsilon);
  write_proximity_field(field, join(dir, "proximity_field.txt"));

  const std::vector<CandidatePair> cands =
      generate_candidates(grid, ic.epsilon, ic.tau_img);
  {
    const std::string path = join(dir, "candidates.txt");
    auto f = open_out(path);
    f << "# x1 y1 x2 y2 image_distance\n";
    for (const CandidatePair& c : cands)
      f << fmt17(c.a.x) << " " << fmt17(c.a.y) << " " << fmt17(c.b.x) << " "
        << fmt17(c.b.y) << " " << fmt17(c.image_dist) << "\n";
    finish(f, path);
  }

  IntersectOutcome out;
  out.analysis = refine_candidates(u, cands, ic.epsilon);
  out.d = self_intersection_number(out.analysis.records);
  write_records(out.analysis.records, join(dir, "double_points.txt"));

  {
    const std::string path = join(dir, "intersect_summary.txt");
    auto f = open_out(path);
    f << "grid = " << ic.grid_res << "\n"
      << "epsilon = " << fmt17(ic.epsilon) << "\n"
      << "tau = " << fmt17(ic.tau_img) << "\n"
      << "candidates = " << out.analysis.n_candidates << "\n"
      << "converged = " << out.analysis.n_converged << "\n"
      << "records = " << out.analysis.records.size() << "\n"
      << "d = " << out.d << "\n"
      << "multiplicity_unresolved = " << (out.analysis.multiplicity_flag ? 1 : 0)
      << "\n";
    for (const std::string& s : out.analysis.failures)
      f << "# failure: " << s << "\n";
    finish(f, path);
  }

  log << "intersect: " << cands.size() << " candidates, "
      << out.analysis.records.size() << " double points, d = " << out.d;
  if (out.analysis.multiplicity_flag) log << " (unresolved multiplicity)";
  log << "\n";
  return out;
}

IntersectOutcome cmd_intersect(const Checkpoint& ckpt,
                               const IntersectConfig& ic,
                               const std::string& out_dir, std::ostream& log) {
  ckpt.validate();
  SurfaceImmersion u(ckpt.model, ckpt.params);
  return cmd_intersect(u, ic, out_dir, log);
}

ReportOutcome cmd_report(const Checkpoint& ckpt,
                         std::span<const DoublePointRecord> records,
                         bool multiplicity_flag, int samples, int size,
                         uint64_t seed, const std::string& out_dir,
                         ThreadPool& pool, std::ostream& log) {
  ckpt.validate();
  const std::string dir = ensure_dir(out_dir);
  ReportOutcome out;
  const std::string& label = ckpt.model.curve.label;
  out.knot = label.empty() ? "(unlabelled)" : label;
  out.d = self_intersection_number(records);
  out.stats =
      monte_carlo_eval(ckpt.model, ckpt.params, samples, size, seed, pool);
  out.has_table = !label.empty() && homfly_has(label);

  std::string verdict_text;
  if (out.has_table) {
    out.verdict = consistency_check(out.d, homfly_table(label),
                                    multiplicity_flag);
    if (out.verdict.verdict == "CONSISTENT")
      verdict_text = "CONSISTENT (" + out.verdict.term + ")";
    else if (out.verdict.verdict == "INDETERMINATE")
      verdict_text = "INDETERMINATE (unresolved multiplicity)";
    else
      verdict_text = out.verdict.verdict;
  } else {
    verdict_text = "no invariant table";
  }

  std::ostringstream row;
  row << out.knot << "  d = " << out.d << "  " << verdict_text << "  loss "
      << mc_summary(out.stats);
  out.row = row.str();
  log << out.row << "\n";

  const std::string path = join(dir, "consistency_report.txt");
  auto f = open_out(path);
  f << "knot = " << out.knot << "\n"
    << "d = " << out.d << "\n"
    << "records = " << records.size() << "\n"
    << "multiplicity_unresolved = " << (multiplicity_flag ? 1 : 0) << "\n";
  if (out.has_table) {
    f << "predictions =";
    for (const auto& [d, c] : disc_predictions(homfly_table(label)))
      f << " " << d << ":" << c;
    f << "\n";
  }
  f << "verdict = " << verdict_text << "\n"
    << "mc_samples = " << samples << "\n"
    << "mc_size = " << size << "\n"
    << "mc_seed = " << seed << "\n"
    << "mc_mean = " << fmt17(out.stats.mean) << "\n"
    << "mc_std = " << fmt17(out.stats.std_dev) << "\n"
    << "mc_max = " << fmt17(out.stats.max) << "\n"
    << "row = " << out.row << "\n";
  finish(f, path);
  return out;
}

MeshStats cmd_export_surface(const Checkpoint& ckpt, int rings,
                             bool ball_model, const std::string& path,
                             std::ostream& log) {
  ckpt.validate();
  if (rings < 2)
    throw std::invalid_argument("export-surface: rings must be >= 2");
  const std::filesystem::path parent =
      std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);

  SurfaceEvaluator ev(ckpt.model);
  ev.bind(ckpt.params);
  const int sectors = 4 * rings;
  const int dim = ckpt.model.ambient_dim() + 1;

  MeshStats ms;
  auto f = open_out(path);
  f << "surface-mesh " << (ball_model ? "ball" : "halfspace") << " dim "
    << dim << "\n"
    << "rings " << rings << " sectors " << sectors << "\n";

  // Vertex 0 sits at the disc centre; ring i in (0, rings] contributes
  // `sectors` vertices at radius i/rings, the last ring at r = 1 exactly.
  const size_t n_vertices =
      1 + static_cast<size_t>(rings) * static_cast<size_t>(sectors);
  f << "vertices " << n_vertices << "\n";
  auto emit = [&](double x, double y) {
    const HalfSpacePoint p = ev.eval_point(x, y);
    std::vector<double> c;
    if (ball_model) {
      c = to_ball_model(p);
    } else {
      c.push_back(p.X);
      c.insert(c.end(), p.Y.begin(), p.Y.end());
    }
    double n2 = 0.0;
    f << "v";
    for (double v : c) {
      f << " " << fmt17(v);
      n2 += v * v;
    }
    f << "\n";
    ms.max_norm = std::max(ms.max_norm, std::sqrt(n2));
  };
  emit(0.0, 0.0);
  for (int i = 1; i <= rings; ++i) {
    const double r = static_cast<double>(i) / rings;
    for (int j = 0; j < sectors; ++j) {
      const double t = 2.0 * std::numbers::pi * j / sectors;
      emit(r * std::cos(t), r * std::sin(t));
    }
  }
  ms.n_vertices = n_vertices;

  const auto idx = [sectors](int ring, int j) {
    return 1 + static_cast<size_t>(ring - 1) * sectors +
           static_cast<size_t>(j % sectors);
  };
  const size_t n_faces = static_cast<size_t>(sectors) +
                         2 * static_cast<size_t>(rings - 1) * sectors;
  f << "faces " << n_faces << "\n";
  for (int j = 0; j < sectors; ++j)
    f << "f 0 " << idx(1, j) << " " << idx(1, j + 1) << "\n";
  for (int i = 1; i < rings; ++i) {
    for (int j = 0; j < sectors; ++j) {
      const size_t a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1),
                   d = idx(i, j + 1);
      f << "f " << a << " " << b << " " << c << "\n";
      f << "f " << a << " " << c << " " << d << "\n";
    }
  }
  ms.n_faces = n_faces;
  finish(f, path);
  log << "export: " << ms.n_vertices << " vertices, " << ms.n_faces
      << " faces -> " << path << "\n";
  return ms;
}

}  // namespace plateau
