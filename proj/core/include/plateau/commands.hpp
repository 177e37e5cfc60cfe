#pragma once

// Subcommand implementations behind the CLI: each is an ordinary function on
// parsed inputs so tests can drive them in-process. Every command is
// deterministic given (config, seeds); outputs are plain text files under an
// output directory plus a short human summary on the log stream.

#include <iosfwd>
#include <span>
#include <string>

#include "plateau/checkpoint.hpp"
#include "plateau/config.hpp"
#include "plateau/homfly.hpp"
#include "plateau/intersect.hpp"
#include "plateau/threading.hpp"
#include "plateau/train.hpp"

namespace plateau {

// Root for relative output directories: $PLATEAU_OUT_ROOT, else "runs".
std::string output_root();
// mkdir -p; returns the path.
std::string ensure_dir(const std::string& path);

// Runs Adam then L-BFGS per the config's profile, writes config.cfg echo,
// checkpoint.txt, train_report.txt (with resolved settings), loss_curve.csv.
struct TrainOutcome {
  Checkpoint checkpoint;
  TrainReport adam, lbfgs;
  std::string dir;
};
TrainOutcome cmd_train(const ExperimentConfig& cfg, const std::string& out_dir,
                       ThreadPool& pool, std::ostream& log);

// Monte Carlo loss estimate over `samples` pools of `size` points, plus a
// residual grid for heatmaps; writes eval_report.txt and residual_grid.txt.
struct EvalOutcome {
  McStats stats;
  std::string summary;  // "4.41e-07 ± 6.16e-09 (4.61e-07)"-style
};
EvalOutcome cmd_eval(const Checkpoint& ckpt, int samples, int size,
                     uint64_t seed, int heatmap_res,
                     const std::string& out_dir, ThreadPool& pool,
                     std::ostream& log);

// Double-point pipeline: proximity field, candidates, refined records,
// signed count. Writes proximity_field.txt, candidates.txt,
// double_points.txt, intersect_summary.txt.
struct IntersectOutcome {
  DoublePointAnalysis analysis;
  int d = 0;  // signed self-intersection count of the records
};
IntersectOutcome cmd_intersect(ImmersionR4& u, const IntersectConfig& ic,
                               const std::string& out_dir, std::ostream& log);
IntersectOutcome cmd_intersect(const Checkpoint& ckpt,
                               const IntersectConfig& ic,
                               const std::string& out_dir, std::ostream& log);

// One summary row: knot, computed d, predicted monomial, verdict, MC loss.
// Unknown knots get the row without a verdict. Writes
// consistency_report.txt.
struct ReportOutcome {
  std::string knot;
  int d = 0;
  bool has_table = false;       // knot resolvable in the invariant tables
  ConsistencyReport verdict;    // meaningful when has_table
  McStats stats;
  std::string row;
};
ReportOutcome cmd_report(const Checkpoint& ckpt,
                         std::span<const DoublePointRecord> records,
                         bool multiplicity_flag, int samples, int size,
                         uint64_t seed, const std::string& out_dir,
                         ThreadPool& pool, std::ostream& log);

// Triangulated polar-grid mesh of the surface image, half-space or ball
// coordinates, written as delimited vertex/face lists.
struct MeshStats {
  size_t n_vertices = 0;
  size_t n_faces = 0;
  double max_norm = 0.0;  // max vertex Euclidean norm (ball model check)
};
MeshStats cmd_export_surface(const Checkpoint& ckpt, int rings,
                             bool ball_model, const std::string& path,
                             std::ostream& log);

}  // namespace plateau
