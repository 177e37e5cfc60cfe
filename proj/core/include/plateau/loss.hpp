#pragma once

// Interior training loss: mean of |tau(u)|^2 over a sample of collocation
// points, with its exact parameter gradient.
//
// LossRecorder owns a tape holding one point's residual graph; a batch is
// processed by overwriting the leaf payloads point by point. Recorders are
// constructed per evaluation batch (construction is microseconds, the graph
// is a few hundred nodes).
//
// batched_loss / batched_loss_value reduce deterministically: points are cut
// into fixed 64-point chunks, each chunk is summed sequentially, and chunk
// partials (value and gradient alike) are combined in chunk order. The
// result is bit-identical for any thread count.

#include <span>
#include <stdexcept>
#include <vector>

#include "plateau/residual.hpp"
#include "plateau/surface.hpp"
#include "plateau/tape.hpp"
#include "plateau/threading.hpp"

namespace plateau {

struct DiscPoint {
  double x = 0.0, y = 0.0;
};

struct DegeneratePoint {
  double x = 0.0, y = 0.0;
  double det_g = 0.0;
};

// Batch-level failure: every offending point of the sample, not just the
// first one hit.
class DegenerateSampleError : public std::runtime_error {
 public:
  explicit DegenerateSampleError(std::vector<DegeneratePoint> pts);
  const std::vector<DegeneratePoint>& points() const { return pts_; }

 private:
  std::vector<DegeneratePoint> pts_;
};

// Number of points per reduction chunk; part of the numeric contract (the
// summation tree depends on it), so changing it changes bit-exact outputs.
inline constexpr size_t kLossChunk = 64;

class LossRecorder {
 public:
  explicit LossRecorder(const ModelConfig& cfg);

  void bind(std::span<const double> theta) { tape_.bind(theta); }

  // Sum of |tau|^2 over pts (sequential, in order). If grad is nonempty,
  // accumulates the unweighted d(sum)/d(theta) into it. Degenerate points
  // are appended to `degenerate` and excluded from the sum; a non-finite
  // residual throws TapeError naming the first bad node.
  double sum_over(std::span<const DiscPoint> pts, std::span<double> grad,
                  std::vector<DegeneratePoint>& degenerate);

 private:
  ModelConfig cfg_;
  ExtensionField ext_;
  Tape tape_;
  JetRef lx_{}, ly_{}, lrho_{}, lrhok_{};
  std::vector<JetRef> lext_;
  Var det_{}, sq_{};
  std::vector<Jet2> ext_scratch_;
};

// Value-only evaluation with concrete jets (no tape); used for loss series,
// Monte Carlo residual statistics, and heatmaps.
class PlainLossEval {
 public:
  explicit PlainLossEval(const ModelConfig& cfg) : ev_(cfg) {}

  void bind(std::span<const double> theta) { ev_.bind(theta); }

  // Throws DegenerateImmersionError at a failed immersion point.
  double point_sq_norm(double x, double y);

  double sum_over(std::span<const DiscPoint> pts,
                  std::vector<DegeneratePoint>& degenerate);

 private:
  SurfaceEvaluator ev_;
  SurfaceJet jet_;
};

struct BatchedLoss {
  double value = 0.0;
  std::vector<double> grad;
};

// Mean residual and d(mean)/d(theta). Throws DegenerateSampleError listing
// every degenerate point of the sample.
BatchedLoss batched_loss(const ModelConfig& cfg, std::span<const double> theta,
                         std::span<const DiscPoint> pts, ThreadPool& pool);

double batched_loss_value(const ModelConfig& cfg,
                          std::span<const double> theta,
                          std::span<const DiscPoint> pts, ThreadPool& pool);

// Single-call form: mean residual with its gradient already accumulated.
RecordedScalar loss(const ModelConfig& cfg, std::span<const double> theta,
                    std::span<const DiscPoint> pts);

}  // namespace plateau
