#include "plateau/loss.hpp"

#include <cmath>
#include <cstdio>
#include <exception>

namespace plateau {

namespace {

std::string degenerate_message(const std::vector<DegeneratePoint>& pts) {
  char buf[128];
  std::string msg = "degenerate immersion points in sample (" +
                    std::to_string(pts.size()) + "):";
  const size_t shown = pts.size() < 16 ? pts.size() : 16;
  for (size_t i = 0; i < shown; ++i) {
    std::snprintf(buf, sizeof buf, " (%.6g, %.6g) det_g=%.3g", pts[i].x,
                  pts[i].y, pts[i].det_g);
    msg += buf;
  }
  if (shown < pts.size()) msg += " ...";
  return msg;
}

}  // namespace

DegenerateSampleError::DegenerateSampleError(std::vector<DegeneratePoint> pts)
    : std::runtime_error(degenerate_message(pts)), pts_(std::move(pts)) {}

LossRecorder::LossRecorder(const ModelConfig& cfg)
    : cfg_(cfg),
      ext_(build_extension(cfg.curve, cfg.ext)),
      tape_(cfg.arch.param_count()) {
  cfg_.validate();
  const int n = cfg_.ambient_dim();

  lx_ = tape_.constant(jet_x(0.0));
  ly_ = tape_.constant(jet_y(0.0));
  lrho_ = tape_.constant(Jet2{});
  lrhok_ = tape_.constant(Jet2{});
  lext_.resize(n);
  for (int i = 0; i < n; ++i) lext_[i] = tape_.constant(Jet2{});

  TapeExec ex{&tape_};
  std::vector<JetRef> comps(n + 1);
  std::array<std::vector<JetRef>, 2> scratch;
  assemble_surface(ex, cfg_.arch, lx_, ly_, lrho_, lrhok_,
                   std::span<const JetRef>(lext_), std::span<JetRef>(comps),
                   scratch);

  std::vector<BasicJet<Var>> cj(n + 1);
  for (int i = 0; i <= n; ++i) {
    cj[i].v = tape_.slot(comps[i], Slot::kV);
    cj[i].gx = tape_.slot(comps[i], Slot::kGx);
    cj[i].gy = tape_.slot(comps[i], Slot::kGy);
    cj[i].hxx = tape_.slot(comps[i], Slot::kHxx);
    cj[i].hxy = tape_.slot(comps[i], Slot::kHxy);
    cj[i].hyy = tape_.slot(comps[i], Slot::kHyy);
  }
  const auto m = pullback_metric<Var>(std::span<const BasicJet<Var>>(cj));
  det_ = m.det_g;
  sq_ = tension<Var>(std::span<const BasicJet<Var>>(cj), m).sq_norm;
  ext_scratch_.resize(n);
}

double LossRecorder::sum_over(std::span<const DiscPoint> pts,
                              std::span<double> grad,
                              std::vector<DegeneratePoint>& degenerate) {
  double acc = 0.0;
  for (const DiscPoint& p : pts) {
    tape_.set_constant(lx_, jet_x(p.x));
    tape_.set_constant(ly_, jet_y(p.y));
    const Jet2 rho = rho_jet(cfg_.rho, p.x, p.y);
    tape_.set_constant(lrho_, rho);
    tape_.set_constant(lrhok_, cfg_.k == 1 ? rho : rho * rho);
    ext_.eval(p.x, p.y, ext_scratch_);
    for (size_t i = 0; i < ext_scratch_.size(); ++i)
      tape_.set_constant(lext_[i], ext_scratch_[i]);

    tape_.forward();
    const double det = tape_.value(det_);
    if (!std::isfinite(det) || det <= kDegenerateDetG) {
      degenerate.push_back({p.x, p.y, det});
      continue;
    }
    const double v = tape_.value(sq_);
    if (!std::isfinite(v)) {
      const int64_t bad = tape_.first_nonfinite();
      char buf[96];
      std::snprintf(buf, sizeof buf, "non-finite residual at (%.6g, %.6g): ",
                    p.x, p.y);
      throw TapeError(
          buf + (bad >= 0 ? tape_.describe(static_cast<uint32_t>(bad))
                          : std::string("residual value")),
          bad >= 0 ? static_cast<uint32_t>(bad) : sq_.i);
    }
    acc += v;
    if (!grad.empty()) tape_.backward(sq_, 1.0, grad);
  }
  return acc;
}

double PlainLossEval::point_sq_norm(double x, double y) {
  ev_.eval_jet(x, y, jet_);
  return tension<double>(std::span<const Jet2>(jet_.comp), x, y).sq_norm;
}

double PlainLossEval::sum_over(std::span<const DiscPoint> pts,
                               std::vector<DegeneratePoint>& degenerate) {
  double acc = 0.0;
  for (const DiscPoint& p : pts) {
    try {
      acc += point_sq_norm(p.x, p.y);
    } catch (const DegenerateImmersionError& e) {
      degenerate.push_back({p.x, p.y, e.det_g()});
    }
  }
  return acc;
}

namespace {

size_t chunk_count(size_t n) { return (n + kLossChunk - 1) / kLossChunk; }

std::span<const DiscPoint> chunk_span(std::span<const DiscPoint> pts,
                                      size_t c) {
  const size_t lo = c * kLossChunk;
  const size_t hi = std::min(pts.size(), lo + kLossChunk);
  return pts.subspan(lo, hi - lo);
}

}  // namespace

BatchedLoss batched_loss(const ModelConfig& cfg, std::span<const double> theta,
                         std::span<const DiscPoint> pts, ThreadPool& pool) {
  if (pts.empty()) throw std::invalid_argument("empty collocation sample");
  const size_t n_params = cfg.arch.param_count();
  const size_t n_chunks = chunk_count(pts.size());
  const size_t n_buf =
      std::min<size_t>(static_cast<size_t>(pool.size()), n_chunks);

  std::vector<LossRecorder> rec;
  rec.reserve(n_buf);
  for (size_t i = 0; i < n_buf; ++i) rec.emplace_back(cfg);

  BatchedLoss out;
  out.grad.assign(n_params, 0.0);
  std::vector<std::vector<double>> wave_grad(
      n_buf, std::vector<double>(n_params, 0.0));
  std::vector<double> wave_val(n_buf, 0.0);
  std::vector<std::vector<DegeneratePoint>> wave_bad(n_buf);
  std::vector<std::exception_ptr> wave_err(n_buf);
  std::vector<DegeneratePoint> bad;

  for (size_t base = 0; base < n_chunks; base += n_buf) {
    const int m = static_cast<int>(std::min(n_buf, n_chunks - base));
    pool.run(m, [&](int i) {
      try {
        std::fill(wave_grad[i].begin(), wave_grad[i].end(), 0.0);
        wave_bad[i].clear();
        wave_err[i] = nullptr;
        rec[i].bind(theta);
        wave_val[i] = rec[i].sum_over(chunk_span(pts, base + i), wave_grad[i],
                                      wave_bad[i]);
      } catch (...) {
        wave_err[i] = std::current_exception();
      }
    });
    for (int i = 0; i < m; ++i)
      if (wave_err[i]) std::rethrow_exception(wave_err[i]);
    for (int i = 0; i < m; ++i) {
      out.value += wave_val[i];
      for (size_t p = 0; p < n_params; ++p) out.grad[p] += wave_grad[i][p];
      bad.insert(bad.end(), wave_bad[i].begin(), wave_bad[i].end());
    }
  }
  if (!bad.empty()) throw DegenerateSampleError(std::move(bad));

  const double inv_n = 1.0 / static_cast<double>(pts.size());
  out.value *= inv_n;
  for (double& g : out.grad) g *= inv_n;
  return out;
}

double batched_loss_value(const ModelConfig& cfg,
                          std::span<const double> theta,
                          std::span<const DiscPoint> pts, ThreadPool& pool) {
  if (pts.empty()) throw std::invalid_argument("empty collocation sample");
  const size_t n_chunks = chunk_count(pts.size());
  const size_t n_buf =
      std::min<size_t>(static_cast<size_t>(pool.size()), n_chunks);

  std::vector<PlainLossEval> ev;
  ev.reserve(n_buf);
  for (size_t i = 0; i < n_buf; ++i) {
    ev.emplace_back(cfg);
    ev.back().bind(theta);
  }

  double total = 0.0;
  std::vector<double> wave_val(n_buf, 0.0);
  std::vector<std::vector<DegeneratePoint>> wave_bad(n_buf);
  std::vector<std::exception_ptr> wave_err(n_buf);
  std::vector<DegeneratePoint> bad;

  for (size_t base = 0; base < n_chunks; base += n_buf) {
    const int m = static_cast<int>(std::min(n_buf, n_chunks - base));
    pool.run(m, [&](int i) {
      try {
        wave_bad[i].clear();
        wave_err[i] = nullptr;
        wave_val[i] = ev[i].sum_over(chunk_span(pts, base + i), wave_bad[i]);
      } catch (...) {
        wave_err[i] = std::current_exception();
      }
    });
    for (int i = 0; i < m; ++i)
      if (wave_err[i]) std::rethrow_exception(wave_err[i]);
    for (int i = 0; i < m; ++i) {
      total += wave_val[i];
      bad.insert(bad.end(), wave_bad[i].begin(), wave_bad[i].end());
    }
  }
  if (!bad.empty()) throw DegenerateSampleError(std::move(bad));
  return total / static_cast<double>(pts.size());
}

RecordedScalar loss(const ModelConfig& cfg, std::span<const double> theta,
                    std::span<const DiscPoint> pts) {
  ThreadPool local(1);
  BatchedLoss b = batched_loss(cfg, theta, pts, local);
  RecordedScalar r;
  r.value = b.value;
  r.grad = std::move(b.grad);
  return r;
}

}  // namespace plateau
