#include "plateau/surface.hpp"

namespace plateau {

SurfaceEvaluator::SurfaceEvaluator(const ModelConfig& cfg)
    : cfg_(cfg), ext_(build_extension(cfg.curve, cfg.ext)) {
  cfg_.validate();
  ext_jets_.resize(cfg_.ambient_dim());
}

void SurfaceEvaluator::eval_jet(double x, double y, SurfaceJet& out) {
  out.x = x;
  out.y = y;
  out.comp.resize(cfg_.ambient_dim() + 1);

  const Jet2 jx = jet_x(x), jy = jet_y(y);
  const Jet2 rho = rho_jet(cfg_.rho, x, y);
  const Jet2 rk = cfg_.k == 1 ? rho : rho * rho;
  ext_.eval(x, y, ext_jets_);

  assemble_surface(exec_, cfg_.arch, jx, jy, rho, rk,
                   std::span<const Jet2>(ext_jets_),
                   std::span<Jet2>(out.comp), scratch_);
}

HalfSpacePoint SurfaceEvaluator::eval_point(double x, double y) {
  SurfaceJet j;
  eval_jet(x, y, j);
  HalfSpacePoint p;
  p.X = j.comp[0].v;
  p.Y.resize(j.comp.size() - 1);
  for (size_t i = 1; i < j.comp.size(); ++i) p.Y[i - 1] = j.comp[i].v;
  return p;
}

SurfaceJet evaluate_jet(const ModelConfig& cfg, std::span<const double> theta,
                        double x, double y) {
  SurfaceEvaluator ev(cfg);
  ev.bind(theta);
  SurfaceJet out;
  ev.eval_jet(x, y, out);
  return out;
}

HalfSpacePoint evaluate(const ModelConfig& cfg, std::span<const double> theta,
                        double x, double y) {
  SurfaceEvaluator ev(cfg);
  ev.bind(theta);
  return ev.eval_point(x, y);
}

std::vector<double> to_ball_model(const HalfSpacePoint& p) {
  double y2 = 0.0;
  for (double v : p.Y) y2 += v * v;
  const double denom = (p.X + 1.0) * (p.X + 1.0) + y2;
  std::vector<double> b(p.Y.size() + 1);
  b[0] = (p.X * p.X + y2 - 1.0) / denom;
  for (size_t i = 0; i < p.Y.size(); ++i) b[i + 1] = 2.0 * p.Y[i] / denom;
  return b;
}

}  // namespace plateau
