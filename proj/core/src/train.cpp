#include "plateau/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <numeric>

#include "plateau/io_util.hpp"

namespace plateau {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

void TrainConfig::validate() const {
  if (n_data < 1 || n_lbfgs < 1)
    throw std::invalid_argument("TrainConfig: pool sizes must be >= 1");
  if (batch < 1 || batch > n_data)
    throw std::invalid_argument("TrainConfig: need 1 <= batch <= n_data");
  if (t_adam < 0 || t_lbfgs < 0)
    throw std::invalid_argument("TrainConfig: negative phase length");
  if (history < 1) throw std::invalid_argument("TrainConfig: history must be >= 1");
  if (!(eta_min > 0.0) || !(eta0 >= eta_min))
    throw std::invalid_argument("TrainConfig: need eta0 >= eta_min > 0");
  if (!(delta_g >= 0.0) || !(delta_theta >= 0.0))
    throw std::invalid_argument("TrainConfig: negative tolerance");
}

TrainConfig desk_train_config() {
  TrainConfig cfg;
  cfg.n_data = 1 << 12;
  cfg.t_adam = 2000;
  cfg.n_lbfgs = 1 << 12;
  cfg.t_lbfgs = 500;
  return cfg;
}

std::vector<DiscPoint> sample_disc(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_disc: n must be >= 1");
  std::vector<DiscPoint> pts(static_cast<size_t>(n));
  for (DiscPoint& p : pts) {
    double r;
    do {
      r = std::sqrt(rng.uniform());
    } while (r >= 1.0 - 1e-9);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    p = {r * std::cos(phi), r * std::sin(phi)};
  }
  return pts;
}

std::vector<DiscPoint> sample_disc(int n, uint64_t seed) {
  Rng rng(seed);
  return sample_disc(n, rng);
}

double cosine_lr(int t, const TrainConfig& cfg) {
  if (t < 0 || t > cfg.t_adam)
    throw std::invalid_argument("cosine_lr: t outside [0, T]");
  const double w =
      0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(t) /
                            static_cast<double>(cfg.t_adam)));
  return cfg.eta_min + (cfg.eta0 - cfg.eta_min) * w;
}

void AdamState::init(size_t n) {
  m.assign(n, 0.0);
  v.assign(n, 0.0);
  step = 0;
}

void AdamState::update(std::span<double> theta, std::span<const double> grad,
                       double eta) {
  ++step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (size_t i = 0; i < theta.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    theta[i] -= eta * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

LineSearchResult strong_wolfe_search(const Objective& fg,
                                     std::span<const double> x,
                                     std::span<const double> d, double f0,
                                     std::span<const double> g0,
                                     double alpha_init, double c1, double c2) {
  const size_t n = x.size();
  LineSearchResult out;
  out.grad.assign(n, 0.0);
  const double dg0 = dot(g0, d);
  if (!(dg0 < 0.0)) return out;  // not a descent direction

  std::vector<double> xt(n), gt(n);
  auto eval = [&](double a) {
    for (size_t i = 0; i < n; ++i) xt[i] = x[i] + a * d[i];
    double f = fg(xt, gt);
    ++out.n_evals;
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };
  auto accept = [&](double a, double f) {
    out.alpha = a;
    out.f = f;
    out.grad = gt;
    out.ok = true;
  };
  auto zoom = [&](double a_lo, double f_lo, double a_hi) {
    for (int it = 0; it < 60; ++it) {
      if (std::abs(a_hi - a_lo) <
          1e-16 * std::max(1.0, std::max(std::abs(a_lo), std::abs(a_hi))))
        return;  // interval collapsed without satisfying Wolfe
      const double a = 0.5 * (a_lo + a_hi);
      const double f = eval(a);
      if (f > f0 + c1 * a * dg0 || f >= f_lo) {
        a_hi = a;
        continue;
      }
      const double dg = dot(gt, d);
      if (std::abs(dg) <= -c2 * dg0) {
        accept(a, f);
        return;
      }
      if (dg * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
      a_lo = a;
      f_lo = f;
    }
  };

  double a_prev = 0.0, f_prev = f0;
  double a = alpha_init > 0.0 ? alpha_init : 1.0;
  constexpr double kAlphaMax = 1e6;
  for (int it = 0; it < 40; ++it) {
    const double f = eval(a);
    if (f > f0 + c1 * a * dg0 || (it > 0 && f >= f_prev)) {
      zoom(a_prev, f_prev, a);
      return out;
    }
    const double dg = dot(gt, d);
    if (std::abs(dg) <= -c2 * dg0) {
      accept(a, f);
      return out;
    }
    if (dg >= 0.0) {
      zoom(a, f, a_prev);
      return out;
    }
    a_prev = a;
    f_prev = f;
    if (a >= kAlphaMax) break;
    a = std::min(2.0 * a, kAlphaMax);
  }
  return out;
}

LbfgsOutcome lbfgs_minimize(const Objective& fg, std::vector<double> x0,
                            const LbfgsOptions& opt) {
  const size_t n = x0.size();
  LbfgsOutcome out;
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n, 0.0);

  double f = fg(x, g);
  ++out.n_evals;
  out.series.push_back(f);
  out.x = x;
  out.best_index = 0;
  if (!std::isfinite(f)) {
    out.termination = "line_search";
    return out;
  }
  double best_f = f;

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> d(n), alpha_tmp;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const double gnorm = l2(g);
    if (gnorm < opt.delta_g) {
      out.termination = "grad_tol";
      break;
    }

    // Two-loop recursion, most recent pair last.
    for (size_t i = 0; i < n; ++i) d[i] = -g[i];
    alpha_tmp.assign(s_hist.size(), 0.0);
    for (size_t h = s_hist.size(); h-- > 0;) {
      const double a = rho_hist[h] * dot(s_hist[h], d);
      alpha_tmp[h] = a;
      for (size_t i = 0; i < n; ++i) d[i] -= a * y_hist[h][i];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      const double gamma = dot(s, y) / dot(y, y);
      for (size_t i = 0; i < n; ++i) d[i] *= gamma;
    }
    for (size_t h = 0; h < s_hist.size(); ++h) {
      const double b = rho_hist[h] * dot(y_hist[h], d);
      for (size_t i = 0; i < n; ++i) d[i] += (alpha_tmp[h] - b) * s_hist[h][i];
    }

    double dg0 = dot(g, d);
    if (!(dg0 < 0.0)) {  // numerical safeguard: fall back to steepest descent
      for (size_t i = 0; i < n; ++i) d[i] = -g[i];
      dg0 = -gnorm * gnorm;
    }

    const double a_init =
        iter == 0 ? std::min(1.0, 1.0 / std::max(1.0, gnorm)) : 1.0;
    LineSearchResult ls =
        strong_wolfe_search(fg, x, d, f, g, a_init, opt.c1, opt.c2);
    out.n_evals += ls.n_evals;
    if (!ls.ok) {
      out.termination = "line_search";
      break;
    }
    if (!(ls.f <= f + opt.c1 * ls.alpha * dg0) ||
        !(std::abs(dot(ls.grad, d)) <= -opt.c2 * dg0))
      ++out.wolfe_violations;

    std::vector<double> s(n), y(n);
    double snorm2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      s[i] = ls.alpha * d[i];
      y[i] = ls.grad[i] - g[i];
      x[i] += s[i];
      snorm2 += s[i] * s[i];
    }
    f = ls.f;
    g = ls.grad;
    out.series.push_back(f);
    if (f < best_f) {
      best_f = f;
      out.x = x;
      out.best_index = static_cast<int>(out.series.size()) - 1;
    }

    const double ys = dot(s, y);
    if (ys > 1e-16 * std::sqrt(snorm2) * l2(y)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / ys);
      if (static_cast<int>(s_hist.size()) > opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    if (std::sqrt(snorm2) < opt.delta_theta) {
      out.termination = "param_tol";
      break;
    }
  }
  if (out.termination.empty()) out.termination = "max_iter";
  return out;
}

PhaseResult adam_phase(const ModelConfig& model, std::vector<double> params,
                       const TrainConfig& cfg, ThreadPool& pool) {
  cfg.validate();
  model.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<DiscPoint> pool_pts =
      sample_disc(cfg.n_data, derive_seed(cfg.seed, 0));
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  std::vector<uint32_t> perm(pool_pts.size());
  std::iota(perm.begin(), perm.end(), 0u);

  AdamState st;
  st.init(params.size());

  TrainReport rep;
  rep.termination = "completed";
  std::vector<double> best = params;
  std::vector<DiscPoint> batch_pts;
  batch_pts.reserve(cfg.batch);

  for (int epoch = 0; epoch < cfg.t_adam; ++epoch) {
    const double eta = cosine_lr(epoch, cfg);
    shuffle_rng.shuffle(perm);
    bool aborted = false;
    for (size_t lo = 0; lo < perm.size(); lo += cfg.batch) {
      const size_t hi = std::min(perm.size(), lo + cfg.batch);
      batch_pts.clear();
      for (size_t i = lo; i < hi; ++i) batch_pts.push_back(pool_pts[perm[i]]);
      try {
        const BatchedLoss bl = batched_loss(model, params, batch_pts, pool);
        st.update(params, bl.grad, eta);
      } catch (const std::exception& e) {
        rep.termination = std::string("aborted: ") + e.what();
        aborted = true;
        break;
      }
    }
    if (aborted) break;
    double lv;
    try {
      lv = batched_loss_value(model, params, pool_pts, pool);
    } catch (const std::exception& e) {
      rep.termination = std::string("aborted: ") + e.what();
      break;
    }
    rep.series.push_back(lv);
    if (lv < rep.best_loss) {
      rep.best_loss = lv;
      rep.best_index = epoch;
      best = params;
    }
  }
  rep.wall_seconds = seconds_since(t0);
  return {std::move(best), std::move(rep)};
}

PhaseResult lbfgs_phase(const ModelConfig& model, std::vector<double> params,
                        const TrainConfig& cfg, ThreadPool& pool) {
  cfg.validate();
  model.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<DiscPoint> pts =
      sample_disc(cfg.n_lbfgs, derive_seed(cfg.seed, 2));
  const Objective fg = [&](std::span<const double> x,
                           std::span<double> gout) -> double {
    try {
      const BatchedLoss bl = batched_loss(model, x, pts, pool);
      std::copy(bl.grad.begin(), bl.grad.end(), gout.begin());
      return bl.value;
    } catch (const TapeError&) {
    } catch (const DegenerateSampleError&) {
    }
    std::fill(gout.begin(), gout.end(), 0.0);
    return std::numeric_limits<double>::infinity();
  };

  LbfgsOptions opt;
  opt.max_iter = cfg.t_lbfgs;
  opt.history = cfg.history;
  opt.delta_g = cfg.delta_g;
  opt.delta_theta = cfg.delta_theta;
  LbfgsOutcome oc = lbfgs_minimize(fg, std::move(params), opt);

  TrainReport rep;
  rep.series = std::move(oc.series);
  rep.best_index = oc.best_index;
  rep.best_loss = rep.series.empty()
                      ? std::numeric_limits<double>::infinity()
                      : rep.series[static_cast<size_t>(oc.best_index)];
  rep.termination = std::move(oc.termination);
  rep.wolfe_violations = oc.wolfe_violations;
  rep.wall_seconds = seconds_since(t0);
  return {std::move(oc.x), std::move(rep)};
}

McStats monte_carlo_eval(const ModelConfig& model,
                         std::span<const double> params, int S, int N,
                         uint64_t seed, ThreadPool& pool) {
  if (S < 2) throw std::invalid_argument("monte_carlo_eval: need S >= 2");
  if (N < 1) throw std::invalid_argument("monte_carlo_eval: need N >= 1");
  Rng rng(seed);
  std::vector<double> losses(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    const std::vector<DiscPoint> pts = sample_disc(N, rng);
    losses[static_cast<size_t>(s)] =
        batched_loss_value(model, params, pts, pool);
  }
  McStats st;
  for (double l : losses) {
    st.mean += l;
    st.max = std::max(st.max, l);
  }
  st.mean /= static_cast<double>(S);
  double var = 0.0;
  for (double l : losses) var += (l - st.mean) * (l - st.mean);
  st.std_dev = std::sqrt(var / static_cast<double>(S - 1));
  return st;
}

std::string to_text(const TrainReport& r) {
  std::string s;
  s += "termination: " + r.termination + "\n";
  s += "best_index: " + std::to_string(r.best_index) + "\n";
  s += "best_loss: " + fmt17(r.best_loss) + "\n";
  s += "wolfe_violations: " + std::to_string(r.wolfe_violations) + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "wall_seconds: %.3f\n", r.wall_seconds);
  s += buf;
  s += "series:\n";
  for (size_t i = 0; i < r.series.size(); ++i)
    s += std::to_string(i) + "," + fmt17(r.series[i]) + "\n";
  return s;
}

}  // namespace plateau
