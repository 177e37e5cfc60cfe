#pragma once

// Two-phase training: Adam with cosine-annealed learning rate over a fixed
// collocation pool (reshuffled into mini-batches every epoch), then
// full-batch L-BFGS with a strong Wolfe line search on a fresh pool. Both
// phases retain the parameter snapshot with the lowest recorded pool loss.
//
// The loss series entries are pool losses at epoch (resp. iteration)
// boundaries, evaluated with the deterministic chunked reduction, so the
// recorded best is reproduced bit-exactly by re-evaluating the returned
// parameters on the same pool.
//
// The optimiser cores (AdamState, strong_wolfe_search, lbfgs_minimize) are
// exposed on generic objectives so they can be validated on closed-form
// problems independently of the surface loss.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "plateau/loss.hpp"
#include "plateau/rng.hpp"
#include "plateau/surface.hpp"
#include "plateau/threading.hpp"

namespace plateau {

struct TrainConfig {
  int n_data = 1 << 14;       // Adam collocation pool size
  int batch = 1 << 10;        // mini-batch size
  int t_adam = 10000;         // Adam epochs (one schedule step per epoch)
  double eta0 = 1e-3;
  double eta_min = 1e-5;
  int n_lbfgs = 1 << 14;      // fresh pool size for phase 2
  int t_lbfgs = 10000;        // L-BFGS iteration cap
  int history = 100;          // L-BFGS memory
  double delta_g = 1e-12;     // gradient-norm stop
  double delta_theta = 1e-14; // parameter-change stop
  uint64_t seed = 0;

  void validate() const;
};

// Reduced budgets for minutes-scale runs (pairs with a width-32 network in
// the shipped desk configs); the defaults above are the full profile.
TrainConfig desk_train_config();

struct TrainReport {
  std::vector<double> series;  // pool loss per epoch (Adam) or per iterate
                               // (L-BFGS, entry 0 = entering loss)
  int best_index = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  // Adam: "completed" or "aborted: <why>". L-BFGS: grad_tol | param_tol |
  // max_iter | line_search.
  std::string termination;
  int wolfe_violations = 0;    // accepted steps failing a Wolfe condition
  double wall_seconds = 0.0;   // informational; excluded from determinism
};

// Key-value lines plus an index,loss CSV block; wall_seconds sits on its own
// line so determinism comparisons can drop it.
std::string to_text(const TrainReport& r);

struct PhaseResult {
  std::vector<double> params;
  TrainReport report;
};

// N uniform-area points: r = sqrt(U), phi = 2 pi V, redrawing U while
// r >= 1 - 1e-9 so X stays bounded away from 0.
std::vector<DiscPoint> sample_disc(int n, uint64_t seed);
std::vector<DiscPoint> sample_disc(int n, Rng& rng);

// eta_t = eta_min + (eta0 - eta_min) (1 + cos(pi t / T)) / 2, 0 <= t <= T.
double cosine_lr(int t, const TrainConfig& cfg);

// ---- optimiser cores ----

struct AdamState {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;
  long step = 0;

  void init(size_t n);
  // One bias-corrected update of theta in place.
  void update(std::span<double> theta, std::span<const double> grad,
              double eta);
};

// f(x) with grad filled; non-finite values are allowed and treated as
// "too far" by the line search.
using Objective =
    std::function<double(std::span<const double>, std::span<double>)>;

struct LineSearchResult {
  double alpha = 0.0;
  double f = 0.0;
  std::vector<double> grad;  // at x + alpha d
  int n_evals = 0;
  bool ok = false;
};

// Strong Wolfe conditions: f(x+ad) <= f0 + c1 a g0.d and
// |g(x+ad).d| <= c2 |g0.d|. Bracket then bisect.
LineSearchResult strong_wolfe_search(const Objective& fg,
                                     std::span<const double> x,
                                     std::span<const double> d, double f0,
                                     std::span<const double> g0,
                                     double alpha_init, double c1 = 1e-4,
                                     double c2 = 0.9);

struct LbfgsOptions {
  int max_iter = 10000;
  int history = 100;
  double delta_g = 1e-12;
  double delta_theta = 1e-14;
  double c1 = 1e-4, c2 = 0.9;
};

struct LbfgsOutcome {
  std::vector<double> x;       // best iterate
  std::vector<double> series;  // f at x0 and after each accepted step
  std::string termination;
  int best_index = 0;
  int wolfe_violations = 0;
  int n_evals = 0;
};

LbfgsOutcome lbfgs_minimize(const Objective& fg, std::vector<double> x0,
                            const LbfgsOptions& opt);

// ---- surface-training phases ----

PhaseResult adam_phase(const ModelConfig& model, std::vector<double> params,
                       const TrainConfig& cfg, ThreadPool& pool);
PhaseResult lbfgs_phase(const ModelConfig& model, std::vector<double> params,
                        const TrainConfig& cfg, ThreadPool& pool);

struct McStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double max = 0.0;
};

// S independent samples of size N from one stream; per-sample losses reduce
// to mean, n-1 standard deviation, and max.
McStats monte_carlo_eval(const ModelConfig& model,
                         std::span<const double> params, int S, int N,
                         uint64_t seed, ThreadPool& pool);

}  // namespace plateau
