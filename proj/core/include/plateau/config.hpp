#pragma once

// Experiment configuration: flat key-value text with [section] headers.
// Everything an experiment needs lives here (curve, model, training profile,
// intersection and evaluation settings), and the parsed file's raw text is
// kept so outputs can echo their provenance verbatim. Seeds are explicit
// config values; nothing in the pipeline draws entropy from the clock.
//
//   [experiment]
//   name = trefoil
//   [curve]
//   knot = 3_1            # preset or table name; or torus = 2 3 2.0 0.5
//   mirror = 0
//   sigma = 0.0           # boundary perturbation amplitude
//   sigma_modes = 0
//   curve_seed = 1        # required when sigma > 0
//   [model]
//   rho = stereographic
//   ext = stereobiharmonic
//   k = 2
//   hidden = 64 64 64 64
//   activation = tanh
//   init = glorot_zero_head
//   init_seed = 7
//   [train]
//   profile = desk        # full | desk | custom
//   seed = 0
//   [intersect]
//   grid = 256
//   epsilon = 0.2
//   tau = 0.05
//   [eval]
//   samples = 1000
//   size = 16384
//   eval_seed = 99

#include <iosfwd>
#include <string>
#include <vector>

#include "plateau/checkpoint.hpp"
#include "plateau/surface.hpp"
#include "plateau/train.hpp"

namespace plateau {

struct IntersectConfig {
  int grid_res = 256;
  double epsilon = 0.2;
  double tau_img = 0.05;
};

struct EvalConfig {
  int samples = 1000;
  int size = 1 << 14;
  uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string out_dir;  // defaults to name when empty

  // Curve: either a named knot or an explicit torus knot.
  std::string knot;
  bool torus_set = false;
  int torus_p = 2, torus_q = 3;
  double torus_R = 2.0, torus_r = 0.5;
  bool mirror = false;
  double sigma = 0.0;
  int sigma_modes = 0;
  uint64_t curve_seed = 0;

  RhoKind rho = RhoKind::kStereographic;
  ExtKind ext = ExtKind::kStereoBiharmonic;
  int k = 2;
  std::vector<int> hidden = {64, 64, 64, 64};
  Activation activation = Activation::kTanh;
  InitKind init = InitKind::kGlorotZeroHead;
  uint64_t init_seed = 0;

  std::string profile = "desk";  // full | desk | custom
  TrainConfig train;             // resolved profile + overrides

  IntersectConfig intersect;
  EvalConfig eval;

  std::string raw_text;  // the file as read, for verbatim echo

  KnotCurve build_curve() const;
  ModelConfig build_model() const;
  std::vector<double> initial_params() const;
  Checkpoint initial_checkpoint() const;
};

// Named knots: the five presets (unknot, figure8, three_twist, stevedore,
// square) plus table names 3_1, 4_1, 5_1, 5_2, 6_1, 8_19, 10_124 and their
// '*' mirrors, resolved to torus or preset constructions.
KnotCurve curve_by_name(const std::string& name);

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace plateau
