#pragma once

// Self-describing trained-model snapshots. A checkpoint carries everything
// needed to rebuild the surface: the model description (architecture,
// activation, analytic-layer choices, boundary curve) plus the flat
// parameter vector, and enough training metadata to trace where it came
// from. Plain text; parameters at 17 significant digits, so a save/load
// round trip reproduces every double bit-exactly.

#include <iosfwd>
#include <string>
#include <vector>

#include "plateau/surface.hpp"

namespace plateau {

inline constexpr int kCheckpointVersion = 1;

struct TrainMeta {
  // Phase the parameters come from: "init", "adam", or "lbfgs".
  std::string phase = "init";
  uint64_t seed = 0;
  double loss = 0.0;  // best pool loss at snapshot time (0 for raw init)
};

struct Checkpoint {
  int version = kCheckpointVersion;
  ModelConfig model;
  std::vector<double> params;
  TrainMeta meta;

  void validate() const;  // model valid, params sized to the architecture
};

void save_checkpoint(std::ostream& os, const Checkpoint& c);
void save_checkpoint(const std::string& path, const Checkpoint& c);

// Throws std::runtime_error on malformed input or version mismatch.
Checkpoint load_checkpoint(std::istream& is);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace plateau
