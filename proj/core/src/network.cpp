#include "plateau/network.hpp"

#include <cmath>

namespace plateau {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

std::vector<double> init_params(const MlpArchitecture& arch, InitKind kind,
                                uint64_t seed) {
  arch.validate();
  std::vector<double> theta(arch.param_count(), 0.0);
  if (kind == InitKind::kZero) return theta;

  Rng rng(seed);
  for (int l = 0; l < arch.n_maps() - 1; ++l) {
    const int rows = arch.dim_out(l), cols = arch.dim_in(l);
    const double s = std::sqrt(6.0 / (rows + cols));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        theta[arch.weight_index(l, r, c)] = rng.uniform(-s, s);
  }
  // Final map stays zero: the model starts exactly at its analytic layer.
  return theta;
}

}  // namespace plateau
