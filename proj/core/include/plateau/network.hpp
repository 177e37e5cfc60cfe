#pragma once

// Fully connected network on disc coordinates. The same forward-pass code
// drives two execution backends: PlainExec computes concrete second-order
// jets (no parameter derivatives), TapeExec records the computation on a
// Tape so parameter gradients can be pulled back afterwards.
//
// Parameter layout: affine maps in order, each as a row-major weight matrix
// (out x in) followed by its bias vector. Row-major means the weights feeding
// one output neuron are contiguous, which the fused dot nodes rely on.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plateau/jet.hpp"
#include "plateau/rng.hpp"
#include "plateau/tape.hpp"

namespace plateau {

enum class Activation : uint8_t { kTanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpArchitecture {
  int in_dim = 2;
  std::vector<int> hidden = {64, 64, 64, 64};
  int out_dim = 4;
  Activation act = Activation::kTanh;

  int n_maps() const { return static_cast<int>(hidden.size()) + 1; }
  int dim_in(int l) const { return l == 0 ? in_dim : hidden[l - 1]; }
  int dim_out(int l) const {
    return l == n_maps() - 1 ? out_dim : hidden[l];
  }

  size_t param_count() const {
    size_t n = 0;
    for (int l = 0; l < n_maps(); ++l)
      n += static_cast<size_t>(dim_in(l)) * dim_out(l) + dim_out(l);
    return n;
  }

  size_t map_offset(int l) const {
    size_t off = 0;
    for (int k = 0; k < l; ++k)
      off += static_cast<size_t>(dim_in(k)) * dim_out(k) + dim_out(k);
    return off;
  }
  // Weight W[row, col] of map l multiplies input col into output row.
  size_t weight_index(int l, int row, int col) const {
    return map_offset(l) + static_cast<size_t>(row) * dim_in(l) + col;
  }
  size_t bias_index(int l, int row) const {
    return map_offset(l) + static_cast<size_t>(dim_in(l)) * dim_out(l) + row;
  }

  void validate() const {
    if (in_dim != 2)
      throw std::invalid_argument("MlpArchitecture: input dimension must be 2");
    if (out_dim < 1)
      throw std::invalid_argument("MlpArchitecture: bad output dimension");
    for (int w : hidden)
      if (w < 1) throw std::invalid_argument("MlpArchitecture: bad width");
  }
};

enum class InitKind : uint8_t { kZero, kGlorotZeroHead };

// kZero: everything zero, so the model reduces to its analytic layer.
// kGlorotZeroHead: hidden weights uniform in +-sqrt(6/(fan_in+fan_out)),
// all biases zero, final map entirely zero. Draw order is map-major then
// row-major, which fixes the stream for a given seed.
std::vector<double> init_params(const MlpArchitecture& arch, InitKind kind,
                                uint64_t seed);

// ---- execution backends ----

struct PlainExec {
  using Jet = Jet2;
  std::span<const double> theta;

  Jet constant(const Jet2& j) const { return j; }
  Jet dot(std::span<const Jet> in, uint32_t w0, int64_t bias) const {
    Jet acc = (bias >= 0) ? jet_const(theta[static_cast<size_t>(bias)])
                          : Jet2{};
    const double* w = theta.data() + w0;
    for (size_t k = 0; k < in.size(); ++k) {
      const Jet& a = in[k];
      const double c = w[k];
      acc.v += a.v * c;
      acc.gx += a.gx * c;
      acc.gy += a.gy * c;
      acc.hxx += a.hxx * c;
      acc.hxy += a.hxy * c;
      acc.hyy += a.hyy * c;
    }
    return acc;
  }
  Jet activate(const Jet& a, Activation act) const {
    switch (act) {
      case Activation::kTanh: return tanh(a);
    }
    throw std::logic_error("unknown activation");
  }
  Jet exp_(const Jet& a) const { return exp(a); }
  Jet mul(const Jet& a, const Jet& b) const { return a * b; }
  Jet add(const Jet& a, const Jet& b) const { return a + b; }
};

struct TapeExec {
  using Jet = JetRef;
  Tape* t;

  Jet constant(const Jet2& j) const { return t->constant(j); }
  Jet dot(std::span<const Jet> in, uint32_t w0, int64_t bias) const {
    return t->dot(in, w0, bias);
  }
  Jet activate(const Jet& a, Activation act) const {
    switch (act) {
      case Activation::kTanh: return t->tanh_(a);
    }
    throw std::logic_error("unknown activation");
  }
  Jet exp_(const Jet& a) const { return t->exp_(a); }
  Jet mul(const Jet& a, const Jet& b) const { return t->mul(a, b); }
  Jet add(const Jet& a, const Jet& b) const { return t->add(a, b); }
};

// Forward pass; writes the out_dim outputs of the final (activation-free)
// affine map. `scratch` must outlive the call and is resized as needed;
// reusing one across calls keeps the plain path allocation-free.
template <class E>
void mlp_forward(E& ex, const MlpArchitecture& arch,
                 const typename E::Jet& x, const typename E::Jet& y,
                 std::span<typename E::Jet> out,
                 std::array<std::vector<typename E::Jet>, 2>& scratch) {
  using Jet = typename E::Jet;
  if (static_cast<int>(out.size()) != arch.out_dim)
    throw std::invalid_argument("mlp_forward: output span size mismatch");
  std::vector<Jet>& a = scratch[0];
  std::vector<Jet>& b = scratch[1];
  a.clear();
  a.push_back(x);
  a.push_back(y);
  for (int l = 0; l < arch.n_maps(); ++l) {
    const bool last = (l == arch.n_maps() - 1);
    const int rows = arch.dim_out(l);
    b.clear();
    for (int r = 0; r < rows; ++r) {
      Jet z = ex.dot(std::span<const Jet>(a.data(), a.size()),
                     static_cast<uint32_t>(arch.weight_index(l, r, 0)),
                     static_cast<int64_t>(arch.bias_index(l, r)));
      b.push_back(last ? z : ex.activate(z, arch.act));
    }
    std::swap(a, b);
  }
  for (int r = 0; r < arch.out_dim; ++r) out[r] = a[r];
}

}  // namespace plateau
