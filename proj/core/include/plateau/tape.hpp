#pragma once

// Reverse-mode tape over the trainable parameters, with second-order input
// jets as node payloads.
//
// Every node carries a full BasicJet<double> payload (value + disc-coordinate
// derivatives). Sweeping the tape backwards propagates 6-slot jet adjoints,
// so the parameter gradient of any recorded scalar that depends on the
// payloads' derivative slots (the tension norm does) comes out exact.
//
// The graph is static while it lives: built per evaluation batch, then for
// each collocation point of the batch the leaf payloads are overwritten,
// forward(), read values, backward(). Rebuilding per point would dominate
// the step budget; holding one graph across batches buys nothing (building
// is microseconds) and is avoided for simplicity.
//
// Scalar (non-jet) intermediates are ordinary nodes whose derivative slots
// are identically zero; slot-extraction nodes bridge from jets to scalars.
// The adjoint algebra keeps those slots zero, so one pullback rule set covers
// both kinds.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plateau/jet.hpp"

namespace plateau {

enum class Op : uint8_t {
  kConst,
  kParam,
  kDot,
  kAdd,
  kSub,
  kMul,
  kNeg,
  kScale,
  kAddConst,
  kExtract,
  kRecip,
  kSqrt,
  kExp,
  kLog,
  kTanh,
  kSin,
  kCos,
  kPowi,
};

const char* op_name(Op op);

enum class Slot : uint8_t { kV = 0, kGx, kGy, kHxx, kHxy, kHyy };

class TapeError : public std::runtime_error {
 public:
  TapeError(const std::string& what, uint32_t node)
      : std::runtime_error(what), node_(node) {}
  uint32_t node() const { return node_; }

 private:
  uint32_t node_;
};

class Tape;

// Handle to a jet-valued node.
struct JetRef {
  uint32_t i = 0;
};

// Handle to a scalar-valued node (payload uses only the value slot).
struct Var {
  Tape* tape = nullptr;
  uint32_t i = 0;
};

class Tape {
 public:
  explicit Tape(size_t n_params) : n_params_(n_params) {}

  size_t n_params() const { return n_params_; }
  uint32_t size() const { return static_cast<uint32_t>(meta_.size()); }

  // The parameter view read by forward()/backward(). Rebinding is how one
  // graph serves every training step.
  void bind(std::span<const double> theta);

  // ---- graph construction ----
  JetRef constant(const Jet2& j);
  JetRef param(uint32_t p);
  // sum_i inputs[i] * theta[w0 + i] + theta[bias]; bias < 0 means none.
  // Weight indices are consecutive so MLP rows stream straight out of theta.
  JetRef dot(std::span<const JetRef> inputs, uint32_t w0, int64_t bias);
  JetRef add(JetRef a, JetRef b);
  JetRef sub(JetRef a, JetRef b);
  JetRef mul(JetRef a, JetRef b);
  JetRef neg(JetRef a);
  JetRef scale(JetRef a, double c);
  JetRef add_const(JetRef a, double c);
  JetRef recip(JetRef a);
  JetRef sqrt_(JetRef a);
  JetRef exp_(JetRef a);
  JetRef log_(JetRef a);
  JetRef tanh_(JetRef a);
  JetRef sin_(JetRef a);
  JetRef cos_(JetRef a);
  JetRef powi_(JetRef a, int n);
  Var slot(JetRef a, Slot s);

  // Scalar-node builders used by the Var operator overloads.
  Var v_add(Var a, Var b);
  Var v_sub(Var a, Var b);
  Var v_mul(Var a, Var b);
  Var v_div(Var a, Var b);
  Var v_neg(Var a);
  Var v_recip(Var a);
  Var v_scale(Var a, double c);
  Var v_add_const(Var a, double c);
  Var v_const(double c);

  // ---- execution ----
  void set_constant(JetRef leaf, const Jet2& j);
  // Sweeps all nodes in construction order. Domain violations throw TapeError
  // naming the node.
  void forward();
  const Jet2& value(JetRef n) const { return val_[n.i]; }
  double value(Var n) const { return val_[n.i].v; }

  // Seeds d(seed)/d(seed) = weight and accumulates parameter sensitivities
  // into grad (+=). grad.size() must equal n_params().
  void backward(Var seed, double weight, std::span<double> grad);

  // Index of the first node whose payload has a non-finite slot, or -1.
  int64_t first_nonfinite() const;
  std::string describe(uint32_t node) const;

 private:
  struct Meta {
    Op op;
    uint32_t a = 0, b = 0;
    uint32_t aux = 0;
  };
  struct DotSpec {
    uint32_t first = 0;   // offset into dot_pool_
    uint32_t count = 0;   // number of inputs
    uint32_t w0 = 0;      // first weight index in theta
    int64_t bias = -1;    // bias index in theta, or -1
  };

  uint32_t push(Op op, uint32_t a, uint32_t b, uint32_t aux);
  void check_param(uint32_t p) const;

  size_t n_params_;
  std::span<const double> theta_;
  std::vector<Meta> meta_;
  std::vector<Jet2> val_;
  std::vector<Jet2> adj_;
  std::vector<double> f1_, f2_, f3_;  // per-node derivative cache (unaries)
  std::vector<DotSpec> dots_;
  std::vector<uint32_t> dot_pool_;
  std::vector<double> literal_;  // kScale / kAddConst constants
};

// ---- scalar-node operators (used by formula code templated on the scalar
// type, instantiated with S = double and S = Var) ----

inline Var operator+(Var a, Var b) { return a.tape->v_add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->v_sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->v_mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape->v_div(a, b); }
inline Var operator-(Var a) { return a.tape->v_neg(a); }
inline Var operator*(Var a, double c) { return a.tape->v_scale(a, c); }
inline Var operator*(double c, Var a) { return a.tape->v_scale(a, c); }
inline Var operator+(Var a, double c) { return a.tape->v_add_const(a, c); }
inline Var operator+(double c, Var a) { return a.tape->v_add_const(a, c); }
inline Var operator-(Var a, double c) { return a.tape->v_add_const(a, -c); }
inline Var operator-(double c, Var a) {
  return a.tape->v_add_const(a.tape->v_neg(a), c);
}
inline Var operator/(Var a, double c) { return a.tape->v_scale(a, 1.0 / c); }
inline Var operator/(double c, Var a) {
  return a.tape->v_scale(a.tape->v_recip(a), c);
}

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.tape->value(x); }

// A scalar produced by a recorded computation. Either a live handle into a
// tape (valid until that tape's next forward sweep) or a detached value with
// its gradient already accumulated (what the batched loss returns).
struct RecordedScalar {
  double value = 0.0;
  Tape* tape = nullptr;
  Var node{};
  std::vector<double> grad;  // used when tape == nullptr
};

// Gradient of a recorded scalar with respect to the bound parameter vector.
// Tape-backed handles may be queried repeatedly; each query re-sweeps.
std::vector<double> grad_wrt_params(const RecordedScalar& r);

}  // namespace plateau
