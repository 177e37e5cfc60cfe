#include "plateau/tape.hpp"

#include <algorithm>
#include <cmath>

namespace plateau {

const char* op_name(Op op) {
  switch (op) {
    case Op::kConst: return "const";
    case Op::kParam: return "param";
    case Op::kDot: return "dot";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kNeg: return "neg";
    case Op::kScale: return "scale";
    case Op::kAddConst: return "add_const";
    case Op::kExtract: return "extract";
    case Op::kRecip: return "recip";
    case Op::kSqrt: return "sqrt";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kTanh: return "tanh";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kPowi: return "powi";
  }
  return "?";
}

void Tape::bind(std::span<const double> theta) {
  if (theta.size() != n_params_)
    throw std::invalid_argument("Tape::bind: parameter count mismatch");
  theta_ = theta;
}

uint32_t Tape::push(Op op, uint32_t a, uint32_t b, uint32_t aux) {
  const uint32_t i = size();
  meta_.push_back({op, a, b, aux});
  val_.emplace_back();
  adj_.emplace_back();
  f1_.push_back(0);
  f2_.push_back(0);
  f3_.push_back(0);
  return i;
}

void Tape::check_param(uint32_t p) const {
  if (p >= n_params_)
    throw std::invalid_argument("Tape: parameter index out of range");
}

JetRef Tape::constant(const Jet2& j) {
  const uint32_t i = push(Op::kConst, 0, 0, 0);
  val_[i] = j;
  return {i};
}

JetRef Tape::param(uint32_t p) {
  check_param(p);
  return {push(Op::kParam, 0, 0, p)};
}

JetRef Tape::dot(std::span<const JetRef> inputs, uint32_t w0, int64_t bias) {
  check_param(w0 + static_cast<uint32_t>(inputs.size()) - 1);
  if (bias >= 0) check_param(static_cast<uint32_t>(bias));
  DotSpec spec;
  spec.first = static_cast<uint32_t>(dot_pool_.size());
  spec.count = static_cast<uint32_t>(inputs.size());
  spec.w0 = w0;
  spec.bias = bias;
  for (const JetRef& r : inputs) dot_pool_.push_back(r.i);
  const uint32_t d = static_cast<uint32_t>(dots_.size());
  dots_.push_back(spec);
  return {push(Op::kDot, 0, 0, d)};
}

JetRef Tape::add(JetRef a, JetRef b) { return {push(Op::kAdd, a.i, b.i, 0)}; }
JetRef Tape::sub(JetRef a, JetRef b) { return {push(Op::kSub, a.i, b.i, 0)}; }
JetRef Tape::mul(JetRef a, JetRef b) { return {push(Op::kMul, a.i, b.i, 0)}; }
JetRef Tape::neg(JetRef a) { return {push(Op::kNeg, a.i, 0, 0)}; }

JetRef Tape::scale(JetRef a, double c) {
  const uint32_t k = static_cast<uint32_t>(literal_.size());
  literal_.push_back(c);
  return {push(Op::kScale, a.i, 0, k)};
}

JetRef Tape::add_const(JetRef a, double c) {
  const uint32_t k = static_cast<uint32_t>(literal_.size());
  literal_.push_back(c);
  return {push(Op::kAddConst, a.i, 0, k)};
}

JetRef Tape::recip(JetRef a) { return {push(Op::kRecip, a.i, 0, 0)}; }
JetRef Tape::sqrt_(JetRef a) { return {push(Op::kSqrt, a.i, 0, 0)}; }
JetRef Tape::exp_(JetRef a) { return {push(Op::kExp, a.i, 0, 0)}; }
JetRef Tape::log_(JetRef a) { return {push(Op::kLog, a.i, 0, 0)}; }
JetRef Tape::tanh_(JetRef a) { return {push(Op::kTanh, a.i, 0, 0)}; }
JetRef Tape::sin_(JetRef a) { return {push(Op::kSin, a.i, 0, 0)}; }
JetRef Tape::cos_(JetRef a) { return {push(Op::kCos, a.i, 0, 0)}; }

JetRef Tape::powi_(JetRef a, int n) {
  return {push(Op::kPowi, a.i, 0, static_cast<uint32_t>(n))};
}

Var Tape::slot(JetRef a, Slot s) {
  return {this, push(Op::kExtract, a.i, 0, static_cast<uint32_t>(s))};
}

Var Tape::v_add(Var a, Var b) { return {this, push(Op::kAdd, a.i, b.i, 0)}; }
Var Tape::v_sub(Var a, Var b) { return {this, push(Op::kSub, a.i, b.i, 0)}; }
Var Tape::v_mul(Var a, Var b) { return {this, push(Op::kMul, a.i, b.i, 0)}; }
Var Tape::v_neg(Var a) { return {this, push(Op::kNeg, a.i, 0, 0)}; }
Var Tape::v_recip(Var a) { return {this, push(Op::kRecip, a.i, 0, 0)}; }

Var Tape::v_div(Var a, Var b) { return v_mul(a, v_recip(b)); }

Var Tape::v_scale(Var a, double c) {
  return {this, scale(JetRef{a.i}, c).i};
}

Var Tape::v_add_const(Var a, double c) {
  return {this, add_const(JetRef{a.i}, c).i};
}

Var Tape::v_const(double c) { return {this, constant(jet_const(c)).i}; }

void Tape::set_constant(JetRef leaf, const Jet2& j) {
  if (meta_[leaf.i].op != Op::kConst)
    throw std::invalid_argument("Tape::set_constant: node is not a leaf");
  val_[leaf.i] = j;
}

std::string Tape::describe(uint32_t node) const {
  return std::string(op_name(meta_[node].op)) + "#" + std::to_string(node);
}

namespace {

inline void jadd(Jet2& a, const Jet2& b) {
  a.v += b.v;
  a.gx += b.gx;
  a.gy += b.gy;
  a.hxx += b.hxx;
  a.hxy += b.hxy;
  a.hyy += b.hyy;
}

inline void jsub(Jet2& a, const Jet2& b) {
  a.v -= b.v;
  a.gx -= b.gx;
  a.gy -= b.gy;
  a.hxx -= b.hxx;
  a.hxy -= b.hxy;
  a.hyy -= b.hyy;
}

inline void jfma(Jet2& a, const Jet2& b, double c) {
  a.v += b.v * c;
  a.gx += b.gx * c;
  a.gy += b.gy * c;
  a.hxx += b.hxx * c;
  a.hxy += b.hxy * c;
  a.hyy += b.hyy * c;
}

inline double jdot(const Jet2& a, const Jet2& b) {
  return a.v * b.v + a.gx * b.gx + a.gy * b.gy + a.hxx * b.hxx +
         a.hxy * b.hxy + a.hyy * b.hyy;
}

// Adjoint of c = a * b with respect to a, given the co-jet cb and the other
// operand o = b's payload. Mirrors the Leibniz forward rule exactly.
inline void pullback_mul(Jet2& abar, const Jet2& cb, const Jet2& o) {
  abar.v += jdot(cb, o);
  abar.gx += cb.gx * o.v + 2.0 * cb.hxx * o.gx + cb.hxy * o.gy;
  abar.gy += cb.gy * o.v + cb.hxy * o.gx + 2.0 * cb.hyy * o.gy;
  abar.hxx += cb.hxx * o.v;
  abar.hxy += cb.hxy * o.v;
  abar.hyy += cb.hyy * o.v;
}

// Adjoint of a unary composition c = f(a) given f', f'', f''' at a.v.
inline void pullback_unary(Jet2& abar, const Jet2& cb, const Jet2& a,
                           double f1, double f2, double f3) {
  abar.v += cb.v * f1 + f2 * (cb.gx * a.gx + cb.gy * a.gy) +
            cb.hxx * (f3 * a.gx * a.gx + f2 * a.hxx) +
            cb.hxy * (f3 * a.gx * a.gy + f2 * a.hxy) +
            cb.hyy * (f3 * a.gy * a.gy + f2 * a.hyy);
  abar.gx += cb.gx * f1 + f2 * (2.0 * cb.hxx * a.gx + cb.hxy * a.gy);
  abar.gy += cb.gy * f1 + f2 * (cb.hxy * a.gx + 2.0 * cb.hyy * a.gy);
  abar.hxx += cb.hxx * f1;
  abar.hxy += cb.hxy * f1;
  abar.hyy += cb.hyy * f1;
}

}  // namespace

void Tape::forward() {
  const uint32_t n = size();
  for (uint32_t i = 0; i < n; ++i) {
    const Meta& m = meta_[i];
    switch (m.op) {
      case Op::kConst:
        break;
      case Op::kParam:
        val_[i] = jet_const(theta_[m.aux]);
        break;
      case Op::kDot: {
        const DotSpec& d = dots_[m.aux];
        Jet2 acc = (d.bias >= 0) ? jet_const(theta_[d.bias]) : Jet2{};
        const uint32_t* in = dot_pool_.data() + d.first;
        const double* w = theta_.data() + d.w0;
        for (uint32_t k = 0; k < d.count; ++k) jfma(acc, val_[in[k]], w[k]);
        val_[i] = acc;
        break;
      }
      case Op::kAdd:
        val_[i] = val_[m.a] + val_[m.b];
        break;
      case Op::kSub:
        val_[i] = val_[m.a] - val_[m.b];
        break;
      case Op::kMul:
        val_[i] = val_[m.a] * val_[m.b];
        break;
      case Op::kNeg:
        val_[i] = -val_[m.a];
        break;
      case Op::kScale:
        val_[i] = val_[m.a] * literal_[m.aux];
        break;
      case Op::kAddConst:
        val_[i] = val_[m.a] + literal_[m.aux];
        break;
      case Op::kExtract: {
        const Jet2& a = val_[m.a];
        double s = 0;
        switch (static_cast<Slot>(m.aux)) {
          case Slot::kV: s = a.v; break;
          case Slot::kGx: s = a.gx; break;
          case Slot::kGy: s = a.gy; break;
          case Slot::kHxx: s = a.hxx; break;
          case Slot::kHxy: s = a.hxy; break;
          case Slot::kHyy: s = a.hyy; break;
        }
        val_[i] = jet_const(s);
        break;
      }
      case Op::kRecip: {
        const Jet2& a = val_[m.a];
        if (a.v == 0.0)
          throw TapeError("division by zero at node " + describe(i), i);
        const double r = 1.0 / a.v;
        f1_[i] = -r * r;
        f2_[i] = 2.0 * r * r * r;
        f3_[i] = -6.0 * r * r * r * r;
        val_[i] = jet_compose(a, r, f1_[i], f2_[i]);
        break;
      }
      case Op::kSqrt: {
        const Jet2& a = val_[m.a];
        if (!(a.v > 0.0))
          throw TapeError("sqrt outside domain at node " + describe(i), i);
        const double s = std::sqrt(a.v);
        f1_[i] = 0.5 / s;
        f2_[i] = -0.5 * f1_[i] / a.v;
        f3_[i] = -1.5 * f2_[i] / a.v;
        val_[i] = jet_compose(a, s, f1_[i], f2_[i]);
        break;
      }
      case Op::kExp: {
        const Jet2& a = val_[m.a];
        const double e = std::exp(a.v);
        f1_[i] = f2_[i] = f3_[i] = e;
        val_[i] = jet_compose(a, e, e, e);
        break;
      }
      case Op::kLog: {
        const Jet2& a = val_[m.a];
        if (!(a.v > 0.0))
          throw TapeError("log outside domain at node " + describe(i), i);
        const double r = 1.0 / a.v;
        f1_[i] = r;
        f2_[i] = -r * r;
        f3_[i] = 2.0 * r * r * r;
        val_[i] = jet_compose(a, std::log(a.v), f1_[i], f2_[i]);
        break;
      }
      case Op::kTanh: {
        const Jet2& a = val_[m.a];
        const double t = std::tanh(a.v);
        const double s = 1.0 - t * t;
        f1_[i] = s;
        f2_[i] = -2.0 * t * s;
        f3_[i] = s * (4.0 * t * t - 2.0 * s);
        val_[i] = jet_compose(a, t, f1_[i], f2_[i]);
        break;
      }
      case Op::kSin: {
        const Jet2& a = val_[m.a];
        const double s = std::sin(a.v), c = std::cos(a.v);
        f1_[i] = c;
        f2_[i] = -s;
        f3_[i] = -c;
        val_[i] = jet_compose(a, s, c, -s);
        break;
      }
      case Op::kCos: {
        const Jet2& a = val_[m.a];
        const double s = std::sin(a.v), c = std::cos(a.v);
        f1_[i] = -s;
        f2_[i] = -c;
        f3_[i] = s;
        val_[i] = jet_compose(a, c, -s, -c);
        break;
      }
      case Op::kPowi: {
        const Jet2& a = val_[m.a];
        const int p = static_cast<int32_t>(m.aux);
        if (p < 0 && a.v == 0.0)
          throw TapeError("negative power of zero at node " + describe(i), i);
        const double c1 = p;
        const double c2 = static_cast<double>(p) * (p - 1);
        const double c3 = static_cast<double>(p) * (p - 1) * (p - 2);
        f1_[i] = (c1 == 0.0) ? 0.0 : c1 * ipow(a.v, p - 1);
        f2_[i] = (c2 == 0.0) ? 0.0 : c2 * ipow(a.v, p - 2);
        f3_[i] = (c3 == 0.0) ? 0.0 : c3 * ipow(a.v, p - 3);
        val_[i] = jet_compose(a, ipow(a.v, p), f1_[i], f2_[i]);
        break;
      }
    }
  }
}

void Tape::backward(Var seed, double weight, std::span<double> grad) {
  if (grad.size() != n_params_)
    throw std::invalid_argument("Tape::backward: gradient size mismatch");
  std::fill(adj_.begin(), adj_.end(), Jet2{});
  adj_[seed.i].v = weight;
  for (uint32_t i = size(); i-- > 0;) {
    const Meta& m = meta_[i];
    const Jet2& cb = adj_[i];
    switch (m.op) {
      case Op::kConst:
        break;
      case Op::kParam:
        grad[m.aux] += cb.v;
        break;
      case Op::kDot: {
        const DotSpec& d = dots_[m.aux];
        const uint32_t* in = dot_pool_.data() + d.first;
        const double* w = theta_.data() + d.w0;
        for (uint32_t k = 0; k < d.count; ++k) {
          jfma(adj_[in[k]], cb, w[k]);
          grad[d.w0 + k] += jdot(cb, val_[in[k]]);
        }
        if (d.bias >= 0) grad[d.bias] += cb.v;
        break;
      }
      case Op::kAdd:
        jadd(adj_[m.a], cb);
        jadd(adj_[m.b], cb);
        break;
      case Op::kSub:
        jadd(adj_[m.a], cb);
        jsub(adj_[m.b], cb);
        break;
      case Op::kMul:
        pullback_mul(adj_[m.a], cb, val_[m.b]);
        pullback_mul(adj_[m.b], cb, val_[m.a]);
        break;
      case Op::kNeg:
        jsub(adj_[m.a], cb);
        break;
      case Op::kScale:
        jfma(adj_[m.a], cb, literal_[m.aux]);
        break;
      case Op::kAddConst:
        jadd(adj_[m.a], cb);
        break;
      case Op::kExtract: {
        Jet2& ab = adj_[m.a];
        switch (static_cast<Slot>(m.aux)) {
          case Slot::kV: ab.v += cb.v; break;
          case Slot::kGx: ab.gx += cb.v; break;
          case Slot::kGy: ab.gy += cb.v; break;
          case Slot::kHxx: ab.hxx += cb.v; break;
          case Slot::kHxy: ab.hxy += cb.v; break;
          case Slot::kHyy: ab.hyy += cb.v; break;
        }
        break;
      }
      case Op::kRecip:
      case Op::kSqrt:
      case Op::kExp:
      case Op::kLog:
      case Op::kTanh:
      case Op::kSin:
      case Op::kCos:
      case Op::kPowi:
        pullback_unary(adj_[m.a], cb, val_[m.a], f1_[i], f2_[i], f3_[i]);
        break;
    }
  }
}

int64_t Tape::first_nonfinite() const {
  for (uint32_t i = 0; i < size(); ++i)
    if (!is_finite(val_[i])) return i;
  return -1;
}

std::vector<double> grad_wrt_params(const RecordedScalar& r) {
  if (r.tape == nullptr) return r.grad;
  if (!std::isfinite(r.value)) {
    const int64_t bad = r.tape->first_nonfinite();
    throw TapeError("gradient of non-finite recorded scalar; first bad node " +
                        (bad >= 0 ? r.tape->describe(static_cast<uint32_t>(bad))
                                  : std::string("<none>")),
                    bad >= 0 ? static_cast<uint32_t>(bad) : 0);
  }
  std::vector<double> g(r.tape->n_params(), 0.0);
  r.tape->backward(r.node, 1.0, g);
  return g;
}

}  // namespace plateau
