#pragma once

// The parametrised disc in half-space coordinates:
//
//   u(x, y) = ( rho * exp(NN_X),  ext(gamma)_k + rho^k * NN_Yk )
//
// X = rho * exp(NN_X) is positive inside the disc and vanishes on the
// boundary circle exactly; the Y components hit the prescribed curve on the
// boundary exactly because rho^k kills the network there. Everything the
// training loop differentiates flows through assemble_surface below, which
// is shared between the concrete-jet path and the tape recorder.

#include <span>
#include <vector>

#include "plateau/curve.hpp"
#include "plateau/extension.hpp"
#include "plateau/jet.hpp"
#include "plateau/network.hpp"

namespace plateau {

struct ModelConfig {
  KnotCurve curve;
  RhoKind rho = RhoKind::kStereographic;
  ExtKind ext = ExtKind::kStereoBiharmonic;
  int k = 2;  // decay power of the network correction to Y
  MlpArchitecture arch;

  int ambient_dim() const { return curve.ambient_dim; }

  void validate() const {
    arch.validate();
    if (k != 1 && k != 2)
      throw std::invalid_argument("ModelConfig: k must be 1 or 2");
    if (k == 2 && ext != ExtKind::kStereoBiharmonic)
      throw std::invalid_argument(
          "ModelConfig: k = 2 requires the stereobiharmonic extension "
          "(otherwise the boundary derivative of Y is wrong)");
    if (arch.out_dim != ambient_dim() + 1)
      throw std::invalid_argument(
          "ModelConfig: network output dimension must be ambient_dim + 1");
    if (curve.comps.size() != static_cast<size_t>(ambient_dim()))
      throw std::invalid_argument("ModelConfig: curve component mismatch");
  }
};

struct HalfSpacePoint {
  double X = 0.0;
  std::vector<double> Y;
};

struct SurfaceJet {
  double x = 0.0, y = 0.0;
  std::vector<Jet2> comp;  // comp[0] = X, comp[1..n] = Y components
};

// comp = (X, Y_1..Y_n) from precomputed analytic parts. ext.size() == n,
// out.size() == n + 1.
template <class E>
void assemble_surface(E& ex, const MlpArchitecture& arch,
                      const typename E::Jet& x, const typename E::Jet& y,
                      const typename E::Jet& rho,
                      const typename E::Jet& rho_pow_k,
                      std::span<const typename E::Jet> ext,
                      std::span<typename E::Jet> out,
                      std::array<std::vector<typename E::Jet>, 2>& scratch) {
  using Jet = typename E::Jet;
  std::vector<Jet> nn(arch.out_dim);
  mlp_forward(ex, arch, x, y, nn, scratch);
  out[0] = ex.mul(rho, ex.exp_(nn[0]));
  for (size_t i = 0; i < ext.size(); ++i)
    out[i + 1] = ex.add(ext[i], ex.mul(rho_pow_k, nn[i + 1]));
}

// Reusable evaluator (owns the extension field and scratch buffers).
class SurfaceEvaluator {
 public:
  explicit SurfaceEvaluator(const ModelConfig& cfg);

  void bind(std::span<const double> theta) { exec_.theta = theta; }

  // Full second-order jet of every component at an interior point.
  void eval_jet(double x, double y, SurfaceJet& out);
  HalfSpacePoint eval_point(double x, double y);

  const ExtensionField& extension() const { return ext_; }

 private:
  const ModelConfig cfg_;
  ExtensionField ext_;
  PlainExec exec_;
  std::array<std::vector<Jet2>, 2> scratch_;
  std::vector<Jet2> ext_jets_;
};

SurfaceJet evaluate_jet(const ModelConfig& cfg, std::span<const double> theta,
                        double x, double y);
HalfSpacePoint evaluate(const ModelConfig& cfg, std::span<const double> theta,
                        double x, double y);

// Half-space -> ball model isometry; returns n+1 coordinates with norm < 1
// for X > 0 and norm 1 when X = 0.
std::vector<double> to_ball_model(const HalfSpacePoint& p);

}  // namespace plateau
