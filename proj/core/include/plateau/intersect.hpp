#pragma once

// Double-point pipeline for immersed discs in R^4 (half-space coordinates
// (X, Y_1..Y_3) treated with the flat metric):
//
//   grid scan -> self-proximity field / candidate pairs -> damped Newton on
//   F(p, p') = u(p) - u(p') -> deduplication -> signs -> signed count.
//
// Everything runs against the ImmersionR4 interface so the same pipeline is
// exercised by analytic fixtures with hand-computed double points (the
// oracle) and by trained surfaces. Single-threaded by design: results are a
// deterministic function of the inputs.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plateau/loss.hpp"
#include "plateau/surface.hpp"

namespace plateau {

// Row i = image coordinate, column a = disc coordinate derivative.
using Jac4x2 = std::array<std::array<double, 2>, 4>;

class ImmersionR4 {
 public:
  virtual ~ImmersionR4() = default;
  virtual void eval(double x, double y, std::array<double, 4>& u,
                    Jac4x2& jac) = 0;
};

// Trained surface as an immersion; owns a copy of the parameters.
class SurfaceImmersion : public ImmersionR4 {
 public:
  SurfaceImmersion(const ModelConfig& cfg, std::span<const double> theta);
  void eval(double x, double y, std::array<double, 4>& u, Jac4x2& jac) override;

 private:
  std::vector<double> theta_;
  SurfaceEvaluator ev_;
  SurfaceJet jet_;
};

// ---- analytic fixtures ----

// u(x, y) = (x^2, f(x), y, x y) with f odd (f = sum c_k x^{2k+1}) and
// f'(0) != 0. Equation chasing gives exactly one unordered double point
// (x0, 0) ~ (-x0, 0) per positive root x0 of f, and the pair system's
// Jacobian determinant there is 8 x0^2 f'(x0), so the sign is the sign of
// f'(x0). A complete closed-form oracle for the pipeline.
class PolynomialImmersion : public ImmersionR4 {
 public:
  explicit PolynomialImmersion(std::vector<double> odd_coeffs);
  void eval(double x, double y, std::array<double, 4>& u, Jac4x2& jac) override;

  double f(double x) const;
  double df(double x) const;
  const std::vector<double>& odd_coeffs() const { return c_; }

 private:
  std::vector<double> c_;
};

// f = x^3 - 0.25 x: root 0.5, f'(0.5) > 0, one double point of sign +1.
PolynomialImmersion one_crossing_fixture();
// f = x (x^2 - 0.35^2)(x^2 - 0.7^2): signs -1 at 0.35 and +1 at 0.7,
// signed count 0.
PolynomialImmersion two_crossing_fixture();

// u = (0.1, x, y, 0): injective, image distance equals disc distance.
class OffsetPlaneImmersion : public ImmersionR4 {
 public:
  void eval(double x, double y, std::array<double, 4>& u, Jac4x2& jac) override;
};

// nullptr if the name is unknown; names: one_crossing, two_crossing,
// offset_plane.
std::unique_ptr<ImmersionR4> fixture_by_name(const std::string& name);

// ---- grid scan ----

inline constexpr double kGridMargin = 1e-3;  // grid masked to r <= 1 - margin

struct ImmersionGrid {
  int res = 0;
  std::vector<DiscPoint> pts;
  std::vector<std::array<double, 4>> img;
};

// Cell-centred res x res Cartesian lattice over [-1,1]^2 masked to the
// interior, evaluated through the immersion. Point order is row-major and
// part of the deterministic contract.
ImmersionGrid eval_grid(ImmersionR4& u, int grid_res);

struct ProximityField {
  int grid_res = 0;
  double epsilon = 0.0;
  std::vector<DiscPoint> pts;
  std::vector<double> values;  // min image distance to grid points > eps away
};

ProximityField self_proximity(const ImmersionGrid& g, double epsilon);
ProximityField self_proximity(ImmersionR4& u, int grid_res, double epsilon);

// (x, y, log10 distance) rows, one per grid point.
void write_proximity_field(const ProximityField& f, std::string path);

struct CandidatePair {
  DiscPoint a, b;
  double image_dist = 0.0;
};

inline constexpr size_t kCandidateCap = 100000;

class CandidateOverflowError : public std::runtime_error {
 public:
  explicit CandidateOverflowError(size_t n)
      : std::runtime_error(
            "candidate pair count " + std::to_string(n) + " exceeds cap " +
            std::to_string(kCandidateCap) +
            "; lower tau_img (image threshold) to thin the candidate set") {}
};

// Unordered grid pairs with ||p - p'|| > epsilon and ||u(p) - u(p')|| <
// tau_img, in scan order.
std::vector<CandidatePair> generate_candidates(const ImmersionGrid& g,
                                               double epsilon, double tau_img);
std::vector<CandidatePair> generate_candidates(ImmersionR4& u, int grid_res,
                                               double epsilon, double tau_img);

// ---- refinement ----

struct DoublePointRecord {
  DiscPoint p1, p2;
  std::array<double, 4> image{};
  double residual = 0.0;
  double jac_det = 0.0;  // raw det of [du_p1 | -du_p2] at the refined pair
  int sign = 0;
  int newton_iters = 0;
};

struct NewtonOptions {
  double tol = 1e-12;       // accept when ||u(p1) - u(p2)|| <= tol
  int max_iter = 50;
  double epsilon = 0.2;     // reject pairs that collapse to within epsilon
  double rmax = 1.0 - 1e-6; // iterates clamped to this radius
};

struct RefineResult {
  std::optional<DoublePointRecord> record;
  std::string failure;  // nonempty iff no record
  int iters = 0;
};

RefineResult newton_refine(ImmersionR4& u, DiscPoint a, DiscPoint b,
                           const NewtonOptions& opt = {});

class NonTransverseError : public std::runtime_error {
 public:
  explicit NonTransverseError(double det_normalized)
      : std::runtime_error("non-transverse intersection: normalised Jacobian "
                           "determinant " +
                           std::to_string(det_normalized) +
                           " is below the 1e-6 floor") {}
};

inline constexpr double kTransversalityFloor = 1e-6;

// Sign of det [du_p1 | -du_p2] under the standard orientation of R^4. The
// floor test runs on the determinant after normalising each tangent column
// to unit length (scale-free); throws NonTransverseError below the floor.
// Outputs the raw determinant through det_raw when non-null.
int intersection_sign(const Jac4x2& j1, const Jac4x2& j2,
                      double* det_raw = nullptr);
int intersection_sign(ImmersionR4& u, DiscPoint p1, DiscPoint p2);

// Merge records whose unordered preimage pairs agree within dedup_tol,
// keeping the smallest residual; (p1,p2) ordering is canonicalised.
std::vector<DoublePointRecord> deduplicate(
    std::vector<DoublePointRecord> records, double dedup_tol);

int self_intersection_number(std::span<const DoublePointRecord> records);

// True when distinct deduplicated records share an image point to within
// tol: an unresolved multiplicity (e.g. a triple point), which downstream
// consistency checks must report as indeterminate.
bool has_image_multiplicity(std::span<const DoublePointRecord> records,
                            double tol = 1e-6);

struct DoublePointAnalysis {
  std::vector<DoublePointRecord> records;  // deduplicated, scan order
  size_t n_candidates = 0;
  size_t n_converged = 0;
  std::vector<std::string> failures;  // capped diagnostics
  bool multiplicity_flag = false;
};

DoublePointAnalysis find_double_points(ImmersionR4& u, int grid_res,
                                       double epsilon, double tau_img,
                                       double dedup_tol = 1e-6,
                                       const NewtonOptions& base = {});
// Same, on an already-evaluated grid (shared with self_proximity).
DoublePointAnalysis find_double_points(ImmersionR4& u, const ImmersionGrid& g,
                                       double epsilon, double tau_img,
                                       double dedup_tol = 1e-6,
                                       const NewtonOptions& base = {});
// The refinement stage alone, for callers that already hold the candidates.
DoublePointAnalysis refine_candidates(ImmersionR4& u,
                                      std::span<const CandidatePair> cands,
                                      double epsilon, double dedup_tol = 1e-6,
                                      const NewtonOptions& base = {});

// p1, p2, image, residual, jac_det, sign rows; read_records inverts it
// (newton_iters is diagnostic only and not persisted).
void write_records(std::span<const DoublePointRecord> records,
                   std::string path);
std::vector<DoublePointRecord> read_records(const std::string& path);

}  // namespace plateau
