#include "plateau/intersect.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "plateau/io_util.hpp"

namespace plateau {

namespace {

double dist2(const DiscPoint& a, const DiscPoint& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double img_dist2(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

SurfaceImmersion::SurfaceImmersion(const ModelConfig& cfg,
                                   std::span<const double> theta)
    : theta_(theta.begin(), theta.end()), ev_(cfg) {
  if (cfg.ambient_dim() != 3)
    throw std::invalid_argument(
        "SurfaceImmersion: double-point analysis needs ambient dimension 3");
  ev_.bind(theta_);
}

void SurfaceImmersion::eval(double x, double y, std::array<double, 4>& u,
                            Jac4x2& jac) {
  ev_.eval_jet(x, y, jet_);
  for (int i = 0; i < 4; ++i) {
    u[i] = jet_.comp[i].v;
    jac[i] = {jet_.comp[i].gx, jet_.comp[i].gy};
  }
}

PolynomialImmersion::PolynomialImmersion(std::vector<double> odd_coeffs)
    : c_(std::move(odd_coeffs)) {
  if (c_.empty())
    throw std::invalid_argument("PolynomialImmersion: empty coefficients");
  if (c_[0] == 0.0)
    throw std::invalid_argument(
        "PolynomialImmersion: f'(0) = 0 breaks the immersion at the origin");
}

double PolynomialImmersion::f(double x) const {
  const double s = x * x;
  double g = 0.0;
  for (size_t k = c_.size(); k-- > 0;) g = g * s + c_[k];
  return x * g;
}

double PolynomialImmersion::df(double x) const {
  const double s = x * x;
  double g = 0.0, dg = 0.0;
  for (size_t k = c_.size(); k-- > 0;) {
    if (k + 1 < c_.size()) dg = dg * s + static_cast<double>(k + 1) * c_[k + 1];
    g = g * s + c_[k];
  }
  return g + 2.0 * s * dg;
}

void PolynomialImmersion::eval(double x, double y, std::array<double, 4>& u,
                               Jac4x2& jac) {
  u = {x * x, f(x), y, x * y};
  jac[0] = {2.0 * x, 0.0};
  jac[1] = {df(x), 0.0};
  jac[2] = {0.0, 1.0};
  jac[3] = {y, x};
}

PolynomialImmersion one_crossing_fixture() {
  return PolynomialImmersion({-0.25, 1.0});
}

PolynomialImmersion two_crossing_fixture() {
  return PolynomialImmersion({0.060025, -0.6125, 1.0});
}

void OffsetPlaneImmersion::eval(double x, double y, std::array<double, 4>& u,
                                Jac4x2& jac) {
  u = {0.1, x, y, 0.0};
  jac[0] = {0.0, 0.0};
  jac[1] = {1.0, 0.0};
  jac[2] = {0.0, 1.0};
  jac[3] = {0.0, 0.0};
}

std::unique_ptr<ImmersionR4> fixture_by_name(const std::string& name) {
  if (name == "one_crossing")
    return std::make_unique<PolynomialImmersion>(one_crossing_fixture());
  if (name == "two_crossing")
    return std::make_unique<PolynomialImmersion>(two_crossing_fixture());
  if (name == "offset_plane") return std::make_unique<OffsetPlaneImmersion>();
  return nullptr;
}

ImmersionGrid eval_grid(ImmersionR4& u, int grid_res) {
  if (grid_res < 16)
    throw std::invalid_argument("eval_grid: grid_res must be >= 16");
  ImmersionGrid g;
  g.res = grid_res;
  const double h = 2.0 / grid_res;
  const double r2max = (1.0 - kGridMargin) * (1.0 - kGridMargin);
  std::array<double, 4> val;
  Jac4x2 jac;
  for (int j = 0; j < grid_res; ++j) {
    const double y = -1.0 + (j + 0.5) * h;
    for (int i = 0; i < grid_res; ++i) {
      const double x = -1.0 + (i + 0.5) * h;
      if (x * x + y * y > r2max) continue;
      u.eval(x, y, val, jac);
      g.pts.push_back({x, y});
      g.img.push_back(val);
    }
  }
  return g;
}

ProximityField self_proximity(const ImmersionGrid& g, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 2.0))
    throw std::invalid_argument("self_proximity: need 0 < epsilon < 2");
  ProximityField f;
  f.grid_res = g.res;
  f.epsilon = epsilon;
  f.pts = g.pts;
  const size_t n = g.pts.size();
  const double eps2 = epsilon * epsilon;
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (size_t a = 0; a < n; ++a) {
    const DiscPoint pa = g.pts[a];
    const std::array<double, 4>& ia = g.img[a];
    for (size_t b = a + 1; b < n; ++b) {
      if (dist2(pa, g.pts[b]) <= eps2) continue;
      const double d2 = img_dist2(ia, g.img[b]);
      if (d2 < best[a]) best[a] = d2;
      if (d2 < best[b]) best[b] = d2;
    }
  }
  f.values.resize(n);
  for (size_t a = 0; a < n; ++a) f.values[a] = std::sqrt(best[a]);
  return f;
}

ProximityField self_proximity(ImmersionR4& u, int grid_res, double epsilon) {
  const ImmersionGrid g = eval_grid(u, grid_res);
  return self_proximity(g, epsilon);
}

void write_proximity_field(const ProximityField& f, std::string path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# x y log10_min_image_distance (domain threshold epsilon = "
      << fmt17(f.epsilon) << ")\n";
  for (size_t i = 0; i < f.pts.size(); ++i)
    out << fmt17(f.pts[i].x) << " " << fmt17(f.pts[i].y) << " "
        << fmt17(std::log10(std::max(f.values[i], 1e-300))) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<CandidatePair> generate_candidates(const ImmersionGrid& g,
                                               double epsilon,
                                               double tau_img) {
  if (!(epsilon > 0.0 && epsilon < 2.0))
    throw std::invalid_argument("generate_candidates: need 0 < epsilon < 2");
  if (!(tau_img > 0.0))
    throw std::invalid_argument("generate_candidates: need tau_img > 0");
  std::vector<CandidatePair> out;
  const size_t n = g.pts.size();
  const double eps2 = epsilon * epsilon;
  const double tau2 = tau_img * tau_img;
  size_t count = 0;
  for (size_t a = 0; a < n; ++a) {
    const DiscPoint pa = g.pts[a];
    const std::array<double, 4>& ia = g.img[a];
    for (size_t b = a + 1; b < n; ++b) {
      if (dist2(pa, g.pts[b]) <= eps2) continue;
      const double d2 = img_dist2(ia, g.img[b]);
      if (d2 >= tau2) continue;
      ++count;
      if (count <= kCandidateCap)
        out.push_back({pa, g.pts[b], std::sqrt(d2)});
    }
  }
  if (count > kCandidateCap) throw CandidateOverflowError(count);
  return out;
}

std::vector<CandidatePair> generate_candidates(ImmersionR4& u, int grid_res,
                                               double epsilon,
                                               double tau_img) {
  const ImmersionGrid g = eval_grid(u, grid_res);
  return generate_candidates(g, epsilon, tau_img);
}

int intersection_sign(const Jac4x2& j1, const Jac4x2& j2, double* det_raw) {
  Eigen::Matrix4d A;
  for (int i = 0; i < 4; ++i) {
    A(i, 0) = j1[i][0];
    A(i, 1) = j1[i][1];
    A(i, 2) = -j2[i][0];
    A(i, 3) = -j2[i][1];
  }
  if (det_raw) *det_raw = A.determinant();
  Eigen::Matrix4d N = A;
  for (int c = 0; c < 4; ++c) {
    const double norm = N.col(c).norm();
    if (norm > 0.0) N.col(c) /= norm;
  }
  const double dn = N.determinant();
  if (std::abs(dn) < kTransversalityFloor) throw NonTransverseError(dn);
  return dn > 0.0 ? 1 : -1;
}

int intersection_sign(ImmersionR4& u, DiscPoint p1, DiscPoint p2) {
  std::array<double, 4> v;
  Jac4x2 j1, j2;
  u.eval(p1.x, p1.y, v, j1);
  u.eval(p2.x, p2.y, v, j2);
  return intersection_sign(j1, j2);
}

namespace {

DiscPoint clamp_to_disc(DiscPoint p, double rmax) {
  const double r = std::hypot(p.x, p.y);
  if (r > rmax) {
    const double s = rmax / r;
    p.x *= s;
    p.y *= s;
  }
  return p;
}

}  // namespace

RefineResult newton_refine(ImmersionR4& u, DiscPoint a, DiscPoint b,
                           const NewtonOptions& opt) {
  RefineResult out;
  DiscPoint p1 = clamp_to_disc(a, opt.rmax);
  DiscPoint p2 = clamp_to_disc(b, opt.rmax);

  std::array<double, 4> u1, u2;
  Jac4x2 j1, j2;
  auto residual = [&](const DiscPoint& q1, const DiscPoint& q2) {
    std::array<double, 4> w1, w2;
    Jac4x2 t1, t2;
    u.eval(q1.x, q1.y, w1, t1);
    u.eval(q2.x, q2.y, w2, t2);
    return std::sqrt(img_dist2(w1, w2));
  };

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    u.eval(p1.x, p1.y, u1, j1);
    u.eval(p2.x, p2.y, u2, j2);
    Eigen::Vector4d F;
    for (int i = 0; i < 4; ++i) F(i) = u1[i] - u2[i];
    const double res = F.norm();

    if (res <= opt.tol) {
      if (dist2(p1, p2) <= opt.epsilon * opt.epsilon) {
        out.failure = "converged onto the diagonal (separation <= epsilon)";
        out.iters = iter;
        return out;
      }
      DoublePointRecord rec;
      rec.p1 = p1;
      rec.p2 = p2;
      for (int i = 0; i < 4; ++i) rec.image[i] = 0.5 * (u1[i] + u2[i]);
      rec.residual = res;
      rec.newton_iters = iter;
      try {
        rec.sign = intersection_sign(j1, j2, &rec.jac_det);
      } catch (const NonTransverseError& e) {
        out.failure = e.what();
        out.iters = iter;
        return out;
      }
      out.record = rec;
      out.iters = iter;
      return out;
    }
    if (iter == opt.max_iter) break;

    Eigen::Matrix4d A;
    for (int i = 0; i < 4; ++i) {
      A(i, 0) = j1[i][0];
      A(i, 1) = j1[i][1];
      A(i, 2) = -j2[i][0];
      A(i, 3) = -j2[i][1];
    }
    double hadamard = 1.0;
    for (int c = 0; c < 4; ++c) hadamard *= A.col(c).norm();
    Eigen::PartialPivLU<Eigen::Matrix4d> lu(A);
    const double det = lu.determinant();
    if (!(hadamard > 0.0) || !(std::abs(det) > 1e-14 * hadamard)) {
      out.failure = "jacobian singular at iterate";
      out.iters = iter;
      return out;
    }
    const Eigen::Vector4d delta = lu.solve(-F);

    bool accepted = false;
    double lambda = 1.0;
    for (int h = 0; h < 12; ++h, lambda *= 0.5) {
      const DiscPoint q1 =
          clamp_to_disc({p1.x + lambda * delta(0), p1.y + lambda * delta(1)},
                        opt.rmax);
      const DiscPoint q2 =
          clamp_to_disc({p2.x + lambda * delta(2), p2.y + lambda * delta(3)},
                        opt.rmax);
      const double res_trial = residual(q1, q2);
      if (res_trial < res) {
        p1 = q1;
        p2 = q2;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.failure = "no residual decrease (stalled)";
      out.iters = iter;
      return out;
    }
    if (dist2(p1, p2) < 1e-12) {
      out.failure = "diagonal collapse";
      out.iters = iter;
      return out;
    }
  }
  out.failure = "max iterations exceeded";
  out.iters = opt.max_iter;
  return out;
}

namespace {

void canonicalize(DoublePointRecord& r) {
  // Swapping the pair leaves jac_det (block column swap is even, the sign
  // flip hits all four columns) and hence the sign unchanged.
  if (r.p2.x < r.p1.x || (r.p2.x == r.p1.x && r.p2.y < r.p1.y))
    std::swap(r.p1, r.p2);
}

double pair_dist(const DoublePointRecord& a, const DoublePointRecord& b) {
  const double direct = std::max(std::sqrt(dist2(a.p1, b.p1)),
                                 std::sqrt(dist2(a.p2, b.p2)));
  const double crossed = std::max(std::sqrt(dist2(a.p1, b.p2)),
                                  std::sqrt(dist2(a.p2, b.p1)));
  return std::min(direct, crossed);
}

}  // namespace

std::vector<DoublePointRecord> deduplicate(
    std::vector<DoublePointRecord> records, double dedup_tol) {
  if (!(dedup_tol > 0.0))
    throw std::invalid_argument("deduplicate: need dedup_tol > 0");
  std::vector<DoublePointRecord> out;
  for (DoublePointRecord& r : records) {
    canonicalize(r);
    bool merged = false;
    for (DoublePointRecord& kept : out) {
      if (pair_dist(r, kept) < dedup_tol) {
        if (r.residual < kept.residual) kept = r;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(r);
  }
  return out;
}

int self_intersection_number(std::span<const DoublePointRecord> records) {
  int s = 0;
  for (const DoublePointRecord& r : records) s += r.sign;
  return s;
}

bool has_image_multiplicity(std::span<const DoublePointRecord> records,
                            double tol) {
  for (size_t i = 0; i < records.size(); ++i)
    for (size_t j = i + 1; j < records.size(); ++j)
      if (std::sqrt(img_dist2(records[i].image, records[j].image)) < tol)
        return true;
  return false;
}

DoublePointAnalysis refine_candidates(ImmersionR4& u,
                                      std::span<const CandidatePair> cands,
                                      double epsilon, double dedup_tol,
                                      const NewtonOptions& base) {
  DoublePointAnalysis an;
  an.n_candidates = cands.size();

  NewtonOptions opt = base;
  opt.epsilon = epsilon;

  std::vector<DoublePointRecord> raw;
  size_t n_failures = 0;
  constexpr size_t kMaxStoredFailures = 32;
  for (const CandidatePair& c : cands) {
    RefineResult r = newton_refine(u, c.a, c.b, opt);
    if (r.record) {
      raw.push_back(*r.record);
      ++an.n_converged;
    } else {
      ++n_failures;
      if (an.failures.size() < kMaxStoredFailures) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "candidate (%.6g, %.6g) x (%.6g, %.6g): %s", c.a.x,
                      c.a.y, c.b.x, c.b.y, r.failure.c_str());
        an.failures.emplace_back(buf);
      }
    }
  }
  if (n_failures > an.failures.size())
    an.failures.push_back("... and " +
                          std::to_string(n_failures - an.failures.size()) +
                          " more refinement failures");

  an.records = deduplicate(std::move(raw), dedup_tol);
  an.multiplicity_flag = has_image_multiplicity(an.records);
  return an;
}

DoublePointAnalysis find_double_points(ImmersionR4& u, const ImmersionGrid& g,
                                       double epsilon, double tau_img,
                                       double dedup_tol,
                                       const NewtonOptions& base) {
  return refine_candidates(u, generate_candidates(g, epsilon, tau_img),
                           epsilon, dedup_tol, base);
}

DoublePointAnalysis find_double_points(ImmersionR4& u, int grid_res,
                                       double epsilon, double tau_img,
                                       double dedup_tol,
                                       const NewtonOptions& base) {
  const ImmersionGrid g = eval_grid(u, grid_res);
  return find_double_points(u, g, epsilon, tau_img, dedup_tol, base);
}

void write_records(std::span<const DoublePointRecord> records,
                   std::string path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# x1 y1 x2 y2 u1 u2 u3 u4 residual jac_det sign\n";
  for (const DoublePointRecord& r : records) {
    out << fmt17(r.p1.x) << " " << fmt17(r.p1.y) << " " << fmt17(r.p2.x)
        << " " << fmt17(r.p2.y);
    for (double c : r.image) out << " " << fmt17(c);
    out << " " << fmt17(r.residual) << " " << fmt17(r.jac_det) << " "
        << r.sign << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<DoublePointRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<DoublePointRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::vector<std::string> tok;
    std::string t;
    while (row >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 11)
      throw std::runtime_error("bad double-point row in " + path + ": " +
                               line);
    DoublePointRecord r;
    r.p1 = {parse17(tok[0]), parse17(tok[1])};
    r.p2 = {parse17(tok[2]), parse17(tok[3])};
    for (int i = 0; i < 4; ++i) r.image[i] = parse17(tok[4 + i]);
    r.residual = parse17(tok[8]);
    r.jac_det = parse17(tok[9]);
    r.sign = std::stoi(tok[10]);
    if (r.sign != 1 && r.sign != -1)
      throw std::runtime_error("bad sign in " + path + ": " + tok[10]);
    out.push_back(r);
  }
  return out;
}

}  // namespace plateau
