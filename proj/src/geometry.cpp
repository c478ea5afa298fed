#include "ehh/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ehh::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dist4(const Vec4& a, const Vec4& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Indices of the `keep` smallest sampled local minima of a periodic sequence.
std::vector<std::size_t> local_minima(const std::vector<double>& v, std::size_t keep) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k)
    if (v[k] <= v[(k + n - 1) % n] && v[k] <= v[(k + 1) % n]) idx.push_back(k);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  if (idx.size() > keep) idx.resize(keep);
  return idx;
}

// golden section on [s - h, s + h]
template <class F>
double golden_min(F&& f, double s, double h) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = s - h, b = s + h;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

// ---------------------------------------------------------------- loops

int FourierSeries::harmonics() const {
  return static_cast<int>(std::max(cos.size(), sin.size()));
}

FourierLoop::FourierLoop(std::array<FourierSeries, 4> coords, int orientation)
    : coords_(std::move(coords)), orientation_(orientation) {
  if (orientation != 1 && orientation != -1) {
    throw std::invalid_argument("loop orientation must be +1 or -1");
  }
  for (const auto& c : coords_) {
    for (double v : c.cos)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite Fourier coefficient");
    for (double v : c.sin)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite Fourier coefficient");
    if (!std::isfinite(c.constant)) throw std::invalid_argument("non-finite Fourier coefficient");
  }
}

int FourierLoop::harmonics() const {
  int h = 0;
  for (const auto& c : coords_) h = std::max(h, c.harmonics());
  return h;
}

LoopSample FourierLoop::eval_forward(double s) const {
  LoopSample out{};
  const int h = harmonics();
  // cos/sin of 2 pi n s by angle addition from the first harmonic
  const double c1 = std::cos(kTwoPi * s);
  const double s1 = std::sin(kTwoPi * s);
  double cn = 1.0, sn = 0.0;
  for (int a = 0; a < 4; ++a) {
    out.point[a] = coords_[a].constant;
    out.velocity[a] = 0.0;
  }
  for (int n = 1; n <= h; ++n) {
    const double cnext = cn * c1 - sn * s1;
    const double snext = sn * c1 + cn * s1;
    cn = cnext;
    sn = snext;
    const double w = kTwoPi * n;
    for (int a = 0; a < 4; ++a) {
      const auto& c = coords_[a];
      const std::size_t idx = static_cast<std::size_t>(n - 1);
      const double ac = idx < c.cos.size() ? c.cos[idx] : 0.0;
      const double bs = idx < c.sin.size() ? c.sin[idx] : 0.0;
      out.point[a] += ac * cn + bs * sn;
      out.velocity[a] += w * (bs * cn - ac * sn);
    }
  }
  return out;
}

LoopSample FourierLoop::eval(double s) const {
  if (orientation_ == 1) return eval_forward(s);
  LoopSample m = eval_forward(1.0 - s);
  for (double& v : m.velocity) v = -v;
  return m;
}

FourierLoop FourierLoop::reversed() const { return FourierLoop(coords_, -orientation_); }

FourierLoop FourierLoop::translated(const Vec4& shift) const {
  auto c = coords_;
  for (int a = 0; a < 4; ++a) c[a].constant += shift[a];
  return FourierLoop(std::move(c), orientation_);
}

FourierLoop FourierLoop::circle(const Vec4& center, double radius, int axis_a, int axis_b,
                                int orientation) {
  if (axis_a == axis_b || axis_a < 0 || axis_a > 3 || axis_b < 0 || axis_b > 3) {
    throw std::invalid_argument("circle needs two distinct axes in 0..3");
  }
  std::array<FourierSeries, 4> c;
  for (int a = 0; a < 4; ++a) c[a].constant = center[a];
  c[axis_a].cos = {radius};
  c[axis_b].sin = {radius};
  return FourierLoop(std::move(c), orientation);
}

FourierLoop reparametrize(const FourierLoop& loop, const std::function<double(double)>& warp,
                          int harmonics) {
  if (harmonics < 1) throw std::invalid_argument("reparametrize needs harmonics >= 1");
  const int m = 4 * harmonics + 8;
  std::vector<Vec4> samples(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    samples[static_cast<std::size_t>(k)] =
        loop.eval(warp(static_cast<double>(k) / m)).point;
  }
  std::array<FourierSeries, 4> c;
  for (int a = 0; a < 4; ++a) {
    double mean = 0.0;
    for (const auto& p : samples) mean += p[a];
    c[a].constant = mean / m;
    c[a].cos.assign(static_cast<std::size_t>(harmonics), 0.0);
    c[a].sin.assign(static_cast<std::size_t>(harmonics), 0.0);
    for (int n = 1; n <= harmonics; ++n) {
      double ac = 0.0, bs = 0.0;
      for (int k = 0; k < m; ++k) {
        const double ang = kTwoPi * n * k / m;
        ac += samples[static_cast<std::size_t>(k)][a] * std::cos(ang);
        bs += samples[static_cast<std::size_t>(k)][a] * std::sin(ang);
      }
      c[a].cos[static_cast<std::size_t>(n - 1)] = 2.0 * ac / m;
      c[a].sin[static_cast<std::size_t>(n - 1)] = 2.0 * bs / m;
    }
  }
  // samples were taken along the oriented traversal
  return FourierLoop(std::move(c), 1);
}

// ---------------------------------------------------------------- hyperlinks

std::vector<TimelikeViolation> validate_timelike(const std::vector<FourierLoop>& loops, int grid,
                                                 double tol) {
  if (grid < 16) throw std::invalid_argument("time-like check needs grid >= 16");
  std::vector<std::vector<Vec4>> pts(loops.size());
  for (std::size_t l = 0; l < loops.size(); ++l) {
    pts[l].resize(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) {
      pts[l][static_cast<std::size_t>(k)] = loops[l].eval(static_cast<double>(k) / grid).point;
    }
  }
  std::vector<TimelikeViolation> out;
  for (std::size_t la = 0; la < loops.size(); ++la) {
    for (std::size_t lb = la; lb < loops.size(); ++lb) {
      const bool same = la == lb;
      for (int ka = 0; ka < grid; ++ka) {
        for (int kb = same ? ka + 1 : 0; kb < grid; ++kb) {
          const Vec4& p = pts[la][static_cast<std::size_t>(ka)];
          const Vec4& q = pts[lb][static_cast<std::size_t>(kb)];
          const double d1 = p[1] - q[1], d2 = p[2] - q[2], d3 = p[3] - q[3];
          const double spatial = std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
          const double sa = static_cast<double>(ka) / grid;
          const double sb = static_cast<double>(kb) / grid;
          if (spatial <= tol) {
            out.push_back({TimelikeViolation::Kind::spatial_coincidence, la, lb, sa, sb});
            continue;
          }
          if (same) continue;
          const int agree = (std::abs(d1) <= tol) + (std::abs(d2) <= tol) + (std::abs(d3) <= tol);
          if (agree >= 2 && std::abs(p[0] - q[0]) <= tol) {
            out.push_back({TimelikeViolation::Kind::time_coincidence, la, lb, sa, sb});
          }
        }
      }
    }
  }
  return out;
}

std::vector<TimelikeViolation> validate_timelike(const Hyperlink& h, int grid, double tol) {
  return validate_timelike(h.loops, grid, tol);
}

double min_distance(const FourierLoop& a, const FourierLoop& b, int grid) {
  std::vector<Vec4> pb(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) pb[static_cast<std::size_t>(k)] = b.eval(double(k) / grid).point;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const Vec4 p = a.eval(double(k) / grid).point;
    for (const auto& q : pb) best = std::min(best, dist4(p, q));
  }
  return best;
}

// ---------------------------------------------------------------- partitions

template <std::size_t D>
void validate_partition(const std::vector<Box<D>>& cells) {
  constexpr double eps = 1e-12;
  if (cells.empty()) throw std::invalid_argument("partition is empty");
  double total = 0.0;
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < D; ++i) {
      if (!(c.lo[i] >= -eps && c.hi[i] <= 1.0 + eps && c.lo[i] < c.hi[i])) {
        throw std::invalid_argument("partition cell outside the unit cube or empty");
      }
    }
    total += c.volume();
  }
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      double overlap = 1.0;
      for (std::size_t i = 0; i < D; ++i) {
        const double lo = std::max(cells[a].lo[i], cells[b].lo[i]);
        const double hi = std::min(cells[a].hi[i], cells[b].hi[i]);
        overlap *= std::max(0.0, hi - lo);
      }
      if (overlap > eps) {
        throw std::invalid_argument("partition cells " + std::to_string(a) + " and " +
                                    std::to_string(b) + " overlap");
      }
    }
  }
  // disjoint cells inside the cube with total volume 1 cover it
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("partition does not cover the unit cube (volume " +
                                std::to_string(total) + ")");
  }
}

template void validate_partition<2>(const std::vector<Box<2>>&);
template void validate_partition<3>(const std::vector<Box<3>>&);

// ---------------------------------------------------------------- surfaces

Affine4x3 Affine4x3::spatial(double time) {
  Affine4x3 a;
  a.matrix[1] = {1.0, 0.0, 0.0};
  a.matrix[2] = {0.0, 1.0, 0.0};
  a.matrix[3] = {0.0, 0.0, 1.0};
  a.offset = {time, 0.0, 0.0, 0.0};
  return a;
}

Surface::Surface(Kind kind, Params params, Affine4x3 placement, std::vector<SurfaceCell> partition)
    : kind_(kind), params_(params), placement_(placement), partition_(std::move(partition)) {
  if (partition_.empty()) partition_.push_back({Box<2>::unit(), std::nullopt});
  std::vector<Box<2>> boxes;
  for (const auto& c : partition_) boxes.push_back(c.box);
  validate_partition(boxes);
  switch (kind_) {
    case Kind::planar_rectangle:
      if (!(params_.width > 0 && params_.height > 0))
        throw std::invalid_argument("rectangle needs positive width and height");
      break;
    case Kind::disk:
      if (!(params_.radius > 0)) throw std::invalid_argument("disk needs positive radius");
      break;
    case Kind::torus_patch:
      if (!(params_.minor_radius > 0 && params_.major_radius > params_.minor_radius))
        throw std::invalid_argument("torus patch needs major_radius > minor_radius > 0");
      if (params_.theta1 == params_.theta0 || params_.phi1 == params_.phi0)
        throw std::invalid_argument("torus patch angle ranges must be non-empty");
      break;
  }
}

Vec3 Surface::local(double t, double tb) const {
  switch (kind_) {
    case Kind::planar_rectangle:
      return {params_.width * t, params_.height * tb, 0.0};
    case Kind::disk: {
      const double r = params_.radius * t, a = kTwoPi * tb;
      return {r * std::cos(a), r * std::sin(a), 0.0};
    }
    case Kind::torus_patch: {
      const double th = params_.theta0 + t * (params_.theta1 - params_.theta0);
      const double ph = params_.phi0 + tb * (params_.phi1 - params_.phi0);
      const double ring = params_.major_radius + params_.minor_radius * std::cos(ph);
      return {ring * std::cos(th), ring * std::sin(th), params_.minor_radius * std::sin(ph)};
    }
  }
  return {};
}

std::pair<Vec3, Vec3> Surface::local_tangents(double t, double tb) const {
  switch (kind_) {
    case Kind::planar_rectangle:
      return {{params_.width, 0.0, 0.0}, {0.0, params_.height, 0.0}};
    case Kind::disk: {
      const double R = params_.radius, a = kTwoPi * tb;
      return {{R * std::cos(a), R * std::sin(a), 0.0},
              {-kTwoPi * R * t * std::sin(a), kTwoPi * R * t * std::cos(a), 0.0}};
    }
    case Kind::torus_patch: {
      const double dth = params_.theta1 - params_.theta0;
      const double dph = params_.phi1 - params_.phi0;
      const double th = params_.theta0 + t * dth;
      const double ph = params_.phi0 + tb * dph;
      const double ring = params_.major_radius + params_.minor_radius * std::cos(ph);
      const double r = params_.minor_radius;
      return {{-ring * std::sin(th) * dth, ring * std::cos(th) * dth, 0.0},
              {-r * std::sin(ph) * std::cos(th) * dph, -r * std::sin(ph) * std::sin(th) * dph,
               r * std::cos(ph) * dph}};
    }
  }
  return {};
}

Vec4 Surface::point(double t, double tb) const {
  const Vec3 x = local(t, tb);
  Vec4 out = placement_.offset;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 3; ++c) out[a] += placement_.matrix[a][c] * x[c];
  return out;
}

std::pair<Vec4, Vec4> Surface::tangents(double t, double tb) const {
  const auto [lt, ltb] = local_tangents(t, tb);
  Vec4 dt{}, dtb{};
  for (int a = 0; a < 4; ++a) {
    for (int c = 0; c < 3; ++c) {
      dt[a] += placement_.matrix[a][c] * lt[c];
      dtb[a] += placement_.matrix[a][c] * ltb[c];
    }
  }
  return {dt, dtb};
}

SurfaceJacobians Surface::jacobians(double t, double tb) const {
  const auto [dt, dtb] = tangents(t, tb);
  SurfaceJacobians j;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const double v = dt[a] * dtb[b] - dtb[a] * dt[b];
      j.J[a][b] = v;
      j.J[b][a] = -v;
    }
  }
  return j;
}

bool Surface::parallel_to_x2x3() const {
  if (!planar()) return false;
  for (int row : {0, 1})
    for (int c : {0, 1})
      if (placement_.matrix[row][c] != 0.0) return false;
  return true;
}

Surface Surface::translated(const Vec4& shift) const {
  Affine4x3 p = placement_;
  for (int a = 0; a < 4; ++a) p.offset[a] += shift[a];
  return Surface(kind_, params_, p, partition_);
}

Surface Surface::with_partition(std::vector<SurfaceCell> partition) const {
  return Surface(kind_, params_, placement_, std::move(partition));
}

Surface::Kind surface_kind_from_string(const std::string& s) {
  if (s == "planar-rectangle") return Surface::Kind::planar_rectangle;
  if (s == "disk") return Surface::Kind::disk;
  if (s == "torus-patch") return Surface::Kind::torus_patch;
  throw std::invalid_argument("unknown surface kind '" + s + "'");
}

std::string to_string(Surface::Kind k) {
  switch (k) {
    case Surface::Kind::planar_rectangle: return "planar-rectangle";
    case Surface::Kind::disk: return "disk";
    case Surface::Kind::torus_patch: return "torus-patch";
  }
  return "?";
}

SurfaceJacobians surface_jacobians(const Surface& surf, double t, double tb) {
  return surf.jacobians(t, tb);
}

double min_distance(const FourierLoop& loop, const Surface& surf, int loop_grid, int surf_grid) {
  std::vector<Vec4> sp;
  sp.reserve(static_cast<std::size_t>((surf_grid + 1) * (surf_grid + 1)));
  for (int a = 0; a <= surf_grid; ++a)
    for (int b = 0; b <= surf_grid; ++b)
      sp.push_back(surf.point(double(a) / surf_grid, double(b) / surf_grid));
  std::vector<double> d(static_cast<std::size_t>(loop_grid));
  std::vector<std::size_t> arg(d.size());
  for (int k = 0; k < loop_grid; ++k) {
    const Vec4 p = loop.eval(double(k) / loop_grid).point;
    d[k] = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < sp.size(); ++m) {
      const double e = dist4(p, sp[m]);
      if (e < d[k]) d[k] = e, arg[k] = m;
    }
  }
  double best = *std::min_element(d.begin(), d.end());

  // grids miss transverse crossings; polish the best candidates with
  // clamped Gauss-Newton on (s, t, tb)
  for (std::size_t k : local_minima(d, 8)) {
    double s = double(k) / loop_grid;
    double t = double(arg[k] / (surf_grid + 1)) / surf_grid;
    double tb = double(arg[k] % (surf_grid + 1)) / surf_grid;
    for (int it = 0; it < 40; ++it) {
      const LoopSample ls = loop.eval(s);
      const Vec4 q = surf.point(t, tb);
      const auto [tt, ttb] = surf.tangents(t, tb);
      Eigen::Matrix<double, 4, 3> J;
      Eigen::Vector4d r;
      for (int i = 0; i < 4; ++i) {
        r[i] = ls.point[i] - q[i];
        J(i, 0) = ls.velocity[i];
        J(i, 1) = -tt[i];
        J(i, 2) = -ttb[i];
      }
      best = std::min(best, r.norm());
      Eigen::Matrix3d n = J.transpose() * J;
      n += 1e-12 * (n.trace() + 1.0) * Eigen::Matrix3d::Identity();
      const Eigen::Vector3d step = n.ldlt().solve(-J.transpose() * r);
      if (!step.allFinite()) break;
      s += step[0];
      t = std::clamp(t + step[1], 0.0, 1.0);
      tb = std::clamp(tb + step[2], 0.0, 1.0);
      if (step.norm() < 1e-15) break;
    }
    best = std::min(best, dist4(loop.eval(s).point, surf.point(t, tb)));
  }
  return best;
}

// ---------------------------------------------------------------- regions

Region::Region(std::array<std::array<double, 3>, 3> matrix, Vec3 offset,
               std::vector<Box<3>> partition)
    : matrix_(matrix), offset_(offset), partition_(std::move(partition)) {
  const double det = det3(matrix_);
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw std::invalid_argument("region affine map is singular");
  }
  abs_det_ = std::abs(det);
  const auto& m = matrix_;
  inverse_[0] = {(m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
                 (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
                 (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det};
  inverse_[1] = {(m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det,
                 (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
                 (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det};
  inverse_[2] = {(m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det,
                 (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
                 (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det};
  if (partition_.empty()) partition_.push_back(Box<3>::unit());
  validate_partition(partition_);
}

Vec3 Region::spatial_point(const std::array<double, 3>& r) const {
  Vec3 x = offset_;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) x[i] += matrix_[i][c] * r[c];
  return x;
}

Vec4 Region::point(const std::array<double, 3>& r) const {
  const Vec3 x = spatial_point(r);
  return {0.0, x[0], x[1], x[2]};
}

std::array<double, 3> Region::preimage(const Vec3& x) const {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) r[i] += inverse_[i][c] * (x[c] - offset_[c]);
  return r;
}

bool Region::contains(const Vec3& x, double tol) const {
  const auto r = preimage(x);
  for (double v : r)
    if (v < -tol || v > 1.0 + tol) return false;
  return true;
}

Region Region::translated(const Vec3& shift) const {
  Vec3 o = offset_;
  for (int i = 0; i < 3; ++i) o[i] += shift[i];
  return Region(matrix_, o, partition_);
}

double min_distance(const FourierLoop& loop, const Region& region, int grid) {
  auto dist = [&](double s) {
    const Vec4 p = loop.eval(s).point;
    const Vec3 x{p[1], p[2], p[3]};
    auto r = region.preimage(x);
    for (double& v : r) v = std::clamp(v, 0.0, 1.0);
    // clamped preimage: exact inside, an upper bound outside
    const Vec3 y = region.spatial_point(r);
    double q = p[0] * p[0];
    for (int i = 0; i < 3; ++i) q += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(q);
  };
  std::vector<double> d(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) d[k] = dist(double(k) / grid);
  double best = *std::min_element(d.begin(), d.end());
  for (std::size_t k : local_minima(d, 8))
    best = std::min(best, golden_min(dist, double(k) / grid, 1.0 / grid));
  return best;
}

}  // namespace ehh::geometry
