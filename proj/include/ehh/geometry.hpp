// Loops, hyperlinks, surfaces and regions in R x R^3.
//
// Coordinates are indexed 0..3 with 0 the time axis. Loops are truncated
// Fourier series over s in [0,1]; surfaces and regions come from a small
// shape library placed by an affine map.

#pragma once

#include "ehh/liealg.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ehh::geometry {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

/// One coordinate of a loop: c + sum_n a_n cos(2 pi n s) + b_n sin(2 pi n s).
struct FourierSeries {
  double constant = 0.0;
  std::vector<double> cos;  // a_1, a_2, ...
  std::vector<double> sin;  // b_1, b_2, ...

  int harmonics() const;
};

struct LoopSample {
  Vec4 point;
  Vec4 velocity;
};

class FourierLoop {
 public:
  FourierLoop() = default;
  FourierLoop(std::array<FourierSeries, 4> coords, int orientation);

  /// Point and velocity at s. Orientation -1 returns (x(1-s), -x'(1-s)).
  LoopSample eval(double s) const;

  const std::array<FourierSeries, 4>& coords() const { return coords_; }
  int orientation() const { return orientation_; }
  int harmonics() const;

  FourierLoop reversed() const;
  FourierLoop translated(const Vec4& shift) const;

  /// Circle of radius r in the plane spanned by axes (a, b), centred at
  /// `center`, traversed once counter-clockwise from center + r e_a.
  static FourierLoop circle(const Vec4& center, double radius, int axis_a, int axis_b,
                            int orientation = 1);

 private:
  LoopSample eval_forward(double s) const;

  std::array<FourierSeries, 4> coords_{};
  int orientation_ = 1;
};

/// Fourier re-fit of s -> x(warp(s)) with `harmonics` terms per coordinate.
/// `warp` must be a smooth increasing bijection of [0,1] with warp(s) - s
/// periodic.
FourierLoop reparametrize(const FourierLoop& loop, const std::function<double(double)>& warp,
                          int harmonics);

/// Loops with optional per-loop colors (matter) or none (geometric).
struct Hyperlink {
  std::vector<FourierLoop> loops;
  std::vector<liealg::ColoredRep> colors;

  std::size_t size() const { return loops.size(); }
  bool empty() const { return loops.empty(); }
  bool colored() const { return !colors.empty(); }
};

struct TimelikeViolation {
  enum class Kind { spatial_coincidence, time_coincidence };
  Kind kind;
  std::size_t loop_a, loop_b;
  double s_a, s_b;
};

/// Grid-based time-like check over all sampled point pairs. The spatial
/// separation condition is checked for every pair of distinct samples; the
/// coordinate-coincidence condition is checked between distinct loops.
std::vector<TimelikeViolation> validate_timelike(const std::vector<FourierLoop>& loops,
                                                 int grid = 256, double tol = 1e-6);

std::vector<TimelikeViolation> validate_timelike(const Hyperlink& h, int grid = 256,
                                                 double tol = 1e-6);

/// Smallest sampled R^4 distance between points of two loops.
double min_distance(const FourierLoop& a, const FourierLoop& b, int grid = 256);

/// Axis-aligned box in parameter space, lo[i] < hi[i].
template <std::size_t D>
struct Box {
  std::array<double, D> lo{};
  std::array<double, D> hi{};

  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < D; ++i) v *= hi[i] - lo[i];
    return v;
  }
  static Box unit() {
    Box b;
    b.hi.fill(1.0);
    return b;
  }
};

/// Throws std::invalid_argument unless the boxes lie in the unit cube,
/// are pairwise disjoint (up to measure zero) and cover it.
template <std::size_t D>
void validate_partition(const std::vector<Box<D>>& cells);

struct SurfaceCell {
  Box<2> box;
  std::optional<liealg::ColoredRep> label;
};

/// x -> matrix * x + offset, matrix rows indexed by the output coordinate.
struct Affine4x3 {
  std::array<std::array<double, 3>, 4> matrix{};
  Vec4 offset{};

  /// Places local (x, y, z) at (t0, x, y, z).
  static Affine4x3 spatial(double time = 0.0);
};

/// The six independent J_ab = d_t s_a d_tb s_b - d_tb s_a d_t s_b, held as a
/// full antisymmetric 4x4 array.
struct SurfaceJacobians {
  std::array<std::array<double, 4>, 4> J{};

  double operator()(int a, int b) const { return J[a][b]; }
  /// (J23, J31, J12)
  Vec3 j_sigma() const { return {J[2][3], J[3][1], J[1][2]}; }
  /// (J01, J02, J03)
  Vec3 k_sigma() const { return {J[0][1], J[0][2], J[0][3]}; }
};

class Surface {
 public:
  enum class Kind { planar_rectangle, disk, torus_patch };

  struct Params {
    double width = 1.0;   // rectangle
    double height = 1.0;  // rectangle
    double radius = 1.0;  // disk
    double major_radius = 2.0, minor_radius = 0.5;       // torus patch
    double theta0 = 0.0, theta1 = 1.0;                   // torus patch, radians
    double phi0 = 0.0, phi1 = 1.0;                       // torus patch, radians
  };

  Surface(Kind kind, Params params, Affine4x3 placement, std::vector<SurfaceCell> partition);

  Kind kind() const { return kind_; }
  const Params& params() const { return params_; }
  const Affine4x3& placement() const { return placement_; }
  const std::vector<SurfaceCell>& partition() const { return partition_; }

  Vec4 point(double t, double tb) const;
  /// (d sigma / dt, d sigma / dtb)
  std::pair<Vec4, Vec4> tangents(double t, double tb) const;
  SurfaceJacobians jacobians(double t, double tb) const;

  bool planar() const { return kind_ != Kind::torus_patch; }
  /// True when the surface is planar with constant x0 and x1, i.e. it
  /// lies in a translate of the x2-x3 plane.
  bool parallel_to_x2x3() const;

  Surface translated(const Vec4& shift) const;
  Surface with_partition(std::vector<SurfaceCell> partition) const;

 private:
  Vec3 local(double t, double tb) const;
  std::pair<Vec3, Vec3> local_tangents(double t, double tb) const;

  Kind kind_;
  Params params_;
  Affine4x3 placement_;
  std::vector<SurfaceCell> partition_;
};

Surface::Kind surface_kind_from_string(const std::string& s);
std::string to_string(Surface::Kind k);

SurfaceJacobians surface_jacobians(const Surface& surf, double t, double tb);

/// Affine image r -> offset + matrix * r of the unit cube, placed at time 0.
class Region {
 public:
  Region(std::array<std::array<double, 3>, 3> matrix, Vec3 offset,
         std::vector<Box<3>> partition);

  Vec3 spatial_point(const std::array<double, 3>& r) const;
  /// (0, rho(r))
  Vec4 point(const std::array<double, 3>& r) const;
  double abs_jacobian() const { return abs_det_; }
  const std::vector<Box<3>>& partition() const { return partition_; }
  const std::array<std::array<double, 3>, 3>& matrix() const { return matrix_; }
  const Vec3& offset() const { return offset_; }

  /// Parameter-space preimage of a spatial point.
  std::array<double, 3> preimage(const Vec3& x) const;
  bool contains(const Vec3& x, double tol = 0.0) const;

  Region translated(const Vec3& shift) const;

 private:
  std::array<std::array<double, 3>, 3> matrix_;
  std::array<std::array<double, 3>, 3> inverse_;
  Vec3 offset_;
  double abs_det_;
  std::vector<Box<3>> partition_;
};

/// Sampled R^4 distance from a loop to the region {0} x R. Zero when a
/// sample lies inside.
double min_distance(const FourierLoop& loop, const Region& region, int grid = 256);
/// Sampled R^4 distance from a loop to a surface.
double min_distance(const FourierLoop& loop, const Surface& surf, int loop_grid = 256,
                    int surf_grid = 64);

}  // namespace ehh::geometry
