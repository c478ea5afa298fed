#include "ehh/integrands.hpp"

#include "scene_fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ehh;
using geometry::FourierLoop;

namespace {

constexpr double kPi = std::numbers::pi;

quadrature::QuadSpec spec() { return {}; }

Scene hopf() { return bundled("hopf_pair"); }

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("bundled scenes validate") {
  CHECK_NOTHROW(validate_scene(bundled("empty_geometric"), Observable::wilson));
  CHECK_NOTHROW(validate_scene(hopf(), Observable::wilson));
  CHECK_NOTHROW(validate_scene(bundled("pierced_square"), Observable::area));
  CHECK_NOTHROW(validate_scene(bundled("volume_box"), Observable::volume));
  CHECK_NOTHROW(validate_scene(bundled("curvature_tilted"), Observable::curvature));
}

TEST_CASE("scene validation errors") {
  Scene s = hopf();
  CHECK_THROWS_AS(validate_scene(s, Observable::area), SceneError);
  CHECK_THROWS_AS(validate_scene(s, Observable::volume), SceneError);

  Scene twice = s;
  twice.geometric.loops.push_back(twice.matter.loops[0]);
  try {
    validate_scene(twice, Observable::wilson);
    FAIL("expected a time-like violation");
  } catch (const SceneError& e) {
    CHECK(e.field() == "matter[0]");
  }

  Scene area = bundled("pierced_square");
  auto cells = area.surface->partition();
  cells[0].label = liealg::ColoredRep{4, 4};
  area.surface = area.surface->with_partition(cells);
  CHECK_THROWS_AS(validate_scene(area, Observable::area), SceneError);

  Scene touch = bundled("pierced_square");
  touch.matter.loops[0] = touch.matter.loops[0].translated({0.5, 0, 0, 0});
  CHECK_THROWS_AS(validate_scene(touch, Observable::area), SceneError);

  Scene tilted = bundled("curvature_tilted");
  tilted.matter = bundled("pierced_square").matter;
  CHECK_THROWS_AS(validate_scene(tilted, Observable::area), SceneError);

  Scene vol = bundled("volume_box");
  vol.matter.loops[0] = vol.matter.loops[0].translated({-0.4, 0, 0, 0});
  CHECK_THROWS_AS(validate_scene(vol, Observable::volume), SceneError);

  Scene curv = bundled("curvature_tilted");
  curv.geometric.loops[0] = curv.geometric.loops[0].translated({-0.3, 0, 0, 0});
  CHECK_THROWS_AS(validate_scene(curv, Observable::curvature), SceneError);
}

TEST_CASE("wilson exponent basic properties") {
  Scene s = hopf();
  const Complex th = wilson_exponent(s, 0, 10, spec());
  CHECK(std::abs(th) > 1.0);
  CHECK(std::abs(th.real()) < 1e-9 * std::abs(th));

  Scene s0 = s;
  s0.charge = 0;
  CHECK(wilson_exponent(s0, 0, 10, spec()) == Complex{0.0, 0.0});

  Scene s2 = s;
  s2.charge = -2.0;
  CHECK(wilson_exponent(s2, 0, 10, spec()) == -2.0 * th);

  const Complex rev = wilson_exponent(with_geometric_reversed(s), 0, 10, spec());
  CHECK(rel(rev, -th) < 1e-9);

  Scene far = s;
  far.geometric.loops[0] = far.geometric.loops[0].translated({0, 10, 0, 0});
  CHECK(std::abs(wilson_exponent(far, 0, 10, spec())) < 1e-12);
}

TEST_CASE("wilson exponent is additive over geometric loops") {
  Scene a = hopf();
  Scene b = a;
  b.geometric.loops[0] = FourierLoop::circle({-0.4, 0.0, -1.0, 0.2}, 0.8, 1, 2);
  Scene both = a;
  both.geometric.loops.push_back(b.geometric.loops[0]);
  validate_scene(both, Observable::wilson);
  const Complex ta = wilson_exponent(a, 0, 10, spec());
  const Complex tb = wilson_exponent(b, 0, 10, spec());
  const Complex tab = wilson_exponent(both, 0, 10, spec());
  CHECK(std::abs(tab - (ta + tb)) <= 1e-10 * std::abs(tab));
}

TEST_CASE("wilson exponent under reparametrization") {
  Scene s = hopf();
  Scene w = s;
  auto warp = [](double t) { return t + 0.3 * std::sin(2 * kPi * t) / (2 * kPi); };
  w.matter.loops[0] = geometry::reparametrize(s.matter.loops[0], warp, 24);
  w.geometric.loops[0] = geometry::reparametrize(s.geometric.loops[0], warp, 24);
  const Complex a = wilson_exponent(s, 0, 20, spec());
  const Complex b = wilson_exponent(w, 0, 20, spec());
  CHECK(rel(b, a) < 1e-3);
}

TEST_CASE("z_kappa") {
  Scene e = bundled("empty_geometric");
  for (double k : {5.0, 40.0}) CHECK(z_kappa(e, k, spec()) == Complex{3.0, 0.0});
  e.matter.loops.push_back(FourierLoop::circle({1, 0, 0, 0}, 0.5, 1, 3));
  e.matter.colors.push_back({2, 3});
  CHECK(z_kappa(e, 10, spec()) == Complex{3.0 * 7.0, 0.0});

  Scene h = hopf();
  const Complex z = z_kappa(h, 20, spec());
  CHECK(std::isfinite(z.real()));
  const Complex th = wilson_exponent(h, 0, 20, spec());
  const double lam = std::sqrt(3.0) / 2;
  // color (1/2, 1/2): two copies of 2 cos(lam theta)
  const Complex want = 2.0 * std::cos(lam * th) + 2.0 * std::cos(-lam * th);
  CHECK(rel(z, want) < 1e-12);
}

TEST_CASE("lambda diagnostic") {
  Scene s = hopf();
  Scene s0 = s;
  s0.charge = 0;
  for (const auto& c : lambda_kappa(s0, 0, 0.3, 5, spec())) CHECK(c == Complex{0.0, 0.0});

  for (double sb : {0.0, 0.25, 0.5, 0.75}) {
    double prev = 1e300;
    for (double k : {5.0, 10.0, 20.0, 40.0}) {
      const auto l = lambda_kappa(s, 0, sb, k, spec());
      const double n = k * std::sqrt(std::norm(l[0]) + std::norm(l[1]) + std::norm(l[2]));
      CHECK(n <= prev);
      if (n > 0.0) CHECK(n < prev);
      prev = n;
    }
    CHECK(prev < 1e-2);
  }
  Scene far = s;
  far.matter.loops[0] = far.matter.loops[0].translated({0, 20, 0, 0});
  const auto l = lambda_kappa(far, 0, 0.1, 5, spec());
  CHECK(std::sqrt(std::norm(l[0]) + std::norm(l[1]) + std::norm(l[2])) < 1e-30);
}

TEST_CASE("area brackets") {
  Scene s = bundled("pierced_square");
  const auto p = area_brackets(s, 10, spec());
  CHECK(p.plus.real() > 0);
  CHECK(p.minus == Complex{0.0, 0.0});  // j- = 0

  Scene q0 = s;
  q0.charge = 0;
  CHECK(area_path_integral(q0, 10, spec()) == Complex{0.0, 0.0});

  Scene q3 = s;
  q3.charge = -3;
  CHECK(area_brackets(q3, 10, spec()).plus.real() == doctest::Approx(3 * p.plus.real()).epsilon(1e-12));

  // color (1/2, 0) on the same geometry
  Scene half = s;
  half.matter.colors[0] = {1, 0};
  auto cells = half.surface->partition();
  cells[0].label = liealg::ColoredRep{1, 0};
  half.surface = half.surface->with_partition(cells);
  const auto ph = area_brackets(half, 10, spec());
  CHECK(std::abs(p.plus.real() / ph.plus.real() - std::sqrt(8.0 / 3.0)) < 1e-6 * std::sqrt(8.0 / 3.0));

  // a single transverse piercing tends to |q| sqrt(xi) sqrt(pi)/2
  const auto p40 = area_brackets(s, 40, spec());
  CHECK(p40.plus.real() == doctest::Approx(std::sqrt(2.0) * std::sqrt(kPi) / 2).epsilon(0.02));

  Scene far = s;
  far.surface = far.surface->translated({0, 0, 10, 0});
  const Complex v = area_path_integral(far, 10, spec());
  CHECK(std::abs(v) < 1e-12 * 3.0);

  // unlabeled cells contribute nothing
  Scene unl = s;
  auto c2 = unl.surface->partition();
  c2[0].label.reset();
  unl.surface = unl.surface->with_partition(c2);
  CHECK(area_brackets(unl, 10, spec()).plus == Complex{0.0, 0.0});
}

TEST_CASE("area bracket splits over a partition") {
  Scene s = bundled("pierced_square");
  const liealg::ColoredRep c{2, 0};
  std::vector<geometry::SurfaceCell> cells{{{{0, 0}, {0.5, 1}}, c}, {{{0.5, 0}, {1, 1}}, c}};
  Scene split = s;
  split.surface = s.surface->with_partition(cells);
  const double whole = area_brackets(s, 10, spec()).plus.real();
  const double parts = area_brackets(split, 10, spec()).plus.real();
  CHECK(parts == doctest::Approx(whole).epsilon(1e-3));
}

TEST_CASE("volume brackets") {
  Scene s = bundled("volume_box");
  const double k = 4;
  const auto q = volume_brackets(s, k, spec());
  CHECK(q.plus.real() > 0);
  CHECK(q.minus == Complex{0.0, 0.0});

  Scene half = s;
  half.matter.colors[0] = {1, 0};
  const auto qh = volume_brackets(half, k, spec());
  CHECK(q.plus.real() / qh.plus.real() == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  const Complex v1 = volume_path_integral(s, k, spec());
  Scene s3 = s;
  s3.charge = 3.0;
  CHECK(volume_path_integral(s3, k, spec()) == 9.0 * v1);
  Scene s0 = s;
  s0.charge = 0.0;
  CHECK(volume_path_integral(s0, k, spec()) == Complex{0.0, 0.0});

  Scene far = s;
  far.region = far.region->translated({10, 0, 0});
  CHECK(std::abs(volume_brackets(far, 10, spec()).plus) < 1e-12 * std::max(1.0, q.plus.real()));
}

TEST_CASE("volume: factored inner integral equals the generic nested route") {
  Scene s = bundled("volume_box");
  quadrature::QuadSpec sp;
  sp.nodes_per_panel = 6;
  sp.max_refinements = 2;
  sp.strict = false;
  const auto a = volume_brackets(s, 2.0, sp);
  const auto b = volume_brackets_nested(s, 2.0, sp);
  CHECK(std::abs(a.plus - b.plus) < 1e-10 * std::abs(b.plus));
}

TEST_CASE("curvature") {
  Scene s = bundled("curvature_tilted");
  const auto p = curvature_parts(s, 10, spec());
  CHECK(std::abs(p.a_plus) + std::abs(p.b) + std::abs(p.c) > 1e-3);
  CHECK(p.a_minus == -p.a_plus);
  CHECK(p.coeff.cplus == p.a_plus + p.c + p.b);
  CHECK(p.coeff.cminus == p.a_minus + p.c - p.b);

  const auto r = curvature_parts(with_geometric_reversed(s), 10, spec());
  CHECK(std::abs(r.a_plus + p.a_plus) <= 1e-6 * std::max(1.0, std::abs(p.a_plus)));
  CHECK(std::abs(r.b + p.b) <= 1e-6 * std::max(1.0, std::abs(p.b)));
  CHECK(std::abs(r.c - p.c) <= 1e-6 * std::max(1.0, std::abs(p.c)));

  Scene empty = s;
  empty.geometric.loops.clear();
  const auto [coeff, z] = curvature_path_integral(empty, 10, spec());
  CHECK(coeff.cplus == Complex{0.0, 0.0});
  CHECK(coeff.cminus == Complex{0.0, 0.0});
  CHECK(z == Complex{4.0, 0.0});

  Scene far = s;
  far.surface = far.surface->translated({0, 10, 0, 0});
  const auto f = curvature_parts(far, 10, spec());
  CHECK(std::abs(f.coeff.cplus) < 1e-12);
  CHECK(std::abs(f.coeff.cminus) < 1e-12);
}

TEST_CASE("observable names") {
  for (auto o : {Observable::wilson, Observable::area, Observable::volume, Observable::curvature,
                 Observable::diagnostics})
    CHECK(observable_from_string(to_string(o)) == o);
  CHECK_THROWS(observable_from_string("mass"));
}
