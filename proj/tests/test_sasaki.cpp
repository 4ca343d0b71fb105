#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tube/sasaki.hpp"

using namespace tube;

namespace {

Vec one(double v) {
  Vec x(1);
  x << v;
  return x;
}

Vec two(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

std::shared_ptr<CircleScene> unit_circle() {
  auto amb = std::make_shared<FlatComplexSpace>(1);
  return std::make_shared<CircleScene>(amb, 1.0, Vec::Zero(2));
}

std::shared_ptr<GraphScene> wavy() {
  auto amb = std::make_shared<FlatComplexSpace>(1);
  return std::make_shared<GraphScene>(amb, 0.3, 1.0);
}

}  // namespace

TEST_CASE("coordinate splits on an arclength chart") {
  auto c = unit_circle();
  NormalBundlePoint p{one(0.7), one(0.25)};
  // d/dx is purely horizontal when the Christoffel values vanish
  const SasakiTangent h = split(*c, p, two(1.0, 0.0));
  CHECK(h.horizontal[0] == 1.0);
  CHECK(h.vertical[0] == 0.0);
  // d/dxi is purely vertical with J-frame component 1
  const SasakiTangent v = split(*c, p, two(0.0, 1.0));
  CHECK(v.horizontal[0] == 0.0);
  CHECK(v.vertical[0] == 1.0);
}

TEST_CASE("split and lift are inverse on every scene") {
  std::vector<std::shared_ptr<LagrangianScene>> scenes{unit_circle(), wavy()};
  auto amb2 = std::make_shared<FlatComplexSpace>(2);
  scenes.push_back(std::make_shared<ProductTorusScene>(amb2, std::vector<double>{1.0, 1.5}));
  Rng rng(11);
  for (const auto& s : scenes) {
    const int n = s->dim();
    for (int i = 0; i < 300; ++i) {
      NormalBundlePoint p;
      p.x = rng.uniform_vec(n, 0.0, 3.0);
      p.xi = rng.normal_vec(n);
      const Vec coord = rng.normal_vec(2 * n);
      const Vec back = lift_to_coords(*s, split(*s, p, coord));
      CHECK((coord - back).norm() < 1e-12 * (1.0 + coord.norm()));
    }
  }
}

TEST_CASE("sasaki metric splits orthogonally and jtilde is an isometric involution") {
  auto g = wavy();
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    NormalBundlePoint p{one(rng.uniform(0.0, 6.28)), one(rng.uniform(-0.5, 0.5))};
    SasakiTangent h;
    h.base = p;
    h.horizontal = one(rng.normal());
    h.vertical = one(0.0);
    SasakiTangent v;
    v.base = p;
    v.horizontal = one(0.0);
    v.vertical = one(rng.normal());
    CHECK(sasaki_metric(*g, h, v) == 0.0);
    SasakiTangent x = h;
    x.vertical = v.vertical;
    CHECK(sasaki_metric(*g, x, x) ==
          doctest::Approx(sasaki_metric(*g, h, h) + sasaki_metric(*g, v, v)));
    const SasakiTangent jx = jtilde(*g, x);
    CHECK(sasaki_norm(*g, jx) == doctest::Approx(sasaki_norm(*g, x)));
    const SasakiTangent jjx = jtilde(*g, jx);
    CHECK((jjx.horizontal + x.horizontal).norm() == 0.0);
    CHECK((jjx.vertical + x.vertical).norm() == 0.0);
  }
}

TEST_CASE("canonical form: chart values on the unit circle") {
  auto c = unit_circle();
  NormalBundlePoint p{one(1.1), one(0.3)};
  CHECK(omega_tilde(*c, p, two(1, 0), two(0, 1)) == doctest::Approx(1.0));
  CHECK(omega_tilde(*c, p, two(1, 0), two(1, 0)) == 0.0);
  CHECK(omega_tilde(*c, p, two(0, 1), two(1, 0)) == doctest::Approx(-1.0));
}

TEST_CASE("canonical form equals G(Jtilde ., .) on all scenes") {
  std::vector<std::shared_ptr<LagrangianScene>> scenes{unit_circle(), wavy()};
  auto amb2 = std::make_shared<FlatComplexSpace>(2);
  scenes.push_back(std::make_shared<ProductTorusScene>(amb2, std::vector<double>{1.0, 0.7}));
  auto sph = std::make_shared<RoundSphere>(1.0);
  scenes.push_back(std::make_shared<LatitudeCircleScene>(sph, 1.3));
  Rng rng(17);
  for (const auto& s : scenes) {
    const int n = s->dim();
    for (int i = 0; i < 200; ++i) {
      NormalBundlePoint p;
      p.x = rng.uniform_vec(n, 0.0, 3.0);
      p.xi = rng.normal_vec(n) * 0.4;
      const Vec a = rng.normal_vec(2 * n), b = rng.normal_vec(2 * n);
      const double chart = omega_tilde(*s, p, a, b);
      const double structural = omega_tilde_via_structure(*s, split(*s, p, a), split(*s, p, b));
      CHECK(std::abs(chart - structural) < 1e-10 * (1.0 + a.norm() * b.norm()));
      CHECK(std::abs(chart + omega_tilde(*s, p, b, a)) < 1e-12 * (1.0 + a.norm() * b.norm()));
    }
  }
}

TEST_CASE("vertical-vertical derivative vanishes; flat scenes reduce to lifts") {
  auto g = wavy();
  NormalBundlePoint p{one(0.9), one(0.2)};
  const SasakiTangent vv =
      nabla_G(*g, p, Lift::Vertical, one(1.0), Lift::Vertical, one(2.0), one(0.0));
  CHECK(vv.horizontal.norm() == 0.0);
  CHECK(vv.vertical.norm() == 0.0);
  // R_L = 0 in dimension one: horizontal-horizontal is the lifted derivative
  const SasakiTangent hh =
      nabla_G(*g, p, Lift::Horizontal, one(1.0), Lift::Horizontal, one(2.0), one(0.37));
  CHECK(hh.horizontal[0] == doctest::Approx(0.37));
  CHECK(hh.vertical.norm() == 0.0);
  const SasakiTangent hv =
      nabla_G(*g, p, Lift::Horizontal, one(1.0), Lift::Vertical, one(2.0), one(0.41));
  CHECK(hv.vertical[0] == doctest::Approx(0.41));
  CHECK(hv.horizontal.norm() == 0.0);
}

TEST_CASE("G-parallel transport preserves the norm over a thousand steps") {
  std::vector<std::shared_ptr<LagrangianScene>> scenes{unit_circle(), wavy()};
  auto amb2 = std::make_shared<FlatComplexSpace>(2);
  scenes.push_back(std::make_shared<ProductTorusScene>(amb2, std::vector<double>{1.0, 1.5}));
  Rng rng(29);
  for (const auto& s : scenes) {
    const int n = s->dim();
    for (int i = 0; i < 10; ++i) {
      NormalBundlePoint p;
      p.x = rng.uniform_vec(n, 0.0, 3.0);
      p.xi = rng.normal_vec(n) * 0.3;
      SasakiTangent y;
      y.base = p;
      y.horizontal = rng.normal_vec(n);
      y.vertical = rng.normal_vec(n);
      SasakiTangent x0;
      x0.base = p;
      x0.horizontal = rng.normal_vec(n);
      x0.vertical = rng.normal_vec(n);
      const BundleCurve curve = canonical_curve(*s, p, y);
      const SasakiTangent xe = parallel_transport_G(*s, curve, x0, 1000);
      CHECK(std::abs(sasaki_norm(*s, xe) - sasaki_norm(*s, x0)) <
            1e-8 * (1.0 + sasaki_norm(*s, x0)));
      // constant curve leaves the vector unchanged
      const BundleCurve still = [&p](double) { return p; };
      const SasakiTangent same = parallel_transport_G(*s, still, x0, 50);
      CHECK((same.horizontal - x0.horizontal).norm() < 1e-12);
      CHECK((same.vertical - x0.vertical).norm() < 1e-12);
    }
  }
}

TEST_CASE("structure tensors are parallel when the base curvature vanishes") {
  auto g = wavy();
  Rng rng(41);
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    NormalBundlePoint p{one(rng.uniform(0.0, 6.0)), one(rng.uniform(-0.4, 0.4))};
    SasakiTangent y;
    y.base = p;
    y.horizontal = one(rng.normal());
    y.vertical = one(rng.normal());
    SasakiTangent x;
    x.base = p;
    x.horizontal = one(rng.normal());
    x.vertical = one(rng.normal());
    const BundleCurve curve = canonical_curve(*g, p, y);
    auto jx_back = [&](double a) {
      const SasakiTangent xa =
          parallel_transport_G(*g, [&](double b) { return curve(a * b); }, x, 32);
      return transport_G_back(*g, [&](double b) { return curve(a * b); }, jtilde(*g, xa), 32);
    };
    const SasakiTangent jp = jx_back(h), jm = jx_back(-h);
    const double deriv = std::hypot((jp.horizontal - jm.horizontal).norm() / (2.0 * h),
                                    (jp.vertical - jm.vertical).norm() / (2.0 * h));
    CHECK(deriv < 1e-5);
  }
}

TEST_CASE("fiber norm matches the chart norm") {
  auto g = wavy();
  const Vec x = one(0.8);
  const double gb = g->induced_metric(x)(0, 0);
  NormalBundlePoint p{x, one(0.5)};
  CHECK(fiber_norm(*g, p) == doctest::Approx(0.5 * std::sqrt(gb)));
}
