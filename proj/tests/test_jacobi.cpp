#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tube/jacobi.hpp"

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

SasakiTangent bundle_tangent(const NormalBundlePoint& p, double h, double v) {
  SasakiTangent t;
  t.base = p;
  t.horizontal = one(h);
  t.vertical = one(v);
  return t;
}

}  // namespace

TEST_CASE("flat fields are affine and the integrator reproduces them exactly") {
  FlatComplexSpace m(1);
  AmbientPoint p{0, two(0.0, 0.0)};
  const GeodesicSegment seg = make_segment(m, p, two(1.0, 0.0), 1.0);
  const Vec j0 = two(0.2, -0.1), dj0 = two(0.5, 1.0);
  const JacobiPath path = integrate_jacobi(m, seg, j0, dj0, nullptr, 100);
  for (const auto& st : path.states) {
    CHECK((st.value - (j0 + st.s * dj0)).norm() < 1e-12);
  }
  // J(0) = 0, |nabla J(0)| = 1: |J(s)| = s
  const JacobiState st = closed_form_jacobi(m, seg, two(0.0, 0.0), two(0.0, 1.0), 0.7);
  CHECK(st.value.norm() == doctest::Approx(0.7));
}

TEST_CASE("sphere closed form: sin and cos profiles") {
  RoundSphere m(1.0);
  AmbientPoint p{0, two(0.3, -0.2)};
  Rng rng(3);
  Vec dir = rng.normal_vec(2);
  const Mat g = m.metric_matrix(p);
  dir /= std::sqrt(dir.dot(g * dir));  // unit speed
  const GeodesicSegment seg = make_segment(m, p, dir, 1.0);
  // J(0) = 0, |nabla J(0)| = 1, J perpendicular to the velocity
  const GeodesicFrame gf0 = m.geodesic_frame(p, dir, 0.0);
  const Vec e2 = gf0.frame.col(1);
  JacobiState st = closed_form_jacobi(m, seg, 0.0 * e2, e2, 1.0);
  CHECK(st.value.norm() == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
  // J(0) = E perpendicular, nabla J(0) = 0: |J(s)| = |cos s|
  st = closed_form_jacobi(m, seg, e2, 0.0 * e2, 0.6);
  CHECK(st.value.norm() == doctest::Approx(std::cos(0.6)).epsilon(1e-12));
}

TEST_CASE("integrator matches the closed form on the sphere to 1e-8") {
  RoundSphere m(1.0);
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    AmbientPoint p{0, rng.uniform_vec(2, -0.7, 0.7)};
    const Vec dir = rng.normal_vec(2);
    const GeodesicSegment seg = make_segment(m, p, dir, 1.0);
    const Vec j0 = rng.normal_vec(2), dj0 = rng.normal_vec(2);
    const JacobiPath path = integrate_jacobi(m, seg, j0, dj0, nullptr, 1000);
    double worst = 0.0;
    for (size_t k = 0; k < path.states.size(); k += 100) {
      const JacobiState oracle = closed_form_jacobi(m, seg, j0, dj0, path.states[k].s);
      worst = std::max(worst, (oracle.value - path.states[k].value).norm() /
                                  std::max(1.0, oracle.value.norm()));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("energy bound holds for flat and sphere oracle fields") {
  FlatComplexSpace f(1);
  AmbientPoint p{0, two(0.0, 0.0)};
  const GeodesicSegment seg = make_segment(f, p, two(1.0, 0.0), 1.0);
  const JacobiPath path = integrate_jacobi(f, seg, two(1.0, 0.0), two(0.0, 1.0), nullptr, 200);
  for (double eps : {0.0, 2.0}) {
    const EnergyBoundReport rep = check_energy_bound(path, 0.0, 0.0, eps);
    CHECK(rep.pass);
    CHECK(rep.worst_margin >= 0.0);
  }
  RoundSphere m(1.0);
  AmbientPoint q{0, two(0.1, 0.4)};
  Rng rng(9);
  const GeodesicSegment seg2 = make_segment(m, q, rng.normal_vec(2), 1.0);
  const JacobiPath path2 =
      integrate_jacobi(m, seg2, rng.normal_vec(2), rng.normal_vec(2), nullptr, 500);
  for (double eps : {0.0, 2.0}) CHECK(check_energy_bound(path2, 1.0, 0.0, eps).pass);
  // second-difference defect estimate: truncation scales with h^2 speed^4
  CHECK(measured_defect(m, path2) < 1e-4);
  CHECK_THROWS_AS(check_energy_bound(path2, 1.0, 0.0, 3.0), InputError);
}

TEST_CASE("eval_F on the unit circle is the radial map") {
  auto c = unit_circle();
  NormalBundlePoint v{one(0.9), one(0.25)};
  const AmbientPoint q = eval_F(*c, v);
  CHECK(q.coords[0] == doctest::Approx((1.0 - 0.25) * std::cos(0.9)));
  CHECK(q.coords[1] == doctest::Approx((1.0 - 0.25) * std::sin(0.9)));
  // zero section maps to the base point
  NormalBundlePoint z{one(0.9), one(0.0)};
  CHECK((eval_F(*c, z).coords - c->immerse(one(0.9)).coords).norm() < 1e-15);
}

TEST_CASE("eval_F on the equator walks along meridians") {
  auto sph = std::make_shared<RoundSphere>(1.0);
  LatitudeCircleScene eq(sph, 0.5 * M_PI);
  const double xi = 0.3;
  NormalBundlePoint v{one(0.0), one(xi)};
  const AmbientPoint q = eval_F(eq, v);
  const Vec3 e = sph->embed(q);
  // colatitude pi/2 + xi on the meridian through theta = 0
  CHECK(e[2] == doctest::Approx(std::cos(0.5 * M_PI + xi)).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e[0] == doctest::Approx(std::sin(0.5 * M_PI + xi)).epsilon(1e-12));
}

TEST_CASE("dF on the circle: closed-form pushforwards") {
  auto c = unit_circle();
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const double th = rng.uniform(0.0, 2.0 * M_PI), xi = rng.uniform(-0.5, 0.5);
    NormalBundlePoint v{one(th), one(xi)};
    // horizontal pushforward scales by (1 - xi)
    const AmbientTangent fh = dF(*c, v, bundle_tangent(v, 1.0, 0.0));
    CHECK(fh.components.norm() == doctest::Approx(std::abs(1.0 - xi)).epsilon(1e-12));
    // vertical pushforward is the unit inward normal
    const AmbientTangent fv = dF(*c, v, bundle_tangent(v, 0.0, 1.0));
    CHECK(fv.components.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fv.components[0] == doctest::Approx(-std::cos(th)).epsilon(1e-10));
  }
}

TEST_CASE("dF at the zero section is the identity on horizontal and J on vertical") {
  auto c = unit_circle();
  const double th = 1.23;
  NormalBundlePoint v{one(th), one(0.0)};
  const AmbientTangent fh = dF(*c, v, bundle_tangent(v, 1.0, 0.0));
  CHECK(fh.components[0] == doctest::Approx(-std::sin(th)));
  CHECK(fh.components[1] == doctest::Approx(std::cos(th)));
  const AmbientTangent fv = dF(*c, v, bundle_tangent(v, 0.0, 1.0));
  CHECK(fv.components[0] == doctest::Approx(-std::cos(th)));
  CHECK(fv.components[1] == doctest::Approx(-std::sin(th)));
}

TEST_CASE("d2F vanishes on a straight line scene") {
  auto amb = std::make_shared<FlatComplexSpace>(1);
  GraphScene axis(amb, 0.0, 1.0);
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    NormalBundlePoint v{one(rng.uniform(0.0, 6.0)), one(rng.uniform(-0.4, 0.4))};
    SasakiTangent x = bundle_tangent(v, rng.normal(), rng.normal());
    SasakiTangent y = bundle_tangent(v, rng.normal(), rng.normal());
    const AmbientTangent dd = d2F(axis, v, x, y, 100);
    CHECK(dd.components.norm() < 1e-12);
  }
}

TEST_CASE("d2F agrees with its finite-difference route") {
  auto c = unit_circle();
  Rng rng(19);
  for (int i = 0; i < 10; ++i) {
    NormalBundlePoint v{one(rng.uniform(0.0, 6.0)), one(rng.uniform(-0.15, 0.15))};
    SasakiTangent x = bundle_tangent(v, rng.normal(), rng.normal());
    SasakiTangent y = bundle_tangent(v, rng.normal(), rng.normal());
    const AmbientTangent ode = d2F(*c, v, x, y, 1000);
    const AmbientTangent fd = d2F_finite_difference(*c, v, x, y);
    CHECK((ode.components - fd.components).norm() < 1e-6 * (1.0 + ode.components.norm()));
  }
  // and on the curved ambient
  auto sph = std::make_shared<RoundSphere>(1.0);
  LatitudeCircleScene lat(sph, 1.25);
  for (int i = 0; i < 5; ++i) {
    NormalBundlePoint v{one(rng.uniform(0.0, 3.0)), one(rng.uniform(-0.15, 0.15))};
    SasakiTangent x = bundle_tangent(v, rng.normal(), rng.normal());
    SasakiTangent y = bundle_tangent(v, rng.normal(), rng.normal());
    const AmbientTangent ode = d2F(lat, v, x, y, 1000);
    const AmbientTangent fd = d2F_finite_difference(lat, v, x, y);
    CHECK((ode.components - fd.components).norm() < 1e-5 * (1.0 + ode.components.norm()));
  }
}

TEST_CASE("pushforward energy bound on circle samples") {
  auto c = unit_circle();
  Rng rng(23);
  const double a0 = 1.0, c0 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double xi = rng.uniform(-0.9, 0.9);
    NormalBundlePoint v{one(rng.uniform(0.0, 6.28)), one(xi)};
    SasakiTangent x = bundle_tangent(v, rng.normal(), rng.normal());
    const double xn = sasaki_norm(*c, x);
    const AmbientTangent fx = dF(*c, v, x);
    const double lam = std::abs(xi);
    const double rhs = (1.0 + lam * lam * a0 * a0) * std::exp(1.0 + lam * lam * c0) * xn * xn;
    CHECK(fx.components.squaredNorm() <= rhs + 1e-9);
  }
}
