#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tube/ambient.hpp"

using namespace tube;

namespace {

AmbientPoint pt(const AmbientManifold& m, std::initializer_list<double> c, int chart = 0) {
  AmbientPoint p;
  p.chart_id = chart;
  p.coords = Vec(static_cast<int>(c.size()));
  int i = 0;
  for (double v : c) p.coords[i++] = v;
  (void)m;
  return p;
}

AmbientTangent tan_at(const AmbientPoint& p, std::initializer_list<double> c) {
  AmbientTangent t;
  t.base = p;
  t.components = Vec(static_cast<int>(c.size()));
  int i = 0;
  for (double v : c) t.components[i++] = v;
  return t;
}

}  // namespace

TEST_CASE("flat metric and complex structure") {
  FlatComplexSpace m(1);
  const AmbientPoint p = pt(m, {0.3, -0.2});
  const AmbientTangent e1 = tan_at(p, {1.0, 0.0});
  const AmbientTangent e2 = tan_at(p, {0.0, 1.0});
  CHECK(metric_eval(m, p, e1, e1) == 1.0);
  CHECK(metric_eval(m, p, tan_at(p, {0.0, 0.0}), e1) == 0.0);
  const AmbientTangent je1 = complex_structure(m, p, e1);
  CHECK(je1.components[0] == 0.0);
  CHECK(je1.components[1] == 1.0);
  const AmbientTangent jje1 = complex_structure(m, p, je1);
  CHECK(jje1.components[0] == -1.0);
  CHECK(metric_eval(m, p, e2, e2) == 1.0);
}

TEST_CASE("base mismatch is rejected") {
  FlatComplexSpace m(1);
  const AmbientPoint p = pt(m, {0.0, 0.0});
  const AmbientPoint q = pt(m, {1.0, 0.0});
  const AmbientTangent xq = tan_at(q, {1.0, 0.0});
  CHECK_THROWS_AS(metric_eval(m, p, xq, xq), BaseMismatchError);
}

TEST_CASE("sphere metric compatibility at random points") {
  RoundSphere m(1.0);
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    AmbientPoint p;
    p.chart_id = i % 2;
    p.coords = rng.uniform_vec(2, -1.2, 1.2);
    const Mat g = m.metric_matrix(p);
    const Mat j = m.complex_structure_matrix(p);
    const Vec a = rng.normal_vec(2), b = rng.normal_vec(2);
    CHECK(std::abs((j * a).dot(g * (j * b)) - a.dot(g * b)) < 1e-12 * (1.0 + a.norm() * b.norm()));
    CHECK((j * (j * a) + a).norm() < 1e-14);
  }
}

TEST_CASE("sphere embedding round trips between charts") {
  RoundSphere m(2.0);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    AmbientPoint p;
    p.chart_id = 0;
    p.coords = rng.uniform_vec(2, -1.5, 1.5);
    const Vec3 e = m.embed(p);
    CHECK(e.norm() == doctest::Approx(2.0).epsilon(1e-13));
    const AmbientPoint q = m.unembed(e, 0);
    CHECK((q.coords - p.coords).norm() < 1e-10);
    // transition to the other chart and back
    const AmbientPoint r = m.rechart(p, 1);
    const AmbientPoint back = m.rechart(r, 0);
    CHECK((back.coords - p.coords).norm() < 1e-10);
  }
}

TEST_CASE("sphere curvature: constant-curvature formula and derivatives") {
  RoundSphere m(1.0);
  const AmbientPoint p = pt(m, {0.2, -0.4});
  const Mat g = m.metric_matrix(p);
  // orthonormal pair
  Rng rng(3);
  Mat raw(2, 2);
  raw.col(0) = rng.normal_vec(2);
  raw.col(1) = rng.normal_vec(2);
  const Mat on = gram_schmidt(raw, g);
  const AmbientTangent x = {p, on.col(0)};
  const AmbientTangent y = {p, on.col(1)};
  const AmbientTangent r0 = curvature(m, p, x, y, y, 0);
  CHECK((r0.components - x.components).norm() < 1e-12);
  const AmbientTangent r1 = curvature(m, p, x, y, y, 1, {x});
  CHECK(r1.components.norm() == 0.0);
  CHECK_THROWS_AS(curvature(m, p, x, y, y, 3, {x, y, x}), CapabilityError);
  CHECK(curvature_sups(m).c0 == 1.0);
  CHECK(curvature_sups(RoundSphere(2.0)).c0 == doctest::Approx(0.25));
}

TEST_CASE("sampled curvature sups approach the analytic values") {
  RoundSphere m(1.0);
  Rng rng(5);
  std::vector<AmbientPoint> samples;
  for (int i = 0; i < 50; ++i) {
    AmbientPoint p;
    p.chart_id = 0;
    p.coords = rng.uniform_vec(2, -1.0, 1.0);
    samples.push_back(p);
  }
  const CurvatureSups cs = curvature_sups_sampled(m, samples, rng);
  CHECK(cs.c0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cs.c1 == 0.0);
  FlatComplexSpace f(2);
  std::vector<AmbientPoint> fs;
  for (int i = 0; i < 10; ++i) {
    AmbientPoint p;
    p.chart_id = 0;
    p.coords = rng.uniform_vec(4, -1.0, 1.0);
    fs.push_back(p);
  }
  const CurvatureSups fsups = curvature_sups_sampled(f, fs, rng);
  CHECK(fsups.c0 == 0.0);
  CHECK_THROWS_AS(curvature_sups_sampled(m, {}, rng), InputError);
}

TEST_CASE("geodesics: flat lines and great circles") {
  FlatComplexSpace f(1);
  const AmbientPoint o = pt(f, {0.0, 0.0});
  const AmbientPoint q = exp_geodesic(f, o, tan_at(o, {1.0, 0.0}), 1.0);
  CHECK(q.coords[0] == doctest::Approx(1.0));
  CHECK(q.coords[1] == 0.0);
  CHECK(exp_geodesic(f, o, tan_at(o, {0.0, 0.0}), 5.0).coords.norm() == 0.0);

  RoundSphere m(1.0);
  AmbientPoint p = pt(m, {0.7, -0.1});
  Rng rng(9);
  Vec dir = rng.normal_vec(2);
  const Mat g = m.metric_matrix(p);
  dir *= (0.5 * M_PI) / std::sqrt(dir.dot(g * dir));
  const AmbientPoint quarter = exp_geodesic(m, p, {p, dir}, 1.0);
  CHECK(m.distance(p, quarter) == doctest::Approx(0.5 * M_PI).epsilon(1e-12));
}

TEST_CASE("geodesic flow property on the sphere") {
  RoundSphere m(1.3);
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    AmbientPoint p;
    p.chart_id = 0;
    p.coords = rng.uniform_vec(2, -1.0, 1.0);
    Vec v = rng.normal_vec(2);
    const double s1 = rng.uniform(0.0, 0.4), s2 = rng.uniform(0.0, 0.4);
    const AmbientPoint direct = m.exp_point(p, v, s1 + s2);
    const GeodesicFrame mid = m.geodesic_frame(p, v, s1);
    const AmbientPoint relay = m.exp_point(mid.point, mid.velocity, s2);
    CHECK(m.distance(direct, relay) < 1e-10 * (1.0 + s1 + s2));
  }
}

TEST_CASE("parallel transport preserves norms and flat components") {
  FlatComplexSpace f(1);
  const AmbientPoint a = pt(f, {0.0, 0.0});
  std::vector<AmbientPoint> curve{a, pt(f, {0.3, 0.1}), pt(f, {0.9, -0.4})};
  const AmbientTangent moved = parallel_transport(f, curve, tan_at(a, {0.25, -1.5}));
  CHECK(moved.components[0] == 0.25);
  CHECK(moved.components[1] == -1.5);

  RoundSphere m(1.0);
  Rng rng(17);
  AmbientPoint p;
  p.chart_id = 0;
  p.coords = rng.uniform_vec(2, -0.8, 0.8);
  std::vector<AmbientPoint> sc;
  Vec dir = rng.normal_vec(2);
  for (int k = 0; k <= 40; ++k) sc.push_back(m.exp_point(p, dir, 0.02 * k));
  AmbientTangent x0{p, rng.normal_vec(2)};
  const double n0 = std::sqrt(x0.components.dot(m.metric_matrix(p) * x0.components));
  const AmbientTangent xe = parallel_transport(m, sc, x0);
  const double ne = std::sqrt(xe.components.dot(m.metric_matrix(xe.base) * xe.components));
  CHECK(ne == doctest::Approx(n0).epsilon(1e-10));
}

TEST_CASE("holonomy around a latitude circle matches the classical angle") {
  RoundSphere m(1.0);
  const double phi = 1.1;  // colatitude
  // the latitude circle in chart 0
  const double rho = std::cos(0.5 * phi) / std::sin(0.5 * phi);
  const int segs = 4000;
  std::vector<AmbientPoint> loop;
  for (int k = 0; k <= segs; ++k) {
    const double th = 2.0 * M_PI * k / segs;
    AmbientPoint p;
    p.chart_id = 0;
    p.coords = Vec(2);
    p.coords << rho * std::cos(th), rho * std::sin(th);
    loop.push_back(p);
  }
  AmbientTangent x0{loop.front(), Vec(2)};
  x0.components << 1.0, 0.0;
  const AmbientTangent xe = parallel_transport(m, loop, x0);
  const Mat g = m.metric_matrix(loop.front());
  const double cosang = x0.components.dot(g * xe.components) /
                        (x0.components.dot(g * x0.components));
  const double expected = 2.0 * M_PI * (1.0 - std::cos(phi));
  CHECK(std::acos(std::clamp(cosang, -1.0, 1.0)) ==
        doctest::Approx(std::abs(M_PI - std::abs(M_PI - expected))).epsilon(1e-4));
}

TEST_CASE("chart exit is reported") {
  RoundSphere m(1.0);
  AmbientPoint far;
  far.chart_id = 0;
  far.coords = Vec(2);
  far.coords << 5.0, 0.0;
  CHECK_FALSE(m.chart_contains(0, far.coords));
  std::vector<AmbientPoint> curve{far, far};
  AmbientTangent t{far, Vec(2)};
  t.components << 1.0, 0.0;
  CHECK_THROWS_AS(parallel_transport(m, curve, t), ChartExitError);
}
