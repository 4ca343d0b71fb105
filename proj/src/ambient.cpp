#include "tube/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tube {

void check_same_base(const AmbientPoint& p, const AmbientTangent& t, const char* who) {
  if (t.base.chart_id != p.chart_id || t.base.coords.size() != p.coords.size() ||
      (t.base.coords - p.coords).norm() > 1e-9 * (1.0 + p.coords.norm())) {
    throw BaseMismatchError(std::string(who) + ": tangent not based at evaluation point");
  }
}

// ---- FlatComplexSpace ------------------------------------------------------

FlatComplexSpace::FlatComplexSpace(int n) : n_(n) {
  if (n < 1 || 2 * n > kMaxDim) throw InputError("flat-complex-space: bad complex dimension");
}

bool FlatComplexSpace::chart_contains(int chart_id, const Vec& coords) const {
  return chart_id == 0 && coords.size() == dim_real();
}

Mat FlatComplexSpace::metric_matrix(const AmbientPoint&) const {
  return Mat::Identity(dim_real(), dim_real());
}

Mat FlatComplexSpace::complex_structure_matrix(const AmbientPoint&) const {
  Mat j = Mat::Zero(dim_real(), dim_real());
  for (int i = 0; i < n_; ++i) {
    j(2 * i + 1, 2 * i) = 1.0;   // J dx = dy
    j(2 * i, 2 * i + 1) = -1.0;  // J dy = -dx
  }
  return j;
}

std::vector<Mat> FlatComplexSpace::christoffels(const AmbientPoint&) const {
  return std::vector<Mat>(dim_real(), Mat::Zero(dim_real(), dim_real()));
}

Vec FlatComplexSpace::curvature_components(const AmbientPoint&, const Vec&, const Vec&, const Vec&,
                                          int order, const std::vector<Vec>&) const {
  if (order < 0 || order > 2) throw CapabilityError("curvature: order must be 0, 1 or 2");
  return Vec::Zero(dim_real());
}

AmbientPoint FlatComplexSpace::exp_point(const AmbientPoint& p, const Vec& v, double s) const {
  return {0, p.coords + s * v};
}

GeodesicFrame FlatComplexSpace::geodesic_frame(const AmbientPoint& p, const Vec& v,
                                               double s) const {
  GeodesicFrame g;
  g.point = exp_point(p, v, s);
  g.velocity = v;
  g.frame = Mat::Identity(dim_real(), dim_real());
  return g;
}

Vec FlatComplexSpace::transport_along_geodesic(const AmbientPoint&, const Vec& x,
                                               const AmbientPoint&) const {
  return x;
}

double FlatComplexSpace::injectivity_radius() const {
  return std::numeric_limits<double>::infinity();
}

double FlatComplexSpace::distance(const AmbientPoint& a, const AmbientPoint& b) const {
  return (a.coords - b.coords).norm();
}

AmbientPoint FlatComplexSpace::rechart(const AmbientPoint& p, int chart_id) const {
  if (chart_id != 0) throw ChartExitError("flat-complex-space has a single chart");
  return p;
}

// ---- RoundSphere -----------------------------------------------------------

namespace {
constexpr double kChartRhoFactor = 1.999;  // chart covers rho < factor * R
}

RoundSphere::RoundSphere(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw InputError("round-sphere: radius must be positive");
}

double RoundSphere::conformal_factor(const Vec& coords) const {
  const double r2 = radius_ * radius_;
  return 2.0 * r2 / (r2 + coords.squaredNorm());
}

bool RoundSphere::chart_contains(int chart_id, const Vec& coords) const {
  if (chart_id != 0 && chart_id != 1) return false;
  if (coords.size() != 2) return false;
  return coords.norm() < kChartRhoFactor * radius_;
}

Mat RoundSphere::metric_matrix(const AmbientPoint& p) const {
  const double s = conformal_factor(p.coords);
  return s * s * Mat::Identity(2, 2);
}

Mat RoundSphere::complex_structure_matrix(const AmbientPoint&) const {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

std::vector<Mat> RoundSphere::christoffels(const AmbientPoint& p) const {
  // Conformal metric sigma^2 * delta: Gamma^k_ij = d_i(log sigma) delta^k_j
  // + d_j(log sigma) delta^k_i - d^k(log sigma) delta_ij.
  const double r2 = radius_ * radius_;
  const double denom = r2 + p.coords.squaredNorm();
  Vec dlog = -2.0 * p.coords / denom;
  std::vector<Mat> gam(2, Mat::Zero(2, 2));
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = 0.0;
        if (k == j) v += dlog[i];
        if (k == i) v += dlog[j];
        if (i == j) v -= dlog[k];
        gam[k](i, j) = v;
      }
  return gam;
}

Vec RoundSphere::curvature_components(const AmbientPoint& p, const Vec& x, const Vec& y,
                                     const Vec& z, int order, const std::vector<Vec>&) const {
  if (order < 0 || order > 2) throw CapabilityError("curvature: order must be 0, 1 or 2");
  if (order >= 1) return Vec::Zero(2);
  const double kappa = 1.0 / (radius_ * radius_);
  const Mat g = metric_matrix(p);
  const double yz = y.dot(g * z), xz = x.dot(g * z);
  return kappa * (yz * x - xz * y);
}

Vec3 RoundSphere::embed(const AmbientPoint& p) const {
  const double r = radius_, r2 = r * r;
  const double rho2 = p.coords.squaredNorm();
  const double denom = rho2 + r2;
  double u = p.coords[0], v = p.coords[1];
  if (p.chart_id == 1) v = -v;  // chart 1 comes from w' = R^2 / w
  Vec3 q(2.0 * r2 * u / denom, 2.0 * r2 * v / denom, r * (rho2 - r2) / denom);
  if (p.chart_id == 1) q[2] = -q[2];
  return q;
}

AmbientPoint RoundSphere::unembed(const Vec3& q, int preferred_chart) const {
  const double r = radius_;
  auto make = [&](int chart) -> AmbientPoint {
    Vec c(2);
    if (chart == 0) {
      const double denom = r - q[2];
      c << r * q[0] / denom, r * q[1] / denom;
    } else {
      const double denom = r + q[2];
      c << r * q[0] / denom, -r * q[1] / denom;
    }
    return {chart, c};
  };
  AmbientPoint p = make(preferred_chart);
  if (chart_contains(p.chart_id, p.coords)) return p;
  p = make(1 - preferred_chart);
  if (chart_contains(p.chart_id, p.coords)) return p;
  throw ChartExitError("round-sphere: point not representable in either chart");
}

Vec3 RoundSphere::push_tangent(const AmbientPoint& p, const Vec& v) const {
  // Finite-size-free analytic differential of embed.
  const double r = radius_, r2 = r * r;
  double u0 = p.coords[0], v0 = p.coords[1];
  double a = v[0], b = v[1];
  if (p.chart_id == 1) {
    v0 = -v0;
    b = -b;
  }
  const double denom = r2 + u0 * u0 + v0 * v0;
  const double d2 = denom * denom;
  const double ddenom = 2.0 * (u0 * a + v0 * b);
  Vec3 t;
  t[0] = 2.0 * r2 * (a * denom - u0 * ddenom) / d2;
  t[1] = 2.0 * r2 * (b * denom - v0 * ddenom) / d2;
  t[2] = r * (ddenom * denom - (u0 * u0 + v0 * v0 - r2) * ddenom) / d2;
  if (p.chart_id == 1) t[2] = -t[2];
  return t;
}

Vec RoundSphere::pull_tangent(const AmbientPoint& p, const Vec3& t) const {
  // The differential of embed is conformal with factor sigma, so the adjoint
  // divided by sigma^2 inverts it on the tangent plane (and projects out any
  // stray normal component).
  Vec e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  const Vec3 c0 = push_tangent(p, e0);
  const Vec3 c1 = push_tangent(p, e1);
  const double s = conformal_factor(p.coords);
  Vec out(2);
  out << c0.dot(t) / (s * s), c1.dot(t) / (s * s);
  return out;
}

AmbientPoint RoundSphere::exp_point(const AmbientPoint& p, const Vec& v, double s) const {
  return geodesic_frame(p, v, s).point;
}

GeodesicFrame RoundSphere::geodesic_frame(const AmbientPoint& p, const Vec& v, double s) const {
  const Vec3 p3 = embed(p);
  const Vec3 t3 = push_tangent(p, v);
  const double speed = t3.norm();
  GeodesicFrame out;
  if (speed < 1e-300) {
    out.point = p;
    out.velocity = v;
    out.frame = Mat::Identity(2, 2);
    // express an orthonormal frame in chart components
    const double sigma = conformal_factor(p.coords);
    out.frame /= sigma;
    return out;
  }
  const double theta = speed * s / radius_;
  const Vec3 dir = t3 / speed;
  const Vec3 q3 = std::cos(theta) * p3 + std::sin(theta) * radius_ * dir;
  const Vec3 vel3 = speed * (-std::sin(theta) * p3 / radius_ + std::cos(theta) * dir);
  AmbientPoint q = unembed(q3, p.chart_id);
  out.point = q;
  out.velocity = pull_tangent(q, vel3);
  // Parallel frame: E1 along the velocity, E2 the (constant) great-circle
  // plane normal crossed with the position.
  const Vec3 e1 = vel3 / speed;
  const Vec3 axis = p3.cross(dir).normalized();
  const Vec3 e2 = axis;  // unit, tangent (axis .dot q3 = 0), parallel
  out.frame = Mat(2, 2);
  out.frame.col(0) = pull_tangent(q, e1);
  out.frame.col(1) = pull_tangent(q, e2);
  return out;
}

Vec RoundSphere::transport_along_geodesic(const AmbientPoint& a, const Vec& x,
                                          const AmbientPoint& b) const {
  const Vec3 pa = embed(a), pb = embed(b);
  const Vec3 xa = push_tangent(a, x);
  const Vec3 na = pa / radius_, nb = pb / radius_;
  const double c = na.dot(nb);
  Vec3 axis = na.cross(nb);
  const double s = axis.norm();
  if (s < 1e-14) {
    if (c < 0.0) throw NumericsError("round-sphere: transport between antipodal points");
    return pull_tangent(b, xa);
  }
  axis /= s;
  const double ang = std::atan2(s, c);
  // Rodrigues rotation of the tangent vector about the great-circle axis.
  const Vec3 xb = xa * std::cos(ang) + axis.cross(xa) * std::sin(ang) +
                  axis * (axis.dot(xa)) * (1.0 - std::cos(ang));
  return pull_tangent(b, xb);
}

CurvatureSups RoundSphere::curvature_sups_analytic() const {
  return {1.0 / (radius_ * radius_), 0.0, 0.0};
}

double RoundSphere::distance(const AmbientPoint& a, const AmbientPoint& b) const {
  const Vec3 pa = embed(a) / radius_, pb = embed(b) / radius_;
  // atan2 form stays accurate near coincident and antipodal points
  return radius_ * std::atan2(pa.cross(pb).norm(), pa.dot(pb));
}

AmbientPoint RoundSphere::rechart(const AmbientPoint& p, int chart_id) const {
  if (chart_id == p.chart_id) return p;
  return unembed(embed(p), chart_id);
}

// ---- free operations -------------------------------------------------------

double metric_eval(const AmbientManifold& m, const AmbientPoint& p, const AmbientTangent& x,
                   const AmbientTangent& y) {
  check_same_base(p, x, "metric_eval");
  check_same_base(p, y, "metric_eval");
  return x.components.dot(m.metric_matrix(p) * y.components);
}

AmbientTangent complex_structure(const AmbientManifold& m, const AmbientPoint& p,
                                 const AmbientTangent& x) {
  check_same_base(p, x, "complex_structure");
  return {p, m.complex_structure_matrix(p) * x.components};
}

AmbientTangent curvature(const AmbientManifold& m, const AmbientPoint& p, const AmbientTangent& x,
                         const AmbientTangent& y, const AmbientTangent& z, int order,
                         const std::vector<AmbientTangent>& directions) {
  check_same_base(p, x, "curvature");
  check_same_base(p, y, "curvature");
  check_same_base(p, z, "curvature");
  if (order == 1 && directions.size() != 1)
    throw InputError("curvature: order 1 takes exactly one direction");
  if (order == 2 && directions.size() != 2)
    throw InputError("curvature: order 2 takes exactly two directions");
  std::vector<Vec> dirs;
  for (const auto& d : directions) dirs.push_back(d.components);
  return {p, m.curvature_components(p, x.components, y.components, z.components, order, dirs)};
}

AmbientPoint exp_geodesic(const AmbientManifold& m, const AmbientPoint& p, const AmbientTangent& v,
                          double s) {
  check_same_base(p, v, "exp_geodesic");
  return m.exp_point(p, v.components, s);
}

AmbientTangent parallel_transport(const AmbientManifold& m,
                                  const std::vector<AmbientPoint>& curve,
                                  const AmbientTangent& x0) {
  if (curve.empty()) throw InputError("parallel_transport: empty curve");
  check_same_base(curve.front(), x0, "parallel_transport");
  for (const auto& p : curve)
    if (p.chart_id != curve.front().chart_id || !m.chart_contains(p.chart_id, p.coords))
      throw ChartExitError("parallel_transport: curve leaves the chart");
  Vec comps = x0.components;
  for (size_t i = 0; i + 1 < curve.size(); ++i)
    comps = m.transport_along_geodesic(curve[i], comps, curve[i + 1]);
  return {curve.back(), comps};
}

CurvatureSups curvature_sups(const AmbientManifold& m) { return m.curvature_sups_analytic(); }

CurvatureSups curvature_sups_sampled(const AmbientManifold& m,
                                     const std::vector<AmbientPoint>& samples, Rng& rng,
                                     int frames_per_point) {
  if (samples.empty()) throw InputError("curvature_sups_sampled: empty sampler");
  const int d = m.dim_real();
  CurvatureSups sup;
  for (const auto& p : samples) {
    const Mat g = m.metric_matrix(p);
    for (int f = 0; f < frames_per_point; ++f) {
      Mat raw(d, 3);
      for (int c = 0; c < 3; ++c) raw.col(c) = rng.normal_vec(d);
      int rank = 0;
      Mat on = gram_schmidt(raw, g, &rank);
      if (rank < std::min(3, d)) continue;
      const Vec x = on.col(0), y = on.col(rank > 1 ? 1 : 0), z = on.col(rank > 2 ? 2 : rank - 1);
      const Vec r0 = m.curvature_components(p, x, y, z, 0, {});
      sup.c0 = std::max(sup.c0, std::sqrt(r0.dot(g * r0)));
      const Vec r1 = m.curvature_components(p, x, y, z, 1, {x});
      sup.c1 = std::max(sup.c1, std::sqrt(r1.dot(g * r1)));
      const Vec r2 = m.curvature_components(p, x, y, z, 2, {x, y});
      sup.c2 = std::max(sup.c2, std::sqrt(r2.dot(g * r2)));
    }
  }
  return sup;
}

}  // namespace tube
