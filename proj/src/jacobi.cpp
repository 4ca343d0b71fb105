#include "tube/jacobi.hpp"

#include <cmath>

namespace tube {

GeodesicSegment make_segment(const AmbientManifold& m, const AmbientPoint& p, const Vec& velocity,
                             double length_param) {
  GeodesicSegment seg;
  seg.start = p;
  seg.velocity = velocity;
  seg.length_param = length_param;
  seg.speed = std::sqrt(std::max(0.0, velocity.dot(m.metric_matrix(p) * velocity)));
  return seg;
}

namespace {

Vec frame_components(const AmbientManifold& m, const GeodesicFrame& gf, const Vec& ambient) {
  return gf.frame.transpose() * (m.metric_matrix(gf.point) * ambient);
}

// R(J, sdot) sdot in frame components, J given in frame components.
Vec curvature_term(const AmbientManifold& m, const GeodesicFrame& gf, const Vec& j_frame) {
  const Vec j_amb = gf.frame * j_frame;
  const Vec r = m.curvature_components(gf.point, j_amb, gf.velocity, gf.velocity, 0, {});
  return frame_components(m, gf, r);
}

}  // namespace

JacobiPath integrate_jacobi(const AmbientManifold& m, const GeodesicSegment& seg,
                            const Vec& value0, const Vec& derivative0,
                            const ForcingInFrame& forcing, int steps) {
  const int d = m.dim_real();
  JacobiPath path;
  path.segment = seg;
  path.states.reserve(steps + 1);
  const double h = seg.length_param / steps;

  const GeodesicFrame gf0 = m.geodesic_frame(seg.start, seg.velocity, 0.0);
  Vec j = frame_components(m, gf0, value0);
  Vec dj = frame_components(m, gf0, derivative0);
  path.states.push_back({0.0, j, dj});

  auto rhs = [&](const GeodesicFrame& gf, double s, const Vec& jv, Vec& out_acc) {
    out_acc = -curvature_term(m, gf, jv);
    if (forcing) {
      const Vec f = forcing(s, gf);
      path.forcing_sup = std::max(path.forcing_sup, f.norm());
      out_acc += f;
    }
  };

  GeodesicFrame gf_lo = gf0;
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    const GeodesicFrame gf_mid = m.geodesic_frame(seg.start, seg.velocity, s + 0.5 * h);
    const GeodesicFrame gf_hi = m.geodesic_frame(seg.start, seg.velocity, s + h);
    Vec a1(d), a2(d), a3(d), a4(d);
    rhs(gf_lo, s, j, a1);
    rhs(gf_mid, s + 0.5 * h, j + 0.5 * h * dj, a2);
    rhs(gf_mid, s + 0.5 * h, j + 0.5 * h * dj + 0.25 * h * h * a1, a3);
    rhs(gf_hi, s + h, j + h * dj + 0.5 * h * h * a2, a4);
    // classical RK4 on the first-order system (j, dj)
    const Vec k1j = dj, k1d = a1;
    const Vec k2j = dj + 0.5 * h * k1d, k2d = a2;
    const Vec k3j = dj + 0.5 * h * k2d, k3d = a3;
    const Vec k4j = dj + h * k3d, k4d = a4;
    j += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
    dj += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    gf_lo = gf_hi;
    path.states.push_back({s + h, j, dj});
  }
  return path;
}

JacobiState closed_form_jacobi(const AmbientManifold& m, const GeodesicSegment& seg,
                               const Vec& value0, const Vec& derivative0, double s) {
  // valid exactly for the two built-in ambients, where the curvature sup is
  // the constant sectional curvature
  if (m.kind() != "flat-complex-space" && m.kind() != "round-sphere")
    throw CapabilityError("closed_form_jacobi: no closed form for this ambient");
  const GeodesicFrame gf0 = m.geodesic_frame(seg.start, seg.velocity, 0.0);
  Vec j0 = frame_components(m, gf0, value0);
  Vec dj0 = frame_components(m, gf0, derivative0);
  const double kappa = m.curvature_sups_analytic().c0;
  JacobiState st;
  st.s = s;
  if (kappa == 0.0 || seg.speed == 0.0) {
    st.value = j0 + s * dj0;
    st.derivative = dj0;
    return st;
  }
  // constant curvature: affine along the velocity, sin/cos across it
  const double omega = std::sqrt(kappa) * seg.speed;
  const int d = m.dim_real();
  Vec val(d), der(d);
  // frame column 0 is the normalized velocity
  val[0] = j0[0] + s * dj0[0];
  der[0] = dj0[0];
  for (int k = 1; k < d; ++k) {
    val[k] = j0[k] * std::cos(omega * s) + dj0[k] * std::sin(omega * s) / omega;
    der[k] = -j0[k] * omega * std::sin(omega * s) + dj0[k] * std::cos(omega * s);
  }
  st.value = val;
  st.derivative = der;
  return st;
}

AmbientTangent materialize(const AmbientManifold& m, const GeodesicSegment& seg,
                           const JacobiState& st) {
  const GeodesicFrame gf = m.geodesic_frame(seg.start, seg.velocity, st.s);
  return {gf.point, gf.frame * st.value};
}

// ---- normal-bundle exponential ----------------------------------------------

GeodesicSegment normal_geodesic(const LagrangianScene& s, const NormalBundlePoint& v) {
  const AmbientPoint p = s.immerse(v.x);
  return make_segment(s.ambient(), p, s.normal_from_xi(v.x, v.xi), 1.0);
}

AmbientPoint eval_F(const LagrangianScene& s, const NormalBundlePoint& v) {
  const AmbientPoint p = s.immerse(v.x);
  return s.ambient().exp_point(p, s.normal_from_xi(v.x, v.xi), 1.0);
}

namespace {

struct BundleTangentData {
  Vec u_chart, w_chart;   // horizontal (tangent frame) / vertical (J-frame)
  Vec u_amb, w_amb;       // ambient components
  Vec init_value, init_derivative;  // Jacobi data: U and S_eta(U) + W
};

BundleTangentData assemble(const LagrangianScene& s, const NormalBundlePoint& v,
                           const SasakiTangent& x, const Vec& eta_amb) {
  BundleTangentData d;
  const Mat frame = s.coordinate_frame(v.x);
  const Mat j = s.ambient().complex_structure_matrix(s.immerse(v.x));
  d.u_chart = x.horizontal;
  d.w_chart = x.vertical;
  d.u_amb = frame * d.u_chart;
  d.w_amb = j * (frame * d.w_chart);
  d.init_value = d.u_amb;
  d.init_derivative = frame * s.shape_operator(v.x, eta_amb, d.u_chart) + d.w_amb;
  return d;
}

}  // namespace

AmbientTangent dF(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x) {
  const Vec eta = s.normal_from_xi(v.x, v.xi);
  const GeodesicSegment seg = normal_geodesic(s, v);
  const BundleTangentData d = assemble(s, v, x, eta);
  const JacobiState end = closed_form_jacobi(s.ambient(), seg, d.init_value, d.init_derivative, 1.0);
  return materialize(s.ambient(), seg, end);
}

JacobiPath d2F_path(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x,
                    const SasakiTangent& y, int steps) {
  const AmbientManifold& m = s.ambient();
  const AmbientPoint p = s.immerse(v.x);
  const Mat frame = s.coordinate_frame(v.x);
  const Mat jmat = m.complex_structure_matrix(p);
  const Vec eta = s.normal_from_xi(v.x, v.xi);
  const GeodesicSegment seg = normal_geodesic(s, v);

  const BundleTangentData dx = assemble(s, v, x, eta);  // the field called W-tilde
  const BundleTangentData dy = assemble(s, v, y, eta);  // the field called Z

  // Initial data of the variation field from the transport equations of the
  // G-parallel extension of X along the canonical curve of Y.
  const Vec rl_ww = s.induced_curvature(v.x, v.xi, dx.w_chart, dy.u_chart);  // R_L(Je,JW)A
  const Vec rl_wb = s.induced_curvature(v.x, v.xi, dy.w_chart, dx.u_chart);  // R_L(Je,JB)U
  const Vec nablaAU_chart = -0.5 * (rl_ww + rl_wb);
  Vec z0 = frame * nablaAU_chart +
           s.second_fundamental_form(v.x, dy.u_chart, dx.u_chart, 0, {});

  const Vec s_eta_u = s.shape_operator(v.x, eta, dx.u_chart);
  Vec dz0 = frame * s.shape_operator_derivative(v.x, dy.u_chart, eta, dx.u_chart);
  dz0 += frame * s.shape_operator(v.x, dy.w_amb, dx.u_chart);       // S_B(U)
  dz0 += frame * s.shape_operator(v.x, eta, nablaAU_chart);          // S_eta(nabla_A U)
  dz0 += s.second_fundamental_form(v.x, s_eta_u, dy.u_chart, 0, {});  // II(S_eta(U), A)
  dz0 += 0.5 * (jmat * (frame * s.induced_curvature(v.x, dy.u_chart, dx.u_chart, v.xi)));
  dz0 += frame * s.shape_operator(v.x, dx.w_amb, dy.u_chart);        // S_W(A)
  dz0 += m.curvature_components(p, eta, dy.u_amb, dx.u_amb, 0, {});  // R_M(eta, A) U

  ForcingInFrame forcing = [&](double sp, const GeodesicFrame& gf) -> Vec {
    const JacobiState w_here = closed_form_jacobi(m, seg, dx.init_value, dx.init_derivative, sp);
    const JacobiState z_here = closed_form_jacobi(m, seg, dy.init_value, dy.init_derivative, sp);
    const Vec w_amb = gf.frame * w_here.value;
    const Vec dw_amb = gf.frame * w_here.derivative;
    const Vec z_amb = gf.frame * z_here.value;
    const Vec dz_amb = gf.frame * z_here.derivative;
    Vec f = -m.curvature_components(gf.point, w_amb, gf.velocity, z_amb, 1, {gf.velocity});
    f -= 2.0 * m.curvature_components(gf.point, w_amb, gf.velocity, dz_amb, 0, {});
    f -= m.curvature_components(gf.point, z_amb, gf.velocity, gf.velocity, 1, {w_amb});
    f -= 2.0 * m.curvature_components(gf.point, z_amb, gf.velocity, dw_amb, 0, {});
    return gf.frame.transpose() * (m.metric_matrix(gf.point) * f);
  };

  return integrate_jacobi(m, seg, z0, dz0, forcing, steps);
}

AmbientTangent d2F(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x,
                   const SasakiTangent& y, int steps) {
  const JacobiPath path = d2F_path(s, v, x, y, steps);
  return materialize(s.ambient(), path.segment, path.back());
}

AmbientTangent d2F_finite_difference(const LagrangianScene& s, const NormalBundlePoint& v,
                                     const SasakiTangent& x, const SasakiTangent& y, double step) {
  const AmbientManifold& m = s.ambient();
  const BundleCurve curve = canonical_curve(s, v, y);
  const AmbientPoint f0 = eval_F(s, v);

  auto pushed = [&](double alpha) {
    BundleCurve sub = [&curve, alpha](double t) { return curve(alpha * t); };
    SasakiTangent xa = parallel_transport_G(s, sub, x, 32);
    const AmbientTangent fx = dF(s, xa.base, xa);
    // ambient transport back to F(v)
    return m.transport_along_geodesic(fx.base, fx.components, f0);
  };
  const Vec diff = (pushed(step) - pushed(-step)) / (2.0 * step);
  return {f0, diff};
}

// ---- energy bound -------------------------------------------------------------

EnergyBoundReport check_energy_bound(const JacobiPath& path, double c0, double d0,
                                     double epsilon) {
  if (epsilon < 0.0 || epsilon > 2.0) throw InputError("check_energy_bound: epsilon in [0,2]");
  EnergyBoundReport rep;
  rep.epsilon = epsilon;
  rep.defect_bound = d0;
  const double p_add = d0 > 0.0 ? std::pow(d0, 2.0 - epsilon) : 0.0;
  const double p_exp = d0 > 0.0 ? std::pow(d0, epsilon) : 0.0;
  const double f0 =
      path.states.front().value.squaredNorm() + path.states.front().derivative.squaredNorm();
  const double v = path.segment.speed;
  const double rhs =
      (f0 + p_add) * std::exp((1.0 + c0 * v * v + p_exp) * path.segment.length_param);
  rep.rhs_at_worst = rhs;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& st : path.states) {
    const double f = st.value.squaredNorm() + st.derivative.squaredNorm();
    rep.worst_margin = std::min(rep.worst_margin, rhs - f);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

double measured_defect(const AmbientManifold& m, const JacobiPath& path) {
  double worst = 0.0;
  const auto& st = path.states;
  if (st.size() < 3) return 0.0;
  const double h = st[1].s - st[0].s;
  for (size_t k = 1; k + 1 < st.size(); ++k) {
    const Vec second = (st[k + 1].value - 2.0 * st[k].value + st[k - 1].value) / (h * h);
    const GeodesicFrame gf = m.geodesic_frame(path.segment.start, path.segment.velocity, st[k].s);
    const Vec j_amb = gf.frame * st[k].value;
    const Vec r = m.curvature_components(gf.point, j_amb, gf.velocity, gf.velocity, 0, {});
    const Vec r_frame = gf.frame.transpose() * (m.metric_matrix(gf.point) * r);
    worst = std::max(worst, (second + r_frame).norm());
  }
  return worst;
}

}  // namespace tube
