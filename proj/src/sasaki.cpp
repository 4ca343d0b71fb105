#include "tube/sasaki.hpp"

#include <cmath>

namespace tube {

namespace {

void check_same_bundle_base(const SasakiTangent& a, const SasakiTangent& b, const char* who) {
  if ((a.base.x - b.base.x).norm() > 1e-9 * (1.0 + a.base.x.norm()) ||
      (a.base.xi - b.base.xi).norm() > 1e-9 * (1.0 + a.base.xi.norm()))
    throw BaseMismatchError(std::string(who) + ": tangents based at different bundle points");
}

}  // namespace

SasakiTangent split(const LagrangianScene& s, const NormalBundlePoint& p, const Vec& coord) {
  const int n = s.dim();
  if (coord.size() != 2 * n) throw InputError("split: coordinate tangent must have 2n entries");
  const std::vector<Mat> gam = s.induced_christoffels(p.x);
  SasakiTangent t;
  t.base = p;
  t.horizontal = coord.head(n);
  t.vertical = coord.tail(n);
  for (int k = 0; k < n; ++k) {
    double corr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) corr += coord[i] * p.xi[j] * gam[k](j, i);
    t.vertical[k] += corr;
  }
  return t;
}

Vec lift_to_coords(const LagrangianScene& s, const SasakiTangent& t) {
  const int n = s.dim();
  const std::vector<Mat> gam = s.induced_christoffels(t.base.x);
  Vec coord(2 * n);
  coord.head(n) = t.horizontal;
  coord.tail(n) = t.vertical;
  for (int k = 0; k < n; ++k) {
    double corr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) corr += t.horizontal[i] * t.base.xi[j] * gam[k](j, i);
    coord[n + k] -= corr;
  }
  return coord;
}

double sasaki_metric(const LagrangianScene& s, const SasakiTangent& a, const SasakiTangent& b) {
  check_same_bundle_base(a, b, "sasaki_metric");
  const Mat gbar = s.induced_metric(a.base.x);
  return a.horizontal.dot(gbar * b.horizontal) + a.vertical.dot(gbar * b.vertical);
}

double sasaki_norm(const LagrangianScene& s, const SasakiTangent& a) {
  return std::sqrt(std::max(0.0, sasaki_metric(s, a, a)));
}

SasakiTangent jtilde(const LagrangianScene& s, const SasakiTangent& t) {
  (void)s;
  SasakiTangent out;
  out.base = t.base;
  out.horizontal = -t.vertical;
  out.vertical = t.horizontal;
  return out;
}

double omega_tilde(const LagrangianScene& s, const NormalBundlePoint& p, const Vec& coord_a,
                   const Vec& coord_b) {
  const int n = s.dim();
  if (coord_a.size() != 2 * n || coord_b.size() != 2 * n)
    throw InputError("omega_tilde: coordinate tangents must have 2n entries");
  const Mat gbar = s.induced_metric(p.x);
  const std::vector<Mat> dg = s.induced_metric_derivative(p.x);
  double val = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      val += gbar(i, j) * (coord_a[i] * coord_b[n + j] - coord_a[n + j] * coord_b[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double coeff = 0.0;
      for (int k = 0; k < n; ++k) coeff += p.xi[k] * dg[j](i, k);
      val += coeff * (coord_a[i] * coord_b[j] - coord_a[j] * coord_b[i]);
    }
  return val;
}

double omega_tilde_via_structure(const LagrangianScene& s, const SasakiTangent& a,
                                 const SasakiTangent& b) {
  return sasaki_metric(s, jtilde(s, a), b);
}

SasakiTangent nabla_G(const LagrangianScene& s, const NormalBundlePoint& eta, Lift dir_kind,
                      const Vec& dir, Lift field_kind, const Vec& field,
                      const Vec& field_cov_deriv) {
  const int n = s.dim();
  SasakiTangent out;
  out.base = eta;
  out.horizontal = Vec::Zero(n);
  out.vertical = Vec::Zero(n);
  if (dir_kind == Lift::Vertical && field_kind == Lift::Vertical) return out;
  if (dir_kind == Lift::Horizontal && field_kind == Lift::Vertical) {
    // [nabla-perp_X Y]^v + 1/2 [R_L(J eta, J Y) X]^h
    out.vertical = field_cov_deriv;
    out.horizontal = 0.5 * s.induced_curvature(eta.x, eta.xi, field, dir);
    return out;
  }
  if (dir_kind == Lift::Vertical && field_kind == Lift::Horizontal) {
    out.horizontal = 0.5 * s.induced_curvature(eta.x, eta.xi, dir, field);
    return out;
  }
  // horizontal-horizontal: [nabla-bar_{X1} X2]^h + 1/2 [J(R_L(X1,X2)(J eta))]^v
  out.horizontal = field_cov_deriv;
  out.vertical = -0.5 * s.induced_curvature(eta.x, dir, field, eta.xi);
  return out;
}

SasakiTangent parallel_transport_G(const LagrangianScene& s, const BundleCurve& curve,
                                   const SasakiTangent& x0, int steps) {
  const int n = s.dim();
  const double h = 1.0 / steps;
  const double dv = h / 8.0;
  const bool curved = n > 1;  // R_L vanishes identically in dimension one

  auto rhs = [&](double alpha, const Vec& u, const Vec& w, Vec& du, Vec& dw) {
    const NormalBundlePoint c = curve(alpha);
    const NormalBundlePoint cp = curve(alpha + dv), cm = curve(alpha - dv);
    const Vec xdot = (cp.x - cm.x) / (2.0 * dv);
    const Vec xidot = (cp.xi - cm.xi) / (2.0 * dv);
    const std::vector<Mat> gam = s.induced_christoffels(c.x);
    du.resize(n);
    dw.resize(n);
    for (int k = 0; k < n; ++k) {
      du[k] = -xdot.dot(gam[k] * u);
      dw[k] = -xdot.dot(gam[k] * w);
    }
    if (curved) {
      Vec b = xidot;
      for (int k = 0; k < n; ++k) {
        double corr = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) corr += xdot[i] * c.xi[j] * gam[k](j, i);
        b[k] += corr;
      }
      du -= 0.5 * (s.induced_curvature(c.x, c.xi, w, xdot) + s.induced_curvature(c.x, c.xi, b, u));
      dw += 0.5 * s.induced_curvature(c.x, xdot, u, c.xi);
    }
  };

  Vec u = x0.horizontal, w = x0.vertical;
  Vec k1u(n), k1w(n), k2u(n), k2w(n), k3u(n), k3w(n), k4u(n), k4w(n);
  for (int i = 0; i < steps; ++i) {
    const double a = i * h;
    rhs(a, u, w, k1u, k1w);
    rhs(a + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
    rhs(a + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
    rhs(a + h, u + h * k3u, w + h * k3w, k4u, k4w);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  }
  SasakiTangent out;
  out.base = curve(1.0);
  out.horizontal = u;
  out.vertical = w;
  return out;
}

SasakiTangent transport_G_back(const LagrangianScene& s, const BundleCurve& curve,
                               const SasakiTangent& at_end, int steps) {
  BundleCurve reversed = [&curve](double a) { return curve(1.0 - a); };
  SasakiTangent t = at_end;
  t.base = curve(1.0);
  return parallel_transport_G(s, reversed, t, steps);
}

double fiber_norm(const LagrangianScene& s, const NormalBundlePoint& p) {
  const Mat gbar = s.induced_metric(p.x);
  return std::sqrt(std::max(0.0, p.xi.dot(gbar * p.xi)));
}

BundleCurve canonical_curve(const LagrangianScene& s, const NormalBundlePoint& p,
                            const SasakiTangent& y) {
  const int n = s.dim();
  const Vec x0 = p.x;
  const Vec h = y.horizontal;
  const Vec xi0 = p.xi;
  const Vec b0 = y.vertical;
  if (n == 1) {
    // one-dimensional transports reduce to a metric-ratio factor
    const double g0 = s.induced_metric(x0)(0, 0);
    return [&s, x0, h, xi0, b0, g0](double t) {
      NormalBundlePoint q;
      q.x = s.intrinsic_exp(x0, h, t);
      const double factor = std::sqrt(g0 / s.induced_metric(q.x)(0, 0));
      q.xi = factor * (xi0 + t * b0);
      return q;
    };
  }
  if (s.arclength_chart()) {
    return [&s, x0, h, xi0, b0](double t) {
      NormalBundlePoint q;
      q.x = s.intrinsic_exp(x0, h, t);
      q.xi = xi0 + t * b0;
      return q;
    };
  }
  return [&s, x0, h, xi0, b0](double t) {
    NormalBundlePoint q;
    q.x = s.intrinsic_exp(x0, h, t);
    auto base = [&s, x0, h, t](double r) { return s.intrinsic_exp(x0, h, r * t); };
    q.xi = s.transport_chart_components(base, xi0, 16) +
           t * s.transport_chart_components(base, b0, 16);
    return q;
  };
}

}  // namespace tube
