#include "tube/moser.hpp"

#include <cmath>
#include <map>

namespace tube {

namespace {

// Gauss-Legendre nodes/weights on [0, 1]; computed once per order by Newton
// iteration on the Legendre polynomial.
struct Quadrature {
  std::vector<double> nodes, weights;
};

const Quadrature& gauss_legendre(int n) {
  static std::map<int, Quadrature> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(q)).first->second;
}

double sinc_ratio(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// Everything about the radial line t -> (x, t xi) that the field solve needs;
// the base point is fixed along it, so frames, Christoffel values and the
// shape operator are computed once.
struct RadialContext {
  const LagrangianScene* scene;
  const AmbientManifold* m;
  int n, d;
  Vec x, xi;
  AmbientPoint p;
  Mat frame;            // d x n
  Mat g0, j0;           // ambient metric / complex structure at p
  Mat gbar;
  std::vector<Mat> dg;  // chart derivative of the induced metric
  Mat corr;             // corr(k,i) = sum_j xi^j Gamma^k_{j i}
  Vec eta;              // ambient normal at scale 1
  double lambda;        // |eta|
  Mat shape_cols;       // n x n, column i = S_eta(d/dx_i) chart components
  bool flat;
  double kappa;
  GeodesicFrame gf0;    // parallel frame data at the segment start

  RadialContext(const LagrangianScene& s, const NormalBundlePoint& v) {
    scene = &s;
    m = &s.ambient();
    n = s.dim();
    d = m->dim_real();
    x = v.x;
    xi = v.xi;
    p = s.immerse(x);
    frame = s.coordinate_frame(x);
    g0 = m->metric_matrix(p);
    j0 = m->complex_structure_matrix(p);
    gbar = frame.transpose() * g0 * frame;
    dg = s.induced_metric_derivative(x);
    const std::vector<Mat> gam = s.induced_christoffels(x);
    corr = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) corr(k, i) += xi[j] * gam[k](j, i);
    eta = s.normal_from_xi(x, xi);
    lambda = std::sqrt(std::max(0.0, eta.dot(g0 * eta)));
    shape_cols = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = 1.0;
      shape_cols.col(i) = s.shape_operator(x, eta, e);
    }
    kappa = m->curvature_sups_analytic().c0;
    flat = kappa == 0.0;
    gf0 = m->geodesic_frame(p, eta, 0.0);
  }

  struct NodeData {
    GeodesicFrame gf;
    Mat g, j;
    double phase;  // t lambda sqrt(kappa)
  };
  NodeData node(double t) const {
    NodeData nd;
    if (flat) {
      nd.gf.point = {p.chart_id, p.coords + t * eta};
      nd.g = g0;
      nd.j = j0;
      nd.phase = 0.0;
      return nd;
    }
    nd.gf = m->geodesic_frame(p, eta, t);
    nd.g = m->metric_matrix(nd.gf.point);
    nd.j = m->complex_structure_matrix(nd.gf.point);
    nd.phase = t * lambda * std::sqrt(kappa);
    return nd;
  }

  // F_* of the coordinate tangent (a, b) at (x, t xi) as ambient components
  // at exp(t eta); b are raw dxi components, the split correction is added
  // here.
  Vec push(const NodeData& nd, double t, const Vec& a, const Vec& b) const {
    const Vec k_chart = b + t * (corr * a);
    const Vec value0 = frame * a;
    const Vec deriv0 = t * (frame * (shape_cols * a)) + j0 * (frame * k_chart);
    if (flat) return value0 + deriv0;
    // evolve in the parallel frame: affine along the velocity, sin/cos across
    const Vec j0c = gf0.frame.transpose() * (g0 * value0);
    const Vec dj0c = gf0.frame.transpose() * (g0 * deriv0);
    Vec val(d);
    if (lambda == 0.0 || nd.phase == 0.0) {
      val = j0c + dj0c;  // the segment parameter runs over [0, 1]
    } else {
      val[0] = j0c[0] + dj0c[0];
      for (int k2 = 1; k2 < d; ++k2)
        val[k2] = j0c[k2] * std::cos(nd.phase) + dj0c[k2] * sinc_ratio(nd.phase);
    }
    return nd.gf.frame * val;
  }

  double omega_at(const NodeData& nd, const Vec& pa, const Vec& pb) const {
    return (nd.j * pa).dot(nd.g * pb);
  }

  // omega-tilde at (x, t xi) on coordinate tangents.
  double omega_tilde_at(double t, const Vec& ax, const Vec& axi, const Vec& bx,
                        const Vec& bxi) const {
    double val = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) val += gbar(i, j) * (ax[i] * bxi[j] - axi[j] * bx[i]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double coeff = 0.0;
        for (int k = 0; k < n; ++k) coeff += t * xi[k] * dg[j](i, k);
        val += coeff * (ax[i] * bx[j] - ax[j] * bx[i]);
      }
    return val;
  }

  // All 2n values mu(b_j) on the coordinate basis at one quadrature order.
  Vec mu_basis(int order) const {
    const Quadrature& q = gauss_legendre(order);
    Vec acc = Vec::Zero(2 * n);
    const Vec zero = Vec::Zero(n);
    for (int qi = 0; qi < order; ++qi) {
      const double t = q.nodes[qi];
      const NodeData nd = node(t);
      const Vec prho = push(nd, t, zero, xi);  // F_* of the radial field
      for (int j = 0; j < n; ++j) {
        Vec ej = Vec::Zero(n);
        ej[j] = 1.0;
        // rho_t* (d/dx_j) = (e_j, 0)
        const Vec pj = push(nd, t, ej, zero);
        double integrand = omega_at(nd, prho, pj) - omega_tilde_at(t, zero, xi, ej, zero);
        acc[j] += q.weights[qi] * integrand;
        // rho_t* (d/dxi_j) = (0, t e_j)
        const Vec pv = push(nd, t, zero, t * ej);
        integrand = omega_at(nd, prho, pv) - omega_tilde_at(t, zero, xi, zero, t * ej);
        acc[n + j] += q.weights[qi] * integrand;
      }
    }
    return acc;
  }

  double mu_single(const Vec& coord, int order) const {
    const Quadrature& q = gauss_legendre(order);
    double acc = 0.0;
    const Vec a = coord.head(n);
    const Vec b = coord.tail(n);
    const Vec zero = Vec::Zero(n);
    for (int qi = 0; qi < order; ++qi) {
      const double t = q.nodes[qi];
      const NodeData nd = node(t);
      const Vec prho = push(nd, t, zero, xi);
      const Vec px = push(nd, t, a, t * b);
      acc += q.weights[qi] * (omega_at(nd, prho, px) - omega_tilde_at(t, zero, xi, a, t * b));
    }
    return acc;
  }

  // M(j, i) = omega_t(b_i, b_j) in the coordinate basis.
  Mat omega_t_matrix(double t) const {
    const NodeData nd = node(1.0);
    Mat pushes(d, 2 * n);
    for (int i = 0; i < n; ++i) {
      Vec ei = Vec::Zero(n);
      ei[i] = 1.0;
      pushes.col(i) = push(nd, 1.0, ei, zero_vec(n));
      pushes.col(n + i) = push(nd, 1.0, zero_vec(n), ei);
    }
    Mat mt(2 * n, 2 * n);
    Vec bi = Vec::Zero(2 * n), bj = Vec::Zero(2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) {
        bi.setZero();
        bj.setZero();
        bi[i] = 1.0;
        bj[j] = 1.0;
        const double fstar = omega_at(nd, pushes.col(i), pushes.col(j));
        const double otilde = omega_tilde_at(1.0, bi.head(n), bi.tail(n), bj.head(n), bj.tail(n));
        mt(j, i) = (1.0 - t) * otilde + t * fstar;
      }
    return mt;
  }
};

Vec adaptive_mu_basis(const RadialContext& ctx, bool* converged, int* settled_order = nullptr) {
  int order = 16;
  Vec prev = ctx.mu_basis(order);
  while (order < 128) {
    const Vec next = ctx.mu_basis(order * 2);
    const double change = (next - prev).cwiseAbs().maxCoeff();
    if (change < 1e-12) {
      if (converged) *converged = true;
      if (settled_order) *settled_order = order;  // already within tolerance
      return next;
    }
    order *= 2;
    prev = next;
  }
  if (converged) *converged = false;
  if (settled_order) *settled_order = order;
  return prev;
}

// One flow evaluates the field thousands of times along a smooth trajectory;
// the quadrature order established by the doubling test at one point is
// re-verified periodically instead of at every evaluation.
struct MuOrderMemo {
  int order = 0;
  long evals = 0;
};

Vec mu_basis_memoized(const RadialContext& ctx, MuOrderMemo* memo, bool* converged) {
  if (converged) *converged = true;
  if (!memo) return adaptive_mu_basis(ctx, converged);
  if (memo->order == 0 || (memo->evals++ & 255) == 0)
    return adaptive_mu_basis(ctx, converged, &memo->order);
  return ctx.mu_basis(memo->order);
}

MoserField field_eval(const LagrangianScene& s, double t, const NormalBundlePoint& v,
                      MuOrderMemo* memo) {
  if (t < 0.0 || t > 1.0) throw InputError("vector_field_Xt: t must lie in [0, 1]");
  const RadialContext ctx(s, v);
  const int n2 = 2 * s.dim();
  bool converged = true;
  const Vec mu_vals = mu_basis_memoized(ctx, memo, &converged);
  if (!converged) throw NumericsError("vector_field_Xt: quadrature did not converge");
  const Mat mt = ctx.omega_t_matrix(t);
  Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(mt)};
  if (!lu.isInvertible())
    throw HypothesisError("radius-k1",
                          "vector_field_Xt: omega_t is degenerate here; the nondegeneracy "
                          "radius certificate does not cover this point");
  const Eigen::MatrixXd inv = lu.inverse();
  const double cond = mt.cwiseAbs().rowwise().sum().maxCoeff() *
                      inv.cwiseAbs().rowwise().sum().maxCoeff();
  if (cond > 1e8)
    throw HypothesisError("radius-k1",
                          "vector_field_Xt: omega_t is numerically degenerate here; the "
                          "nondegeneracy radius certificate does not cover this point");
  Vec rhs(n2);
  for (int j = 0; j < n2; ++j) rhs[j] = -mu_vals[j];
  const Eigen::VectorXd sol = lu.solve(Eigen::VectorXd(rhs));
  MoserField out;
  out.coords = sol;
  out.condition = cond;
  out.value = split(s, v, out.coords);
  return out;
}

}  // namespace

double pullback_omega(const LagrangianScene& s, const NormalBundlePoint& v,
                      const SasakiTangent& x, const SasakiTangent& y) {
  const AmbientTangent fx = dF(s, v, x);
  const AmbientTangent fy = dF(s, v, y);
  const Mat g = s.ambient().metric_matrix(fx.base);
  const Mat j = s.ambient().complex_structure_matrix(fx.base);
  return (j * fx.components).dot(g * fy.components);
}

double omega_t(const LagrangianScene& s, double t, const NormalBundlePoint& v,
               const SasakiTangent& x, const SasakiTangent& y) {
  if (t < 0.0 || t > 1.0) throw InputError("omega_t: t must lie in [0, 1]");
  return (1.0 - t) * omega_tilde_via_structure(s, x, y) + t * pullback_omega(s, v, x, y);
}

MuValue mu_detailed(const LagrangianScene& s, const NormalBundlePoint& v,
                    const SasakiTangent& x) {
  const RadialContext ctx(s, v);
  const Vec coord = lift_to_coords(s, x);
  MuValue out;
  int order = 16;
  double prev = ctx.mu_single(coord, order);
  while (order < 128) {
    const double next = ctx.mu_single(coord, order * 2);
    order *= 2;
    const double change = std::abs(next - prev);
    prev = next;
    if (change < 1e-12) {
      out.value = prev;
      out.nodes = order;
      return out;
    }
  }
  out.value = prev;
  out.nodes = order;
  out.converged = false;
  return out;
}

double mu(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x) {
  const MuValue mv = mu_detailed(s, v, x);
  if (!mv.converged) throw NumericsError("mu: quadrature did not converge");
  return mv.value;
}

MoserField vector_field_Xt(const LagrangianScene& s, double t, const NormalBundlePoint& v) {
  return field_eval(s, t, v, nullptr);
}

// ---- trivialization ------------------------------------------------------------

namespace {

// (D E_p)_X (Y) in chart components; linear in Y, finite differences along
// the normalized direction.
Vec tilde_derivative(const LagrangianScene& s, const Vec& p, const Vec& x, const Vec& y) {
  const Mat gbar = s.induced_metric(p);
  const double ny = std::sqrt(std::max(0.0, y.dot(gbar * y)));
  if (ny == 0.0) return Vec::Zero(s.dim());
  const double h = 1e-6;
  const Vec dir = y / ny;
  const Vec ep = s.intrinsic_exp(p, x + h * dir, 1.0);
  const Vec em = s.intrinsic_exp(p, x - h * dir, 1.0);
  return ny * (ep - em) / (2.0 * h);
}

}  // namespace

NormalBundlePoint q_trivialization(const LagrangianScene& s, const Vec& p, const Vec& x,
                                   const Vec& y) {
  NormalBundlePoint q;
  q.x = s.intrinsic_exp(p, x, 1.0);
  q.xi = tilde_derivative(s, p, x, y);
  return q;
}

Mat q_trivialization_derivative(const LagrangianScene& s, const Vec& p, const Vec& x,
                                const Vec& y) {
  const int n = s.dim();
  Mat dq(2 * n, 2 * n);
  const double h = 1e-6;
  for (int c = 0; c < 2 * n; ++c) {
    Vec xu = x, yu = y, xd = x, yd = y;
    if (c < n) {
      xu[c] += h;
      xd[c] -= h;
    } else {
      yu[c - n] += h;
      yd[c - n] -= h;
    }
    const NormalBundlePoint qu = q_trivialization(s, p, xu, yu);
    const NormalBundlePoint qd = q_trivialization(s, p, xd, yd);
    dq.col(c).head(n) = (qu.x - qd.x) / (2.0 * h);
    dq.col(c).tail(n) = (qu.xi - qd.xi) / (2.0 * h);
  }
  return dq;
}

std::pair<Vec, Vec> q_components(const LagrangianScene& s, const Vec& p, const Vec& x,
                                 const Vec& y, const Vec& field_coords) {
  const int n = s.dim();
  const Mat dq = q_trivialization_derivative(s, p, x, y);
  Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(dq)};
  if (!lu.isInvertible())
    throw NumericsError("q_components: trivialization derivative is singular");
  const Eigen::VectorXd sol = lu.solve(Eigen::VectorXd(field_coords));
  const Vec comp = sol;
  return {comp.head(n), comp.tail(n)};
}

// ---- flow ----------------------------------------------------------------------

FlowResult flow(const LagrangianScene& s, const NormalBundlePoint& v0, const TubeRegion& tube,
                FlowMethod method, const FlowSettings& settings) {
  if (!tube.contains(v0)) throw TubeExitError(0.0, "flow: the start lies outside the tube");
  const int n = s.dim();
  const int n2 = 2 * n;
  auto pack = [&](const NormalBundlePoint& q) {
    Vec y(n2);
    y.head(n) = q.x;
    y.tail(n) = q.xi;
    return y;
  };
  auto unpack = [&](const Vec& y) {
    NormalBundlePoint q;
    q.x = y.head(n);
    q.xi = y.tail(n);
    return q;
  };
  MuOrderMemo memo;
  auto field = [&](double t, const Vec& y) {
    return field_eval(s, t, unpack(y), &memo).coords;
  };

  FlowResult out;
  if (method == FlowMethod::Rk4) {
    out.method = "rk4";
    const int steps = std::max(1, static_cast<int>(std::lround(1.0 / settings.rk4_step)));
    const double h = 1.0 / steps;
    Vec y = pack(v0);
    out.trajectory.push_back(v0);
    for (int i = 0; i < steps; ++i) {
      const double t = i * h;
      const Vec k1 = field(t, y);
      const Vec k2 = field(t + 0.5 * h, y + 0.5 * h * k1);
      const Vec k3 = field(t + 0.5 * h, y + 0.5 * h * k2);
      const Vec k4 = field(t + h, y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const NormalBundlePoint q = unpack(y);
      out.trajectory.push_back(q);
      if (!tube.contains(q)) {
        out.stayed_inside = false;
        out.exit_time = (i + 1) * h;
        out.endpoint = q;
        out.steps_or_iterations = i + 1;
        if (settings.throw_on_exit)
          throw TubeExitError(*out.exit_time, "flow: trajectory left the tube");
        return out;
      }
    }
    out.endpoint = unpack(y);
    out.steps_or_iterations = steps;
    return out;
  }

  out.method = "picard";
  const int grid = settings.picard_grid;
  const double h = 1.0 / grid;
  std::vector<Vec> c(grid + 1, pack(v0));
  std::vector<Vec> f(grid + 1);
  std::vector<Vec> integral;
  for (int iter = 0; iter < settings.picard_max_iterations; ++iter) {
    for (int k = 0; k <= grid; ++k) {
      const NormalBundlePoint q = unpack(c[k]);
      if (!tube.contains(q)) {
        out.stayed_inside = false;
        out.exit_time = k * h;
        out.endpoint = q;
        if (settings.throw_on_exit)
          throw TubeExitError(k * h, "flow: Picard iterate left the tube");
        return out;
      }
      f[k] = field(k * h, c[k]);
    }
    cumulative_integral(h, f, integral);
    double sup = 0.0;
    const Vec y0 = pack(v0);
    for (int k = 0; k <= grid; ++k) {
      const Vec next = y0 + integral[k];
      sup = std::max(sup, (next - c[k]).norm());
      c[k] = next;
    }
    out.steps_or_iterations = iter + 1;
    if (sup < settings.picard_tol) {
      out.trajectory.reserve(grid + 1);
      for (int k = 0; k <= grid; ++k) out.trajectory.push_back(unpack(c[k]));
      out.endpoint = out.trajectory.back();
      return out;
    }
  }
  throw NumericsError("flow: Picard iteration did not contract to tolerance");
}

AmbientPoint theta(const LagrangianScene& s, const NormalBundlePoint& v, const TubeRegion& tube,
                   const FlowSettings& settings) {
  const FlowResult fr = flow(s, v, tube, FlowMethod::Rk4, settings);
  return eval_F(s, fr.endpoint);
}

double symplectic_residual(const LagrangianScene& s, const NormalBundlePoint& v,
                           const TubeRegion& tube, double fd_step,
                           const FlowSettings& settings) {
  const int n = s.dim();
  const int n2 = 2 * n;
  // G-orthonormal frame at v built from the coordinate basis
  std::vector<SasakiTangent> frame;
  std::vector<Vec> frame_coords;
  for (int i = 0; i < n2; ++i) {
    Vec e = Vec::Zero(n2);
    e[i] = 1.0;
    SasakiTangent t = split(s, v, e);
    for (size_t j = 0; j < frame.size(); ++j) {
      const double c = sasaki_metric(s, t, frame[j]);
      t.horizontal -= c * frame[j].horizontal;
      t.vertical -= c * frame[j].vertical;
    }
    const double nrm = sasaki_norm(s, t);
    t.horizontal /= nrm;
    t.vertical /= nrm;
    frame.push_back(t);
    frame_coords.push_back(lift_to_coords(s, t));
  }
  const AmbientPoint base = theta(s, v, tube, settings);
  std::vector<Vec> pushed(n2);
  for (int a = 0; a < n2; ++a) {
    NormalBundlePoint vp = v, vm = v;
    const Vec& c = frame_coords[a];
    vp.x += fd_step * c.head(n);
    vp.xi += fd_step * c.tail(n);
    vm.x -= fd_step * c.head(n);
    vm.xi -= fd_step * c.tail(n);
    AmbientPoint qp = theta(s, vp, tube, settings);
    AmbientPoint qm = theta(s, vm, tube, settings);
    if (qp.chart_id != base.chart_id) qp = s.ambient().rechart(qp, base.chart_id);
    if (qm.chart_id != base.chart_id) qm = s.ambient().rechart(qm, base.chart_id);
    pushed[a] = (qp.coords - qm.coords) / (2.0 * fd_step);
  }
  const Mat g = s.ambient().metric_matrix(base);
  const Mat j = s.ambient().complex_structure_matrix(base);
  double worst = 0.0;
  for (int a = 0; a < n2; ++a)
    for (int b = a + 1; b < n2; ++b) {
      const double lhs = (j * pushed[a]).dot(g * pushed[b]);
      const double rhs = omega_tilde_via_structure(s, frame[a], frame[b]);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

MeasuredFieldBounds measure_field_bounds(const LagrangianScene& s, const TubeRegion& tube,
                                         int samples, Rng& rng) {
  MeasuredFieldBounds mb;
  const int n = s.dim();
  const Vec lo = s.domain_lo(), hi = s.domain_hi();
  const double half = 0.5 * tube.radius;
  const double fd = 1e-4 * tube.radius;
  for (int i = 0; i < samples; ++i) {
    Vec p(n);
    for (int k = 0; k < n; ++k) p[k] = rng.uniform(lo[k], hi[k]);
    Vec x = rng.normal_vec(n), y = rng.normal_vec(n);
    x *= rng.uniform(0.0, 0.9 * half) / std::max(1e-12, x.norm());
    y *= rng.uniform(0.05 * half, 0.9 * half) / std::max(1e-12, y.norm());
    const double t = rng.uniform(0.0, 1.0);
    auto components_at = [&](const Vec& xx, const Vec& yy) {
      const NormalBundlePoint q = q_trivialization(s, p, xx, yy);
      const MoserField mf = vector_field_Xt(s, t, q);
      return q_components(s, p, xx, yy, mf.coords);
    };
    const auto [c1, c2] = components_at(x, y);
    const Mat gbar = s.induced_metric(p);
    const double ny = std::sqrt(y.dot(gbar * y));
    mb.growth_c = std::max(mb.growth_c, std::sqrt(c1.dot(gbar * c1)) / ny);
    mb.growth_c = std::max(mb.growth_c, std::sqrt(c2.dot(gbar * c2)) / ny);
    for (int dir = 0; dir < 2 * n; ++dir) {
      Vec xu = x, yu = y, xd = x, yd = y;
      if (dir < n) {
        xu[dir] += fd;
        xd[dir] -= fd;
      } else {
        yu[dir - n] += fd;
        yd[dir - n] -= fd;
      }
      const auto [u1, u2] = components_at(xu, yu);
      const auto [d1, d2] = components_at(xd, yd);
      mb.lipschitz_l = std::max(mb.lipschitz_l, (u1 - d1).norm() / (2.0 * fd));
      mb.lipschitz_l = std::max(mb.lipschitz_l, (u2 - d2).norm() / (2.0 * fd));
    }
  }
  // measured sups are lower estimates; inflate before they feed a radius
  mb.growth_c *= 1.25;
  mb.lipschitz_l *= 1.25;
  return mb;
}

}  // namespace tube
