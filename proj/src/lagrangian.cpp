#include "tube/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tube {

namespace {

double wrapped_gap(double a, double b, double len) {
  double d = std::fmod(std::abs(a - b), len);
  return std::min(d, len - d);
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---- generic helpers --------------------------------------------------------

Mat LagrangianScene::induced_metric(const Vec& x) const {
  const Mat frame = coordinate_frame(x);
  const Mat g = ambient_->metric_matrix(immerse(x));
  return frame.transpose() * g * frame;
}

std::vector<Mat> LagrangianScene::induced_metric_derivative(const Vec& x) const {
  const int n = dim();
  const double h = 1e-5;
  std::vector<Mat> dg(n);
  for (int k = 0; k < n; ++k) {
    Vec xp = x;
    auto at = [&](double off) {
      xp[k] = x[k] + off;
      return induced_metric(xp);
    };
    // five-point stencil
    dg[k] = (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
  }
  return dg;
}

std::vector<Mat> LagrangianScene::induced_christoffels(const Vec& x) const {
  const int n = dim();
  const std::vector<Mat> dg = induced_metric_derivative(x);
  const Mat ginv = induced_metric(x).inverse();
  std::vector<Mat> gam(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l)
          sum += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gam[k](i, j) = 0.5 * sum;
      }
  return gam;
}

Vec LagrangianScene::intrinsic_exp(const Vec& x, const Vec& u, double s) const {
  // Fallback geodesic integrator for scenes without a closed form.
  const int n = dim();
  Vec pos = x, vel = u;
  const int steps = 512;
  const double h = s / steps;
  auto acc = [&](const Vec& p, const Vec& v) {
    const std::vector<Mat> gam = induced_christoffels(p);
    Vec a(n);
    for (int k = 0; k < n; ++k) a[k] = -v.dot(gam[k] * v);
    return a;
  };
  for (int i = 0; i < steps; ++i) {
    const Vec k1p = vel, k1v = acc(pos, vel);
    const Vec k2p = vel + 0.5 * h * k1v, k2v = acc(pos + 0.5 * h * k1p, vel + 0.5 * h * k1v);
    const Vec k3p = vel + 0.5 * h * k2v, k3v = acc(pos + 0.5 * h * k2p, vel + 0.5 * h * k2v);
    const Vec k4p = vel + h * k3v, k4v = acc(pos + h * k3p, vel + h * k3v);
    pos += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    vel += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return pos;
}

LagrangianFrames LagrangianScene::frames(const Vec& x) const {
  const AmbientPoint p = immerse(x);
  const Mat g = ambient_->metric_matrix(p);
  const Mat j = ambient_->complex_structure_matrix(p);
  int rank = 0;
  Mat tang = gram_schmidt(coordinate_frame(x), g, &rank);
  if (rank < dim()) throw CapabilityError("frames: degenerate parametrization derivative");
  return {tang, j * tang};
}

Vec LagrangianScene::normal_from_xi(const Vec& x, const Vec& xi) const {
  const AmbientPoint p = immerse(x);
  const Mat j = ambient_->complex_structure_matrix(p);
  return j * (coordinate_frame(x) * xi);
}

Vec LagrangianScene::tangent_chart_components_of_minus_j(const Vec& x,
                                                         const Vec& nu_ambient) const {
  const AmbientPoint p = immerse(x);
  const Mat g = ambient_->metric_matrix(p);
  const Mat j = ambient_->complex_structure_matrix(p);
  const Mat frame = coordinate_frame(x);
  const Vec tangent = -(j * nu_ambient);
  Mat gbar = frame.transpose() * g * frame;
  return gbar.ldlt().solve(frame.transpose() * (g * tangent));
}

Vec LagrangianScene::xi_from_normal(const Vec& x, const Vec& nu) const {
  return tangent_chart_components_of_minus_j(x, nu);
}

Vec LagrangianScene::shape_operator(const Vec& x, const Vec& nu_ambient,
                                    const Vec& u_chart) const {
  const int n = dim();
  const AmbientPoint p = immerse(x);
  const Mat g = ambient_->metric_matrix(p);
  Vec b(n);
  for (int jj = 0; jj < n; ++jj) {
    Vec ej = Vec::Zero(n);
    ej[jj] = 1.0;
    b[jj] = second_fundamental_form(x, u_chart, ej, 0, {}).dot(g * nu_ambient);
  }
  return -induced_metric(x).ldlt().solve(b);
}

Vec LagrangianScene::shape_operator_derivative(const Vec& x, const Vec& d_chart,
                                               const Vec& nu_ambient, const Vec& u_chart) const {
  const int n = dim();
  const AmbientPoint p = immerse(x);
  const Mat g = ambient_->metric_matrix(p);
  Vec b(n);
  for (int jj = 0; jj < n; ++jj) {
    Vec ej = Vec::Zero(n);
    ej[jj] = 1.0;
    b[jj] = second_fundamental_form(x, u_chart, ej, 1, {d_chart}).dot(g * nu_ambient);
  }
  return -induced_metric(x).ldlt().solve(b);
}

Vec LagrangianScene::induced_curvature(const Vec& x, const Vec& bx, const Vec& by,
                                       const Vec& bz) const {
  const int n = dim();
  if (n == 1) return Vec::Zero(1);  // curves carry no intrinsic curvature
  const AmbientPoint p = immerse(x);
  const Mat g = ambient_->metric_matrix(p);
  const Mat frame = coordinate_frame(x);
  const Vec ax = frame * bx, ay = frame * by, az = frame * bz;
  const Vec rm = ambient_->curvature_components(p, ax, ay, az, 0, {});
  const Vec ii_xz = second_fundamental_form(x, bx, bz, 0, {});
  const Vec ii_yz = second_fundamental_form(x, by, bz, 0, {});
  Vec low(n);
  for (int jj = 0; jj < n; ++jj) {
    Vec ej = Vec::Zero(n);
    ej[jj] = 1.0;
    const Vec ii_yw = second_fundamental_form(x, by, ej, 0, {});
    const Vec ii_xw = second_fundamental_form(x, bx, ej, 0, {});
    low[jj] = rm.dot(g * (frame * ej)) - ii_xz.dot(g * ii_yw) + ii_yz.dot(g * ii_xw);
  }
  return induced_metric(x).ldlt().solve(low);
}

Vec LagrangianScene::transport_chart_components(const std::function<Vec(double)>& base_curve,
                                                const Vec& comps0, int steps) const {
  const int n = dim();
  const double h = 1.0 / steps;
  const double dv = h / 8.0;
  auto rhs = [&](double s, const Vec& w) {
    const Vec x = base_curve(s);
    const Vec xdot = (base_curve(s + dv) - base_curve(s - dv)) / (2.0 * dv);
    const std::vector<Mat> gam = induced_christoffels(x);
    Vec out(n);
    for (int k = 0; k < n; ++k) out[k] = -xdot.dot(gam[k] * w);
    return out;
  };
  Vec w = comps0;
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    const Vec k1 = rhs(s, w);
    const Vec k2 = rhs(s + 0.5 * h, w + 0.5 * h * k1);
    const Vec k3 = rhs(s + 0.5 * h, w + 0.5 * h * k2);
    const Vec k4 = rhs(s + h, w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return w;
}

// ---- CircleScene ------------------------------------------------------------

CircleScene::CircleScene(std::shared_ptr<const AmbientManifold> ambient, double radius,
                         const Vec& center)
    : LagrangianScene(std::move(ambient), true), radius_(radius), center_(center) {
  if (ambient_->kind() != "flat-complex-space" || ambient_->complex_dim() != 1)
    throw InputError("circle scene requires flat C^1");
  if (!(radius > 0.0)) throw InputError("circle scene: radius must be positive");
  if (center_.size() == 0) center_ = Vec::Zero(2);
  if (center_.size() != 2) throw InputError("circle scene: center must have two coordinates");
}

Vec CircleScene::domain_lo() const { return zero_vec(1); }
Vec CircleScene::domain_hi() const {
  Vec v(1);
  v << 2.0 * M_PI * radius_;
  return v;
}

AmbientPoint CircleScene::immerse(const Vec& x) const {
  const double t = x[0] / radius_;
  Vec c(2);
  c << center_[0] + radius_ * std::cos(t), center_[1] + radius_ * std::sin(t);
  return {0, c};
}

Mat CircleScene::coordinate_frame(const Vec& x) const {
  const double t = x[0] / radius_;
  Mat f(2, 1);
  f << -std::sin(t), std::cos(t);
  return f;
}

std::vector<Mat> CircleScene::induced_metric_derivative(const Vec&) const {
  return {Mat::Zero(1, 1)};
}

Vec CircleScene::second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                                         const std::vector<Vec>& dirs) const {
  if (order == 1 && dirs.size() != 1) throw InputError("II order 1 takes one direction");
  if (order == 2 && dirs.size() != 2) throw InputError("II order 2 takes two directions");
  if (order < 0 || order > 2) throw CapabilityError("II: unsupported derivative order");
  if (order > 0) return Vec::Zero(2);  // constant principal curvature in the parallel frame
  const double t = x[0] / radius_;
  Vec acc(2);
  acc << -std::cos(t) / radius_, -std::sin(t) / radius_;
  return bx[0] * by[0] * acc;
}

ExtrinsicBudget CircleScene::extrinsic_sups(int) const { return {1.0 / radius_, 0.0, 0.0, false}; }

Vec CircleScene::intrinsic_exp(const Vec& x, const Vec& u, double s) const {
  Vec out(1);
  out << x[0] + s * u[0];
  return out;
}

IntrinsicDistance CircleScene::intrinsic_distance(const Vec& a, const Vec& b) const {
  return {wrapped_gap(a[0], b[0], 2.0 * M_PI * radius_), 1.0};
}

double CircleScene::chart_reach() const { return kInf; }

std::vector<std::pair<Vec, Vec>> CircleScene::maximizer_pairs() const {
  std::vector<std::pair<Vec, Vec>> out;
  const double half = M_PI * radius_;
  for (int i = 0; i < 8; ++i) {
    Vec a(1), b(1);
    a << i * half / 4.0;
    b << a[0] + half;
    out.emplace_back(a, b);
  }
  return out;
}

// ---- ProductTorusScene ------------------------------------------------------

ProductTorusScene::ProductTorusScene(std::shared_ptr<const AmbientManifold> ambient,
                                     std::vector<double> radii)
    : LagrangianScene(std::move(ambient), true), radii_(std::move(radii)) {
  if (ambient_->kind() != "flat-complex-space" ||
      ambient_->complex_dim() != static_cast<int>(radii_.size()))
    throw InputError("product torus requires flat C^n with n = number of radii");
  for (double r : radii_)
    if (!(r > 0.0)) throw InputError("product torus: radii must be positive");
}

Vec ProductTorusScene::domain_lo() const { return zero_vec(dim()); }
Vec ProductTorusScene::domain_hi() const {
  Vec v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = 2.0 * M_PI * radii_[i];
  return v;
}

AmbientPoint ProductTorusScene::immerse(const Vec& x) const {
  Vec c(2 * dim());
  for (int i = 0; i < dim(); ++i) {
    const double t = x[i] / radii_[i];
    c[2 * i] = radii_[i] * std::cos(t);
    c[2 * i + 1] = radii_[i] * std::sin(t);
  }
  return {0, c};
}

Mat ProductTorusScene::coordinate_frame(const Vec& x) const {
  Mat f = Mat::Zero(2 * dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    const double t = x[i] / radii_[i];
    f(2 * i, i) = -std::sin(t);
    f(2 * i + 1, i) = std::cos(t);
  }
  return f;
}

std::vector<Mat> ProductTorusScene::induced_metric_derivative(const Vec&) const {
  return std::vector<Mat>(dim(), Mat::Zero(dim(), dim()));
}

Vec ProductTorusScene::second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by,
                                               int order, const std::vector<Vec>& dirs) const {
  if (order == 1 && dirs.size() != 1) throw InputError("II order 1 takes one direction");
  if (order == 2 && dirs.size() != 2) throw InputError("II order 2 takes two directions");
  if (order < 0 || order > 2) throw CapabilityError("II: unsupported derivative order");
  Vec out = Vec::Zero(2 * dim());
  if (order > 0) return out;  // parallel second fundamental form
  for (int i = 0; i < dim(); ++i) {
    const double t = x[i] / radii_[i];
    out[2 * i] += bx[i] * by[i] * (-std::cos(t) / radii_[i]);
    out[2 * i + 1] += bx[i] * by[i] * (-std::sin(t) / radii_[i]);
  }
  return out;
}

ExtrinsicBudget ProductTorusScene::extrinsic_sups(int) const {
  double a0 = 0.0;
  for (double r : radii_) a0 = std::max(a0, 1.0 / r);
  return {a0, 0.0, 0.0, false};
}

Vec ProductTorusScene::intrinsic_exp(const Vec& x, const Vec& u, double s) const {
  return x + s * u;
}

IntrinsicDistance ProductTorusScene::intrinsic_distance(const Vec& a, const Vec& b) const {
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double d = wrapped_gap(a[i], b[i], 2.0 * M_PI * radii_[i]);
    acc += d * d;
  }
  return {std::sqrt(acc), 1.0};
}

double ProductTorusScene::chart_reach() const { return kInf; }

std::vector<std::pair<Vec, Vec>> ProductTorusScene::maximizer_pairs() const {
  // Antipodal in every nonempty subset of factors.
  std::vector<std::pair<Vec, Vec>> out;
  const int n = dim();
  for (int mask = 1; mask < (1 << n); ++mask) {
    Vec a = zero_vec(n), b = zero_vec(n);
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) b[i] = M_PI * radii_[i];
    out.emplace_back(a, b);
  }
  return out;
}

// ---- GraphScene -------------------------------------------------------------

GraphScene::GraphScene(std::shared_ptr<const AmbientManifold> ambient, double amplitude,
                       double frequency, bool richardson)
    : LagrangianScene(std::move(ambient), true),
      amplitude_(amplitude),
      frequency_(frequency),
      richardson_(richardson) {
  if (ambient_->kind() != "flat-complex-space" || ambient_->complex_dim() != 1)
    throw InputError("graph scene requires flat C^1");
  if (!(frequency > 0.0)) throw InputError("graph scene: frequency must be positive");
  if (amplitude < 0.0) throw InputError("graph scene: amplitude must be nonnegative");
  period_ = 2.0 * M_PI / frequency_;

  // Arclength table over one period via per-cell Gauss-Legendre quadrature.
  const int cells = 8192;
  arc_table_.assign(cells + 1, 0.0);
  const double dx = period_ / cells;
  static const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
  static const double gl_w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
  for (int i = 0; i < cells; ++i) {
    const double mid = (i + 0.5) * dx;
    double cell = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double xx = mid + 0.5 * dx * gl_x[q];
      const double hp = height_slope(xx);
      cell += gl_w[q] * std::sqrt(1.0 + hp * hp);
    }
    arc_table_[i + 1] = arc_table_[i] + 0.5 * dx * cell;
  }
  total_length_ = arc_table_.back();
}

double GraphScene::height(double x) const {
  return amplitude_ * frequency_ * std::cos(frequency_ * x);
}
double GraphScene::height_slope(double x) const {
  return -amplitude_ * frequency_ * frequency_ * std::sin(frequency_ * x);
}

double GraphScene::arclength_of(double x) const {
  const double cyc = std::floor(x / period_);
  const double xr = x - cyc * period_;
  const double dx = period_ / (arc_table_.size() - 1);
  const int i = std::min(static_cast<int>(xr / dx), static_cast<int>(arc_table_.size()) - 2);
  // refine inside the cell with the same quadrature order
  const double x0 = i * dx;
  double extra = 0.0;
  {
    const double len = xr - x0;
    static const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
    static const double gl_w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
    for (int q = 0; q < 4; ++q) {
      const double xx = x0 + 0.5 * len * (1.0 + gl_x[q]);
      const double hp = height_slope(xx);
      extra += gl_w[q] * std::sqrt(1.0 + hp * hp);
    }
    extra *= 0.5 * len;
  }
  return cyc * total_length_ + arc_table_[i] + extra;
}

double GraphScene::x_of_arclength(double s) const {
  const double cyc = std::floor(s / total_length_);
  double sr = s - cyc * total_length_;
  const double dx = period_ / (arc_table_.size() - 1);
  const auto it = std::upper_bound(arc_table_.begin(), arc_table_.end(), sr);
  int i = std::max(0, static_cast<int>(it - arc_table_.begin()) - 1);
  double x = i * dx;
  // Newton: ds/dx = sqrt(1 + h'^2) >= 1
  for (int iter = 0; iter < 50; ++iter) {
    const double f = arclength_of(x) - sr;
    const double hp = height_slope(x);
    const double step = f / std::sqrt(1.0 + hp * hp);
    x -= step;
    if (std::abs(step) < 1e-14 * period_) break;
  }
  return cyc * period_ + x;
}

Vec GraphScene::domain_lo() const { return zero_vec(1); }
Vec GraphScene::domain_hi() const {
  Vec v(1);
  v << period_;
  return v;
}

AmbientPoint GraphScene::immerse(const Vec& x) const {
  Vec c(2);
  c << x[0], height(x[0]);
  return {0, c};
}

Mat GraphScene::coordinate_frame(const Vec& x) const {
  Mat f(2, 1);
  f << 1.0, height_slope(x[0]);
  return f;
}

double GraphScene::curvature_scalar(double x) const {
  const double hp = height_slope(x);
  const double hpp = -amplitude_ * std::pow(frequency_, 3) * std::cos(frequency_ * x);
  return hpp / std::pow(1.0 + hp * hp, 1.5);
}

double GraphScene::curvature_ds(double x, int order) const {
  // Derivatives of the curvature scalar with respect to arclength, central
  // differences in s; the normal frame is parallel so these are the tensor
  // components of the II derivatives in orthonormal frames.
  const double h = 1e-4 * period_;
  auto kappa_at_arc = [&](double s) { return curvature_scalar(x_of_arclength(s)); };
  const double s0 = arclength_of(x);
  auto d1 = [&](double hh) { return (kappa_at_arc(s0 + hh) - kappa_at_arc(s0 - hh)) / (2.0 * hh); };
  auto d2 = [&](double hh) {
    return (kappa_at_arc(s0 + hh) - 2.0 * kappa_at_arc(s0) + kappa_at_arc(s0 - hh)) / (hh * hh);
  };
  if (order == 1) {
    if (!richardson_) return d1(h);
    return (4.0 * d1(h) - d1(2.0 * h)) / 3.0;
  }
  if (!richardson_) return d2(h);
  return (4.0 * d2(h) - d2(2.0 * h)) / 3.0;
}

Vec GraphScene::second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                                        const std::vector<Vec>& dirs) const {
  if (order == 1 && dirs.size() != 1) throw InputError("II order 1 takes one direction");
  if (order == 2 && dirs.size() != 2) throw InputError("II order 2 takes two directions");
  if (order < 0 || order > 2) throw CapabilityError("II: unsupported derivative order");
  const double hp = height_slope(x[0]);
  const double gbar = 1.0 + hp * hp;
  Vec unit_normal(2);
  unit_normal << -hp / std::sqrt(gbar), 1.0 / std::sqrt(gbar);
  double coeff = bx[0] * by[0];
  if (order == 0) {
    return coeff * gbar * curvature_scalar(x[0]) * unit_normal;
  }
  double scalar;
  if (order == 1) {
    coeff *= dirs[0][0];
    scalar = std::pow(gbar, 1.5) * curvature_ds(x[0], 1);
  } else {
    coeff *= dirs[0][0] * dirs[1][0];
    scalar = gbar * gbar * curvature_ds(x[0], 2);
  }
  return coeff * scalar * unit_normal;
}

ExtrinsicBudget GraphScene::extrinsic_sups(int samples) const {
  const int n = std::max(64, samples);
  ExtrinsicBudget b;
  b.sampled = true;
  for (int i = 0; i < n; ++i) {
    const double x = period_ * (i + 0.5) / n;
    b.a0 = std::max(b.a0, std::abs(curvature_scalar(x)));
    b.a1 = std::max(b.a1, std::abs(curvature_ds(x, 1)));
    b.a2 = std::max(b.a2, std::abs(curvature_ds(x, 2)));
  }
  if (b.a0 == 0.0) b.a1 = b.a2 = 0.0;
  return b;
}

Vec GraphScene::intrinsic_exp(const Vec& x, const Vec& u, double s) const {
  const double hp = height_slope(x[0]);
  const double speed = std::sqrt(1.0 + hp * hp) * u[0];
  Vec out(1);
  out << x_of_arclength(arclength_of(x[0]) + s * speed);
  return out;
}

IntrinsicDistance GraphScene::intrinsic_distance(const Vec& a, const Vec& b) const {
  const double gap = wrapped_gap(arclength_of(a[0]), arclength_of(b[0]), total_length_);
  return {gap, 1.0 + 1e-9};
}

double GraphScene::chart_reach() const { return kInf; }

// ---- LatitudeCircleScene ----------------------------------------------------

LatitudeCircleScene::LatitudeCircleScene(std::shared_ptr<const AmbientManifold> ambient,
                                         double colatitude)
    : LagrangianScene(std::move(ambient), true), colatitude_(colatitude) {
  const auto* sph = dynamic_cast<const RoundSphere*>(ambient_.get());
  if (!sph) throw InputError("latitude-circle scene requires the round sphere");
  if (!(colatitude > 0.0 && colatitude < M_PI))
    throw InputError("latitude-circle: colatitude must lie in (0, pi)");
  chart_ = colatitude_ >= 1.1 ? 0 : 1;
  ring_radius_ = sph->radius() * std::sin(colatitude_);
}

const RoundSphere& LatitudeCircleScene::sphere() const {
  return static_cast<const RoundSphere&>(*ambient_);
}

Vec3 LatitudeCircleScene::point3(double theta) const {
  const double r = sphere().radius();
  return Vec3(r * std::sin(colatitude_) * std::cos(theta),
              r * std::sin(colatitude_) * std::sin(theta), r * std::cos(colatitude_));
}

Vec LatitudeCircleScene::domain_lo() const { return zero_vec(1); }
Vec LatitudeCircleScene::domain_hi() const {
  Vec v(1);
  v << 2.0 * M_PI * ring_radius_;
  return v;
}

AmbientPoint LatitudeCircleScene::immerse(const Vec& x) const {
  return sphere().unembed(point3(x[0] / ring_radius_), chart_);
}

Mat LatitudeCircleScene::coordinate_frame(const Vec& x) const {
  const double theta = x[0] / ring_radius_;
  const Vec3 t3(-std::sin(theta), std::cos(theta), 0.0);  // unit: arclength chart
  const AmbientPoint p = immerse(x);
  Mat f(2, 1);
  f.col(0) = sphere().pull_tangent(p, t3);
  return f;
}

std::vector<Mat> LatitudeCircleScene::induced_metric_derivative(const Vec&) const {
  return {Mat::Zero(1, 1)};
}

Vec LatitudeCircleScene::second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by,
                                                 int order, const std::vector<Vec>& dirs) const {
  if (order == 1 && dirs.size() != 1) throw InputError("II order 1 takes one direction");
  if (order == 2 && dirs.size() != 2) throw InputError("II order 2 takes two directions");
  if (order < 0 || order > 2) throw CapabilityError("II: unsupported derivative order");
  if (order > 0) return Vec::Zero(2);  // constant geodesic curvature along the ring
  const double r = sphere().radius();
  const double theta = x[0] / ring_radius_;
  const double cphi = std::cos(colatitude_), sphi = std::sin(colatitude_);
  // acceleration of the unit-speed ring minus its radial (sphere-normal) part
  Vec3 a3(-cphi * cphi / (r * sphi) * std::cos(theta), -cphi * cphi / (r * sphi) * std::sin(theta),
          cphi / r);
  const AmbientPoint p = immerse(x);
  return bx[0] * by[0] * sphere().pull_tangent(p, a3);
}

ExtrinsicBudget LatitudeCircleScene::extrinsic_sups(int) const {
  const double a0 = std::abs(std::cos(colatitude_) / std::sin(colatitude_)) / sphere().radius();
  return {a0, 0.0, 0.0, false};
}

Vec LatitudeCircleScene::intrinsic_exp(const Vec& x, const Vec& u, double s) const {
  Vec out(1);
  out << x[0] + s * u[0];
  return out;
}

IntrinsicDistance LatitudeCircleScene::intrinsic_distance(const Vec& a, const Vec& b) const {
  return {wrapped_gap(a[0], b[0], 2.0 * M_PI * ring_radius_), 1.0};
}

double LatitudeCircleScene::chart_reach() const {
  // colatitude range covered by the active stereographic chart
  const double r = sphere().radius();
  const double edge = 2.0 * std::atan(1.0 / 1.999);  // chart 0 boundary colatitude
  double margin;
  if (chart_ == 0)
    margin = colatitude_ - edge;
  else
    margin = (M_PI - edge) - colatitude_;
  return 0.98 * r * std::max(0.0, margin);
}

std::vector<std::pair<Vec, Vec>> LatitudeCircleScene::maximizer_pairs() const {
  std::vector<std::pair<Vec, Vec>> out;
  const double half = M_PI * ring_radius_;
  for (int i = 0; i < 8; ++i) {
    Vec a(1), b(1);
    a << i * half / 4.0;
    b << a[0] + half;
    out.emplace_back(a, b);
  }
  return out;
}

// ---- free operations --------------------------------------------------------

AmbientPoint immerse(const LagrangianScene& s, const Vec& x) {
  // periodic scenes accept any coordinate; reject only non-finite input
  for (int i = 0; i < s.dim(); ++i)
    if (!std::isfinite(x[i])) throw InputError("immerse: non-finite parameter");
  return s.immerse(x);
}

LagrangianFrames frames(const LagrangianScene& s, const Vec& x) { return s.frames(x); }

Vec normal_connection(const LagrangianScene& s, const std::function<Vec(double)>& base_curve,
                      const std::function<Vec(double)>& normal_section_ambient, double fd_step) {
  // -J nabla-bar_X (J xi): pull J xi to the tangent chart basis along the
  // curve, covariant-differentiate, push back and rotate.
  const double h = fd_step;
  auto tangent_comps = [&](double t) {
    return s.tangent_chart_components_of_minus_j(base_curve(t), -normal_section_ambient(t));
  };
  const Vec x0 = base_curve(0.0);
  const Vec xdot = (base_curve(h) - base_curve(-h)) / (2.0 * h);
  const Vec tdot = (tangent_comps(h) - tangent_comps(-h)) / (2.0 * h);
  const std::vector<Mat> gam = s.induced_christoffels(x0);
  Vec cov(s.dim());
  const Vec t0 = tangent_comps(0.0);
  for (int k = 0; k < s.dim(); ++k) cov[k] = tdot[k] + xdot.dot(gam[k] * t0);
  const AmbientPoint p = s.immerse(x0);
  const Mat j = s.ambient().complex_structure_matrix(p);
  return -(j * (s.coordinate_frame(x0) * cov));
}

Vec normal_connection_via_projection(const LagrangianScene& s,
                                     const std::function<Vec(double)>& base_curve,
                                     const std::function<Vec(double)>& normal_section_ambient,
                                     double fd_step) {
  const double h = fd_step;
  const Vec x0 = base_curve(0.0);
  const AmbientPoint p = s.immerse(x0);
  const Mat g = s.ambient().metric_matrix(p);
  const Vec xdot_chart = (base_curve(h) - base_curve(-h)) / (2.0 * h);
  const Vec xdot_amb = s.coordinate_frame(x0) * xdot_chart;
  Vec deriv = (normal_section_ambient(h) - normal_section_ambient(-h)) / (2.0 * h);
  // ambient covariant correction (nonzero on the sphere chart)
  const std::vector<Mat> gam = s.ambient().christoffels(p);
  const Vec nu0 = normal_section_ambient(0.0);
  for (int k = 0; k < s.ambient().dim_real(); ++k) deriv[k] += xdot_amb.dot(gam[k] * nu0);
  // normal projection
  const Mat frame = s.coordinate_frame(x0);
  const Mat gbar = frame.transpose() * g * frame;
  const Vec a = gbar.ldlt().solve(frame.transpose() * (g * deriv));
  return deriv - frame * a;
}

ExtrinsicBudget extrinsic_sups(const LagrangianScene& s, int samples) {
  if (samples < 1) throw InputError("extrinsic_sups: empty sampler");
  ExtrinsicBudget b = s.extrinsic_sups(samples);
  if (b.a0 == 0.0) b.a1 = b.a2 = 0.0;
  return b;
}

double embedding_constant(const LagrangianScene& s, int pairs, Rng& rng) {
  if (!s.is_embedding()) throw CapabilityError("embedding_constant: immersion-only scene");
  if (pairs < 1) throw InputError("embedding_constant: empty pair sampler");
  const Vec lo = s.domain_lo(), hi = s.domain_hi();
  const int n = s.dim();
  double best = 1.0;
  auto consider = [&](const Vec& a, const Vec& b) {
    const double dm = s.ambient().distance(s.immerse(a), s.immerse(b));
    if (dm < 1e-9) return;
    best = std::max(best, s.intrinsic_distance(a, b).value / dm);
  };
  for (const auto& [a, b] : s.maximizer_pairs()) consider(a, b);
  const int strata = std::max(1, static_cast<int>(std::round(std::pow(pairs, 0.5))));
  for (int i = 0; i < pairs; ++i) {
    Vec a(n), b(n);
    for (int k = 0; k < n; ++k) {
      const double span = hi[k] - lo[k];
      a[k] = lo[k] + span * ((i % strata) + rng.uniform01()) / strata;
      b[k] = lo[k] + span * rng.uniform01();
    }
    consider(a, b);
  }
  return best;
}

Vec fd_second_fundamental_form(const LagrangianScene& s, const Vec& x, const Vec& bx,
                               const Vec& by, double h) {
  const int n = s.dim();
  const AmbientPoint p = s.immerse(x);
  const int d = s.ambient().dim_real();
  const Mat g = s.ambient().metric_matrix(p);
  const std::vector<Mat> gam = s.ambient().christoffels(p);
  auto chart_coords = [&](const Vec& xx) {
    AmbientPoint q = s.immerse(xx);
    if (q.chart_id != p.chart_id) q = s.ambient().rechart(q, p.chart_id);
    return q.coords;
  };
  Vec out = Vec::Zero(d);
  const Mat frame = s.coordinate_frame(x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h;
      xpp[j] += h;
      xpm[i] += h;
      xpm[j] -= h;
      xmp[i] -= h;
      xmp[j] += h;
      xmm[i] -= h;
      xmm[j] -= h;
      const Vec d2 =
          (chart_coords(xpp) - chart_coords(xpm) - chart_coords(xmp) + chart_coords(xmm)) /
          (4.0 * h * h);
      Vec w = d2;
      for (int k = 0; k < d; ++k) w[k] += frame.col(i).dot(gam[k] * frame.col(j));
      out += bx[i] * by[j] * w;
    }
  // normal projection
  const Mat gbar = frame.transpose() * g * frame;
  const Vec a = gbar.ldlt().solve(frame.transpose() * (g * out));
  return out - frame * a;
}

}  // namespace tube
