// Acceptance suite: every criterion prints exactly one [PASS]/[FAIL] line,
// and the binary exits nonzero if any criterion fails. Tolerances are pinned
// here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tube/harness.hpp"

using namespace tube;
using namespace tube::harness;

namespace {

int g_failures = 0;

class Criterion {
 public:
  explicit Criterion(std::string name, double time_budget_seconds = 0.0)
      : name_(std::move(name)), budget_(time_budget_seconds), start_(clock_t::now()) {}
  void require(bool ok, const std::string& what) {
    if (!ok) {
      ok_ = false;
      details_.push_back(what);
    }
  }
  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(clock_t::now() - start_).count();
    if (budget_ > 0.0 && secs > budget_) {
      ok_ = false;
      details_.push_back("runtime " + std::to_string(secs) + "s exceeds the budget of " +
                         std::to_string(budget_) + "s");
    }
    std::printf("[%s] %s (%.1fs)\n", ok_ ? "PASS" : "FAIL", name_.c_str(), secs);
    if (!ok_) {
      ++g_failures;
      for (const auto& d : details_) std::printf("       - %s\n", d.c_str());
    }
    std::fflush(stdout);
  }

 private:
  using clock_t = std::chrono::steady_clock;
  std::string name_;
  double budget_;
  clock_t::time_point start_;
  bool ok_ = true;
  std::vector<std::string> details_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Vec one(double v) {
  Vec x(1);
  x << v;
  return x;
}

Scene circle_scene(int points = 1000) {
  SceneConfig cfg;
  cfg.lagrangian_kind = "circle";
  cfg.circle_radius = 1.0;
  cfg.seed = 42;
  cfg.points = points;
  cfg.pairs = 10000;
  return scene_from_config(cfg);
}

// ---- criterion 1 ------------------------------------------------------------

void criterion_printed_constants() {
  Criterion c("criterion 1: printed-constant regressions", 1.0);
  const auto regs = bounds::numeric_regressions();
  c.require(regs.size() >= 9, "regression list unexpectedly short");
  for (const auto& r : regs) {
    c.require(r.prefix_ok, r.name + ": rendered " + r.rendered + " misses prefix " +
                               r.expect_prefix);
    c.require(r.side_ok, r.name + ": side condition failed");
  }
  const LogReal alpha = bounds::paper_mode_alpha();
  c.require(alpha.log10_magnitude() > -88.0 && alpha.log10_magnitude() < -87.0,
            "printed alpha outside (1e-88, 1e-87): " + alpha.to_pow10_string());
}

// ---- criterion 2 ------------------------------------------------------------

void criterion_constant_pipeline() {
  Criterion c("criterion 2: constant-pipeline properties");
  using namespace tube::bounds;
  const GeometryBudget budgets[] = {
      GeometryBudget::make(0, 0, 0, 1, 0, 0),
      GeometryBudget::make(1, 0, 0, 0, 0, 0),
      GeometryBudget::make(0.8, 0.3, 0.1, 0.9, 0.4, 0.2, 2.5, 1.7),
  };
  for (const auto& b : budgets) {
    c.require(k0(0.0, b) == 0.0, "k0(0) != 0");
    c.require(std::abs(k1(0.0, b) - 2.0 * M_E * b.a0) < 1e-12 * (1.0 + b.a0),
              "k1(0) != 2 e a0");
    const BarConstants cb = bar_constants(b);
    const double hi = 10.0 / std::max(1.0, budget_b(b));
    double p0 = 0.0, p1 = k1(0.0, b), pd = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double l = hi * i / 1000.0;
      const double v0 = k0(l, b), v1 = k1(l, b), vd = d0_poly(l, cb);
      c.require(v0 >= p0 && v1 >= p1 && vd >= pd, "monotonicity failed at " + fmt(l));
      c.require(l * v1 >= 2.0 * M_E * v0 - 1e-12, "l k1 >= 2e k0 failed at " + fmt(l));
      p0 = v0;
      p1 = v1;
      pd = vd;
    }
    const LogReal rk1 = radius_k1(b);
    if (rk1.is_finite())
      c.require(k0(rk1.to_double(), b) <= 0.5 + 1e-12, "k0 at radius_k1 exceeds 1/2");
    const LogReal r1396 = radius_1396(b);
    if (r1396.is_finite()) {
      const double r = r1396.to_double();
      c.require(r * k1(r, b) <= M_E, "radius_1396 violates the k1 gate");
      c.require(d0_poly(r, cb) <= cb.cbar0, "radius_1396 violates the D0 gate");
    }
    for (double lam : {0.25, 4.0}) {
      const double lhs = budget_b(b.scaled_metric(lam)) * std::sqrt(lam);
      c.require(std::abs(lhs - budget_b(b)) <= 1e-10 * (1.0 + budget_b(b)),
                "B-homogeneity failed at lambda " + fmt(lam));
    }
  }
  // zero-budget degeneracy
  const GeometryBudget zero = GeometryBudget::make(0, 0, 0, 0, 0, 0);
  c.require(radius_k1(zero).is_infinite() && radius_1396(zero).is_infinite() &&
                r_imm(budget_b(zero)).is_infinite(),
            "zero budget must give unbounded radii");
  // B-homogeneous budget: the min expression is exactly 1/B
  for (double bb : {0.5, 1.0, 3.0}) {
    const GeometryBudget hb = GeometryBudget::make(bb * bb, bb * bb * bb, bb * bb * bb * bb, bb,
                                                   bb * bb, bb * bb * bb);
    c.require(std::abs(radius_1396(hb).to_double() - 1.0 / (1396.0 * bb)) <
                  1e-12 / bb,
              "homogeneous budget min-expression != 1/B at B = " + fmt(bb));
  }
}

// ---- criterion 3 ------------------------------------------------------------

void criterion_jacobi_oracle() {
  Criterion c("criterion 3: variation-field integrator vs closed forms");
  RoundSphere sphere(1.0);
  Rng rng(2026);
  double worst_rel = 0.0;
  for (int i = 0; i < 20; ++i) {
    AmbientPoint p{0, rng.uniform_vec(2, -0.7, 0.7)};
    const GeodesicSegment seg = make_segment(sphere, p, rng.normal_vec(2), 1.0);
    const Vec j0 = rng.normal_vec(2), dj0 = rng.normal_vec(2);
    const JacobiPath path = integrate_jacobi(sphere, seg, j0, dj0, nullptr, 1000);
    for (size_t k = 0; k < path.states.size(); k += 50) {
      const JacobiState oracle = closed_form_jacobi(sphere, seg, j0, dj0, path.states[k].s);
      worst_rel = std::max(worst_rel, (oracle.value - path.states[k].value).norm() /
                                          std::max(1.0, oracle.value.norm()));
    }
  }
  c.require(worst_rel <= 1e-8, "sphere relative error " + fmt(worst_rel) + " > 1e-8");
  FlatComplexSpace flat(1);
  double worst_flat = 0.0;
  for (int i = 0; i < 20; ++i) {
    AmbientPoint p{0, rng.uniform_vec(2, -1.0, 1.0)};
    const GeodesicSegment seg = make_segment(flat, p, rng.normal_vec(2), 1.0);
    const Vec j0 = rng.normal_vec(2), dj0 = rng.normal_vec(2);
    const JacobiPath path = integrate_jacobi(flat, seg, j0, dj0, nullptr, 1000);
    for (const auto& st : path.states)
      worst_flat = std::max(worst_flat, (st.value - (j0 + st.s * dj0)).norm());
  }
  c.require(worst_flat <= 1e-12, "flat linear-solution error " + fmt(worst_flat) + " > 1e-12");
}

// ---- criterion 4 ------------------------------------------------------------

void criterion_energy_bound() {
  Criterion c("criterion 4: energy bound on every integrated field");
  Rng rng(11);
  double worst = std::numeric_limits<double>::infinity();
  // unforced fields on both ambients
  for (int i = 0; i < 20; ++i) {
    RoundSphere sphere(1.0);
    AmbientPoint p{0, rng.uniform_vec(2, -0.7, 0.7)};
    const GeodesicSegment seg = make_segment(sphere, p, rng.normal_vec(2), 1.0);
    const JacobiPath path =
        integrate_jacobi(sphere, seg, rng.normal_vec(2), rng.normal_vec(2), nullptr, 400);
    for (double eps : {0.0, 2.0})
      worst = std::min(worst, check_energy_bound(path, 1.0, path.forcing_sup, eps).worst_margin);
    FlatComplexSpace flat(1);
    AmbientPoint q{0, rng.uniform_vec(2, -1.0, 1.0)};
    const GeodesicSegment seg2 = make_segment(flat, q, rng.normal_vec(2), 1.0);
    const JacobiPath path2 =
        integrate_jacobi(flat, seg2, rng.normal_vec(2), rng.normal_vec(2), nullptr, 400);
    for (double eps : {0.0, 2.0})
      worst = std::min(worst, check_energy_bound(path2, 0.0, 0.0, eps).worst_margin);
  }
  // forced variation fields through the second-derivative assembly
  auto flat_amb = std::make_shared<FlatComplexSpace>(1);
  auto circle = std::make_shared<CircleScene>(flat_amb, 1.0, Vec::Zero(2));
  auto sphere_amb = std::make_shared<RoundSphere>(1.0);
  auto equator = std::make_shared<LatitudeCircleScene>(sphere_amb, 0.5 * M_PI);
  for (const std::shared_ptr<LagrangianScene>& L :
       std::vector<std::shared_ptr<LagrangianScene>>{circle, equator}) {
    const double c0 = L->ambient().curvature_sups_analytic().c0;
    for (int i = 0; i < 20; ++i) {
      NormalBundlePoint v{one(rng.uniform(0.0, 6.0)), one(rng.uniform(-0.2, 0.2))};
      SasakiTangent x, y;
      x.base = y.base = v;
      x.horizontal = one(rng.normal());
      x.vertical = one(rng.normal());
      y.horizontal = one(rng.normal());
      y.vertical = one(rng.normal());
      // the forced second-derivative field, with the measured forcing sup
      const JacobiPath forced = d2F_path(*L, v, x, y, 400);
      for (double eps : {0.0, 2.0})
        worst = std::min(worst,
                         check_energy_bound(forced, c0, forced.forcing_sup, eps).worst_margin);
      // and its unforced factor field
      const GeodesicSegment seg = normal_geodesic(*L, v);
      const Vec eta = L->normal_from_xi(v.x, v.xi);
      const Mat frame = L->coordinate_frame(v.x);
      const JacobiPath path = integrate_jacobi(
          L->ambient(), seg, frame * x.horizontal,
          frame * L->shape_operator(v.x, eta, x.horizontal) +
              L->normal_from_xi(v.x, x.vertical),
          nullptr, 400);
      for (double eps : {0.0, 2.0})
        worst =
            std::min(worst, check_energy_bound(path, c0, path.forcing_sup, eps).worst_margin);
    }
  }
  c.require(worst >= 0.0, "negative energy-bound margin " + fmt(worst));
}

// ---- criterion 5 ------------------------------------------------------------

void criterion_inequality_suite() {
  Criterion c("criterion 5: inequality suite at certified radii on four scenes", 300.0);
  const std::vector<std::string> ids = {
      "pushforward-norm-growth",    "pullback-lower-bound",
      "sasaki-form-derivative",     "pullback-derivative-bound",
      "scaling-map-estimates",      "primitive-norm-bound",
      "moser-field-linear-growth",  "primitive-derivative-bound",
      "moser-field-derivative-bound", "trivialization-norm-sandwich",
      "trivialized-component-bounds", "trivialized-derivative-bounds",
      "intrinsic-exp-derivative-constants",
  };
  std::vector<SceneConfig> configs(4);
  configs[0].lagrangian_kind = "circle";
  configs[0].circle_radius = 1.0;
  configs[1].lagrangian_kind = "product-torus";
  configs[1].torus_radii = {1.0, 1.5};
  configs[2].lagrangian_kind = "graph";
  configs[2].graph_amplitude = 0.05;
  configs[2].graph_frequency = 1.0;
  configs[3].lagrangian_kind = "latitude-circle";
  configs[3].latitude_colatitude = 0.5 * M_PI;
  for (auto& cfg : configs) {
    cfg.seed = 42;
    cfg.points = 1000;
    cfg.pairs = 2000;
    cfg.slack = 1e-6;
    const Scene scene = scene_from_config(cfg);
    const SuiteResult result = run_suite(scene, ids);
    c.require(result.reports.size() == ids.size(),
              cfg.lagrangian_kind + ": wrong report count");
    for (const auto& rep : result.reports)
      c.require(rep.verdict == "pass", cfg.lagrangian_kind + "/" + rep.check_id + ": " +
                                           rep.verdict + " margin " + fmt(rep.worst_margin));
  }
}

// ---- criterion 6 ------------------------------------------------------------

void criterion_moser_end_to_end() {
  Criterion c("criterion 6: constructive flow end to end", 60.0);
  // (a) real axis: the flow is trivial and Theta = F
  {
    SceneConfig cfg;
    cfg.lagrangian_kind = "graph";
    cfg.graph_amplitude = 0.0;
    cfg.graph_frequency = 1.0;
    cfg.points = 10;
    cfg.pairs = 100;
    const Scene axis = scene_from_config(cfg);
    TubeRegion tube{axis.lagrangian.get(), 0.5};
    Rng rng(7);
    double worst = 0.0, worst_res = 0.0;
    for (int i = 0; i < 10; ++i) {
      NormalBundlePoint v{one(rng.uniform(0.0, 6.0)), one(rng.uniform(-0.3, 0.3))};
      const AmbientPoint th = theta(*axis.lagrangian, v, tube);
      const AmbientPoint f = eval_F(*axis.lagrangian, v);
      worst = std::max(worst, (th.coords - f.coords).norm());
      worst_res =
          std::max(worst_res, symplectic_residual(*axis.lagrangian, v, tube, 1e-5 * 0.5));
    }
    c.require(worst < 1e-10, "real axis: Theta differs from F by " + fmt(worst));
    c.require(worst_res <= 1e-10, "real axis residual " + fmt(worst_res) + " > 1e-10");
  }
  // (b) unit circle at r = 0.2
  {
    const Scene sc = circle_scene(100);
    const LagrangianScene& L = *sc.lagrangian;
    TubeRegion tube{&L, 0.2};
    Rng rng(2027);
    double worst_endpoint = 0.0, worst_agree = 0.0, worst_zero = 0.0, worst_res = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double xi0 = rng.uniform(1e-3, 0.09);
      NormalBundlePoint v{one(rng.uniform(0.0, 2.0 * M_PI)), one(xi0)};
      const FlowResult fr = flow(L, v, tube, FlowMethod::Rk4);
      const double expected = 1.0 - std::sqrt(1.0 - 2.0 * xi0);
      worst_endpoint = std::max(worst_endpoint, std::abs(fr.endpoint.xi[0] - expected));
      const FlowResult fp = flow(L, v, tube, FlowMethod::Picard);
      worst_agree = std::max(
          worst_agree, std::hypot((fr.endpoint.x - fp.endpoint.x).norm(),
                                  (fr.endpoint.xi - fp.endpoint.xi).norm()));
    }
    for (int i = 0; i < 200; ++i) {
      NormalBundlePoint v{one(rng.uniform(0.0, 2.0 * M_PI)), one(rng.uniform(-0.08, 0.08))};
      worst_res = std::max(worst_res, symplectic_residual(L, v, tube, 1e-5 * 0.2));
    }
    for (int i = 0; i < 20; ++i) {
      NormalBundlePoint z{one(rng.uniform(0.0, 2.0 * M_PI)), one(0.0)};
      const AmbientPoint th = theta(L, z, tube);
      worst_zero =
          std::max(worst_zero, (th.coords - L.immerse(z.x).coords).norm());
    }
    c.require(worst_endpoint <= 1e-6,
              "circle endpoint error " + fmt(worst_endpoint) + " > 1e-6");
    c.require(worst_agree <= 1e-7, "picard/rk4 gap " + fmt(worst_agree) + " > 1e-7");
    c.require(worst_res <= 1e-5, "residual sup " + fmt(worst_res) + " > 1e-5");
    c.require(worst_zero <= 1e-9, "zero-section displacement " + fmt(worst_zero) + " > 1e-9");
  }
}

// ---- criterion 7 ------------------------------------------------------------

void criterion_flow_containment() {
  Criterion c("criterion 7: flow containment in the practical subtube");
  const Scene sc = circle_scene(100);
  const LagrangianScene& L = *sc.lagrangian;
  TubeRegion tube{&L, 0.2};
  Rng rng(31);
  const MeasuredFieldBounds mb = measure_field_bounds(L, tube, 24, rng);
  const double alpha = bounds::lindelof_alpha(mb.growth_c, mb.lipschitz_l).to_double();
  c.require(alpha > 0.0 && alpha <= 1.0, "practical alpha out of range: " + fmt(alpha));
  FlowSettings fs;
  fs.throw_on_exit = false;
  int exits = 0;
  for (int i = 0; i < 100; ++i) {
    NormalBundlePoint v{one(rng.uniform(0.0, 2.0 * M_PI)),
                        one(rng.uniform(-0.5 * alpha * 0.2, 0.5 * alpha * 0.2))};
    const FlowResult fr = flow(L, v, tube, FlowMethod::Rk4, fs);
    if (!fr.stayed_inside) ++exits;
  }
  c.require(exits == 0, fmt(exits) + " trajectories left the tube");
}

// ---- criterion 8 ------------------------------------------------------------

void criterion_injectivity() {
  Criterion c("criterion 8: embedding constant and injectivity probes");
  const Scene sc = circle_scene(1000);
  Rng rng(5);
  const double emb = embedding_constant(*sc.lagrangian, 1000, rng);
  c.require(std::abs(emb - 0.5 * M_PI) <= 1e-3,
            "emb(circle) = " + fmt(emb) + " misses pi/2 by more than 1e-3");
  const double bound = bounds::injectivity_radius_bound(sc.budget).to_double();
  const CheckReport clean = injectivity_probe(sc, 0.9 * bound, 10000);
  c.require(clean.verdict == "pass", "collision below the injectivity bound");
  const CheckReport hit = injectivity_probe(sc, 1.5, 10000);
  c.require(hit.verdict == "fail", "no collision found past the focal radius");
}

// ---- criterion 9 ------------------------------------------------------------

void criterion_determinism() {
  Criterion c("criterion 9: byte-identical reports for a fixed seed");
  const std::vector<std::string> ids = {"split-roundtrip", "moser-field-linear-growth",
                                        "primitive-norm-bound",
                                        "printed-constant-regressions"};
  SceneConfig cfg;
  cfg.lagrangian_kind = "circle";
  cfg.circle_radius = 1.0;
  cfg.seed = 9001;
  cfg.points = 50;
  cfg.pairs = 200;
  const std::string a = emit_report(run_suite(scene_from_config(cfg), ids), "json");
  const std::string b = emit_report(run_suite(scene_from_config(cfg), ids), "json");
  c.require(a == b, "reports differ between runs");
  c.require(a.find("\"verdict\": \"fail\"") == std::string::npos, "a determinism check failed");
}

}  // namespace

int main() {
  criterion_printed_constants();
  criterion_constant_pipeline();
  criterion_jacobi_oracle();
  criterion_energy_bound();
  criterion_inequality_suite();
  criterion_moser_end_to_end();
  criterion_flow_containment();
  criterion_injectivity();
  criterion_determinism();
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
