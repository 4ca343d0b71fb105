#include "tube/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace tube::harness {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& text, size_t byte, const std::string& what) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "config parse error at line " << line << ", column " << col << ": " << what;
  throw InputError(os.str());
}

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw InputError("config: unknown key '" + it.key() + "' in " + where);
}

double require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw InputError("config: key '" + key + "' must be positive");
  return v;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::uint64_t effective_seed(const SceneConfig& cfg) {
  if (const char* env = std::getenv("TUBE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw InputError("TUBE_SEED must be an unsigned integer");
  }
  return cfg.seed;
}

Scene load_scene(const std::string& config_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(config_text, e.byte, e.what());
  }
  if (!root.is_object()) throw InputError("config: top level must be an object");
  reject_unknown_keys(root, {"ambient", "lagrangian", "sampling", "tolerances", "radius_policy"},
                      "top level");
  SceneConfig cfg;

  if (root.contains("ambient")) {
    const auto& a = root["ambient"];
    reject_unknown_keys(a, {"kind", "n", "radius"}, "ambient");
    cfg.ambient_kind = a.value("kind", std::string{});
    cfg.ambient_n = a.value("n", 0);
    cfg.sphere_radius = a.value("radius", 1.0);
    require_positive(cfg.sphere_radius, "ambient.radius");
  }

  if (!root.contains("lagrangian")) throw InputError("config: missing 'lagrangian' block");
  {
    const auto& l = root["lagrangian"];
    reject_unknown_keys(l,
                        {"kind", "radius", "center", "radii", "amplitude", "frequency",
                         "colatitude", "immersed_only"},
                        "lagrangian");
    cfg.lagrangian_kind = l.value("kind", std::string{});
    if (cfg.lagrangian_kind.empty()) throw InputError("config: lagrangian.kind is required");
    cfg.circle_radius = l.value("radius", 1.0);
    if (l.contains("radius")) require_positive(cfg.circle_radius, "lagrangian.radius");
    if (l.contains("center")) cfg.circle_center = l["center"].get<std::vector<double>>();
    if (l.contains("radii")) {
      cfg.torus_radii = l["radii"].get<std::vector<double>>();
      for (double r : cfg.torus_radii) require_positive(r, "lagrangian.radii");
    }
    cfg.graph_amplitude = l.value("amplitude", 0.05);
    if (cfg.graph_amplitude < 0.0) throw InputError("config: lagrangian.amplitude must be >= 0");
    cfg.graph_frequency = l.value("frequency", 1.0);
    require_positive(cfg.graph_frequency, "lagrangian.frequency");
    cfg.latitude_colatitude = l.value("colatitude", 0.5 * M_PI);
    cfg.immersed_only = l.value("immersed_only", false);
  }

  if (root.contains("sampling")) {
    const auto& s = root["sampling"];
    reject_unknown_keys(s, {"seed", "points", "pairs"}, "sampling");
    cfg.seed = s.value("seed", std::uint64_t{42});
    cfg.points = s.value("points", 1000);
    cfg.pairs = s.value("pairs", 10000);
    if (cfg.points < 1) throw InputError("config: sampling.points must be >= 1");
    if (cfg.pairs < 1) throw InputError("config: sampling.pairs must be >= 1");
  }

  if (root.contains("tolerances")) {
    const auto& t = root["tolerances"];
    reject_unknown_keys(t, {"fd_step", "ode_step", "check_margin", "slack"}, "tolerances");
    cfg.fd_step = require_positive(t.value("fd_step", 1e-5), "tolerances.fd_step");
    cfg.ode_step = require_positive(t.value("ode_step", 1e-3), "tolerances.ode_step");
    cfg.check_margin = t.value("check_margin", 0.0);
    cfg.slack = t.value("slack", 1e-6);
  }

  if (root.contains("radius_policy")) {
    const auto& r = root["radius_policy"];
    reject_unknown_keys(r, {"kind", "safety_factor"}, "radius_policy");
    cfg.radius_policy = r.value("kind", std::string{"certified"});
    if (cfg.radius_policy != "certified" && cfg.radius_policy != "practical")
      throw InputError("config: radius_policy.kind must be 'certified' or 'practical'");
    cfg.safety_factor = r.value("safety_factor", 0.9);
    if (!(cfg.safety_factor > 0.0 && cfg.safety_factor <= 1.0))
      throw InputError("config: radius_policy.safety_factor must lie in (0, 1]");
  }

  return scene_from_config(cfg);
}

bounds::GeometryBudget assemble_budget(const AmbientManifold& ambient,
                                       const LagrangianScene& scene, int samples, int pairs,
                                       std::uint64_t seed) {
  const CurvatureSups cs = curvature_sups(ambient);
  const ExtrinsicBudget eb = extrinsic_sups(scene, samples);
  std::optional<double> emb;
  if (scene.is_embedding()) {
    Rng rng(seed ^ fnv1a("embedding-constant"));
    emb = embedding_constant(scene, pairs, rng);
  }
  return bounds::GeometryBudget::make(cs.c0, cs.c1, cs.c2, eb.a0, eb.a1, eb.a2,
                                      ambient.injectivity_radius(), emb);
}

Scene scene_from_config(const SceneConfig& cfg) {
  Scene scene;
  scene.config = cfg;
  scene.config.seed = effective_seed(cfg);
  const std::string& kind = cfg.lagrangian_kind;

  auto check_ambient = [&](const std::string& expected_kind, int expected_n) {
    if (!cfg.ambient_kind.empty() && cfg.ambient_kind != expected_kind)
      throw InputError("config: ambient.kind '" + cfg.ambient_kind +
                       "' does not match the lagrangian kind");
    if (cfg.ambient_n != 0 && cfg.ambient_n != expected_n)
      throw InputError("config: ambient.n does not match the lagrangian kind");
  };

  if (kind == "circle") {
    check_ambient("flat-complex-space", 1);
    auto ambient = std::make_shared<FlatComplexSpace>(1);
    Vec center = Vec::Zero(2);
    if (!cfg.circle_center.empty()) {
      if (cfg.circle_center.size() != 2)
        throw InputError("config: lagrangian.center must have two entries");
      center << cfg.circle_center[0], cfg.circle_center[1];
    }
    scene.ambient = ambient;
    scene.lagrangian = std::make_shared<CircleScene>(ambient, cfg.circle_radius, center);
  } else if (kind == "product-torus") {
    if (cfg.torus_radii.empty()) throw InputError("config: lagrangian.radii is required");
    check_ambient("flat-complex-space", static_cast<int>(cfg.torus_radii.size()));
    auto ambient = std::make_shared<FlatComplexSpace>(static_cast<int>(cfg.torus_radii.size()));
    scene.ambient = ambient;
    scene.lagrangian = std::make_shared<ProductTorusScene>(ambient, cfg.torus_radii);
  } else if (kind == "graph") {
    check_ambient("flat-complex-space", 1);
    auto ambient = std::make_shared<FlatComplexSpace>(1);
    scene.ambient = ambient;
    scene.lagrangian =
        std::make_shared<GraphScene>(ambient, cfg.graph_amplitude, cfg.graph_frequency);
  } else if (kind == "latitude-circle") {
    check_ambient("round-sphere", 1);
    auto ambient = std::make_shared<RoundSphere>(cfg.sphere_radius);
    scene.ambient = ambient;
    scene.lagrangian = std::make_shared<LatitudeCircleScene>(ambient, cfg.latitude_colatitude);
  } else {
    throw InputError("config: unknown lagrangian.kind '" + kind + "'");
  }
  if (cfg.immersed_only)
    std::const_pointer_cast<LagrangianScene>(scene.lagrangian)->mark_immersion_only();

  scene.budget = assemble_budget(*scene.ambient, *scene.lagrangian,
                                 std::max(1024, scene.config.points), scene.config.pairs,
                                 scene.config.seed);

  RadiusInfo ri;
  ri.gate_k1 = bounds::radius_k1(scene.budget).to_double();
  ri.gate_d0 = bounds::radius_d0(scene.budget).to_double();
  ri.chart_reach = scene.lagrangian->chart_reach();
  double r;
  if (scene.config.radius_policy == "practical")
    r = scene.config.safety_factor * std::min(ri.gate_k1, ri.chart_reach);
  else
    r = std::min({ri.gate_k1, ri.gate_d0, ri.chart_reach});
  if (!std::isfinite(r)) r = 0.5;  // every gate unbounded: pick a demonstration scale
  ri.working = r;
  const bounds::BarConstants cb = bounds::bar_constants(scene.budget);
  ri.k1_holds = r * bounds::k1(r, scene.budget) <= M_E * (1.0 + 1e-12);
  ri.d0_holds = bounds::d0_poly(r, cb) <= cb.cbar0 * (1.0 + 1e-12) + 1e-300;
  scene.radius = ri;
  return scene;
}

// ---- reports ----------------------------------------------------------------------

namespace {

ordered_json budget_json(const bounds::GeometryBudget& b) {
  ordered_json j;
  j["c0"] = b.c0;
  j["c1"] = b.c1;
  j["c2"] = b.c2;
  j["a0"] = b.a0;
  j["a1"] = b.a1;
  j["a2"] = b.a2;
  j["rho0"] = std::isinf(b.rho0) ? ordered_json("inf") : ordered_json(b.rho0);
  if (b.emb) j["emb"] = *b.emb;
  return j;
}

ordered_json value_json(const LogReal& v) {
  ordered_json j;
  j["sign"] = v.sign();
  if (v.is_zero())
    j["log10"] = "-inf";
  else if (v.is_infinite())
    j["log10"] = "inf";
  else
    j["log10"] = v.log10_magnitude();
  j["rendered"] = v.to_pow10_string();
  return j;
}

}  // namespace

ordered_json scene_summary_json(const Scene& scene) {
  ordered_json j;
  j["lagrangian"] = scene.config.lagrangian_kind;
  j["ambient"] = scene.ambient->kind();
  j["budget"] = budget_json(scene.budget);
  ordered_json r;
  auto fin = [](double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json("inf");
  };
  r["gate_k1"] = fin(scene.radius.gate_k1);
  r["gate_d0"] = fin(scene.radius.gate_d0);
  r["chart_reach"] = fin(scene.radius.chart_reach);
  r["working"] = scene.radius.working;
  r["k1_holds"] = scene.radius.k1_holds;
  r["d0_holds"] = scene.radius.d0_holds;
  r["policy"] = scene.config.radius_policy;
  j["radius"] = r;
  return j;
}

ordered_json certificates_json(const Scene& scene, bool paper_alpha,
                               std::optional<double> alpha_practical) {
  const std::string budget_prov =
      scene.lagrangian->extrinsic_sups(64).sampled ? "sampled" : "analytic";
  const std::string emb_prov =
      budget_prov == "sampled" || !scene.lagrangian->emb_attained_by_family() ? "sampled"
                                                                              : "analytic";
  const auto certs =
      bounds::certificate_suite(scene.budget, paper_alpha, alpha_practical, budget_prov, emb_prov);
  ordered_json arr = ordered_json::array();
  for (const auto& c : certs) {
    ordered_json j;
    j["name"] = c.name;
    j["formula_id"] = c.formula_id;
    j["inputs"] = budget_json(c.inputs);
    j["value"] = value_json(c.value);
    j["assumptions"] = c.assumptions;
    j["provenance"] = c.provenance;
    if (!c.notes.empty()) j["notes"] = c.notes;
    arr.push_back(j);
  }
  return arr;
}

std::string emit_report(const SuiteResult& result, const std::string& format) {
  if (format == "json") {
    ordered_json doc;
    doc["schema"] = "tube-report-v1";
    doc["seed"] = result.seed;
    doc["scene"] = result.scene_summary;
    ordered_json checks = ordered_json::array();
    for (const auto& r : result.reports) {
      ordered_json j;
      j["check_id"] = r.check_id;
      j["anchor"] = r.anchor;
      j["n_samples"] = r.n_samples;
      j["worst_margin"] = r.worst_margin;
      j["verdict"] = r.verdict;
      if (!r.hypothesis.empty()) j["hypothesis"] = r.hypothesis;
      j["inputs"] = r.inputs;
      if (!r.worst_sample.is_null()) j["worst_sample"] = r.worst_sample;
      checks.push_back(j);
    }
    doc["checks"] = checks;
    return doc.dump(2) + "\n";
  }
  if (format == "csv") {
    std::ostringstream os;
    os << "check_id,anchor,verdict,n_samples,worst_margin,hypothesis\n";
    for (const auto& r : result.reports) {
      os << r.check_id << ',' << r.anchor << ',' << r.verdict << ',' << r.n_samples << ','
         << ordered_json(r.worst_margin).dump() << ',' << r.hypothesis << '\n';
    }
    return os.str();
  }
  if (format == "text") {
    std::ostringstream os;
    os << "suite seed " << result.seed << "\n";
    for (const auto& r : result.reports) {
      os << "  [" << r.verdict << "] " << r.check_id << " (" << r.anchor << ") samples "
         << r.n_samples << " worst margin " << r.worst_margin;
      if (!r.hypothesis.empty()) os << " [" << r.hypothesis << "]";
      os << "\n";
    }
    return os.str();
  }
  throw InputError("emit_report: unsupported format '" + format + "'");
}

// ---- injectivity probe -------------------------------------------------------------

CheckReport injectivity_probe(const Scene& scene, double radius, int pair_budget) {
  const LagrangianScene& L = *scene.lagrangian;
  if (!L.is_embedding()) throw CapabilityError("injectivity_probe: immersion-only scene");
  CheckReport rep;
  rep.check_id = "injectivity-probe";
  rep.anchor = "normal-exp-injectivity-bound";
  rep.verdict = "pass";
  const int n = L.dim();
  const Vec lo = L.domain_lo(), hi = L.domain_hi();
  Rng rng(scene.config.seed ^ fnv1a("injectivity-probe"));
  const int points = std::max(64, std::min(pair_budget, 20000));
  rep.n_samples = points;

  struct Sample {
    NormalBundlePoint v;
    Vec image;  // hashing coordinates (chart coords / embedding)
    AmbientPoint p;
  };
  std::vector<Sample> samples;
  samples.reserve(points);
  const auto* sphere = dynamic_cast<const RoundSphere*>(scene.ambient.get());
  for (int i = 0; i < points; ++i) {
    NormalBundlePoint v;
    v.x.resize(n);
    for (int k = 0; k < n; ++k) v.x[k] = rng.uniform(lo[k], hi[k]);
    Vec dir = rng.normal_vec(n);
    const Mat gbar = L.induced_metric(v.x);
    const double nd = std::sqrt(std::max(1e-300, dir.dot(gbar * dir)));
    v.xi = dir / nd * rng.uniform(-0.999 * radius, 0.999 * radius);
    Sample s;
    s.v = v;
    s.p = eval_F(L, v);
    if (sphere) {
      const Vec3 e = sphere->embed(s.p);
      s.image = Vec(3);
      s.image << e[0], e[1], e[2];
    } else {
      s.image = s.p.coords;
    }
    samples.push_back(std::move(s));
  }

  const double tol = 1e-3 * std::max(radius, 0.1);
  const double sep_floor = 0.05;
  auto bundle_gap = [&](const NormalBundlePoint& a, const NormalBundlePoint& b) {
    const double base = L.intrinsic_distance(a.x, b.x).value;
    return std::hypot(base, (a.xi - b.xi).norm());
  };

  // spatial hash on the image
  std::map<std::array<long, 3>, std::vector<int>> cells;
  auto key_of = [&](const Vec& img) {
    std::array<long, 3> key{0, 0, 0};
    for (int k = 0; k < std::min<int>(3, img.size()); ++k)
      key[k] = static_cast<long>(std::floor(img[k] / tol));
    return key;
  };
  double min_separation = std::numeric_limits<double>::infinity();
  double min_image_gap = std::numeric_limits<double>::infinity();
  int collisions = 0;
  ordered_json first_hit;
  for (int i = 0; i < points; ++i) {
    const auto key = key_of(samples[i].image);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = cells.find({key[0] + dx, key[1] + dy, key[2] + dz});
          if (it == cells.end()) continue;
          for (int j : it->second) {
            const double gap = bundle_gap(samples[i].v, samples[j].v);
            if (gap < sep_floor) continue;  // same bundle point up to sampling
            const double img = scene.ambient->distance(samples[i].p, samples[j].p);
            min_image_gap = std::min(min_image_gap, img);
            if (img < tol) {
              ++collisions;
              min_separation = std::min(min_separation, gap);
              if (first_hit.is_null()) {
                first_hit["x0"] = std::vector<double>(samples[i].v.x.begin(),
                                                      samples[i].v.x.end());
                first_hit["xi0"] = std::vector<double>(samples[i].v.xi.begin(),
                                                       samples[i].v.xi.end());
                first_hit["x1"] = std::vector<double>(samples[j].v.x.begin(),
                                                      samples[j].v.x.end());
                first_hit["xi1"] = std::vector<double>(samples[j].v.xi.begin(),
                                                       samples[j].v.xi.end());
                first_hit["image_distance"] = img;
                first_hit["bundle_distance"] = gap;
              }
            }
          }
        }
    cells[key].push_back(i);
  }
  rep.worst_margin = std::isfinite(min_image_gap) ? min_image_gap - tol : 1.0;
  rep.verdict = collisions == 0 ? "pass" : "fail";
  rep.inputs["radius"] = radius;
  rep.inputs["collision_tol"] = tol;
  rep.inputs["separation_floor"] = sep_floor;
  rep.inputs["collisions"] = collisions;
  rep.inputs["min_image_gap"] =
      std::isfinite(min_image_gap) ? ordered_json(min_image_gap) : ordered_json("inf");
  if (!first_hit.is_null()) rep.worst_sample = first_hit;
  return rep;
}

// ---- moser driver -------------------------------------------------------------------

ordered_json run_moser(const Scene& scene, double radius_or_auto, int starts) {
  const LagrangianScene& L = *scene.lagrangian;
  const double r = radius_or_auto > 0.0 ? radius_or_auto : scene.radius.working;
  if (!(r > 0.0)) throw InputError("run_moser: radius must be positive");
  if (r > L.chart_reach()) throw ChartExitError("run_moser: radius exceeds the chart reach");
  TubeRegion tube{&L, r};
  const bounds::BarConstants cb = bounds::bar_constants(scene.budget);
  FlowSettings fs;
  fs.rk4_step = scene.config.ode_step;

  ordered_json out;
  out["radius"] = r;
  out["gate_k1_holds"] = r * bounds::k1(r, scene.budget) <= M_E * (1.0 + 1e-12);
  out["gate_d0_holds"] = bounds::d0_poly(r, cb) <= cb.cbar0 * (1.0 + 1e-12) + 1e-300;

  Rng rng(scene.config.seed ^ fnv1a("moser-run"));
  MeasuredFieldBounds mb = measure_field_bounds(L, tube, 24, rng);
  double alpha_practical = 1.0;
  if (mb.growth_c > 0.0 && mb.lipschitz_l > 0.0)
    alpha_practical = bounds::lindelof_alpha(mb.growth_c, mb.lipschitz_l).to_double();
  out["measured_growth"] = mb.growth_c;
  out["measured_lipschitz"] = mb.lipschitz_l;
  out["alpha_practical"] = alpha_practical;
  out["alpha_universal_log10"] = bounds::lindelof_alpha(140.0, 12580.0).log10_magnitude();
  out["alpha_printed_log10"] = bounds::paper_mode_alpha().log10_magnitude();

  const int n = L.dim();
  const Vec lo = L.domain_lo(), hi = L.domain_hi();
  const double start_cap = 0.5 * alpha_practical * r;
  int exits = 0;
  double residual_sup = 0.0, agreement_sup = 0.0, zero_sup = 0.0;
  const int residual_probes = std::min(starts, 24);
  for (int i = 0; i < starts; ++i) {
    NormalBundlePoint v;
    v.x.resize(n);
    for (int k = 0; k < n; ++k) v.x[k] = rng.uniform(lo[k], hi[k]);
    Vec dir = rng.normal_vec(n);
    const Mat gbar = L.induced_metric(v.x);
    dir /= std::sqrt(std::max(1e-300, dir.dot(gbar * dir)));
    v.xi = dir * rng.uniform(0.1 * start_cap, start_cap);
    try {
      const FlowResult fr = flow(L, v, tube, FlowMethod::Rk4, fs);
      FlowSettings pf = fs;
      const FlowResult fp = flow(L, v, tube, FlowMethod::Picard, pf);
      agreement_sup = std::max(
          agreement_sup, std::hypot((fr.endpoint.x - fp.endpoint.x).norm(),
                                    (fr.endpoint.xi - fp.endpoint.xi).norm()));
      if (i < residual_probes)
        residual_sup = std::max(residual_sup,
                                symplectic_residual(L, v, tube, 1e-5 * r, fs));
    } catch (const TubeExitError&) {
      ++exits;
    }
  }
  // zero-section fixed points
  for (int i = 0; i < std::min(starts, 16); ++i) {
    NormalBundlePoint v;
    v.x.resize(n);
    for (int k = 0; k < n; ++k) v.x[k] = rng.uniform(lo[k], hi[k]);
    v.xi = Vec::Zero(n);
    const AmbientPoint th = theta(L, v, tube, fs);
    AmbientPoint p = L.immerse(v.x);
    if (p.chart_id != th.chart_id) p = L.ambient().rechart(p, th.chart_id);
    zero_sup = std::max(zero_sup, (th.coords - p.coords).norm());
  }
  out["starts"] = starts;
  out["start_cap"] = start_cap;
  out["tube_exits"] = exits;
  out["picard_rk4_agreement_sup"] = agreement_sup;
  out["symplectic_residual_sup"] = residual_sup;
  out["residual_probes"] = residual_probes;
  out["zero_section_displacement_sup"] = zero_sup;
  return out;
}

}  // namespace tube::harness
