#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tube/bounds.hpp"
#include "tube/moser.hpp"

namespace tube::harness {

using ordered_json = nlohmann::ordered_json;

struct SceneConfig {
  // ambient block (defaults derived from the lagrangian kind)
  std::string ambient_kind;
  int ambient_n = 0;
  double sphere_radius = 1.0;
  // lagrangian block
  std::string lagrangian_kind;
  double circle_radius = 1.0;
  std::vector<double> circle_center;
  std::vector<double> torus_radii;
  double graph_amplitude = 0.05;
  double graph_frequency = 1.0;
  double latitude_colatitude = 0.5 * M_PI;
  bool immersed_only = false;
  // sampling block
  std::uint64_t seed = 42;
  int points = 1000;
  int pairs = 10000;
  // tolerances block
  double fd_step = 1e-5;
  double ode_step = 1e-3;
  double check_margin = 0.0;
  double slack = 1e-6;
  // radius policy
  std::string radius_policy = "certified";  // "certified" | "practical"
  double safety_factor = 0.9;
};

// Radii resolved for a scene: the two analytic gates, the chart cap and the
// working radius the suite samples in.
struct RadiusInfo {
  double gate_k1 = 0.0;      // largest r with r k1(r) <= e (inf for zero budget)
  double gate_d0 = 0.0;      // largest r with D0(r) <= cbar0
  double chart_reach = 0.0;
  double working = 0.0;
  bool k1_holds = false;     // gates re-verified at the working radius
  bool d0_holds = false;
};

struct Scene {
  SceneConfig config;
  std::shared_ptr<const AmbientManifold> ambient;
  std::shared_ptr<const LagrangianScene> lagrangian;
  bounds::GeometryBudget budget;
  RadiusInfo radius;
};

// Parses the documented JSON schema; unknown keys are errors, parse errors
// carry line/column.
Scene load_scene(const std::string& config_text);
Scene scene_from_config(const SceneConfig& cfg);

// Budget of a constructed scene (analytic ambient sups, scene extrinsic sups,
// injectivity radius, embedding constant when the scene is embedded).
bounds::GeometryBudget assemble_budget(const AmbientManifold& ambient,
                                       const LagrangianScene& scene, int samples, int pairs,
                                       std::uint64_t seed);

struct CheckReport {
  std::string check_id;
  std::string anchor;  // formula id, resolved in docs/checks.md
  int n_samples = 0;
  double worst_margin = 0.0;
  std::string verdict;  // "pass" | "fail" | "hypothesis-not-met"
  std::string hypothesis;  // violated certificate name when gated out
  ordered_json inputs;
  ordered_json worst_sample;
};

struct SuiteResult {
  std::uint64_t seed = 0;
  ordered_json scene_summary;
  std::vector<CheckReport> reports;
};

struct CheckInfo {
  std::string id;
  std::string anchor;
};

std::vector<std::string> registered_check_ids();
std::vector<CheckInfo> registered_checks();
SuiteResult run_suite(const Scene& scene, const std::vector<std::string>& check_ids = {});

// Near-collision search across sampled bundle points under F.
CheckReport injectivity_probe(const Scene& scene, double radius, int pair_budget);

std::string emit_report(const SuiteResult& result, const std::string& format);

ordered_json scene_summary_json(const Scene& scene);

// Certificates for the scene's budget rendered as JSON (the documented
// schema: name, formula_id, inputs, value {sign, log10}, assumptions,
// provenance).
ordered_json certificates_json(const Scene& scene, bool paper_alpha,
                               std::optional<double> alpha_practical = std::nullopt);

// One-stop construction run used by the CLI: flows, endpoint statistics,
// residual sups, both alpha values.
ordered_json run_moser(const Scene& scene, double radius_or_auto, int starts);

std::uint64_t effective_seed(const SceneConfig& cfg);

}  // namespace tube::harness
