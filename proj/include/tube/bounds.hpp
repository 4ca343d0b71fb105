#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tube/log_real.hpp"

namespace tube::bounds {

// The eight sup-bounds every constant is computed from. c* bound the ambient
// curvature tensor and its derivatives, a* the second fundamental form,
// rho0 is the ambient injectivity radius, emb the embedding constant.
struct GeometryBudget {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double rho0 = std::numeric_limits<double>::infinity();
  std::optional<double> emb;

  // Validates nonnegativity, the zero-propagation convention (c1 = c2 = 0
  // when c0 = 0, a1 = a2 = 0 when a0 = 0) and emb >= 1.
  static GeometryBudget make(double c0, double c1, double c2, double a0, double a1, double a2,
                             double rho0 = std::numeric_limits<double>::infinity(),
                             std::optional<double> emb = std::nullopt);

  bool all_zero() const { return c0 == 0.0 && a0 == 0.0; }
  // Budget of the lambda-scaled metric; used by homogeneity tests.
  GeometryBudget scaled_metric(double lambda) const;
};

struct BarConstants {
  double cbar0 = 0.0, cbar1 = 0.0, cbar2 = 0.0;
};

struct Certificate {
  std::string name;
  std::string formula_id;
  GeometryBudget inputs;
  LogReal value;
  std::vector<std::string> assumptions;
  std::string provenance;  // "analytic" or "sampled"
  std::vector<std::string> notes;
};

// ---- the named constants ------------------------------------------------------

// Degeneracy-control constant: 2 l^2 c0 (1 + l^2 a0^2) e^{1 + l^2 c0} + l a0.
double k0(double lambda, const GeometryBudget& b);

// Second-derivative constant; k1(0) = 2 e a0 and l k1(l) >= 2 e k0(l).
double k1(double lambda, const GeometryBudget& b);

BarConstants bar_constants(const GeometryBudget& b);

// D0(x) = cbar2 x^2 + 6 cbar1^2 x^4 + 20 cbar0 cbar1 x^3 + 17 cbar0^2 x^2
//       + 3 cbar1 x.
double d0_poly(double x, const BarConstants& c);

// Largest r with r k1(r) <= e (infinite for the zero budget); the result
// also satisfies k0(r) <= 1/2.
LogReal radius_k1(const GeometryBudget& b);

// Largest r with D0(r) <= cbar0 (infinite when cbar0 = 0).
LogReal radius_d0(const GeometryBudget& b);

// min{1/sqrt(c0), c0/c1, sqrt(c0)/sqrt(c2), 1/a0, a0/a1, sqrt(a0)/sqrt(a2)}
// divided by 1396; implies both gate hypotheses above.
LogReal radius_1396(const GeometryBudget& b);

double budget_b(const GeometryBudget& b);
double budget_b_star(const GeometryBudget& b);

// Guaranteed radii 10^{-100}/B and 10^{-100}/B*.
LogReal r_imm(double b_value);
LogReal r_emb(double b_star_value);

// Non-certified desk-scale radius radius_1396 * alpha/2 for a measured alpha.
LogReal practical_radius(const GeometryBudget& b, double alpha_practical);

// ODE-existence fraction sqrt(2)L / (sqrt(2)L + C (e^{sqrt(2)L} - 1)).
LogReal lindelof_alpha(double growth_c, double lipschitz_l);
// The same template with the two constants' roles exchanged; evaluated at
// C = 140, L = 12580 this reproduces the printed closed form
// 7 sqrt2 / (7 sqrt2 + 629 (e^{140 sqrt2} - 1)). The two disagree by ~17500
// orders of magnitude; certificates carry both under distinct formula ids.
LogReal lindelof_alpha_swapped(double growth_c, double lipschitz_l);
LogReal paper_mode_alpha();

// (1/(3 emb)) min{rho0, pi/(2 sqrt c0), arctan(sqrt c0 / a0)/sqrt c0} with
// the usual limits as c0 or a0 vanish.
LogReal injectivity_radius_bound(const GeometryBudget& b);

// ---- printed-decimal regressions ---------------------------------------------

struct Regression {
  std::string name;
  double value = 0.0;       // plain value when it fits a double
  std::string rendered;     // decimal rendering used for the prefix match
  std::string expect_prefix;
  bool prefix_ok = false;
  bool side_ok = false;     // the accompanying <= / interval claim
  std::string note;
};

std::vector<Regression> numeric_regressions();

// Full certificate suite for one budget. alpha_practical, when present, adds
// the practical-radius certificate. emb_provenance tags the certificates that
// consume the embedding constant (a sampled emb is a lower estimate).
std::vector<Certificate> certificate_suite(const GeometryBudget& b, bool paper_alpha,
                                           std::optional<double> alpha_practical = std::nullopt,
                                           const std::string& provenance = "analytic",
                                           const std::string& emb_provenance = "analytic");

}  // namespace tube::bounds
