#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tube/jacobi.hpp"

namespace tube {

// Disk bundle of a fixed radius around the zero section.
struct TubeRegion {
  const LagrangianScene* scene = nullptr;
  double radius = 0.0;
  bool contains(const NormalBundlePoint& v) const { return fiber_norm(*scene, v) < radius; }
};

struct MuValue {
  double value = 0.0;
  bool converged = true;
  int nodes = 0;
};

// Pullback of the ambient symplectic form under F on bundle tangents.
double pullback_omega(const LagrangianScene& s, const NormalBundlePoint& v,
                      const SasakiTangent& x, const SasakiTangent& y);

// omega_t = (1-t) omega-tilde + t F^* omega.
double omega_t(const LagrangianScene& s, double t, const NormalBundlePoint& v,
               const SasakiTangent& x, const SasakiTangent& y);

// Radial-homotopy primitive of F^* omega - omega-tilde; Gauss-Legendre in t
// with node doubling until the value moves by less than 1e-12.
double mu(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x);
MuValue mu_detailed(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x);

struct MoserField {
  SasakiTangent value;
  Vec coords;          // coordinate components of the field at v
  double condition;    // condition estimate of the omega_t matrix
};

// Solves omega_t(X, .) = -mu at v. Throws HypothesisError when the linear
// system is close to singular (the radius certificate is then violated).
MoserField vector_field_Xt(const LagrangianScene& s, double t, const NormalBundlePoint& v);

// ---- trivialization over one base point --------------------------------------

// Q_p(X, Y) = J (DE_p)_X(Y), returned in bundle chart coordinates.
NormalBundlePoint q_trivialization(const LagrangianScene& s, const Vec& p, const Vec& x,
                                   const Vec& y);
// Derivative of Q_p at (X, Y) as a 2n x 2n matrix in bundle coordinates.
Mat q_trivialization_derivative(const LagrangianScene& s, const Vec& p, const Vec& x,
                                const Vec& y);
// Components (X1, X2) with DQ_p(X1, X2) = the given coordinate tangent.
std::pair<Vec, Vec> q_components(const LagrangianScene& s, const Vec& p, const Vec& x,
                                 const Vec& y, const Vec& field_coords);

// ---- flow ---------------------------------------------------------------------

enum class FlowMethod { Rk4, Picard };

struct FlowSettings {
  double rk4_step = 1e-3;
  int picard_grid = 512;
  double picard_tol = 1e-10;
  int picard_max_iterations = 60;
  bool throw_on_exit = true;
};

struct FlowResult {
  NormalBundlePoint endpoint;
  std::vector<NormalBundlePoint> trajectory;  // uniform in t on [0, 1]
  bool stayed_inside = true;
  std::optional<double> exit_time;
  std::string method;
  int steps_or_iterations = 0;
};

FlowResult flow(const LagrangianScene& s, const NormalBundlePoint& v0, const TubeRegion& tube,
                FlowMethod method, const FlowSettings& settings = {});

// Theta = F after the time-one flow.
AmbientPoint theta(const LagrangianScene& s, const NormalBundlePoint& v, const TubeRegion& tube,
                   const FlowSettings& settings = {});

// sup over a G-orthonormal frame of |(Theta^* omega - omega-tilde)(E_a, E_b)|
// with Theta differentiated by central differences of step fd_step.
double symplectic_residual(const LagrangianScene& s, const NormalBundlePoint& v,
                           const TubeRegion& tube, double fd_step,
                           const FlowSettings& settings = {});

// Measured growth and Lipschitz sups of the trivialized field over
// B(r/2) x B(r/2), feeding the ODE-existence fraction.
struct MeasuredFieldBounds {
  double growth_c = 0.0;    // sup |X_i(X,Y)| / |Y|
  double lipschitz_l = 0.0; // sup of the component-map differential norms
};
MeasuredFieldBounds measure_field_bounds(const LagrangianScene& s, const TubeRegion& tube,
                                         int samples, Rng& rng);

}  // namespace tube
