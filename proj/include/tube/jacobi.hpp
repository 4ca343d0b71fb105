#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tube/sasaki.hpp"

namespace tube {

// Geodesic s -> exp_p(s v) for s in [0, length_param].
struct GeodesicSegment {
  AmbientPoint start;
  Vec velocity;  // chart components at start
  double length_param = 1.0;
  double speed = 0.0;  // |velocity|_g, cached by make_segment
};

GeodesicSegment make_segment(const AmbientManifold& m, const AmbientPoint& p, const Vec& velocity,
                             double length_param = 1.0);

// Field value and covariant derivative along the geodesic at parameter s,
// stored as components in the parallel orthonormal frame of the segment.
struct JacobiState {
  double s = 0.0;
  Vec value;
  Vec derivative;
};

struct JacobiPath {
  GeodesicSegment segment;
  std::vector<JacobiState> states;  // uniform grid including both endpoints
  double forcing_sup = 0.0;         // sup |forcing| seen during integration
  const JacobiState& back() const { return states.back(); }
};

using ForcingInFrame = std::function<Vec(double, const GeodesicFrame&)>;

// Fixed-step RK4 on the first-order system (J, nabla J); the curvature term
// is evaluated through the manifold's curvature operator each step. Initial
// data are ambient chart components at the segment start.
JacobiPath integrate_jacobi(const AmbientManifold& m, const GeodesicSegment& seg,
                            const Vec& value0, const Vec& derivative0,
                            const ForcingInFrame& forcing = nullptr, int steps = 1000);

// Closed-form solution for the two built-in constant-curvature ambients
// (unforced). Used as the fast path inside dF and as the oracle for the
// integrator on the sphere.
JacobiState closed_form_jacobi(const AmbientManifold& m, const GeodesicSegment& seg,
                               const Vec& value0, const Vec& derivative0, double s);

// Ambient vector at exp(s v) realizing a frame-component state.
AmbientTangent materialize(const AmbientManifold& m, const GeodesicSegment& seg,
                           const JacobiState& st);

// ---- the exponential of the normal bundle ----------------------------------

// F(v) = exp_{pi(v)} v.
AmbientPoint eval_F(const LagrangianScene& s, const NormalBundlePoint& v);

// Geodesic segment s -> exp(s eta(v)); shared by everything below.
GeodesicSegment normal_geodesic(const LagrangianScene& s, const NormalBundlePoint& v);

// Pushforward F_* X via the Jacobi field with initial data
// X(0) = pi_* X, nabla X(0) = S_v(pi_* X) + K(X).
AmbientTangent dF(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x);

// Second derivative (nabla^{g (x) G} F_*)(Y, X) via the forced Jacobi field
// of the variation through canonical curves; `steps` controls the RK4 grid.
// d2F_path exposes the integrated forced field itself (forcing sup included)
// so its energy envelope can be checked.
JacobiPath d2F_path(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x,
                    const SasakiTangent& y, int steps = 1000);
AmbientTangent d2F(const LagrangianScene& s, const NormalBundlePoint& v, const SasakiTangent& x,
                   const SasakiTangent& y, int steps = 1000);

// Finite-difference cross-check of d2F: parallel-transports X along the
// canonical curve of Y, differentiates F_* with ambient transport back.
AmbientTangent d2F_finite_difference(const LagrangianScene& s, const NormalBundlePoint& v,
                                     const SasakiTangent& x, const SasakiTangent& y,
                                     double step = 1e-4);

// ---- energy bound ------------------------------------------------------------

struct EnergyBoundReport {
  bool pass = false;
  double worst_margin = 0.0;  // min over the grid of RHS - (|J|^2 + |nabla J|^2)
  double rhs_at_worst = 0.0;
  double epsilon = 0.0;
  double defect_bound = 0.0;
};

// Checks |J|^2 + |nabla J|^2 <= (|J(0)|^2 + |nabla J(0)|^2 + D0^{2-eps})
//   * e^{(1 + C0 v^2 + D0^eps) L} at every grid point of the path.
EnergyBoundReport check_energy_bound(const JacobiPath& path, double c0, double d0, double epsilon);

// Sup of the Jacobi defect |J'' + R(J, sdot) sdot - forcing... | measured on
// the integrated path (central differences on the stored grid); feeds D0 for
// the energy bound of forced fields.
double measured_defect(const AmbientManifold& m, const JacobiPath& path);

}  // namespace tube
