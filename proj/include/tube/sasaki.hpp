#pragma once

#include <functional>

#include "tube/lagrangian.hpp"

namespace tube {

// Point (x, xi) of the normal bundle in the chart eta = sum_i xi^i J(d/dx_i).
struct NormalBundlePoint {
  Vec x;
  Vec xi;
};

// Tangent to the bundle at `base`, stored by its horizontal/vertical split:
// `horizontal` holds the d/dx_i components of pi_* X, `vertical` the
// J(d/dx_i) components of the connection map K(X).
struct SasakiTangent {
  NormalBundlePoint base;
  Vec horizontal;
  Vec vertical;
};

using BundleCurve = std::function<NormalBundlePoint(double)>;

// Coordinate tangent (dx, dxi) -> horizontal/vertical split and back. The
// two are exact inverses for whatever Christoffel values the scene reports.
SasakiTangent split(const LagrangianScene& s, const NormalBundlePoint& p, const Vec& coord);
Vec lift_to_coords(const LagrangianScene& s, const SasakiTangent& t);

double sasaki_metric(const LagrangianScene& s, const SasakiTangent& a, const SasakiTangent& b);
double sasaki_norm(const LagrangianScene& s, const SasakiTangent& a);

SasakiTangent jtilde(const LagrangianScene& s, const SasakiTangent& t);

// Canonical 2-form in the bundle chart, on coordinate tangents.
double omega_tilde(const LagrangianScene& s, const NormalBundlePoint& p, const Vec& coord_a,
                   const Vec& coord_b);
// Same object through G(Jtilde . , .); agreement is a test invariant.
double omega_tilde_via_structure(const LagrangianScene& s, const SasakiTangent& a,
                                 const SasakiTangent& b);

enum class Lift { Horizontal, Vertical };

// Levi-Civita connection of the Sasaki metric on lifted fields. `dir` and
// `field` are chart components of the two lifts (tangent components for
// horizontal, J-frame normal components for vertical); `field_cov_deriv` is
// the nabla-bar / nabla-perp derivative of the field along the projection of
// the direction (ignored when the direction is vertical).
SasakiTangent nabla_G(const LagrangianScene& s, const NormalBundlePoint& eta, Lift dir_kind,
                      const Vec& dir, Lift field_kind, const Vec& field,
                      const Vec& field_cov_deriv);

// Parallel transport with respect to G along a bundle curve on [0, 1];
// fixed-step RK4 on the coupled horizontal/vertical system.
SasakiTangent parallel_transport_G(const LagrangianScene& s, const BundleCurve& curve,
                                   const SasakiTangent& x0, int steps = 1000);

// Transport to curve(1) and back pinning FD covariant derivatives; returns
// the components of the inverse transport applied to `at_end`.
SasakiTangent transport_G_back(const LagrangianScene& s, const BundleCurve& curve,
                               const SasakiTangent& at_end, int steps = 64);

// Norm of eta = sum xi^i J(d/dx_i) (equals |xi| in g-orthonormal frames).
double fiber_norm(const LagrangianScene& s, const NormalBundlePoint& p);

// The curve c(t) = [eta]^par(t) + t [K(Y)]^par(t) through p with velocity Y:
// the canonical representative used by the derivative estimates.
BundleCurve canonical_curve(const LagrangianScene& s, const NormalBundlePoint& p,
                            const SasakiTangent& y);

}  // namespace tube
