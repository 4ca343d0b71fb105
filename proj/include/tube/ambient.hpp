#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tube/errors.hpp"
#include "tube/linalg.hpp"
#include "tube/rng.hpp"

namespace tube {

struct AmbientPoint {
  int chart_id = 0;
  Vec coords;
};

struct AmbientTangent {
  AmbientPoint base;
  Vec components;
};

// Point on a geodesic together with the velocity and a parallel orthonormal
// frame (columns), everything in chart components at that point.
struct GeodesicFrame {
  AmbientPoint point;
  Vec velocity;
  Mat frame;
};

struct CurvatureSups {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

// Closed-form Kaehler geometry of the two built-in ambient spaces. All
// operations are pure; instances are immutable and safely shared.
class AmbientManifold {
 public:
  virtual ~AmbientManifold() = default;

  virtual std::string kind() const = 0;
  virtual int dim_real() const = 0;
  virtual int complex_dim() const = 0;
  virtual int chart_count() const = 0;
  virtual bool chart_contains(int chart_id, const Vec& coords) const = 0;

  virtual Mat metric_matrix(const AmbientPoint& p) const = 0;
  virtual Mat complex_structure_matrix(const AmbientPoint& p) const = 0;
  // Chart Christoffel symbols, one matrix per upper index k: (Gamma^k)_{ij}.
  virtual std::vector<Mat> christoffels(const AmbientPoint& p) const = 0;

  // Components of R(X,Y)Z (order 0) or its covariant derivatives along the
  // direction arguments (order 1, 2). Both built-ins have parallel curvature,
  // so orders >= 1 return exact zeros.
  virtual Vec curvature_components(const AmbientPoint& p, const Vec& x, const Vec& y,
                                  const Vec& z, int order,
                                  const std::vector<Vec>& directions) const = 0;

  virtual AmbientPoint exp_point(const AmbientPoint& p, const Vec& v, double s) const = 0;
  virtual GeodesicFrame geodesic_frame(const AmbientPoint& p, const Vec& v, double s) const = 0;

  // Parallel transport along the minimal geodesic from a to b.
  virtual Vec transport_along_geodesic(const AmbientPoint& a, const Vec& x,
                                       const AmbientPoint& b) const = 0;

  virtual CurvatureSups curvature_sups_analytic() const = 0;
  virtual double injectivity_radius() const = 0;
  virtual double distance(const AmbientPoint& a, const AmbientPoint& b) const = 0;
  virtual AmbientPoint rechart(const AmbientPoint& p, int chart_id) const = 0;
};

// Flat C^n with coordinates (x_1, y_1, ..., x_n, y_n), J(d/dx_i) = d/dy_i.
class FlatComplexSpace final : public AmbientManifold {
 public:
  explicit FlatComplexSpace(int n);

  std::string kind() const override { return "flat-complex-space"; }
  int dim_real() const override { return 2 * n_; }
  int complex_dim() const override { return n_; }
  int chart_count() const override { return 1; }
  bool chart_contains(int chart_id, const Vec& coords) const override;

  Mat metric_matrix(const AmbientPoint& p) const override;
  Mat complex_structure_matrix(const AmbientPoint& p) const override;
  std::vector<Mat> christoffels(const AmbientPoint& p) const override;
  Vec curvature_components(const AmbientPoint& p, const Vec& x, const Vec& y, const Vec& z,
                          int order, const std::vector<Vec>& directions) const override;
  AmbientPoint exp_point(const AmbientPoint& p, const Vec& v, double s) const override;
  GeodesicFrame geodesic_frame(const AmbientPoint& p, const Vec& v, double s) const override;
  Vec transport_along_geodesic(const AmbientPoint& a, const Vec& x,
                               const AmbientPoint& b) const override;
  CurvatureSups curvature_sups_analytic() const override { return {0.0, 0.0, 0.0}; }
  double injectivity_radius() const override;
  double distance(const AmbientPoint& a, const AmbientPoint& b) const override;
  AmbientPoint rechart(const AmbientPoint& p, int chart_id) const override;

 private:
  int n_;
};

// Round two-sphere of a given radius as the constant-curvature Kaehler
// surface, in two stereographic charts (chart 0 omits the north pole,
// chart 1 the south pole; the transition w' = R^2/w is holomorphic).
// Geodesics, transport and frames are closed-form through the isometric
// embedding into R^3.
class RoundSphere final : public AmbientManifold {
 public:
  explicit RoundSphere(double radius);

  std::string kind() const override { return "round-sphere"; }
  int dim_real() const override { return 2; }
  int complex_dim() const override { return 1; }
  int chart_count() const override { return 2; }
  bool chart_contains(int chart_id, const Vec& coords) const override;

  Mat metric_matrix(const AmbientPoint& p) const override;
  Mat complex_structure_matrix(const AmbientPoint& p) const override;
  std::vector<Mat> christoffels(const AmbientPoint& p) const override;
  Vec curvature_components(const AmbientPoint& p, const Vec& x, const Vec& y, const Vec& z,
                          int order, const std::vector<Vec>& directions) const override;
  AmbientPoint exp_point(const AmbientPoint& p, const Vec& v, double s) const override;
  GeodesicFrame geodesic_frame(const AmbientPoint& p, const Vec& v, double s) const override;
  Vec transport_along_geodesic(const AmbientPoint& a, const Vec& x,
                               const AmbientPoint& b) const override;
  CurvatureSups curvature_sups_analytic() const override;
  double injectivity_radius() const override { return M_PI * radius_; }
  double distance(const AmbientPoint& a, const AmbientPoint& b) const override;
  AmbientPoint rechart(const AmbientPoint& p, int chart_id) const override;

  double radius() const { return radius_; }

  // Embedding helpers; also used by the latitude-circle scene.
  Vec3 embed(const AmbientPoint& p) const;
  Vec3 push_tangent(const AmbientPoint& p, const Vec& v) const;
  AmbientPoint unembed(const Vec3& q, int preferred_chart) const;
  Vec pull_tangent(const AmbientPoint& p, const Vec3& t) const;

 private:
  double conformal_factor(const Vec& coords) const;
  double radius_;
};

// ---- spec-level free operations ------------------------------------------

double metric_eval(const AmbientManifold& m, const AmbientPoint& p, const AmbientTangent& x,
                   const AmbientTangent& y);
AmbientTangent complex_structure(const AmbientManifold& m, const AmbientPoint& p,
                                 const AmbientTangent& x);
AmbientTangent curvature(const AmbientManifold& m, const AmbientPoint& p, const AmbientTangent& x,
                         const AmbientTangent& y, const AmbientTangent& z, int order = 0,
                         const std::vector<AmbientTangent>& directions = {});
AmbientPoint exp_geodesic(const AmbientManifold& m, const AmbientPoint& p, const AmbientTangent& v,
                          double s);

// Transport along a densely sampled curve, treated as a chain of minimal
// geodesic segments between consecutive samples.
AmbientTangent parallel_transport(const AmbientManifold& m,
                                  const std::vector<AmbientPoint>& curve,
                                  const AmbientTangent& x0);

// Analytic sups for the built-in scenes; the sampled estimator below exists
// for validation and future scenes.
CurvatureSups curvature_sups(const AmbientManifold& m);
CurvatureSups curvature_sups_sampled(const AmbientManifold& m,
                                     const std::vector<AmbientPoint>& samples, Rng& rng,
                                     int frames_per_point = 8);

void check_same_base(const AmbientPoint& p, const AmbientTangent& t, const char* who);

}  // namespace tube
