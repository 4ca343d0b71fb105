#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tube/ambient.hpp"
#include "tube/linalg.hpp"
#include "tube/rng.hpp"

namespace tube {

// Sup-norm budget of the second fundamental form and its first two covariant
// derivatives. a1 = a2 = 0 is forced whenever a0 = 0.
struct ExtrinsicBudget {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  bool sampled = false;  // true: lower estimate of the true sup, non-certified
};

struct IntrinsicDistance {
  double value = 0.0;
  // value/mesh_factor <= true distance <= value; 1 for closed forms.
  double mesh_factor = 1.0;
};

// Orthonormal tangent frame e_i and the normal frame J e_i, both as ambient
// chart components (columns).
struct LagrangianFrames {
  Mat tangent;
  Mat normal;
};

// A Lagrangian immersion of an n-torus-like parameter box into the ambient
// space. Coordinates x feed the chart (x, xi) of the normal bundle, so the
// coordinate frame d/dx_i is the one every bundle computation refers to.
class LagrangianScene {
 public:
  virtual ~LagrangianScene() = default;

  virtual std::string kind() const = 0;
  virtual int dim() const = 0;  // n = dim L = dim M / 2
  const AmbientManifold& ambient() const { return *ambient_; }
  std::shared_ptr<const AmbientManifold> ambient_ptr() const { return ambient_; }
  bool is_embedding() const { return embedding_; }
  void mark_immersion_only() { embedding_ = false; }

  // Parameter box [lo_i, hi_i), periodic in every direction for the built-in
  // scenes.
  virtual Vec domain_lo() const = 0;
  virtual Vec domain_hi() const = 0;

  // True when the chart coordinates are arclength coordinates (flat induced
  // chart metric); transports of chart components are then trivial.
  virtual bool arclength_chart() const { return false; }

  // True when the maximizer family attains the exact supremum of d_L/d_M, so
  // the sampled embedding constant is exact rather than a lower estimate.
  virtual bool emb_attained_by_family() const { return false; }

  virtual AmbientPoint immerse(const Vec& x) const = 0;
  // Columns: ambient components of the coordinate fields d/dx_i at x.
  virtual Mat coordinate_frame(const Vec& x) const = 0;

  // Induced metric in the x-chart and its coordinate derivative
  // dg[k](i,j) = d g_ij / d x_k. The base implementation differentiates the
  // metric with a five-point stencil; arclength charts override with zeros.
  Mat induced_metric(const Vec& x) const;
  virtual std::vector<Mat> induced_metric_derivative(const Vec& x) const;
  // Levi-Civita symbols of the induced metric, one matrix per upper index,
  // assembled from induced_metric_derivative.
  std::vector<Mat> induced_christoffels(const Vec& x) const;

  // Second fundamental form and its covariant derivatives. Arguments are
  // chart components; the value is ambient components of a normal vector.
  // order 1 takes one direction, order 2 two.
  virtual Vec second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                                      const std::vector<Vec>& dirs) const = 0;

  virtual ExtrinsicBudget extrinsic_sups(int samples) const = 0;

  // Geodesic of the induced metric from x with initial chart velocity u,
  // evaluated at parameter s. Base implementation integrates the geodesic
  // equation with RK4; arclength charts override with the affine form.
  virtual Vec intrinsic_exp(const Vec& x, const Vec& u, double s) const;

  virtual IntrinsicDistance intrinsic_distance(const Vec& a, const Vec& b) const = 0;

  // Largest tube radius the ambient chart of this scene can represent.
  virtual double chart_reach() const = 0;

  // Pairs that realize (or come near) the supremum of d_L/d_M, appended to
  // the random pairs when estimating the embedding constant.
  virtual std::vector<std::pair<Vec, Vec>> maximizer_pairs() const { return {}; }

  // ---- generic helpers built on the virtual core ---------------------------

  LagrangianFrames frames(const Vec& x) const;

  // eta = sum_i xi^i J(d/dx_i)  <->  fiber coordinates xi.
  Vec normal_from_xi(const Vec& x, const Vec& xi) const;
  Vec xi_from_normal(const Vec& x, const Vec& nu) const;

  // Shape operator S_nu in chart components, sign fixed by
  // g(S_nu(U), V) = -g(II(U, V), nu).
  Vec shape_operator(const Vec& x, const Vec& nu_ambient, const Vec& u_chart) const;
  // (nabla_D S)_nu (U), again chart components.
  Vec shape_operator_derivative(const Vec& x, const Vec& d_chart, const Vec& nu_ambient,
                                const Vec& u_chart) const;

  // Induced curvature R_L(X,Y)Z through the Gauss equation, chart components.
  Vec induced_curvature(const Vec& x, const Vec& bx, const Vec& by, const Vec& bz) const;

  // Parallel transport of tangent / normal chart components along the curve
  // s -> base_curve(s), s in [0,1], fixed-step RK4. Normal components are
  // with respect to the J(d/dx_i) frame and obey the same equation.
  Vec transport_chart_components(const std::function<Vec(double)>& base_curve,
                                 const Vec& comps0, int steps = 64) const;

  // -J nu expressed in the tangent chart basis (nu a normal ambient vector).
  Vec tangent_chart_components_of_minus_j(const Vec& x, const Vec& nu_ambient) const;

 protected:
  LagrangianScene(std::shared_ptr<const AmbientManifold> ambient, bool embedding)
      : ambient_(std::move(ambient)), embedding_(embedding) {}

  std::shared_ptr<const AmbientManifold> ambient_;
  bool embedding_;
};

// ---- built-in scenes --------------------------------------------------------

class CircleScene final : public LagrangianScene {
 public:
  CircleScene(std::shared_ptr<const AmbientManifold> ambient, double radius, const Vec& center);
  std::string kind() const override { return "circle"; }
  bool arclength_chart() const override { return true; }
  bool emb_attained_by_family() const override { return true; }
  int dim() const override { return 1; }
  Vec domain_lo() const override;
  Vec domain_hi() const override;
  AmbientPoint immerse(const Vec& x) const override;
  Mat coordinate_frame(const Vec& x) const override;
  std::vector<Mat> induced_metric_derivative(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                              const std::vector<Vec>& dirs) const override;
  ExtrinsicBudget extrinsic_sups(int samples) const override;
  Vec intrinsic_exp(const Vec& x, const Vec& u, double s) const override;
  IntrinsicDistance intrinsic_distance(const Vec& a, const Vec& b) const override;
  double chart_reach() const override;
  std::vector<std::pair<Vec, Vec>> maximizer_pairs() const override;
  double radius() const { return radius_; }

 private:
  double radius_;
  Vec center_;
};

class ProductTorusScene final : public LagrangianScene {
 public:
  ProductTorusScene(std::shared_ptr<const AmbientManifold> ambient, std::vector<double> radii);
  std::string kind() const override { return "product-torus"; }
  bool arclength_chart() const override { return true; }
  bool emb_attained_by_family() const override { return true; }
  int dim() const override { return static_cast<int>(radii_.size()); }
  Vec domain_lo() const override;
  Vec domain_hi() const override;
  AmbientPoint immerse(const Vec& x) const override;
  Mat coordinate_frame(const Vec& x) const override;
  std::vector<Mat> induced_metric_derivative(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                              const std::vector<Vec>& dirs) const override;
  ExtrinsicBudget extrinsic_sups(int samples) const override;
  Vec intrinsic_exp(const Vec& x, const Vec& u, double s) const override;
  IntrinsicDistance intrinsic_distance(const Vec& a, const Vec& b) const override;
  double chart_reach() const override;
  std::vector<std::pair<Vec, Vec>> maximizer_pairs() const override;

 private:
  std::vector<double> radii_;
};

// Graph of d f for f(x) = amplitude * sin(frequency x): the curve
// y = amplitude * frequency * cos(frequency x) in flat C^1, parametrized by x
// (not arclength), periodic over one period of f.
class GraphScene final : public LagrangianScene {
 public:
  GraphScene(std::shared_ptr<const AmbientManifold> ambient, double amplitude, double frequency,
             bool richardson = false);
  std::string kind() const override { return "graph"; }
  int dim() const override { return 1; }
  Vec domain_lo() const override;
  Vec domain_hi() const override;
  AmbientPoint immerse(const Vec& x) const override;
  Mat coordinate_frame(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                              const std::vector<Vec>& dirs) const override;
  ExtrinsicBudget extrinsic_sups(int samples) const override;
  Vec intrinsic_exp(const Vec& x, const Vec& u, double s) const override;
  IntrinsicDistance intrinsic_distance(const Vec& a, const Vec& b) const override;
  double chart_reach() const override;

  double height(double x) const;        // h(x) = amplitude * frequency * cos(frequency x)
  double height_slope(double x) const;  // h'(x)
  double total_length() const { return total_length_; }
  double arclength_of(double x) const;
  double x_of_arclength(double s) const;

 private:
  double curvature_scalar(double x) const;  // signed kappa in parallel frames
  double curvature_ds(double x, int order) const;

  double amplitude_, frequency_, period_;
  bool richardson_;
  double total_length_ = 0.0;
  std::vector<double> arc_table_;  // arclength at uniform x grid over one period
};

class LatitudeCircleScene final : public LagrangianScene {
 public:
  LatitudeCircleScene(std::shared_ptr<const AmbientManifold> ambient, double colatitude);
  std::string kind() const override { return "latitude-circle"; }
  bool arclength_chart() const override { return true; }
  int dim() const override { return 1; }
  Vec domain_lo() const override;
  Vec domain_hi() const override;
  AmbientPoint immerse(const Vec& x) const override;
  Mat coordinate_frame(const Vec& x) const override;
  std::vector<Mat> induced_metric_derivative(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& bx, const Vec& by, int order,
                              const std::vector<Vec>& dirs) const override;
  ExtrinsicBudget extrinsic_sups(int samples) const override;
  Vec intrinsic_exp(const Vec& x, const Vec& u, double s) const override;
  IntrinsicDistance intrinsic_distance(const Vec& a, const Vec& b) const override;
  double chart_reach() const override;
  std::vector<std::pair<Vec, Vec>> maximizer_pairs() const override;
  double colatitude() const { return colatitude_; }

 private:
  const RoundSphere& sphere() const;
  Vec3 point3(double theta) const;
  double colatitude_;
  int chart_;
  double ring_radius_;  // R sin(colatitude)
};

// ---- spec-level free operations ---------------------------------------------

AmbientPoint immerse(const LagrangianScene& s, const Vec& x);
LagrangianFrames frames(const LagrangianScene& s, const Vec& x);

// nabla^perp_X xi for a normal section sampled along a curve through x; also
// computable as -J nabla-bar_X (J xi). Both routes are exposed for the
// agreement test.
Vec normal_connection(const LagrangianScene& s, const std::function<Vec(double)>& base_curve,
                      const std::function<Vec(double)>& normal_section_ambient, double fd_step);
Vec normal_connection_via_projection(const LagrangianScene& s,
                                     const std::function<Vec(double)>& base_curve,
                                     const std::function<Vec(double)>& normal_section_ambient,
                                     double fd_step);

ExtrinsicBudget extrinsic_sups(const LagrangianScene& s, int samples);

double embedding_constant(const LagrangianScene& s, int pairs, Rng& rng);

// Ambient-projection second fundamental form by finite differences of the
// immersion; validation oracle for the closed forms.
Vec fd_second_fundamental_form(const LagrangianScene& s, const Vec& x, const Vec& bx,
                               const Vec& by, double h = 1e-4);

}  // namespace tube
