#ifndef DPP_FUNCTIONAL_HPP
#define DPP_FUNCTIONAL_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "dpp/domain.hpp"
#include "dpp/polynomial.hpp"
#include "dpp/rng.hpp"

namespace dpp {

struct FlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Smooth outer function f: R^M -> R with analytic gradient and Hessian.
class OuterFunction {
 public:
  virtual ~OuterFunction() = default;
  virtual int arity() const = 0;
  virtual double value(const Eigen::VectorXd& s) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& s) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& s) const = 0;
};

std::shared_ptr<const OuterFunction> linear_outer(Eigen::VectorXd a, double b);
std::shared_ptr<const OuterFunction> quadratic_outer(Eigen::MatrixXd A,
                                                     Eigen::VectorXd a,
                                                     double b);
/// f(s) = tanh(a . s + b)
std::shared_ptr<const OuterFunction> tanh_outer(Eigen::VectorXd a, double b);
/// f(s) = exp(-|s - c|^2 / w)
std::shared_ptr<const OuterFunction> gauss_outer(Eigen::VectorXd c, double w);

/// Smooth linear statistic phi: R^d -> R with analytic gradient / Laplacian.
class Statistic {
 public:
  virtual ~Statistic() = default;
  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;
  virtual double laplacian(const Point& x) const = 0;
};

std::shared_ptr<const Statistic> polynomial_statistic(Polynomial p);
std::shared_ptr<const Statistic> fourier_statistic(FourierSeries f);

/// Test functional F(X) = f(sum phi_1, ..., sum phi_M) 1{|X| <= K}.
class TestFunctional {
 public:
  TestFunctional(std::shared_ptr<const OuterFunction> outer,
                 std::vector<std::shared_ptr<const Statistic>> statistics,
                 int count_cutoff);

  int arity() const { return static_cast<int>(stats_.size()); }
  int count_cutoff() const { return cutoff_; }
  const OuterFunction& outer() const { return *outer_; }
  const Statistic& statistic(int m) const { return *stats_[m]; }

  Eigen::VectorXd statistic_sums(const PointConfiguration& cfg) const;

 private:
  std::shared_ptr<const OuterFunction> outer_;
  std::vector<std::shared_ptr<const Statistic>> stats_;
  int cutoff_;
};

double eval_functional(const TestFunctional& F, const PointConfiguration& cfg);
/// Per-point gradients, one row per point. Zero above the count cutoff
/// (the indicator is locally constant in the points).
Eigen::MatrixXd grad_functional(const TestFunctional& F,
                                const PointConfiguration& cfg);

/// Smooth vector field with analytic divergence (and optional Jacobian).
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual int dimension() const = 0;
  virtual Point value(const Point& x) const = 0;
  virtual double divergence(const Point& x) const = 0;
  virtual bool has_jacobian() const { return false; }
  virtual Eigen::MatrixXd jacobian(const Point& x) const;
};

/// Components given as polynomials; divergence and Jacobian are symbolic.
std::shared_ptr<const VectorField> polynomial_field(
    std::vector<Polynomial> components);
std::shared_ptr<const VectorField> constant_field(Point c);
/// v(x) = x
std::shared_ptr<const VectorField> radial_field(int dim);

double directional_grad(const TestFunctional& F, const VectorField& v,
                        const PointConfiguration& cfg);

/// Flow phi_t of a vector field, integrated by adaptive Runge-Kutta.
struct FlowMap {
  std::shared_ptr<const VectorField> field;
  double time = 0.0;
  double ode_tolerance = 1e-10;
};

/// phi_t(x); throws FlowError if the trajectory leaves the closed domain.
Point flow_point(const FlowMap& flow, const Domain& dom, const Point& x);
/// phi_t(x) together with the geometric Jacobian determinant
/// exp(int_0^t div v(phi_z(x)) dz), co-integrated with the flow.
std::pair<Point, double> flow_point_jacobian(const FlowMap& flow,
                                             const Domain& dom,
                                             const Point& x);

PointConfiguration flow_apply(const FlowMap& flow, const Domain& dom,
                              const PointConfiguration& cfg);
double flow_jacobian(const FlowMap& flow, const Domain& dom, const Point& x);

FlowMap inverse(const FlowMap& flow);

// JSON specification of functionals and fields (see README)
TestFunctional functional_from_json_string(const std::string& text, int dim);
std::shared_ptr<const VectorField> field_from_json_string(
    const std::string& text);

namespace fixtures {

/// Seeded fixture library used by the verification suites: smooth bounded
/// functionals and compactly supported fields, reproducible bit-for-bit.
TestFunctional random_functional(const Domain& dom, Rng& rng,
                                 int count_cutoff);
/// As random_functional, but the statistics vanish (with their gradients) on
/// the boundary, so form/generator identities pick up no boundary terms.
TestFunctional random_supported_functional(const Domain& dom, Rng& rng,
                                           int count_cutoff);
/// Polynomial field times (R^2-|x|^2)^2 (resp. the box analogue) so that the
/// field and its gradient vanish on the boundary.
std::shared_ptr<const VectorField> random_supported_field(const Domain& dom,
                                                          Rng& rng,
                                                          double scale = 1.0);
/// Smooth non-negative function for quasi-invariance tests.
std::shared_ptr<const Statistic> random_nonneg_statistic(const Domain& dom,
                                                         Rng& rng);

}  // namespace fixtures

}  // namespace dpp

#endif
