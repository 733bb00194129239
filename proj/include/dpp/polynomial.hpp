#ifndef DPP_POLYNOMIAL_HPP
#define DPP_POLYNOMIAL_HPP

#include <Eigen/Dense>

#include "dpp/domain.hpp"

namespace dpp {

/// Dense real polynomial in one or two variables. Coefficients are stored as
/// a (degx+1) x (degy+1) matrix; a univariate polynomial has a single column.
/// Differentiation and products are exact, which is what the analytic
/// divergence / Laplacian machinery relies on.
class Polynomial {
 public:
  Polynomial() : dim_(1), coeff_(Eigen::MatrixXd::Zero(1, 1)) {}
  Polynomial(int dim, Eigen::MatrixXd coeff)
      : dim_(dim), coeff_(std::move(coeff)) {}

  static Polynomial constant(int dim, double c);
  static Polynomial variable(int dim, int axis);  // x or y

  int dimension() const { return dim_; }
  const Eigen::MatrixXd& coefficients() const { return coeff_; }

  double operator()(const Point& x) const;
  Polynomial derivative(int axis) const;
  Point gradient_at(const Point& x) const;
  double laplacian_at(const Point& x) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  /// Upper bound on |p| over the domain via sum of |coeff| * max-monomial.
  double abs_bound(const Domain& dom) const;

 private:
  int dim_;
  Eigen::MatrixXd coeff_;
};

/// Real trigonometric polynomial on a periodic interval of length L:
///   f(t) = a0 + sum_k a_k cos(2 pi k t / L) + b_k sin(2 pi k t / L).
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(double length, Eigen::VectorXd cos_coeff,
                Eigen::VectorXd sin_coeff)
      : length_(length),
        cos_(std::move(cos_coeff)),
        sin_(std::move(sin_coeff)) {}

  double operator()(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  double length() const { return length_; }

 private:
  double length_ = 1.0;
  Eigen::VectorXd cos_, sin_;  // cos_[0] is the constant term
};

}  // namespace dpp

#endif
