#include "dpp/polynomial.hpp"

#include <cmath>

namespace dpp {

Polynomial Polynomial::constant(int dim, double c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1, 1);
  m(0, 0) = c;
  return Polynomial(dim, std::move(m));
}

Polynomial Polynomial::variable(int dim, int axis) {
  if (axis < 0 || axis >= dim) throw ParameterError("polynomial axis");
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Zero(axis == 0 ? 2 : 1, axis == 1 ? 2 : 1);
  m(axis == 0 ? 1 : 0, axis == 1 ? 1 : 0) = 1.0;
  return Polynomial(dim, std::move(m));
}

double Polynomial::operator()(const Point& x) const {
  const double u = x[0];
  const double v = dim_ > 1 ? x[1] : 0.0;
  // Horner in u, then v
  double acc = 0.0;
  for (int j = static_cast<int>(coeff_.cols()) - 1; j >= 0; --j) {
    double row = 0.0;
    for (int i = static_cast<int>(coeff_.rows()) - 1; i >= 0; --i)
      row = row * u + coeff_(i, j);
    acc = acc * v + row;
  }
  return acc;
}

Polynomial Polynomial::derivative(int axis) const {
  const int nr = static_cast<int>(coeff_.rows());
  const int nc = static_cast<int>(coeff_.cols());
  if (axis == 0) {
    if (nr <= 1) return constant(dim_, 0.0);
    Eigen::MatrixXd m(nr - 1, nc);
    for (int i = 1; i < nr; ++i) m.row(i - 1) = i * coeff_.row(i);
    return Polynomial(dim_, std::move(m));
  }
  if (nc <= 1) return constant(dim_, 0.0);
  Eigen::MatrixXd m(nr, nc - 1);
  for (int j = 1; j < nc; ++j) m.col(j - 1) = j * coeff_.col(j);
  return Polynomial(dim_, std::move(m));
}

Point Polynomial::gradient_at(const Point& x) const {
  Point g(dim_);
  for (int a = 0; a < dim_; ++a) g[a] = derivative(a)(x);
  return g;
}

double Polynomial::laplacian_at(const Point& x) const {
  double s = 0;
  for (int a = 0; a < dim_; ++a) s += derivative(a).derivative(a)(x);
  return s;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  const int nr = std::max(coeff_.rows(), o.coeff_.rows());
  const int nc = std::max(coeff_.cols(), o.coeff_.cols());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nr, nc);
  m.topLeftCorner(coeff_.rows(), coeff_.cols()) = coeff_;
  m.topLeftCorner(o.coeff_.rows(), o.coeff_.cols()) += o.coeff_;
  return Polynomial(std::max(dim_, o.dim_), std::move(m));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + o * (-1.0);
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(
      coeff_.rows() + o.coeff_.rows() - 1, coeff_.cols() + o.coeff_.cols() - 1);
  for (int i = 0; i < coeff_.rows(); ++i)
    for (int j = 0; j < coeff_.cols(); ++j) {
      if (coeff_(i, j) == 0) continue;
      m.block(i, j, o.coeff_.rows(), o.coeff_.cols()) +=
          coeff_(i, j) * o.coeff_;
    }
  return Polynomial(std::max(dim_, o.dim_), std::move(m));
}

Polynomial Polynomial::operator*(double s) const {
  return Polynomial(dim_, coeff_ * s);
}

double Polynomial::abs_bound(const Domain& dom) const {
  double mx = 0, my = 0;
  for (int a = 0; a < dom.dimension(); ++a) {
    double m = std::max(std::abs(dom.lower()[a]), std::abs(dom.upper()[a]));
    if (a == 0)
      mx = m;
    else
      my = std::max(my, m);
  }
  double b = 0;
  for (int i = 0; i < coeff_.rows(); ++i)
    for (int j = 0; j < coeff_.cols(); ++j)
      b += std::abs(coeff_(i, j)) * std::pow(mx, i) * std::pow(my, j);
  return b;
}

double FourierSeries::operator()(double t) const {
  double s = 0;
  const double w = 2 * M_PI / length_;
  for (int k = 0; k < cos_.size(); ++k) s += cos_[k] * std::cos(w * k * t);
  for (int k = 0; k < sin_.size(); ++k)
    s += sin_[k] * std::sin(w * (k + 1) * t);
  return s;
}

double FourierSeries::derivative(double t) const {
  double s = 0;
  const double w = 2 * M_PI / length_;
  for (int k = 1; k < cos_.size(); ++k)
    s += -cos_[k] * w * k * std::sin(w * k * t);
  for (int k = 0; k < sin_.size(); ++k)
    s += sin_[k] * w * (k + 1) * std::cos(w * (k + 1) * t);
  return s;
}

double FourierSeries::second_derivative(double t) const {
  double s = 0;
  const double w = 2 * M_PI / length_;
  for (int k = 1; k < cos_.size(); ++k)
    s += -cos_[k] * w * w * k * k * std::cos(w * k * t);
  for (int k = 0; k < sin_.size(); ++k)
    s += -sin_[k] * w * w * (k + 1) * (k + 1) * std::sin(w * (k + 1) * t);
  return s;
}

}  // namespace dpp
