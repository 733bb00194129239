#include "dpp/domain.hpp"

#include <cmath>
#include <limits>

namespace dpp {

Domain Domain::ball(Point center, double radius) {
  if (radius <= 0) throw ParameterError("ball radius must be positive");
  Domain d;
  d.shape_ = Shape::Ball;
  d.dim_ = static_cast<int>(center.size());
  d.center_ = std::move(center);
  d.radius_ = radius;
  d.lower_ = d.center_.array() - radius;
  d.upper_ = d.center_.array() + radius;
  d.periodic_.assign(d.dim_, false);
  return d;
}

Domain Domain::box(Point lower, Point upper, std::vector<bool> periodic) {
  if (lower.size() != upper.size())
    throw ParameterError("box bounds dimension mismatch");
  if (((upper - lower).array() <= 0).any())
    throw ParameterError("box requires lower < upper componentwise");
  Domain d;
  d.shape_ = Shape::Box;
  d.dim_ = static_cast<int>(lower.size());
  d.lower_ = std::move(lower);
  d.upper_ = std::move(upper);
  d.center_ = 0.5 * (d.lower_ + d.upper_);
  if (periodic.empty()) periodic.assign(d.dim_, false);
  if (static_cast<int>(periodic.size()) != d.dim_)
    throw ParameterError("periodic flags dimension mismatch");
  d.periodic_ = std::move(periodic);
  return d;
}

bool Domain::any_periodic() const {
  for (bool p : periodic_)
    if (p) return true;
  return false;
}

bool Domain::contains(const Point& x, double tol) const {
  if (x.size() != dim_) return false;
  if (shape_ == Shape::Ball) return (x - center_).norm() <= radius_ + tol;
  for (int i = 0; i < dim_; ++i) {
    if (periodic_[i]) continue;  // wrapped representative always inside
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

void Domain::require_inside(const Point& x) const {
  if (!contains(x)) throw DomainError("point outside domain");
}

double Domain::volume() const {
  if (shape_ == Shape::Ball) {
    if (dim_ == 1) return 2 * radius_;
    if (dim_ == 2) return M_PI * radius_ * radius_;
    // Gamma-function formula for general d
    return std::pow(M_PI, dim_ / 2.0) / std::tgamma(dim_ / 2.0 + 1) *
           std::pow(radius_, dim_);
  }
  return (upper_ - lower_).prod();
}

double Domain::diameter() const {
  if (shape_ == Shape::Ball) return 2 * radius_;
  return (upper_ - lower_).norm();
}

Point Domain::wrap(const Point& x) const {
  Point y = x;
  for (int i = 0; i < dim_; ++i) {
    if (!periodic_[i]) continue;
    const double L = upper_[i] - lower_[i];
    y[i] = lower_[i] + std::fmod(std::fmod(x[i] - lower_[i], L) + L, L);
  }
  return y;
}

Point Domain::difference(const Point& x, const Point& y) const {
  Point d = y - x;
  for (int i = 0; i < dim_; ++i) {
    if (!periodic_[i]) continue;
    const double L = upper_[i] - lower_[i];
    d[i] = std::remainder(d[i], L);
  }
  return d;
}

double Domain::distance(const Point& x, const Point& y) const {
  return difference(x, y).norm();
}

Point Domain::sample_uniform(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (shape_ == Shape::Box) {
    Point x(dim_);
    for (int i = 0; i < dim_; ++i)
      x[i] = lower_[i] + unif(rng) * (upper_[i] - lower_[i]);
    return x;
  }
  // Ball: direction from a Gaussian, radius from the volume law.
  std::normal_distribution<double> gauss(0.0, 1.0);
  Point dir(dim_);
  double n = 0;
  do {
    for (int i = 0; i < dim_; ++i) dir[i] = gauss(rng);
    n = dir.norm();
  } while (n == 0);
  const double r = radius_ * std::pow(unif(rng), 1.0 / dim_);
  return center_ + (r / n) * dir;
}

PointConfiguration PointConfiguration::from_points(
    const std::vector<Point>& points, int dim) {
  Eigen::MatrixXd m(points.size(), dim);
  for (std::size_t i = 0; i < points.size(); ++i)
    m.row(i) = points[i].transpose();
  return PointConfiguration(std::move(m));
}

void PointConfiguration::add_point(const Point& x) {
  if (dim_ == 0 && pts_.rows() == 0) {
    dim_ = static_cast<int>(x.size());
    pts_.resize(0, dim_);
  }
  pts_.conservativeResize(pts_.rows() + 1, Eigen::NoChange);
  pts_.row(pts_.rows() - 1) = x.transpose();
}

double PointConfiguration::min_pair_distance(const Domain& dom) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      best = std::min(best, dom.distance(point(i), point(j)));
  return best;
}

}  // namespace dpp
