#ifndef DPP_DOMAIN_HPP
#define DPP_DOMAIN_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "dpp/rng.hpp"

namespace dpp {

using Point = Eigen::VectorXd;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compact domain D: a Euclidean ball or an axis-aligned box, with optional
/// per-axis periodicity (box only; used for the circle case).
class Domain {
 public:
  enum class Shape { Ball, Box };

  static Domain ball(Point center, double radius);
  static Domain box(Point lower, Point upper,
                    std::vector<bool> periodic = {});

  Shape shape() const { return shape_; }
  int dimension() const { return dim_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  bool periodic_axis(int i) const { return periodic_[i]; }
  bool any_periodic() const;

  bool contains(const Point& x, double tol = 1e-12) const;
  void require_inside(const Point& x) const;

  double volume() const;
  double diameter() const;

  /// Canonical representative: periodic coordinates wrapped into
  /// [lower, upper); non-periodic coordinates unchanged.
  Point wrap(const Point& x) const;

  /// Difference y - x with periodic axes reduced to the shortest
  /// representative.
  Point difference(const Point& x, const Point& y) const;
  double distance(const Point& x, const Point& y) const;

  Point sample_uniform(Rng& rng) const;

 private:
  Shape shape_ = Shape::Box;
  int dim_ = 0;
  Point center_, lower_, upper_;
  double radius_ = 0.0;
  std::vector<bool> periodic_;
};

/// A finite unordered set of points, stored as rows of an n x d matrix.
/// All operations consuming it are permutation-invariant.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  explicit PointConfiguration(int dim) : dim_(dim), pts_(0, dim) {}
  PointConfiguration(Eigen::MatrixXd pts)
      : dim_(static_cast<int>(pts.cols())), pts_(std::move(pts)) {}

  static PointConfiguration from_points(const std::vector<Point>& points,
                                        int dim);

  int size() const { return static_cast<int>(pts_.rows()); }
  bool empty() const { return pts_.rows() == 0; }
  int dimension() const { return dim_; }

  Point point(int i) const { return pts_.row(i).transpose(); }
  void set_point(int i, const Point& x) { pts_.row(i) = x.transpose(); }
  void add_point(const Point& x);

  const Eigen::MatrixXd& matrix() const { return pts_; }
  Eigen::MatrixXd& matrix() { return pts_; }

  double min_pair_distance(const Domain& dom) const;

 private:
  int dim_ = 0;
  Eigen::MatrixXd pts_;
};

}  // namespace dpp

#endif
