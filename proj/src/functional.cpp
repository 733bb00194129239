#include "dpp/functional.hpp"

#include <cmath>

#include <json.hpp>

namespace dpp {

namespace {

class LinearOuter final : public OuterFunction {
 public:
  LinearOuter(Eigen::VectorXd a, double b) : a_(std::move(a)), b_(b) {}
  int arity() const override { return static_cast<int>(a_.size()); }
  double value(const Eigen::VectorXd& s) const override {
    return a_.dot(s) + b_;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd&) const override { return a_; }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Zero(a_.size(), a_.size());
  }

 private:
  Eigen::VectorXd a_;
  double b_;
};

class QuadraticOuter final : public OuterFunction {
 public:
  QuadraticOuter(Eigen::MatrixXd A, Eigen::VectorXd a, double b)
      : A_(std::move(A)), a_(std::move(a)), b_(b) {
    A_ = 0.5 * (A_ + A_.transpose().eval());  // symmetrize
  }
  int arity() const override { return static_cast<int>(a_.size()); }
  double value(const Eigen::VectorXd& s) const override {
    return s.dot(A_ * s) + a_.dot(s) + b_;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const override {
    return 2 * A_ * s + a_;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override {
    return 2 * A_;
  }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd a_;
  double b_;
};

class TanhOuter final : public OuterFunction {
 public:
  TanhOuter(Eigen::VectorXd a, double b) : a_(std::move(a)), b_(b) {}
  int arity() const override { return static_cast<int>(a_.size()); }
  double value(const Eigen::VectorXd& s) const override {
    return std::tanh(a_.dot(s) + b_);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const override {
    const double t = std::tanh(a_.dot(s) + b_);
    return (1 - t * t) * a_;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& s) const override {
    const double t = std::tanh(a_.dot(s) + b_);
    return -2 * t * (1 - t * t) * (a_ * a_.transpose());
  }

 private:
  Eigen::VectorXd a_;
  double b_;
};

class GaussOuter final : public OuterFunction {
 public:
  GaussOuter(Eigen::VectorXd c, double w) : c_(std::move(c)), w_(w) {
    if (w <= 0) throw ParameterError("gauss outer: width must be positive");
  }
  int arity() const override { return static_cast<int>(c_.size()); }
  double value(const Eigen::VectorXd& s) const override {
    return std::exp(-(s - c_).squaredNorm() / w_);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const override {
    return value(s) * (-2.0 / w_) * (s - c_);
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& s) const override {
    const Eigen::VectorXd d = s - c_;
    const double f = value(s);
    const int m = static_cast<int>(c_.size());
    return f * ((4.0 / (w_ * w_)) * (d * d.transpose()) -
                (2.0 / w_) * Eigen::MatrixXd::Identity(m, m));
  }

 private:
  Eigen::VectorXd c_;
  double w_;
};

class PolynomialStatistic final : public Statistic {
 public:
  explicit PolynomialStatistic(Polynomial p) : p_(std::move(p)) {}
  double value(const Point& x) const override { return p_(x); }
  Point gradient(const Point& x) const override { return p_.gradient_at(x); }
  double laplacian(const Point& x) const override {
    return p_.laplacian_at(x);
  }

 private:
  Polynomial p_;
};

class FourierStatistic final : public Statistic {
 public:
  explicit FourierStatistic(FourierSeries f) : f_(std::move(f)) {}
  double value(const Point& x) const override { return f_(x[0]); }
  Point gradient(const Point& x) const override {
    Point g(1);
    g[0] = f_.derivative(x[0]);
    return g;
  }
  double laplacian(const Point& x) const override {
    return f_.second_derivative(x[0]);
  }

 private:
  FourierSeries f_;
};

}  // namespace

std::shared_ptr<const OuterFunction> linear_outer(Eigen::VectorXd a, double b) {
  return std::make_shared<LinearOuter>(std::move(a), b);
}
std::shared_ptr<const OuterFunction> quadratic_outer(Eigen::MatrixXd A,
                                                     Eigen::VectorXd a,
                                                     double b) {
  return std::make_shared<QuadraticOuter>(std::move(A), std::move(a), b);
}
std::shared_ptr<const OuterFunction> tanh_outer(Eigen::VectorXd a, double b) {
  return std::make_shared<TanhOuter>(std::move(a), b);
}
std::shared_ptr<const OuterFunction> gauss_outer(Eigen::VectorXd c, double w) {
  return std::make_shared<GaussOuter>(std::move(c), w);
}

std::shared_ptr<const Statistic> polynomial_statistic(Polynomial p) {
  return std::make_shared<PolynomialStatistic>(std::move(p));
}
std::shared_ptr<const Statistic> fourier_statistic(FourierSeries f) {
  return std::make_shared<FourierStatistic>(std::move(f));
}

TestFunctional::TestFunctional(
    std::shared_ptr<const OuterFunction> outer,
    std::vector<std::shared_ptr<const Statistic>> statistics, int count_cutoff)
    : outer_(std::move(outer)),
      stats_(std::move(statistics)),
      cutoff_(count_cutoff) {
  if (outer_->arity() != static_cast<int>(stats_.size()))
    throw ParameterError("outer arity != number of statistics");
  if (cutoff_ < 0) throw ParameterError("count cutoff must be >= 0");
}

Eigen::VectorXd TestFunctional::statistic_sums(
    const PointConfiguration& cfg) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(arity());
  for (int i = 0; i < cfg.size(); ++i)
    for (int m = 0; m < arity(); ++m) s[m] += stats_[m]->value(cfg.point(i));
  return s;
}

double eval_functional(const TestFunctional& F, const PointConfiguration& cfg) {
  if (cfg.size() > F.count_cutoff()) return 0.0;
  return F.outer().value(F.statistic_sums(cfg));
}

Eigen::MatrixXd grad_functional(const TestFunctional& F,
                                const PointConfiguration& cfg) {
  const int n = cfg.size();
  const int d = cfg.dimension();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, d);
  if (n > F.count_cutoff()) return g;
  const Eigen::VectorXd df = F.outer().gradient(F.statistic_sums(cfg));
  for (int i = 0; i < n; ++i) {
    const Point x = cfg.point(i);
    Point gi = Point::Zero(d);
    for (int m = 0; m < F.arity(); ++m)
      gi += df[m] * F.statistic(m).gradient(x);
    g.row(i) = gi.transpose();
  }
  return g;
}

Eigen::MatrixXd VectorField::jacobian(const Point&) const {
  throw ParameterError("vector field has no analytic Jacobian");
}

namespace {

class PolynomialField final : public VectorField {
 public:
  explicit PolynomialField(std::vector<Polynomial> comp)
      : comp_(std::move(comp)) {
    div_ = Polynomial::constant(dimension(), 0.0);
    for (int a = 0; a < dimension(); ++a) div_ = div_ + comp_[a].derivative(a);
  }
  int dimension() const override { return static_cast<int>(comp_.size()); }
  Point value(const Point& x) const override {
    Point v(dimension());
    for (int a = 0; a < dimension(); ++a) v[a] = comp_[a](x);
    return v;
  }
  double divergence(const Point& x) const override { return div_(x); }
  bool has_jacobian() const override { return true; }
  Eigen::MatrixXd jacobian(const Point& x) const override {
    const int d = dimension();
    Eigen::MatrixXd j(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) j(a, b) = comp_[a].derivative(b)(x);
    return j;
  }

 private:
  std::vector<Polynomial> comp_;
  Polynomial div_;
};

}  // namespace

std::shared_ptr<const VectorField> polynomial_field(
    std::vector<Polynomial> components) {
  return std::make_shared<PolynomialField>(std::move(components));
}

std::shared_ptr<const VectorField> constant_field(Point c) {
  const int d = static_cast<int>(c.size());
  std::vector<Polynomial> comp;
  for (int a = 0; a < d; ++a) comp.push_back(Polynomial::constant(d, c[a]));
  return polynomial_field(std::move(comp));
}

std::shared_ptr<const VectorField> radial_field(int dim) {
  std::vector<Polynomial> comp;
  for (int a = 0; a < dim; ++a) comp.push_back(Polynomial::variable(dim, a));
  return polynomial_field(std::move(comp));
}

double directional_grad(const TestFunctional& F, const VectorField& v,
                        const PointConfiguration& cfg) {
  const Eigen::MatrixXd g = grad_functional(F, cfg);
  double s = 0;
  for (int i = 0; i < cfg.size(); ++i)
    s += g.row(i).dot(v.value(cfg.point(i)).transpose());
  return s;
}

namespace {

// Cash-Karp embedded RK4(5) with adaptive step on the augmented state
// (x, log Jacobian).
struct OdeState {
  Point x;
  double logjac = 0.0;
};

OdeState integrate_flow(const VectorField& v, const Point& x0, double t_final,
                        double tol) {
  static const double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0,
                      a6 = 7.0 / 8;
  static const double b21 = 1.0 / 5;
  static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
  static const double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
  static const double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27,
                      b54 = 35.0 / 27;
  static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512,
                      b63 = 575.0 / 13824, b64 = 44275.0 / 110592,
                      b65 = 253.0 / 4096;
  static const double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                      c6 = 512.0 / 1771;
  static const double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384,
                      d4 = 13525.0 / 55296, d5 = 277.0 / 14336, d6 = 1.0 / 4;
  (void)a2;
  (void)a3;
  (void)a4;
  (void)a5;
  (void)a6;

  const int d = static_cast<int>(x0.size());
  const int m = d + 1;
  auto rhs = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(m);
    const Point x = y.head(d);
    dy.head(d) = v.value(x);
    dy[d] = v.divergence(x);
    return dy;
  };

  Eigen::VectorXd y(m);
  y.head(d) = x0;
  y[d] = 0.0;
  const double dir = t_final >= 0 ? 1.0 : -1.0;
  double t = 0.0;
  double h = dir * std::max(1e-4, std::abs(t_final) / 16);
  int steps = 0;
  while (dir * (t_final - t) > 0) {
    if (++steps > 100000) throw FlowError("flow integrator step limit");
    if (dir * (t + h - t_final) > 0) h = t_final - t;
    const Eigen::VectorXd k1 = rhs(y);
    const Eigen::VectorXd k2 = rhs(y + h * b21 * k1);
    const Eigen::VectorXd k3 = rhs(y + h * (b31 * k1 + b32 * k2));
    const Eigen::VectorXd k4 = rhs(y + h * (b41 * k1 + b42 * k2 + b43 * k3));
    const Eigen::VectorXd k5 =
        rhs(y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
    const Eigen::VectorXd k6 =
        rhs(y + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
    const Eigen::VectorXd y5 = y + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
    const Eigen::VectorXd y4 =
        y + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
    const double err =
        ((y5 - y4).cwiseAbs().array() / (tol + tol * y.cwiseAbs().array()))
            .maxCoeff();
    if (err <= 1.0) {
      t += h;
      y = y5;
    }
    const double fac =
        std::clamp(0.9 * std::pow(err > 0 ? err : 1e-16, -0.2), 0.2, 5.0);
    h *= fac;
  }
  OdeState s;
  s.x = y.head(d);
  s.logjac = y[d];
  return s;
}

}  // namespace

Point flow_point(const FlowMap& flow, const Domain& dom, const Point& x) {
  return flow_point_jacobian(flow, dom, x).first;
}

std::pair<Point, double> flow_point_jacobian(const FlowMap& flow,
                                             const Domain& dom,
                                             const Point& x) {
  dom.require_inside(x);
  OdeState s = integrate_flow(*flow.field, x, flow.time, flow.ode_tolerance);
  if (!dom.contains(s.x, 1e-9))
    throw FlowError("flow trajectory left the domain");
  return {s.x, std::exp(s.logjac)};
}

PointConfiguration flow_apply(const FlowMap& flow, const Domain& dom,
                              const PointConfiguration& cfg) {
  PointConfiguration out(cfg.dimension());
  for (int i = 0; i < cfg.size(); ++i)
    out.add_point(flow_point(flow, dom, cfg.point(i)));
  return out;
}

double flow_jacobian(const FlowMap& flow, const Domain& dom, const Point& x) {
  return flow_point_jacobian(flow, dom, x).second;
}

FlowMap inverse(const FlowMap& flow) {
  FlowMap f = flow;
  f.time = -flow.time;
  return f;
}

namespace {

using nlohmann::json;

Polynomial polynomial_from_json(const json& j, int dim) {
  // coefficient grid: rows indexed by the x power, columns by the y power
  if (dim == 1) {
    Eigen::MatrixXd m(j.size(), 1);
    for (std::size_t i = 0; i < j.size(); ++i) m(i, 0) = j[i].get<double>();
    return Polynomial(1, std::move(m));
  }
  const std::size_t nr = j.size();
  std::size_t nc = 1;
  for (const auto& row : j) nc = std::max(nc, row.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t jj = 0; jj < j[i].size(); ++jj)
      m(i, jj) = j[i][jj].get<double>();
  return Polynomial(2, std::move(m));
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

TestFunctional functional_from_json_string(const std::string& text, int dim) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("functional spec parse error: ") +
                         e.what());
  }
  std::vector<std::shared_ptr<const Statistic>> stats;
  for (const auto& sj : j.at("statistics")) {
    const std::string t = sj.at("type").get<std::string>();
    if (t == "polynomial") {
      stats.push_back(
          polynomial_statistic(polynomial_from_json(sj.at("coefficients"), dim)));
    } else if (t == "fourier") {
      stats.push_back(fourier_statistic(
          FourierSeries(sj.at("length").get<double>(),
                        vector_from_json(sj.at("cos")),
                        vector_from_json(sj.at("sin")))));
    } else {
      throw ParameterError("unknown statistic type: " + t);
    }
  }
  const auto& oj = j.at("outer");
  const std::string ot = oj.at("type").get<std::string>();
  std::shared_ptr<const OuterFunction> outer;
  if (ot == "linear")
    outer = linear_outer(vector_from_json(oj.at("a")), oj.value("b", 0.0));
  else if (ot == "tanh")
    outer = tanh_outer(vector_from_json(oj.at("a")), oj.value("b", 0.0));
  else if (ot == "gauss")
    outer = gauss_outer(vector_from_json(oj.at("c")), oj.at("w").get<double>());
  else
    throw ParameterError("unknown outer type: " + ot);
  return TestFunctional(std::move(outer), std::move(stats),
                        j.value("count_cutoff", 1000));
}

std::shared_ptr<const VectorField> field_from_json_string(
    const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("field spec parse error: ") + e.what());
  }
  const auto& comps = j.at("components");
  const int d = static_cast<int>(comps.size());
  std::vector<Polynomial> poly;
  for (const auto& c : comps)
    poly.push_back(polynomial_from_json(
        c.is_object() ? c.at("coefficients") : c, d));
  return polynomial_field(std::move(poly));
}

namespace fixtures {

namespace {

Polynomial random_polynomial(int dim, int deg, Rng& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Zero(deg + 1, dim == 2 ? deg + 1 : 1);
  for (int i = 0; i <= deg; ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i + j <= deg) m(i, j) = unif(rng);
  return Polynomial(dim, std::move(m));
}

Polynomial boundary_bump(const Domain& dom) {
  // vanishes to second order on the boundary of a ball; for a box, uses the
  // product of per-axis quadratics
  const int d = dom.dimension();
  if (dom.shape() == Domain::Shape::Ball) {
    Polynomial r2 = Polynomial::constant(d, 0.0);
    for (int a = 0; a < d; ++a) {
      Polynomial xa = Polynomial::variable(d, a) -
                      Polynomial::constant(d, dom.center()[a]);
      r2 = r2 + xa * xa;
    }
    Polynomial w =
        Polynomial::constant(d, dom.radius() * dom.radius()) - r2;
    return w * w;
  }
  Polynomial w = Polynomial::constant(d, 1.0);
  for (int a = 0; a < d; ++a) {
    if (dom.periodic_axis(a)) continue;
    Polynomial xa = Polynomial::variable(d, a);
    Polynomial f = (xa - Polynomial::constant(d, dom.lower()[a])) *
                   (Polynomial::constant(d, dom.upper()[a]) - xa);
    w = w * (f * f);
  }
  return w;
}

}  // namespace

TestFunctional random_functional(const Domain& dom, Rng& rng,
                                 int count_cutoff) {
  const int d = dom.dimension();
  const int M = 2;
  std::vector<std::shared_ptr<const Statistic>> stats;
  // Statistics are scaled so the linear statistic stays O(1) on the domain.
  const double scale = 1.0 / std::max(1.0, dom.diameter());
  for (int m = 0; m < M; ++m)
    stats.push_back(polynomial_statistic(random_polynomial(d, 3, rng, scale)));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd a(M);
  for (int m = 0; m < M; ++m) a[m] = unif(rng);
  std::uniform_int_distribution<int> pick(0, 2);
  switch (pick(rng)) {
    case 0:
      return TestFunctional(tanh_outer(a, unif(rng)), std::move(stats),
                            count_cutoff);
    case 1: {
      Eigen::VectorXd c(M);
      for (int m = 0; m < M; ++m) c[m] = unif(rng);
      return TestFunctional(gauss_outer(c, 2.0), std::move(stats),
                            count_cutoff);
    }
    default:
      return TestFunctional(linear_outer(a, unif(rng)), std::move(stats),
                            count_cutoff);
  }
}

TestFunctional random_supported_functional(const Domain& dom, Rng& rng,
                                           int count_cutoff) {
  // Like random_functional, but each statistic carries the boundary bump so
  // its value and gradient vanish on the boundary (needed wherever an
  // integration by parts must not pick up boundary terms).
  const int d = dom.dimension();
  const int M = 2;
  const Polynomial bump = boundary_bump(dom);
  const double bmax = std::pow(dom.diameter() / 2, 4.0) + 1e-12;
  std::vector<std::shared_ptr<const Statistic>> stats;
  for (int m = 0; m < M; ++m)
    stats.push_back(
        polynomial_statistic(bump * random_polynomial(d, 2, rng, 1.0 / bmax)));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd a(M);
  for (int m = 0; m < M; ++m) a[m] = unif(rng);
  if (unif(rng) > 0.0)
    return TestFunctional(tanh_outer(a, unif(rng)), std::move(stats),
                          count_cutoff);
  return TestFunctional(linear_outer(a, unif(rng)), std::move(stats),
                        count_cutoff);
}

std::shared_ptr<const VectorField> random_supported_field(const Domain& dom,
                                                          Rng& rng,
                                                          double scale) {
  const int d = dom.dimension();
  const Polynomial bump = boundary_bump(dom);
  // normalize the bump so the field magnitude is O(scale)
  const double bmax = std::pow(dom.diameter() / 2, 4.0) + 1e-12;
  std::vector<Polynomial> comp;
  for (int a = 0; a < d; ++a)
    comp.push_back(bump * random_polynomial(d, 2, rng, scale / bmax));
  return polynomial_field(std::move(comp));
}

std::shared_ptr<const Statistic> random_nonneg_statistic(const Domain& dom,
                                                         Rng& rng) {
  // square of a random polynomial, scaled to stay O(1)
  const double scale = 1.0 / std::max(1.0, dom.diameter());
  Polynomial p = random_polynomial(dom.dimension(), 2, rng, scale);
  return polynomial_statistic(p * p);
}

}  // namespace fixtures

}  // namespace dpp
