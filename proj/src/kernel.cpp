#include "dpp/kernel.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace dpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ConstantDensity final : public ReferenceDensity {
 public:
  explicit ConstantDensity(double c) : c_(c) {
    if (c <= 0) throw ParameterError("density must be positive");
  }
  double value(const Point&) const override { return c_; }
  Point gradient(const Point& x) const override {
    return Point::Zero(x.size());
  }
  double upper_bound(const Domain&) const override { return c_; }

 private:
  double c_;
};

class ExpLinearDensity final : public ReferenceDensity {
 public:
  explicit ExpLinearDensity(Point a) : a_(std::move(a)) {}
  double value(const Point& x) const override { return std::exp(a_.dot(x)); }
  Point gradient(const Point& x) const override { return value(x) * a_; }
  double upper_bound(const Domain& dom) const override {
    double m = 0;
    for (int i = 0; i < dom.dimension(); ++i)
      m += std::abs(a_[i]) *
           std::max(std::abs(dom.lower()[i]), std::abs(dom.upper()[i]));
    return std::exp(m);
  }

 private:
  Point a_;
};

class OnePlusNorm2Density final : public ReferenceDensity {
 public:
  double value(const Point& x) const override { return 1 + x.squaredNorm(); }
  Point gradient(const Point& x) const override { return 2 * x; }
  double upper_bound(const Domain& dom) const override {
    double m = 0;
    for (int i = 0; i < dom.dimension(); ++i)
      m += std::pow(
          std::max(std::abs(dom.lower()[i]), std::abs(dom.upper()[i])), 2);
    return 1 + m;
  }
};

double max_abs_z(const Domain& dom) {
  if (dom.shape() == Domain::Shape::Ball)
    return dom.center().norm() + dom.radius();
  double m2 = 0;
  for (int i = 0; i < dom.dimension(); ++i)
    m2 += std::pow(std::max(std::abs(dom.lower()[i]), std::abs(dom.upper()[i])),
                   2);
  return std::sqrt(m2);
}

/// Modified Bergman mode phi_k(x) = (1/R) sqrt((k+1)/pi) ((x1+i x2)/R)^k.
class BergmanMode final : public Eigenfunction {
 public:
  BergmanMode(double R, int k)
      : R_(R), k_(k), c_(std::sqrt((k + 1) / M_PI) / R) {}
  Complex value(const Point& x) const override {
    const Complex z(x[0] / R_, x[1] / R_);
    return c_ * std::pow(z, k_);
  }
  Eigen::VectorXcd gradient(const Point& x) const override {
    Eigen::VectorXcd g(2);
    const Complex z(x[0] / R_, x[1] / R_);
    const Complex dz = c_ * double(k_) * std::pow(z, k_ - 1) / R_;
    g[0] = dz;
    g[1] = Complex(0, 1) * dz;
    return g;
  }
  double abs2_bound(const Domain& dom) const override {
    const double r = max_abs_z(dom) / R_;
    return c_ * c_ * std::pow(r, 2 * k_);
  }

 private:
  double R_;
  int k_;
  double c_;
};

/// Fourier mode phi_k(t) = exp(2 pi i k t / L) / sqrt(L).
class FourierMode final : public Eigenfunction {
 public:
  FourierMode(double L, int k) : L_(L), k_(k) {}
  Complex value(const Point& x) const override {
    const double a = 2 * M_PI * k_ * x[0] / L_;
    return Complex(std::cos(a), std::sin(a)) / std::sqrt(L_);
  }
  Eigen::VectorXcd gradient(const Point& x) const override {
    Eigen::VectorXcd g(1);
    g[0] = Complex(0, 2 * M_PI * k_ / L_) * value(x);
    return g;
  }
  double abs2_bound(const Domain&) const override { return 1.0 / L_; }

 private:
  double L_;
  int k_;
};

/// Polynomial mode p(z) with complex coefficients; z = x[0] (d=1) or
/// x[0] + i x[1] (d=2).
class ComplexPolynomialMode final : public Eigenfunction {
 public:
  ComplexPolynomialMode(int dim, std::vector<Complex> coeff)
      : dim_(dim), coeff_(std::move(coeff)) {
    if (coeff_.empty()) coeff_.push_back(0.0);
  }
  Complex value(const Point& x) const override {
    const Complex z = arg(x);
    Complex acc = 0;
    for (int i = static_cast<int>(coeff_.size()) - 1; i >= 0; --i)
      acc = acc * z + coeff_[i];
    return acc;
  }
  Eigen::VectorXcd gradient(const Point& x) const override {
    const Complex z = arg(x);
    Complex acc = 0;
    for (int i = static_cast<int>(coeff_.size()) - 1; i >= 1; --i)
      acc = acc * z + double(i) * coeff_[i];
    Eigen::VectorXcd g(dim_);
    g[0] = acc;
    if (dim_ == 2) g[1] = Complex(0, 1) * acc;
    return g;
  }
  double abs2_bound(const Domain& dom) const override {
    const double r = max_abs_z(dom);
    double b = 0;
    for (std::size_t i = 0; i < coeff_.size(); ++i)
      b += std::abs(coeff_[i]) * std::pow(r, double(i));
    return b * b;
  }

 private:
  Complex arg(const Point& x) const {
    return dim_ == 2 ? Complex(x[0], x[1]) : Complex(x[0], 0);
  }
  int dim_;
  std::vector<Complex> coeff_;
};

}  // namespace

std::shared_ptr<const ReferenceDensity> constant_density(double c) {
  return std::make_shared<ConstantDensity>(c);
}
std::shared_ptr<const ReferenceDensity> exp_linear_density(Point a) {
  return std::make_shared<ExpLinearDensity>(std::move(a));
}
std::shared_ptr<const ReferenceDensity> one_plus_norm2_density() {
  return std::make_shared<OnePlusNorm2Density>();
}

SpectralKernel::SpectralKernel(
    Domain domain, Eigen::VectorXd eigenvalues,
    std::vector<std::shared_ptr<const Eigenfunction>> modes,
    std::shared_ptr<const ReferenceDensity> rho, std::string id)
    : domain_(std::move(domain)),
      eigenvalues_(std::move(eigenvalues)),
      modes_(std::move(modes)),
      rho_(rho ? std::move(rho) : constant_density(1.0)),
      id_(std::move(id)) {
  if (static_cast<int>(modes_.size()) != eigenvalues_.size())
    throw ParameterError("eigenvalue/eigenfunction count mismatch");
  bool any_one = false, all_one = eigenvalues_.size() > 0;
  for (int j = 0; j < eigenvalues_.size(); ++j) {
    const double l = eigenvalues_[j];
    if (l < 0 || l > 1) throw ParameterError("eigenvalues must lie in [0,1]");
    if (l == 1.0)
      any_one = true;
    else
      all_one = false;
  }
  if (any_one && !all_one)
    throw ParameterError(
        "mixed spectrum: either all eigenvalues are 1 (projection) or all "
        "are strictly below 1");
  is_projection_ = all_one;
}

double SpectralKernel::trace_j() const {
  if (is_projection_)
    throw UnsupportedOperatorError("J[D] undefined for projection kernels");
  double s = 0;
  for (int j = 0; j < eigenvalues_.size(); ++j)
    s += eigenvalues_[j] / (1 - eigenvalues_[j]);
  return s;
}

Complex kernel_eval(const SpectralKernel& k, const Point& x, const Point& y) {
  k.domain().require_inside(x);
  k.domain().require_inside(y);
  Complex s = 0;
  for (int j = 0; j < k.rank(); ++j)
    s += k.eigenvalues()[j] * k.mode(j).value(x) * std::conj(k.mode(j).value(y));
  return s;
}

Complex j_kernel_eval(const SpectralKernel& k, const Point& x, const Point& y) {
  if (k.is_projection())
    throw UnsupportedOperatorError(
        "J[D] undefined for projection kernels; use the Janossy path");
  k.domain().require_inside(x);
  k.domain().require_inside(y);
  Complex s = 0;
  for (int j = 0; j < k.rank(); ++j) {
    const double l = k.eigenvalues()[j];
    s += l / (1 - l) * k.mode(j).value(x) * std::conj(k.mode(j).value(y));
  }
  return s;
}

Eigen::VectorXcd kernel_grad_x(const SpectralKernel& k, const Point& x,
                               const Point& y) {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(k.domain().dimension());
  for (int j = 0; j < k.rank(); ++j)
    g += k.eigenvalues()[j] * std::conj(k.mode(j).value(y)) *
         k.mode(j).gradient(x);
  return g;
}

Eigen::VectorXcd j_kernel_grad_x(const SpectralKernel& k, const Point& x,
                                 const Point& y) {
  if (k.is_projection())
    throw UnsupportedOperatorError("J[D] undefined for projection kernels");
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(k.domain().dimension());
  for (int j = 0; j < k.rank(); ++j) {
    const double l = k.eigenvalues()[j];
    g += l / (1 - l) * std::conj(k.mode(j).value(y)) * k.mode(j).gradient(x);
  }
  return g;
}

namespace {

template <typename Eval>
Eigen::MatrixXcd config_matrix(const PointConfiguration& cfg, Eval&& eval) {
  const int n = cfg.size();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = eval(cfg.point(i), cfg.point(j));
  return m;
}

}  // namespace

Eigen::MatrixXcd kernel_matrix(const SpectralKernel& k,
                               const PointConfiguration& cfg) {
  return config_matrix(
      cfg, [&](const Point& x, const Point& y) { return kernel_eval(k, x, y); });
}

Eigen::MatrixXcd j_matrix(const SpectralKernel& k,
                          const PointConfiguration& cfg) {
  return config_matrix(cfg, [&](const Point& x, const Point& y) {
    return j_kernel_eval(k, x, y);
  });
}

bool DetValue::positive() const { return log_value > -kInf && value > 0; }

DetValue hermitian_det(const Eigen::MatrixXcd& m) {
  DetValue r;
  const int n = static_cast<int>(m.rows());
  if (n == 0) return r;  // det of the empty matrix is 1
  // The matrices here are Gram-type (positive semidefinite Hermitian), so a
  // pivoted LDLT gives a real diagonal and a sign-safe determinant.
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(m);
  const Eigen::VectorXd diag = ldlt.vectorD().real();
  double det = 1.0;
  double log_abs = 0.0;
  bool nonpositive = false;
  for (int i = 0; i < n; ++i) {
    det *= diag[i];
    if (diag[i] > 0)
      log_abs += std::log(diag[i]);
    else
      nonpositive = true;
  }
  r.value = det;
  if (nonpositive) {
    // Rank deficiency (or its negative roundoff shadow) maps to the -inf
    // log marker; the linear value keeps its signed roundoff.
    r.log_value = -kInf;
    if (det == 0.0 || (diag.array() == 0.0).any()) r.value = std::max(det, 0.0);
  } else {
    // Underflowed-but-positive products keep the log-sum of the pivots.
    r.log_value = log_abs;
  }
  return r;
}

double correlation_fn(const SpectralKernel& k, const PointConfiguration& cfg) {
  return hermitian_det(kernel_matrix(k, cfg)).value;
}

double fredholm_det(const SpectralKernel& k) {
  if (k.is_projection())
    throw UnsupportedOperatorError(
        "Fredholm determinant vanishes for projection kernels");
  return (1.0 - k.eigenvalues().array()).prod();
}

double log_fredholm_det(const SpectralKernel& k) {
  if (k.is_projection())
    throw UnsupportedOperatorError(
        "Fredholm determinant vanishes for projection kernels");
  return (1.0 - k.eigenvalues().array()).log().sum();
}

DetValue janossy_density(const SpectralKernel& k,
                         const PointConfiguration& cfg) {
  DetValue r;
  if (cfg.size() > k.rank()) {
    r.value = 0;
    r.log_value = -kInf;
    return r;
  }
  if (k.is_projection()) {
    if (cfg.size() != k.rank()) {
      r.value = 0;
      r.log_value = -kInf;
      return r;
    }
    return hermitian_det(kernel_matrix(k, cfg));
  }
  DetValue dj = hermitian_det(j_matrix(k, cfg));
  const double logfred = log_fredholm_det(k);
  r.value = fredholm_det(k) * dj.value;
  r.log_value = logfred + dj.log_value;
  return r;
}

Eigen::VectorXd count_distribution(const SpectralKernel& k) {
  // Poisson-binomial of the eigenvalues
  Eigen::VectorXd p = Eigen::VectorXd::Zero(k.rank() + 1);
  p[0] = 1.0;
  for (int j = 0; j < k.rank(); ++j) {
    const double l = k.eigenvalues()[j];
    for (int n = j + 1; n >= 1; --n) p[n] = p[n] * (1 - l) + p[n - 1] * l;
    p[0] *= (1 - l);
  }
  return p;
}

SpectralKernel make_bergman_kernel(double R, int N) {
  if (!(R > 0 && R < 1)) throw ParameterError("bergman: R must be in (0,1)");
  if (N < 1) throw ParameterError("bergman: N must be >= 1");
  Point c = Point::Zero(2);
  Domain dom = Domain::ball(c, R);
  Eigen::VectorXd lam(N);
  std::vector<std::shared_ptr<const Eigenfunction>> modes;
  for (int k = 1; k <= N; ++k) {
    lam[k - 1] = std::pow(R, 2.0 * (k + 1));
    modes.push_back(std::make_shared<BergmanMode>(R, k));
  }
  return SpectralKernel(std::move(dom), std::move(lam), std::move(modes),
                        constant_density(1.0), "bergman");
}

SpectralKernel make_dyson_kernel(int N) {
  if (N < 1) throw ParameterError("dyson: N must be >= 1");
  Point lo(1), hi(1);
  lo[0] = -N / 2.0;
  hi[0] = N / 2.0;
  Domain dom = Domain::box(lo, hi, {true});
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(N);
  std::vector<std::shared_ptr<const Eigenfunction>> modes;
  for (int k = 0; k < N; ++k)
    modes.push_back(std::make_shared<FourierMode>(double(N), k));
  return SpectralKernel(std::move(dom), std::move(lam), std::move(modes),
                        constant_density(1.0), "dyson");
}

namespace {

using nlohmann::json;

Point point_from_json(const json& j) {
  Point p(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) p[i] = j[i].get<double>();
  return p;
}

Domain domain_from_json(const json& j) {
  const std::string shape = j.at("shape").get<std::string>();
  if (shape == "ball")
    return Domain::ball(point_from_json(j.at("center")),
                        j.at("radius").get<double>());
  if (shape == "box") {
    std::vector<bool> periodic;
    if (j.contains("periodic"))
      for (const auto& b : j.at("periodic")) periodic.push_back(b.get<bool>());
    return Domain::box(point_from_json(j.at("lower")),
                       point_from_json(j.at("upper")), periodic);
  }
  throw ParameterError("unknown domain shape: " + shape);
}

std::shared_ptr<const ReferenceDensity> rho_from_json(const json& j) {
  if (j.is_null()) return constant_density(1.0);
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant")
    return constant_density(j.value("value", 1.0));
  if (type == "exp_linear") return exp_linear_density(point_from_json(j.at("a")));
  if (type == "one_plus_norm2") return one_plus_norm2_density();
  throw ParameterError("unknown density type: " + type);
}

}  // namespace

SpectralKernel kernel_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("kernel spec parse error: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "bergman")
      return make_bergman_kernel(j.at("R").get<double>(), j.at("N").get<int>());
    if (type == "dyson") return make_dyson_kernel(j.at("N").get<int>());
    if (type != "custom")
      throw ParameterError("unknown kernel type: " + type);

    Domain dom = domain_from_json(j.at("domain"));
    const int d = dom.dimension();
    const auto& lj = j.at("eigenvalues");
    Eigen::VectorXd lam(lj.size());
    for (std::size_t i = 0; i < lj.size(); ++i) lam[i] = lj[i].get<double>();
    std::vector<std::shared_ptr<const Eigenfunction>> modes;
    for (const auto& mj : j.at("eigenfunctions")) {
      const std::string mt = mj.at("type").get<std::string>();
      if (mt == "polynomial") {
        std::vector<Complex> coeff;
        for (const auto& c : mj.at("coefficients")) {
          if (c.is_array())
            coeff.emplace_back(c[0].get<double>(), c[1].get<double>());
          else
            coeff.emplace_back(c.get<double>(), 0.0);
        }
        modes.push_back(
            std::make_shared<ComplexPolynomialMode>(d, std::move(coeff)));
      } else if (mt == "fourier") {
        if (d != 1 || !dom.periodic_axis(0))
          throw ParameterError("fourier modes need a periodic 1-D box");
        modes.push_back(std::make_shared<FourierMode>(
            dom.upper()[0] - dom.lower()[0], mj.at("k").get<int>()));
      } else {
        throw ParameterError("unknown eigenfunction type: " + mt);
      }
    }
    auto rho = rho_from_json(j.contains("rho") ? j.at("rho") : json());
    return SpectralKernel(std::move(dom), std::move(lam), std::move(modes),
                          std::move(rho), "custom");
  } catch (const json::exception& e) {
    throw ParameterError(std::string("kernel spec error: ") + e.what());
  }
}

SpectralKernel kernel_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open kernel spec: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return kernel_from_json_string(ss.str());
}

std::uint64_t kernel_spec_hash(const std::string& text) {
  return hash_label(text);
}

}  // namespace dpp
