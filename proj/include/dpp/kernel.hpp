#ifndef DPP_KERNEL_HPP
#define DPP_KERNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "dpp/domain.hpp"
#include "dpp/rng.hpp"

namespace dpp {

using Complex = std::complex<double>;

struct UnsupportedOperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One spectral mode: a complex eigenfunction with analytic gradient and a
/// rigorous sup bound of |phi|^2 over the domain (used as a rejection
/// envelope by the sampler).
class Eigenfunction {
 public:
  virtual ~Eigenfunction() = default;
  virtual Complex value(const Point& x) const = 0;
  /// Componentwise complex partials (d entries).
  virtual Eigen::VectorXcd gradient(const Point& x) const = 0;
  virtual double abs2_bound(const Domain& dom) const = 0;
};

/// Reference density rho of the underlying measure d(mu) = rho d(Lebesgue),
/// strictly positive with analytic gradient.
class ReferenceDensity {
 public:
  virtual ~ReferenceDensity() = default;
  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;
  virtual double upper_bound(const Domain& dom) const = 0;
};

std::shared_ptr<const ReferenceDensity> constant_density(double c = 1.0);
/// rho(x) = exp(a . x)
std::shared_ptr<const ReferenceDensity> exp_linear_density(Point a);
/// rho(x) = 1 + |x|^2
std::shared_ptr<const ReferenceDensity> one_plus_norm2_density();

/// Finite-rank spectral kernel K(x,y) = sum_j lambda_j phi_j(x) conj(phi_j(y)).
/// Immutable after construction; all evaluations are pure.
class SpectralKernel {
 public:
  SpectralKernel(Domain domain, Eigen::VectorXd eigenvalues,
                 std::vector<std::shared_ptr<const Eigenfunction>> modes,
                 std::shared_ptr<const ReferenceDensity> rho = nullptr,
                 std::string id = "custom");

  const Domain& domain() const { return domain_; }
  int rank() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigenfunction& mode(int j) const { return *modes_[j]; }
  const ReferenceDensity& rho() const { return *rho_; }
  bool is_projection() const { return is_projection_; }
  const std::string& id() const { return id_; }

  double trace_k() const { return eigenvalues_.sum(); }
  /// Tr J = sum lambda / (1 - lambda); requires a non-projection kernel.
  double trace_j() const;

 private:
  Domain domain_;
  Eigen::VectorXd eigenvalues_;
  std::vector<std::shared_ptr<const Eigenfunction>> modes_;
  std::shared_ptr<const ReferenceDensity> rho_;
  bool is_projection_;
  std::string id_;
};

// Pointwise kernel evaluations
Complex kernel_eval(const SpectralKernel& k, const Point& x, const Point& y);
Complex j_kernel_eval(const SpectralKernel& k, const Point& x, const Point& y);

/// Partial derivative of K(x,y) (resp. J(x,y)) in the first argument,
/// componentwise.
Eigen::VectorXcd kernel_grad_x(const SpectralKernel& k, const Point& x,
                               const Point& y);
Eigen::VectorXcd j_kernel_grad_x(const SpectralKernel& k, const Point& x,
                                 const Point& y);

Eigen::MatrixXcd kernel_matrix(const SpectralKernel& k,
                               const PointConfiguration& cfg);
Eigen::MatrixXcd j_matrix(const SpectralKernel& k,
                          const PointConfiguration& cfg);

/// Determinant of a Hermitian matrix with a log-scale companion value;
/// log_value = -inf encodes an exact zero.
struct DetValue {
  double value = 1.0;
  double log_value = 0.0;
  bool positive() const;
};

DetValue hermitian_det(const Eigen::MatrixXcd& m);

/// k-point correlation function det(K(x_i, x_j)).
double correlation_fn(const SpectralKernel& k, const PointConfiguration& cfg);

/// Fredholm determinant Det(Id - K_D) = prod(1 - lambda_j).
double fredholm_det(const SpectralKernel& k);
double log_fredholm_det(const SpectralKernel& k);

/// Janossy density j_D(cfg). Non-projection kernels: Det(Id-K) det J(cfg);
/// projection kernels: det K(cfg) when |cfg| = N, 0 otherwise.
DetValue janossy_density(const SpectralKernel& k,
                         const PointConfiguration& cfg);

/// Analytic probability of observing exactly n points: the point count is a
/// sum of independent Bernoulli(lambda_j) variables.
Eigen::VectorXd count_distribution(const SpectralKernel& k);

// Built-in example kernels
SpectralKernel make_bergman_kernel(double R, int N);
SpectralKernel make_dyson_kernel(int N);

// JSON kernel specification (see README for the schema)
SpectralKernel kernel_from_json_string(const std::string& text);
SpectralKernel kernel_from_json_file(const std::string& path);
std::uint64_t kernel_spec_hash(const std::string& text);

}  // namespace dpp

#endif
