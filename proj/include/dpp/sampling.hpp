#ifndef DPP_SAMPLING_HPP
#define DPP_SAMPLING_HPP

#include <functional>
#include <string>
#include <vector>

#include "dpp/functional.hpp"
#include "dpp/kernel.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/stats.hpp"

namespace dpp {

struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SampleBatch {
  std::vector<PointConfiguration> configurations;
  std::uint64_t seed = 0;
  std::string kernel_id;
  int dimension = 0;

  int size() const { return static_cast<int>(configurations.size()); }
  std::vector<std::int64_t> count_histogram(int max_count) const;
};

/// Exact DPP sampling: Bernoulli thinning of the modes followed by
/// sequential sampling of the resulting projection process, with rejection
/// against the spectral-diagonal envelope. One RNG stream per sample index.
SampleBatch sample_dpp(const SpectralKernel& k, int n_samples,
                       std::uint64_t seed);

/// Exact Poisson sampling: count from the quadrature of the intensity,
/// locations i.i.d. proportional to it.
SampleBatch sample_poisson(const std::function<double(const Point&)>& intensity,
                           const Domain& dom, int n_samples,
                           std::uint64_t seed, int quad_order = 64);

/// Histogram estimate of the intensity K(x,x) rho(x) w.r.t. Lebesgue measure
/// on a per-axis grid over the domain bounding box.
struct BinnedField {
  Eigen::VectorXd values;
  Eigen::VectorXd std_errors;
  Eigen::MatrixXd bin_centers;  // one row per bin
  Eigen::VectorXd bin_volumes;
};

BinnedField empirical_intensity(const SampleBatch& batch, const Domain& dom,
                                int bins_per_axis);

/// Monotone functionals for the stochastic-domination test.
class MonotoneFunctional {
 public:
  static MonotoneFunctional count();
  /// f(x) = sum_i g(x_i) for g >= 0 (checked at evaluation points).
  static MonotoneFunctional sum_statistic(
      std::shared_ptr<const Statistic> g);

  double operator()(const PointConfiguration& cfg) const;

 private:
  std::shared_ptr<const Statistic> g_;  // null means plain count
};

struct DominationResult {
  McEstimate dpp;
  McEstimate poisson;
  double z = 0;  // z of (dpp - poisson); domination holds when z <= 3
  bool pass = false;
};

/// E[f(X_DPP)] vs E[f(Y_Poisson)] with Y driven by intensity J(x,x) rho(x).
DominationResult domination_test(const SpectralKernel& k,
                                 const MonotoneFunctional& f, int n_samples,
                                 std::uint64_t seed);

// CSV / metadata I/O (17 significant digits, bit-exact round trips)
void write_batch_csv(const SampleBatch& batch, const std::string& csv_path,
                     const std::string& meta_path,
                     std::uint64_t kernel_hash = 0);
SampleBatch read_batch_csv(const std::string& csv_path, int dimension);

}  // namespace dpp

#endif
