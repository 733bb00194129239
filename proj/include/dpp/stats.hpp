#ifndef DPP_STATS_HPP
#define DPP_STATS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace dpp {

/// Monte Carlo estimate with optional z-score against a known target.
struct McEstimate {
  double mean = 0;
  double std_error = 0;
  std::int64_t n_samples = 0;
  std::optional<double> target;
  std::optional<double> z_score;

  static McEstimate from_samples(const std::vector<double>& xs,
                                 std::optional<double> target = {});
};

/// Streaming mean/variance accumulator (Welford).
class RunningStats {
 public:
  void add(double x);
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;
  double std_error() const;
  McEstimate estimate(std::optional<double> target = {}) const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0, m2_ = 0;
};

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Upper tail of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, int dof);

/// Pearson chi-square test of observed counts against expected probabilities
/// (bins with tiny expectation are merged into the last). Returns the p-value.
double chi_square_pvalue(const std::vector<std::int64_t>& observed,
                         const std::vector<double>& expected_prob,
                         std::int64_t n_total);

}  // namespace dpp

#endif
