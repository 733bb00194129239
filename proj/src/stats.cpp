#include "dpp/stats.hpp"

#include <stdexcept>

namespace dpp {

McEstimate McEstimate::from_samples(const std::vector<double>& xs,
                                    std::optional<double> target) {
  RunningStats rs;
  for (double x : xs) rs.add(x);
  return rs.estimate(target);
}

void RunningStats::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / n_;
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }

double RunningStats::std_error() const {
  return n_ > 0 ? std::sqrt(variance() / n_) : 0.0;
}

McEstimate RunningStats::estimate(std::optional<double> target) const {
  McEstimate e;
  e.mean = mean_;
  e.std_error = std_error();
  e.n_samples = n_;
  e.target = target;
  if (target) {
    const double se = e.std_error;
    e.z_score = se > 0 ? (e.mean - *target) / se
                       : (e.mean == *target ? 0.0 : HUGE_VAL);
  }
  return e;
}

namespace {

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  // Lentz continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p domain");
  if (x == 0) return 0;
  if (x < a + 1) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_sf(double x, int dof) {
  if (x <= 0) return 1.0;
  return 1.0 - gamma_p(dof / 2.0, x / 2.0);
}

double chi_square_pvalue(const std::vector<std::int64_t>& observed,
                         const std::vector<double>& expected_prob,
                         std::int64_t n_total) {
  // Merge bins whose expected count is below 5 into a pooled bin.
  std::vector<double> exp_counts;
  std::vector<double> obs_counts;
  double pool_e = 0, pool_o = 0;
  for (std::size_t i = 0; i < expected_prob.size(); ++i) {
    const double e = expected_prob[i] * n_total;
    const double o = i < observed.size() ? double(observed[i]) : 0.0;
    if (e < 5.0) {
      pool_e += e;
      pool_o += o;
    } else {
      exp_counts.push_back(e);
      obs_counts.push_back(o);
    }
  }
  if (pool_e > 0) {
    exp_counts.push_back(pool_e);
    obs_counts.push_back(pool_o);
  }
  if (exp_counts.size() < 2) return 1.0;  // nothing to test
  double chi2 = 0;
  for (std::size_t i = 0; i < exp_counts.size(); ++i) {
    const double d = obs_counts[i] - exp_counts[i];
    chi2 += d * d / exp_counts[i];
  }
  return chi_square_sf(chi2, static_cast<int>(exp_counts.size()) - 1);
}

}  // namespace dpp
