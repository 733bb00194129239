#include "dpp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "dpp/calculus.hpp"

namespace dpp {

namespace {

constexpr long kMaxRejections = 20'000'000;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<std::int64_t> SampleBatch::count_histogram(int max_count) const {
  std::vector<std::int64_t> h(max_count + 1, 0);
  for (const auto& cfg : configurations) {
    const int n = std::min(cfg.size(), max_count);
    ++h[n];
  }
  return h;
}

SampleBatch sample_dpp(const SpectralKernel& k, int n_samples,
                       std::uint64_t seed) {
  if (n_samples < 0) throw ParameterError("n_samples must be non-negative");
  const Domain& dom = k.domain();
  const int d = dom.dimension();
  const int rank = k.rank();

  // Rejection envelopes: |phi_j(x)|^2 rho(x) <= bound_j * rho_bound.
  const double rho_bound = k.rho().upper_bound(dom);
  std::vector<double> mode_bound(rank);
  for (int j = 0; j < rank; ++j) {
    mode_bound[j] = k.mode(j).abs2_bound(dom);
    if (!(mode_bound[j] > 0) || !std::isfinite(mode_bound[j]))
      throw SamplingError("mode " + std::to_string(j) +
                          " has no usable envelope bound");
  }
  if (!(rho_bound > 0) || !std::isfinite(rho_bound))
    throw SamplingError("reference density has no usable envelope bound");

  SampleBatch batch;
  batch.seed = seed;
  batch.kernel_id = k.id();
  batch.dimension = d;
  batch.configurations.reserve(n_samples);

  for (int s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, "dpp-sample", static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Phase 1: Bernoulli thinning of the spectrum.
    std::vector<int> active;
    for (int j = 0; j < rank; ++j)
      if (unif(rng) < k.eigenvalues()[j]) active.push_back(j);
    const int m = static_cast<int>(active.size());

    // Phase 2: sequential sampling of the projection process onto the
    // retained modes. The feature map e(x) = (phi_j(x))_{j active} gives the
    // next-point density (|e|^2 - |U^H e|^2) rho / (m - step), with U the
    // orthonormalized features of the points drawn so far.
    PointConfiguration cfg(d);
    Eigen::MatrixXcd basis(m, m);  // columns = orthonormal chosen directions
    int chosen = 0;
    long rejections = 0;
    while (chosen < m) {
      // Proposal: mix over active modes, each component |phi_j|^2 rho / 1.
      const int j = active[std::uniform_int_distribution<int>(0, m - 1)(rng)];
      const Point x = dom.sample_uniform(rng);
      const double rho_x = k.rho().value(x);
      const double target = std::norm(k.mode(j).value(x)) * rho_x;
      const double env = mode_bound[j] * rho_bound;
      if (target > env * (1.0 + 1e-9))
        throw SamplingError("rejection envelope violated at a sample point");
      if (unif(rng) * env >= target) {
        if (++rejections > kMaxRejections)
          throw SamplingError("sampler exceeded the rejection budget");
        continue;
      }
      Eigen::VectorXcd e(m);
      for (int a = 0; a < m; ++a) e[a] = k.mode(active[a]).value(x);
      const double e2 = e.squaredNorm();
      Eigen::VectorXcd w = e;
      if (chosen > 0) {
        const auto u = basis.leftCols(chosen);
        w -= u * (u.adjoint() * e);
      }
      const double resid = std::max(w.squaredNorm(), 0.0);
      // Thin the mixture draw down to the conditional density.
      if (e2 <= 0.0 || unif(rng) * e2 >= resid) {
        if (++rejections > kMaxRejections)
          throw SamplingError("sampler exceeded the rejection budget");
        continue;
      }
      basis.col(chosen) = w / std::sqrt(resid);
      cfg.add_point(x);
      ++chosen;
    }
    batch.configurations.push_back(std::move(cfg));
  }
  return batch;
}

SampleBatch sample_poisson(const std::function<double(const Point&)>& intensity,
                           const Domain& dom, int n_samples,
                           std::uint64_t seed, int quad_order) {
  if (n_samples < 0) throw ParameterError("n_samples must be non-negative");
  const QuadratureRule rule = domain_quadrature(dom, quad_order);
  double total = 0, peak = 0;
  for (int i = 0; i < rule.size(); ++i) {
    const double v = intensity(rule.node(i));
    if (v < 0) throw ParameterError("Poisson intensity is negative on D");
    total += rule.weights[i] * v;
    peak = std::max(peak, v);
  }
  const double env = 2.0 * peak + 1e-300;

  SampleBatch batch;
  batch.seed = seed;
  batch.kernel_id = "poisson";
  batch.dimension = dom.dimension();
  batch.configurations.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Rng rng = make_stream(seed, "poisson-sample", static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = total > 0
                      ? std::poisson_distribution<int>(total)(rng)
                      : 0;
    PointConfiguration cfg(dom.dimension());
    long rejections = 0;
    while (cfg.size() < n) {
      const Point x = dom.sample_uniform(rng);
      const double v = intensity(x);
      if (v < 0) throw ParameterError("Poisson intensity is negative on D");
      if (v > env)
        throw SamplingError("Poisson intensity exceeds its envelope");
      if (unif(rng) * env < v) {
        cfg.add_point(x);
      } else if (++rejections > kMaxRejections) {
        throw SamplingError("Poisson sampler exceeded the rejection budget");
      }
    }
    batch.configurations.push_back(std::move(cfg));
  }
  return batch;
}

BinnedField empirical_intensity(const SampleBatch& batch, const Domain& dom,
                                int bins_per_axis) {
  if (bins_per_axis <= 0) throw ParameterError("bins_per_axis must be >= 1");
  const int d = dom.dimension();
  Point lo(d), hi(d);
  if (dom.shape() == Domain::Shape::Ball) {
    lo = dom.center().array() - dom.radius();
    hi = dom.center().array() + dom.radius();
  } else {
    lo = dom.lower();
    hi = dom.upper();
  }
  int n_bins = 1;
  for (int a = 0; a < d; ++a) n_bins *= bins_per_axis;

  double bin_vol = 1.0;
  for (int a = 0; a < d; ++a) bin_vol *= (hi[a] - lo[a]) / bins_per_axis;

  BinnedField out;
  out.values = Eigen::VectorXd::Zero(n_bins);
  out.std_errors = Eigen::VectorXd::Zero(n_bins);
  out.bin_centers.resize(n_bins, d);
  out.bin_volumes = Eigen::VectorXd::Constant(n_bins, bin_vol);
  for (int b = 0; b < n_bins; ++b) {
    int rest = b;
    for (int a = 0; a < d; ++a) {
      const int ia = rest % bins_per_axis;
      rest /= bins_per_axis;
      out.bin_centers(b, a) = lo[a] + (ia + 0.5) * (hi[a] - lo[a]) /
                                          bins_per_axis;
    }
  }

  const std::int64_t n = batch.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n_bins);
  Eigen::VectorXd sum2 = Eigen::VectorXd::Zero(n_bins);
  std::map<int, int> touched;
  for (const auto& cfg : batch.configurations) {
    touched.clear();
    for (int i = 0; i < cfg.size(); ++i) {
      const Point x = cfg.point(i);
      int b = 0, stride = 1;
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        int ia = static_cast<int>((x[a] - lo[a]) / (hi[a] - lo[a]) *
                                  bins_per_axis);
        ia = std::clamp(ia, 0, bins_per_axis - 1);
        if (x[a] < lo[a] || x[a] > hi[a]) inside = false;
        b += ia * stride;
        stride *= bins_per_axis;
      }
      if (inside) ++touched[b];
    }
    for (const auto& [b, c] : touched) {
      sum[b] += c;
      sum2[b] += static_cast<double>(c) * c;
    }
  }
  if (n > 0) {
    for (int b = 0; b < n_bins; ++b) {
      const double mean = sum[b] / n;
      const double var =
          n > 1 ? std::max(sum2[b] - n * mean * mean, 0.0) / (n - 1) : 0.0;
      out.values[b] = mean / bin_vol;
      out.std_errors[b] = std::sqrt(var / n) / bin_vol;
    }
  }
  return out;
}

MonotoneFunctional MonotoneFunctional::count() { return {}; }

MonotoneFunctional MonotoneFunctional::sum_statistic(
    std::shared_ptr<const Statistic> g) {
  if (!g) throw ParameterError("sum_statistic needs a statistic");
  MonotoneFunctional f;
  f.g_ = std::move(g);
  return f;
}

double MonotoneFunctional::operator()(const PointConfiguration& cfg) const {
  if (!g_) return cfg.size();
  double s = 0;
  for (int i = 0; i < cfg.size(); ++i) {
    const double v = g_->value(cfg.point(i));
    if (v < 0)
      throw ParameterError(
          "sum_statistic is not monotone: negative value at a sample point");
    s += v;
  }
  return s;
}

DominationResult domination_test(const SpectralKernel& k,
                                 const MonotoneFunctional& f, int n_samples,
                                 std::uint64_t seed) {
  const SampleBatch dpp_batch =
      sample_dpp(k, n_samples, derive_seed(seed, "domination-dpp"));
  const auto intensity = [&](const Point& x) {
    return j_kernel_eval(k, x, x).real() * k.rho().value(x);
  };
  const SampleBatch poi_batch =
      sample_poisson(intensity, k.domain(), n_samples,
                     derive_seed(seed, "domination-poisson"));

  RunningStats a, b;
  for (const auto& cfg : dpp_batch.configurations) a.add(f(cfg));
  for (const auto& cfg : poi_batch.configurations) b.add(f(cfg));

  DominationResult r;
  r.dpp = a.estimate();
  r.poisson = b.estimate();
  const double se = std::sqrt(r.dpp.std_error * r.dpp.std_error +
                              r.poisson.std_error * r.poisson.std_error);
  r.z = se > 0 ? (r.dpp.mean - r.poisson.mean) / se : 0.0;
  r.pass = r.z <= 3.0;
  return r;
}

void write_batch_csv(const SampleBatch& batch, const std::string& csv_path,
                     const std::string& meta_path, std::uint64_t kernel_hash) {
  std::ofstream csv(csv_path);
  if (!csv) throw ParameterError("cannot open " + csv_path + " for writing");
  csv << "sample_id,point_id";
  for (int a = 0; a < batch.dimension; ++a) csv << ",x_" << (a + 1);
  csv << "\n";
  for (int s = 0; s < batch.size(); ++s) {
    const auto& cfg = batch.configurations[s];
    for (int i = 0; i < cfg.size(); ++i) {
      csv << s << "," << i;
      for (int a = 0; a < batch.dimension; ++a)
        csv << "," << fmt17(cfg.matrix()(i, a));
      csv << "\n";
    }
  }
  if (meta_path.empty()) return;
  nlohmann::json meta;
  meta["seed"] = batch.seed;
  meta["kernel_id"] = batch.kernel_id;
  meta["kernel_spec_hash"] = kernel_hash;
  meta["n_samples"] = batch.size();
  meta["dimension"] = batch.dimension;
  std::ofstream mf(meta_path);
  if (!mf) throw ParameterError("cannot open " + meta_path + " for writing");
  mf << meta.dump(2) << "\n";
}

SampleBatch read_batch_csv(const std::string& csv_path, int dimension) {
  std::ifstream in(csv_path);
  if (!in) throw ParameterError("cannot open " + csv_path);
  SampleBatch batch;
  batch.dimension = dimension;
  std::string line;
  std::getline(in, line);  // header
  int current = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    const int sid = std::stoi(tok);
    std::getline(ss, tok, ',');  // point_id (implied by order)
    Point x(dimension);
    for (int a = 0; a < dimension; ++a) {
      if (!std::getline(ss, tok, ','))
        throw ParameterError("malformed CSV row: " + line);
      x[a] = std::stod(tok);
    }
    while (current < sid) {
      batch.configurations.emplace_back(dimension);
      ++current;
    }
    batch.configurations.back().add_point(x);
  }
  return batch;
}

}  // namespace dpp
