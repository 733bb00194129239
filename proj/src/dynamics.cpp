#include "dpp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>

namespace dpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRedraws = 100;
constexpr int kMaxShrinks = 12;

Point reflect_into(const Domain& dom, Point x) {
  if (dom.shape() == Domain::Shape::Ball) {
    const double R = dom.radius();
    for (int it = 0; it < 64; ++it) {
      const Point u = x - dom.center();
      const double r = u.norm();
      if (r <= R) break;
      x = dom.center() + u * ((2.0 * R - r) / r);
    }
    // pathological overshoot: clamp to the boundary
    const Point u = x - dom.center();
    if (u.norm() > R) x = dom.center() + u * (R / u.norm());
    return x;
  }
  for (int a = 0; a < dom.dimension(); ++a) {
    if (dom.periodic_axis(a)) continue;
    const double lo = dom.lower()[a], L = dom.upper()[a] - lo;
    double t = std::fmod(x[a] - lo, 2.0 * L);
    if (t < 0) t += 2.0 * L;
    if (t > L) t = 2.0 * L - t;
    x[a] = lo + t;
  }
  return dom.wrap(x);
}

double boundary_distance(const Domain& dom, const PointConfiguration& cfg) {
  double d = kInf;
  for (int i = 0; i < cfg.size(); ++i) {
    const Point x = cfg.point(i);
    if (dom.shape() == Domain::Shape::Ball) {
      d = std::min(d, dom.radius() - (x - dom.center()).norm());
    } else {
      for (int a = 0; a < dom.dimension(); ++a) {
        if (dom.periodic_axis(a)) continue;
        d = std::min({d, x[a] - dom.lower()[a], dom.upper()[a] - x[a]});
      }
    }
  }
  return d;
}

void record_state(TrajectoryRecord& rec, const SpectralKernel& k, double t,
                  const PointConfiguration& cfg) {
  rec.times.push_back(t);
  rec.states.push_back(cfg);
  rec.min_pair_distance.push_back(cfg.min_pair_distance(k.domain()));
  rec.min_boundary_distance.push_back(boundary_distance(k.domain(), cfg));
  rec.potential.push_back(potential_u(k, cfg).value);
}

}  // namespace

TrajectoryRecord evolve(const SpectralKernel& k, const PointConfiguration& init,
                        const SdeConfig& cfg) {
  const Domain& dom = k.domain();
  if (!(cfg.step_size > 0)) throw ParameterError("step_size must be > 0");
  if (cfg.horizon < 0) throw ParameterError("horizon must be >= 0");
  if (cfg.record_every < 1) throw ParameterError("record_every must be >= 1");
  if (cfg.boundary == Boundary::Periodic && !dom.any_periodic())
    throw ParameterError("Periodic boundary needs a periodic domain");
  for (int i = 0; i < init.size(); ++i) dom.require_inside(init.point(i));
  if (!potential_u(k, init).finite())
    throw ParameterError("initial configuration has infinite potential");

  const double cap = cfg.taming_threshold > 0 ? cfg.taming_threshold
                                              : 0.1 * dom.diameter();
  const int n = init.size();
  const int d = init.dimension();

  Rng rng = make_stream(cfg.seed, "sde-path");
  std::normal_distribution<double> gauss(0.0, 1.0);

  TrajectoryRecord rec;
  PointConfiguration state = init;
  double t = 0;
  record_state(rec, k, t, state);

  long step_index = 0;
  const double T = cfg.horizon;
  while (t < T - 1e-15) {
    Eigen::MatrixXd dr;
    try {
      dr = drift(k, state);
    } catch (const InfinitePotentialError& e) {
      throw TrajectoryError(std::string("drift evaluation failed: ") +
                                e.what(),
                            std::move(rec));
    }

    double h = std::min(cfg.step_size, T - t);
    bool accepted = false;
    PointConfiguration proposal(d);
    for (int shrink = 0; shrink <= kMaxShrinks && !accepted; ++shrink) {
      for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        proposal = state;
        const double sigma = std::sqrt(2.0 * h);
        bool outside = false;
        for (int i = 0; i < n; ++i) {
          Point move = dr.row(i).transpose() * h;
          if (cfg.taming != Taming::None && move.norm() > cap) {
            move *= cap / move.norm();
            ++rec.taming_activations;
          }
          Point noise(d);
          for (int a = 0; a < d; ++a) noise[a] = sigma * gauss(rng);
          Point y = state.point(i) + move + noise;
          if (cfg.taming == Taming::CappedStep) {
            const Point full = y - state.point(i);
            if (full.norm() > cap) {
              y = state.point(i) + full * (cap / full.norm());
              ++rec.taming_activations;
            }
          }
          switch (cfg.boundary) {
            case Boundary::Reflect:
              if (!dom.contains(y)) {
                y = reflect_into(dom, y);
                ++rec.boundary_events;
              }
              break;
            case Boundary::Periodic:
              y = dom.wrap(y);
              break;
            case Boundary::RejectStep:
              if (!dom.contains(y)) outside = true;
              break;
          }
          proposal.set_point(i, y);
          if (outside) break;
        }
        if (outside || !potential_u(k, proposal).finite()) {
          ++rec.noise_redraws;
          continue;
        }
        accepted = true;
        break;
      }
      if (!accepted && shrink < kMaxShrinks) {
        h *= 0.5;
        ++rec.step_shrinks;
      }
    }
    if (!accepted)
      throw TrajectoryError("no admissible step after retries and shrinking",
                            std::move(rec));
    state = proposal;
    t += h;
    ++step_index;
    if (step_index % cfg.record_every == 0 || t >= T - 1e-15)
      record_state(rec, k, t, state);
  }
  return rec;
}

StationarityReport stationarity_test(const SpectralKernel& k,
                                     const SdeConfig& cfg, int n_paths,
                                     std::uint64_t seed, double z_threshold,
                                     int bins_per_axis) {
  const SampleBatch initial =
      sample_dpp(k, n_paths, derive_seed(seed, "stationarity-init"));

  StationarityReport rep;
  rep.terminal.seed = seed;
  rep.terminal.kernel_id = k.id();
  rep.terminal.dimension = k.domain().dimension();
  rep.terminal.configurations.reserve(n_paths);
  SdeConfig path_cfg = cfg;
  path_cfg.record_every = std::numeric_limits<int>::max();
  for (int p = 0; p < n_paths; ++p) {
    path_cfg.seed = derive_seed(seed, "stationarity-path",
                                static_cast<std::uint64_t>(p));
    const TrajectoryRecord rec =
        evolve(k, initial.configurations[p], path_cfg);
    rep.terminal.configurations.push_back(rec.states.back());
  }

  // Count distribution against the Bernoulli mixture of the spectrum.
  const Eigen::VectorXd probs = count_distribution(k);
  const auto hist = rep.terminal.count_histogram(k.rank());
  std::vector<double> expected(probs.data(), probs.data() + probs.size());
  rep.count_pvalue = chi_square_pvalue(hist, expected, n_paths);

  // Binned intensity against the analytic intensity K(x,x) rho(x), with the
  // per-bin expectation resolved on a midpoint subgrid (bins may straddle the
  // boundary of a ball domain).
  const Domain& dom = k.domain();
  const BinnedField emp =
      empirical_intensity(rep.terminal, dom, bins_per_axis);
  const int d = dom.dimension();
  Point lo(d), hi(d);
  if (dom.shape() == Domain::Shape::Ball) {
    lo = dom.center().array() - dom.radius();
    hi = dom.center().array() + dom.radius();
  } else {
    lo = dom.lower();
    hi = dom.upper();
  }
  const int sub = 16;
  rep.max_abs_z = 0;
  for (int b = 0; b < emp.values.size(); ++b) {
    // integrate the intensity over bin b
    double integral = 0;
    const double bin_vol = emp.bin_volumes[b];
    int n_sub = 1;
    for (int a = 0; a < d; ++a) n_sub *= sub;
    const double sub_vol = bin_vol / n_sub;
    for (int s = 0; s < n_sub; ++s) {
      Point x(d);
      int rest = s;
      for (int a = 0; a < d; ++a) {
        const double w = (hi[a] - lo[a]) / bins_per_axis;
        const double base = emp.bin_centers(b, a) - 0.5 * w;
        x[a] = base + ((rest % sub) + 0.5) * w / sub;
        rest /= sub;
      }
      if (!dom.contains(x)) continue;
      integral += kernel_eval(k, x, x).real() * k.rho().value(x) * sub_vol;
    }
    const double expected_avg = integral / bin_vol;
    double se = emp.std_errors[b];
    // Poisson floor avoids zero-variance bins with a nonzero expectation
    se = std::max(se, std::sqrt(std::max(integral, 1e-12) / n_paths) /
                          bin_vol);
    const double z = (emp.values[b] - expected_avg) / se;
    rep.intensity_z.push_back(z);
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
  }
  rep.pass = rep.count_pvalue > 0.01 && rep.max_abs_z <= z_threshold;
  return rep;
}

CollisionSummary collision_stats(const TrajectoryRecord& record,
                                 double threshold) {
  CollisionSummary s;
  s.min_distance = kInf;
  std::int64_t below = 0;
  for (double dmin : record.min_pair_distance) {
    s.min_distance = std::min(s.min_distance, dmin);
    if (dmin < threshold) ++below;
  }
  const std::int64_t n = static_cast<std::int64_t>(
      record.min_pair_distance.size());
  s.fraction_below = n > 0 ? static_cast<double>(below) / n : 0.0;
  s.ever_below = below > 0;
  s.no_guarantee_d1 =
      !record.states.empty() && record.states.front().dimension() == 1;
  return s;
}

void write_trajectory_csv(const TrajectoryRecord& record,
                          const std::string& csv_path,
                          const std::string& summary_path, int path_id) {
  std::ofstream csv(csv_path);
  if (!csv) throw ParameterError("cannot open " + csv_path + " for writing");
  const int d =
      record.states.empty() ? 0 : record.states.front().dimension();
  csv << "path_id,time,point_id";
  for (int a = 0; a < d; ++a) csv << ",x_" << (a + 1);
  csv << "\n";
  char buf[40];
  for (std::size_t s = 0; s < record.states.size(); ++s) {
    const auto& cfg = record.states[s];
    for (int i = 0; i < cfg.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", record.times[s]);
      csv << path_id << "," << buf << "," << i;
      for (int a = 0; a < d; ++a) {
        std::snprintf(buf, sizeof buf, "%.17g", cfg.matrix()(i, a));
        csv << "," << buf;
      }
      csv << "\n";
    }
  }
  if (summary_path.empty()) return;
  nlohmann::json js;
  const CollisionSummary cs = collision_stats(record, 0.0);
  js["min_pair_distance"] = cs.min_distance;
  js["min_boundary_distance"] =
      record.min_boundary_distance.empty()
          ? 0.0
          : *std::min_element(record.min_boundary_distance.begin(),
                              record.min_boundary_distance.end());
  js["noise_redraws"] = record.noise_redraws;
  js["step_shrinks"] = record.step_shrinks;
  js["taming_activations"] = record.taming_activations;
  js["boundary_events"] = record.boundary_events;
  js["n_recorded"] = record.times.size();
  std::ofstream sf(summary_path);
  if (!sf) throw ParameterError("cannot open " + summary_path);
  sf << js.dump(2) << "\n";
}

}  // namespace dpp
