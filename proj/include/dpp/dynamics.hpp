#ifndef DPP_DYNAMICS_HPP
#define DPP_DYNAMICS_HPP

#include <string>
#include <vector>

#include "dpp/calculus.hpp"
#include "dpp/sampling.hpp"

namespace dpp {

enum class Taming { None, Tamed, CappedStep };
enum class Boundary { Reflect, RejectStep, Periodic };

struct SdeConfig {
  double step_size = 1e-3;
  double horizon = 1.0;
  Taming taming = Taming::Tamed;
  double taming_threshold = -1.0;  // < 0 means 0.1 * domain diameter
  Boundary boundary = Boundary::Reflect;
  std::uint64_t seed = 0;
  int record_every = 1;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<PointConfiguration> states;
  std::vector<double> min_pair_distance;
  std::vector<double> min_boundary_distance;
  std::vector<double> potential;
  long noise_redraws = 0;
  long step_shrinks = 0;
  long taming_activations = 0;
  long boundary_events = 0;
};

struct TrajectoryError : std::runtime_error {
  TrajectoryError(std::string what, TrajectoryRecord partial_record)
      : std::runtime_error(std::move(what)),
        partial(std::move(partial_record)) {}
  TrajectoryRecord partial;  // everything up to the last good state
};

/// Euler-Maruyama integration of dX_i = sqrt(2) dB_i + drift_i dt with
/// per-point drift taming and the configured boundary behavior.
TrajectoryRecord evolve(const SpectralKernel& k, const PointConfiguration& init,
                        const SdeConfig& cfg);

struct StationarityReport {
  double count_pvalue = 0;
  std::vector<double> intensity_z;  // per occupied bin
  double max_abs_z = 0;
  bool pass = false;
  SampleBatch terminal;  // terminal configurations of all paths
};

/// Starts n_paths at exact DPP samples, evolves them to the horizon and
/// compares the terminal count distribution and binned intensity with the
/// analytic values.
StationarityReport stationarity_test(const SpectralKernel& k,
                                     const SdeConfig& cfg, int n_paths,
                                     std::uint64_t seed,
                                     double z_threshold = 3.0,
                                     int bins_per_axis = 4);

struct CollisionSummary {
  double fraction_below = 0;   // recorded times with min pair dist < threshold
  double min_distance = 0;     // minimum over the trajectory (+inf if < 2 pts)
  bool ever_below = false;
  bool no_guarantee_d1 = false;  // d = 1: no non-collision statement applies
};

CollisionSummary collision_stats(const TrajectoryRecord& record,
                                 double threshold);

void write_trajectory_csv(const TrajectoryRecord& record,
                          const std::string& csv_path,
                          const std::string& summary_path, int path_id = 0);

}  // namespace dpp

#endif
