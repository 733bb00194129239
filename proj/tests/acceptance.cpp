// End-to-end acceptance checks. Each test case prints a single PASS/FAIL
// line so the full gate can be read off the log at a glance.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <string>
#include <vector>

#include "dpp/quadrature.hpp"
#include "dpp/vandermonde.hpp"
#include "dpp/verification.hpp"

using namespace dpp;

namespace {

void announce(int idx, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", idx, ok ? "PASS" : "FAIL",
              what.c_str());
  std::fflush(stdout);
}

std::vector<Complex> to_complex(const PointConfiguration& cfg) {
  std::vector<Complex> z;
  for (int i = 0; i < cfg.size(); ++i)
    z.emplace_back(cfg.point(i)[0], cfg.point(i)[1]);
  return z;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double rel_err(double value, double oracle) {
  return std::abs(value - oracle) / std::max(std::abs(oracle), 1e-300);
}

SpectralKernel rank3_custom_kernel() {
  // rank-3 kernel with orthonormal monomial modes sqrt((k+1)/pi)/R^(k+1) z^k
  // on the radius-R disc and eigenvalues strictly inside (0,1)
  const double R = 0.5;
  nlohmann::json spec;
  spec["type"] = "custom";
  spec["domain"] = {{"shape", "ball"}, {"center", {0.0, 0.0}}, {"radius", R}};
  spec["eigenvalues"] = {0.45, 0.3, 0.15};
  spec["eigenfunctions"] = nlohmann::json::array();
  for (int k = 0; k < 3; ++k) {
    std::vector<double> coeff(k, 0.0);
    coeff.push_back(std::sqrt((k + 1) / M_PI) / std::pow(R, k + 1));
    spec["eigenfunctions"].push_back(
        {{"type", "polynomial"}, {"coefficients", coeff}});
  }
  return kernel_from_json_string(spec.dump());
}

}  // namespace

TEST_CASE("closed-form determinants") {
  double worst_dyson = 0;
  for (int N = 2; N <= 8; ++N) {
    auto k = make_dyson_kernel(N);
    Rng rng = make_stream(101, "acc-dyson", N);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
      PointConfiguration cfg(1);
      std::vector<double> theta(N);
      for (int i = 0; i < N; ++i) {
        // stratified jitter keeps the Gram matrix well conditioned, so the
        // relative comparison is meaningful at 1e-10
        Point x(1);
        x[0] = -0.5 * N + i + 0.1 + 0.8 * unif(rng);
        cfg.add_point(x);
        theta[i] = x[0];
      }
      worst_dyson =
          std::max(worst_dyson, rel_err(hermitian_det(kernel_matrix(k, cfg)).value,
                                        dyson_det_closed_form(N, theta)));
    }
  }
  double worst_bergman = 0;
  const double R = 0.5;
  for (int N = 1; N <= 4; ++N) {
    auto k = make_bergman_kernel(R, N);
    Rng rng = make_stream(102, "acc-bergman", N);
    for (int npts = 1; npts <= N; ++npts)
      for (int rep = 0; rep < 25; ++rep) {
        PointConfiguration cfg(2);
        for (int i = 0; i < npts; ++i)
          cfg.add_point(k.domain().sample_uniform(rng));
        worst_bergman = std::max(
            worst_bergman, rel_err(hermitian_det(j_matrix(k, cfg)).value,
                                   bergman_det_j_closed_form(R, N, to_complex(cfg))));
      }
  }
  const bool ok = worst_dyson <= 1e-10 && worst_bergman <= 1e-8;
  announce(1, ok,
           "determinant closed forms (worst rel err dyson " +
               sci(worst_dyson) + ", disc " +
               sci(worst_bergman) + ")");
  CHECK(worst_dyson <= 1e-10);
  CHECK(worst_bergman <= 1e-8);
}

TEST_CASE("singleton potential and pair drift closed forms") {
  const double R = 0.5;
  auto k = make_bergman_kernel(R, 2);
  const double c1 = 2.0 / (M_PI * (1.0 - std::pow(R, 4)));
  const double c2 = 3.0 / (M_PI * (1.0 - std::pow(R, 6)));
  Rng rng = make_stream(103, "acc-potential");
  double worst_u = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Point x = k.domain().sample_uniform(rng);
    PointConfiguration cfg(2);
    cfg.add_point(x);
    const double r2 = x.squaredNorm();
    worst_u = std::max(worst_u, rel_err(potential_u(k, cfg).value,
                                        -std::log(c1 * r2 + c2 * r2 * r2)));
  }

  double worst_drift = 0, worst_fd = 0;
  const double h = 1e-6;
  for (int rep = 0; rep < 50; ++rep) {
    PointConfiguration cfg(2);
    const Point x1 = k.domain().sample_uniform(rng);
    const Point x2 = k.domain().sample_uniform(rng);
    if ((x1 - x2).norm() < 1e-3 || x1.norm() < 1e-3 || x2.norm() < 1e-3)
      continue;
    cfg.add_point(x1);
    cfg.add_point(x2);
    const Eigen::MatrixXd d = drift(k, cfg);
    const Point closed =
        2.0 * (x1 / x1.squaredNorm() + (x1 - x2) / (x1 - x2).squaredNorm());
    worst_drift = std::max(
        worst_drift, (d.row(0).transpose() - closed).norm() /
                         std::max(1.0, closed.norm()));
    for (int c = 0; c < 2; ++c) {
      PointConfiguration up = cfg, dn = cfg;
      Point xu = x1, xd = x1;
      xu[c] += h;
      xd[c] -= h;
      up.set_point(0, xu);
      dn.set_point(0, xd);
      const double fd =
          -(potential_u(k, up).value - potential_u(k, dn).value) / (2 * h);
      worst_fd = std::max(worst_fd,
                          std::abs(fd - d(0, c)) / std::max(1.0, std::abs(fd)));
    }
  }
  const bool ok = worst_u <= 1e-10 && worst_drift <= 1e-10 && worst_fd <= 1e-4;
  announce(2, ok,
           "singleton potential / pair drift (worst rel err U " +
               sci(worst_u) + ", drift " + sci(worst_drift) +
               ", finite diff " + sci(worst_fd) + ")");
  CHECK(worst_u <= 1e-10);
  CHECK(worst_drift <= 1e-10);
  CHECK(worst_fd <= 1e-4);
}

TEST_CASE("hole probability and normalized densities") {
  bool hole_ok = true;
  for (int N = 1; N <= 4; ++N) {
    auto k = make_bergman_kernel(0.5, N);
    PointConfiguration empty(2);
    const double hole = janossy_density(k, empty).value;
    double prod = 1;
    for (int j = 0; j < k.rank(); ++j) prod *= 1.0 - k.eigenvalues()[j];
    hole_ok = hole_ok && hole == prod && hole == fredholm_det(k);
  }

  double worst_norm = 0;
  for (int N = 1; N <= 2; ++N) {
    auto k = make_bergman_kernel(0.5, N);
    auto rule = domain_quadrature(k.domain(), 40);
    double total = janossy_density(k, PointConfiguration(2)).value;
    for (int i = 0; i < rule.size(); ++i) {
      PointConfiguration c(2);
      c.add_point(rule.node(i));
      total += rule.weights[i] * janossy_density(k, c).value;
    }
    if (N == 2) {
      double p2 = 0;
      for (int i = 0; i < rule.size(); ++i)
        for (int j = 0; j < rule.size(); ++j) {
          PointConfiguration c(2);
          c.add_point(rule.node(i));
          c.add_point(rule.node(j));
          p2 += rule.weights[i] * rule.weights[j] * janossy_density(k, c).value;
        }
      total += p2 / 2.0;
    }
    worst_norm = std::max(worst_norm, std::abs(total - 1.0));
  }
  const bool ok = hole_ok && worst_norm <= 1e-3;
  announce(3, ok,
           "hole probability exact, density normalization off by " +
               sci(worst_norm));
  CHECK(hole_ok);
  CHECK(worst_norm <= 1e-3);
}

TEST_CASE("sampler count distribution and mean") {
  auto k = make_bergman_kernel(0.5, 2);
  // expected count probabilities from quadrature of the exact densities, so
  // the sampler is checked against an independent route
  auto rule = domain_quadrature(k.domain(), 40);
  std::vector<double> expected(3, 0.0);
  expected[0] = janossy_density(k, PointConfiguration(2)).value;
  for (int i = 0; i < rule.size(); ++i) {
    PointConfiguration c(2);
    c.add_point(rule.node(i));
    expected[1] += rule.weights[i] * janossy_density(k, c).value;
  }
  expected[2] = 1.0 - expected[0] - expected[1];

  std::vector<double> pvals;
  for (int s = 0; s < 20; ++s) {
    const auto batch = sample_dpp(k, 5000, derive_seed(104, "acc-counts", s));
    pvals.push_back(
        chi_square_pvalue(batch.count_histogram(k.rank()), expected, 5000));
  }
  std::sort(pvals.begin(), pvals.end());
  const double median_p = 0.5 * (pvals[9] + pvals[10]);

  const auto big = sample_dpp(k, 100000, 105);
  RunningStats counts;
  for (const auto& cfg : big.configurations) counts.add(cfg.size());
  const double z = *counts.estimate(k.trace_k()).z_score;

  const bool ok = median_p > 0.01 && std::abs(z) <= 3.0;
  announce(4, ok,
           "sampler counts (median chi-square p " + std::to_string(median_p) +
               ", mean-count z " + std::to_string(z) + ")");
  CHECK(median_p > 0.01);
  CHECK(std::abs(z) <= 3.0);
}

TEST_CASE("integration by parts duality") {
  auto k = make_bergman_kernel(0.5, 2);
  const auto reports = run_ibp_suite(k, default_ibp_triples(k, 5, 7), 100000, 7);
  bool ok = reports.size() == 5;
  double worst = 0;
  for (const auto& r : reports) {
    ok = ok && r.pass;
    worst = std::max(worst, std::abs(r.z));
  }
  announce(5, ok,
           "integration-by-parts duality, 5 triples (worst |z| " +
               std::to_string(worst) + ")");
  CHECK(ok);
}

TEST_CASE("quasi-invariance under diffeomorphic transport") {
  auto k = make_bergman_kernel(0.5, 2);
  const auto reports =
      run_quasi_invariance_suite(k, default_quasi_cases(k, 3, 7), 100000, 7);
  bool ok = reports.size() == 3;
  double worst = 0;
  for (const auto& r : reports) {
    ok = ok && r.pass;
    worst = std::max(worst, std::abs(r.z));
  }
  announce(6, ok,
           "quasi-invariance, 3 flows (worst |z| " + std::to_string(worst) + ")");
  CHECK(ok);
}

TEST_CASE("dirichlet form and generator symmetry") {
  auto k = make_bergman_kernel(0.5, 2);
  const auto reports =
      run_dirichlet_suite(k, default_dirichlet_pairs(k, 3, 7), 100000, 7);
  bool ok = reports.size() == 6;
  double worst = 0;
  for (const auto& r : reports) {
    ok = ok && r.pass;
    worst = std::max(worst, std::abs(r.z));
  }
  announce(7, ok,
           "dirichlet form / generator symmetry, 3 pairs (worst |z| " +
               std::to_string(worst) + ")");
  CHECK(ok);
}

TEST_CASE("poisson domination of increasing statistics") {
  auto bergman = make_bergman_kernel(0.5, 2);
  const auto r1 = domination_test(bergman, MonotoneFunctional::count(), 20000, 9);
  auto custom = rank3_custom_kernel();
  const auto r2 = domination_test(custom, MonotoneFunctional::count(), 20000, 9);
  const bool ok = r1.pass && r2.pass;
  announce(8, ok,
           "poisson domination (z " + std::to_string(r1.z) + " disc, " +
               std::to_string(r2.z) + " rank-3 custom)");
  CHECK(r1.pass);
  CHECK(r2.pass);
}

TEST_CASE("stationarity of the tamed langevin diffusion") {
  auto k = make_bergman_kernel(0.5, 2);
  SdeConfig cfg;
  cfg.horizon = 0.5;
  cfg.step_size = 1e-3;
  cfg.taming = Taming::Tamed;
  cfg.record_every = 1 << 30;

  const auto mean_count = [](const SampleBatch& b) {
    RunningStats s;
    for (const auto& c : b.configurations) s.add(c.size());
    return s;
  };

  const auto coarse = stationarity_test(k, cfg, 2000, 31);
  SdeConfig half = cfg;
  half.step_size = 5e-4;
  const auto fine = stationarity_test(k, half, 2000, 32);

  const auto mc = mean_count(coarse.terminal);
  const auto mf = mean_count(fine.terminal);
  const double bias_c = mc.mean() - k.trace_k();
  const double bias_f = mf.mean() - k.trace_k();
  // the discretization bias is below Monte Carlo resolution at these step
  // sizes; require that halving the step never grows it beyond noise
  const bool bias_ok =
      std::abs(bias_f) <= std::abs(bias_c) + 2 * (mc.std_error() + mf.std_error());

  // two stationarity runs share a 1% family budget: 0.005 per count test
  const auto run_ok = [](const StationarityReport& r) {
    return r.count_pvalue > 0.005 && r.max_abs_z <= 3.0;
  };
  const bool ok = run_ok(coarse) && run_ok(fine) && bias_ok;
  announce(9, ok,
           "stationarity (count p " + std::to_string(coarse.count_pvalue) +
               " / " + std::to_string(fine.count_pvalue) +
               ", max intensity |z| " + std::to_string(coarse.max_abs_z) +
               ", bias " + std::to_string(bias_c) + " -> " +
               std::to_string(bias_f) + " at half step)");
  CHECK(run_ok(coarse));
  CHECK(run_ok(fine));
  CHECK(bias_ok);
}

TEST_CASE("non-collision of the two-dimensional diffusion") {
  auto k = make_bergman_kernel(0.5, 2);
  SdeConfig cfg;
  cfg.horizon = 1.0;
  cfg.step_size = 1e-3;
  cfg.record_every = 1;
  int collided = 0;
  const int n_paths = 1000;
  Rng rng = make_stream(106, "acc-collision");
  for (int p = 0; p < n_paths; ++p) {
    PointConfiguration init(2);
    do {
      init = PointConfiguration(2);
      init.add_point(k.domain().sample_uniform(rng));
      init.add_point(k.domain().sample_uniform(rng));
    } while (!potential_u(k, init).finite());
    cfg.seed = derive_seed(106, "acc-collision-path", p);
    const auto rec = evolve(k, init, cfg);
    if (collision_stats(rec, 1e-4).ever_below) ++collided;
  }
  const double fraction = double(collided) / n_paths;

  // one-dimensional runs carry no such guarantee and must say so
  auto dyson = make_dyson_kernel(2);
  SdeConfig dcfg;
  dcfg.horizon = 0.01;
  dcfg.step_size = 1e-3;
  dcfg.boundary = Boundary::Periodic;
  dcfg.seed = 5;
  const auto drec = evolve(dyson, sample_dpp(dyson, 1, 5).configurations[0], dcfg);
  const bool warn_d1 = collision_stats(drec, 1e-4).no_guarantee_d1;

  const bool ok = fraction <= 0.01 && warn_d1;
  announce(10, ok,
           "non-collision: fraction of paths ever below 1e-4 = " +
               std::to_string(fraction) +
               (warn_d1 ? " (1-d runs flagged: no guarantee)" : ""));
  CHECK(fraction <= 0.01);
  CHECK(warn_d1);
}

TEST_CASE("analytic derivatives against finite differences") {
  auto k = make_bergman_kernel(0.5, 2);
  const Domain& dom = k.domain();
  Rng rng = make_stream(107, "acc-oracles");
  std::uniform_int_distribution<int> npts(1, 3);

  double worst_grad = 0, worst_dir = 0, worst_jac = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto F = fixtures::random_functional(dom, rng, 8);
    const auto v = fixtures::random_supported_field(dom, rng);
    PointConfiguration cfg(2);
    const int n = npts(rng);
    for (int i = 0; i < n; ++i) cfg.add_point(0.8 * dom.sample_uniform(rng));

    // per-point gradient of the functional
    const Eigen::MatrixXd g = grad_functional(F, cfg);
    const double h = 1e-5;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) {
        PointConfiguration up = cfg, dn = cfg;
        Point xu = cfg.point(i), xd = cfg.point(i);
        xu[c] += h;
        xd[c] -= h;
        up.set_point(i, xu);
        dn.set_point(i, xd);
        const double fd =
            (eval_functional(F, up) - eval_functional(F, dn)) / (2 * h);
        worst_grad = std::max(
            worst_grad, std::abs(fd - g(i, c)) / std::max(1.0, std::abs(fd)));
      }

    // directional derivative along the field via a short flow
    const double eps = 1e-5;
    PointConfiguration fwd = cfg, bwd = cfg;
    for (int i = 0; i < n; ++i) {
      fwd.set_point(i, cfg.point(i) + eps * v->value(cfg.point(i)));
      bwd.set_point(i, cfg.point(i) - eps * v->value(cfg.point(i)));
    }
    const double fd_dir =
        (eval_functional(F, fwd) - eval_functional(F, bwd)) / (2 * eps);
    const double an_dir = directional_grad(F, *v, cfg);
    worst_dir = std::max(worst_dir,
                         std::abs(fd_dir - an_dir) / std::max(1.0, std::abs(an_dir)));

    // flow jacobian determinant against finite differences of the flow map
    const FlowMap flow{v, 0.3};
    const Point x = 0.8 * dom.sample_uniform(rng);
    const double jac = flow_jacobian(flow, dom, x);
    Eigen::Matrix2d m;
    const double hj = 1e-6;
    for (int c = 0; c < 2; ++c) {
      Point xu = x, xd = x;
      xu[c] += hj;
      xd[c] -= hj;
      m.col(c) =
          (flow_point(flow, dom, xu) - flow_point(flow, dom, xd)) / (2 * hj);
    }
    worst_jac = std::max(worst_jac,
                         std::abs(m.determinant() - jac) / std::max(1.0, jac));
  }
  const bool ok = worst_grad <= 1e-5 && worst_dir <= 1e-4 && worst_jac <= 1e-6;
  announce(11, ok,
           "derivative oracles (worst rel err grad " + sci(worst_grad) +
               ", directional " + sci(worst_dir) + ", jacobian " +
               sci(worst_jac) + ")");
  CHECK(worst_grad <= 1e-5);
  CHECK(worst_dir <= 1e-4);
  CHECK(worst_jac <= 1e-6);
}
