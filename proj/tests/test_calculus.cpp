#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dpp/calculus.hpp"

using namespace dpp;

namespace {

const double kR = 0.5;

PointConfiguration pair_config(double x1, double y1, double x2, double y2) {
  PointConfiguration cfg(2);
  Point a(2), b(2);
  a << x1, y1;
  b << x2, y2;
  cfg.add_point(a);
  cfg.add_point(b);
  return cfg;
}

}  // namespace

TEST_CASE("single-point potential matches the logarithmic closed form") {
  auto k = make_bergman_kernel(kR, 2);
  const double c1 = 2.0 / (M_PI * (1 - std::pow(kR, 4)));
  const double c2 = 3.0 / (M_PI * (1 - std::pow(kR, 6)));
  Rng rng = make_stream(1, "pot");
  for (int it = 0; it < 100; ++it) {
    const Point x = k.domain().sample_uniform(rng);
    PointConfiguration cfg(2);
    cfg.add_point(x);
    const double r2 = x.squaredNorm();
    const double expect = -std::log(c1 * r2 + c2 * r2 * r2);
    CHECK(potential_u(k, cfg).value ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("pair drift matches the two-body closed form and finite differences") {
  auto k = make_bergman_kernel(kR, 2);
  const auto cfg = pair_config(0.25, 0.0, 0.0, 0.25);
  const auto dr = drift(k, cfg);
  // logarithmic repulsion from the origin and from the partner point
  const Point x1 = cfg.point(0), x2 = cfg.point(1);
  const Point expect1 =
      2.0 * (x1 / x1.squaredNorm() + (x1 - x2) / (x1 - x2).squaredNorm());
  CHECK((dr.row(0).transpose() - expect1).norm() < 1e-9);

  const double eps = 1e-6;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a) {
      PointConfiguration cp = cfg, cm = cfg;
      Point xp = cfg.point(i), xm = cfg.point(i);
      xp[a] += eps;
      xm[a] -= eps;
      cp.set_point(i, xp);
      cm.set_point(i, xm);
      const double fd =
          -(potential_u(k, cp).value - potential_u(k, cm).value) / (2 * eps);
      CHECK(dr(i, a) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("dyson drift is the repulsive cotangent sum") {
  const int N = 2;
  auto k = make_dyson_kernel(N);
  const double a = 0.3;
  PointConfiguration cfg(1);
  Point p(1), q(1);
  p << -a;
  q << a;
  cfg.add_point(p);
  cfg.add_point(q);
  const auto dr = drift(k, cfg);
  // (2 pi / N) cot(pi (theta_2 - theta_1) / N), pushing the points apart
  const double expect = (2 * M_PI / N) / std::tan(M_PI * (2 * a) / N);
  CHECK(dr(1, 0) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(dr(0, 0) == doctest::Approx(-expect).epsilon(1e-10));
  CHECK(dr(1, 0) > 0);  // repulsive for the right-hand point

  // cross-check by differencing U on the periodic domain
  const double eps = 1e-6;
  PointConfiguration cp = cfg, cm = cfg;
  Point qp = q, qm = q;
  qp[0] += eps;
  qm[0] -= eps;
  cp.set_point(1, qp);
  cm.set_point(1, qm);
  const double fd =
      -(potential_u(k, cp).value - potential_u(k, cm).value) / (2 * eps);
  CHECK(dr(1, 0) == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("degenerate configurations raise infinite-potential errors") {
  auto k = make_bergman_kernel(kR, 2);
  const auto cfg = pair_config(0.1, 0.1, 0.1, 0.1);
  CHECK(!potential_u(k, cfg).finite());
  CHECK_THROWS_AS(drift(k, cfg), InfinitePotentialError);
  try {
    drift(k, cfg);
  } catch (const InfinitePotentialError& e) {
    CHECK(e.point_index == 1);  // the partner of the nearest pair
  }
  // over-rank configurations are outside the support as well
  PointConfiguration big(2);
  Rng rng = make_stream(2, "big");
  for (int i = 0; i < 3; ++i) big.add_point(k.domain().sample_uniform(rng));
  CHECK(!potential_u(k, big).finite());
}

TEST_CASE("b_v closed forms") {
  auto k = make_bergman_kernel(kR, 2);  // rho = 1, so beta = 0
  const auto cfg = pair_config(0.2, 0.1, -0.1, 0.3);
  // v = x: div v = d at every point
  CHECK(b_v(k, *radial_field(2), cfg) == doctest::Approx(2.0 * 2.0));
  // constant field: divergence-free, beta = 0
  Point c(2);
  c << 0.7, -0.4;
  CHECK(b_v(k, *constant_field(c), cfg) == doctest::Approx(0.0));

  // rho = exp(a . x): B_v picks up -n (a . c) for constant v
  Point a2(2);
  a2 << 0.5, -1.0;
  auto krho = kernel_from_json_string(
      R"({"type":"custom",
          "domain":{"shape":"ball","center":[0,0],"radius":0.5},
          "eigenvalues":[0.25],
          "eigenfunctions":[{"type":"polynomial","coefficients":[[0.0,0.0],[1.0,0.0]]}],
          "rho":{"type":"exp_linear","a":[0.5,-1.0]}})");
  CHECK(b_v(krho, *constant_field(c), cfg) ==
        doctest::Approx(-2.0 * a2.dot(c)));
}

TEST_CASE("directional derivative of U agrees with a flow difference") {
  auto k = make_bergman_kernel(kR, 2);
  Rng rng = make_stream(3, "dirU");
  const auto v = fixtures::random_supported_field(k.domain(), rng, 0.5);
  const auto cfg = pair_config(0.21, -0.13, -0.05, 0.3);
  const double analytic = directional_grad_u(k, *v, cfg);
  const double t = 1e-5;
  const FlowMap fwd{v, t}, bwd{v, -t};
  const double fd = (potential_u(k, flow_apply(fwd, k.domain(), cfg)).value -
                     potential_u(k, flow_apply(bwd, k.domain(), cfg)).value) /
                    (2 * t);
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("quasi-invariance weight of the identity flow is one") {
  auto k = make_bergman_kernel(kR, 2);
  Rng rng = make_stream(4, "qiid");
  const auto v = fixtures::random_supported_field(k.domain(), rng);
  const FlowMap identity{v, 0.0};
  const auto cfg = pair_config(0.2, 0.0, -0.1, 0.15);
  CHECK(quasi_invariance_weight(k, identity, cfg) ==
        doctest::Approx(1.0).epsilon(1e-12));
  PointConfiguration empty(2);
  CHECK(quasi_invariance_weight(k, FlowMap{v, 0.4}, empty) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quasi-invariance weights compose under flow reversal") {
  auto k = make_bergman_kernel(kR, 2);
  Rng rng = make_stream(5, "qirev");
  const auto v = fixtures::random_supported_field(k.domain(), rng, 0.5);
  const FlowMap fwd{v, 0.6};
  const auto cfg = pair_config(0.2, 0.05, -0.12, 0.18);
  const auto moved = flow_apply(fwd, k.domain(), cfg);
  const double w_fwd = quasi_invariance_weight(k, fwd, moved);
  // transporting back with the inverse flow must cancel the weight
  const double w_bwd = quasi_invariance_weight(k, inverse(fwd), cfg);
  CHECK(w_fwd * w_bwd == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("generator agrees with its finite-difference expansion") {
  auto k = make_bergman_kernel(kR, 2);
  Rng rng = make_stream(6, "gen");
  for (int it = 0; it < 20; ++it) {
    const auto F = fixtures::random_functional(k.domain(), rng, k.rank());
    PointConfiguration cfg(2);
    const int n = 1 + it % 2;
    for (int i = 0; i < n; ++i) cfg.add_point(0.8 * k.domain().sample_uniform(rng));
    if (!potential_u(k, cfg).finite()) continue;

    const double eps = 1e-5;
    const auto dr = drift(k, cfg);
    double lap = 0, drift_term = 0;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < 2; ++a) {
        PointConfiguration cp = cfg, cm = cfg;
        Point xp = cfg.point(i), xm = cfg.point(i);
        xp[a] += eps;
        xm[a] -= eps;
        cp.set_point(i, xp);
        cm.set_point(i, xm);
        const double fp = eval_functional(F, cp);
        const double fm = eval_functional(F, cm);
        const double f0 = eval_functional(F, cfg);
        lap += (fp - 2 * f0 + fm) / (eps * eps);
        drift_term += dr(i, a) * (fp - fm) / (2 * eps);
      }
    const double expect = -lap - drift_term;  // rho = 1: H = -lap - drift.grad
    CHECK(apply_generator(k, F, cfg) ==
          doctest::Approx(expect).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("carre du champ is symmetric and positive on the diagonal") {
  auto k = make_bergman_kernel(kR, 2);
  Rng rng = make_stream(7, "cdc");
  const auto F = fixtures::random_functional(k.domain(), rng, k.rank());
  const auto G = fixtures::random_functional(k.domain(), rng, k.rank());
  const auto cfg = pair_config(0.2, -0.3, 0.05, 0.1);
  CHECK(dirichlet_summand(F, G, cfg) ==
        doctest::Approx(dirichlet_summand(G, F, cfg)));
  CHECK(dirichlet_summand(F, F, cfg) >= 0.0);
}

TEST_CASE("functionals truncate above the count cutoff") {
  auto k = make_bergman_kernel(kR, 3);
  Rng rng = make_stream(8, "cutoff");
  const auto F = fixtures::random_functional(k.domain(), rng, 1);
  PointConfiguration cfg(2);
  cfg.add_point(k.domain().sample_uniform(rng));
  CHECK(eval_functional(F, cfg) != 0.0);
  cfg.add_point(k.domain().sample_uniform(rng));
  CHECK(eval_functional(F, cfg) == 0.0);
  CHECK(grad_functional(F, cfg).norm() == 0.0);
  CHECK(apply_generator(k, F, cfg) == 0.0);
}

TEST_CASE("flows integrate exactly on linear fields") {
  Domain dom = Domain::ball(Point::Zero(2), 1.0);
  const auto v = radial_field(2);
  const FlowMap flow{v, 0.4};
  Point x(2);
  x << 0.1, -0.2;
  const Point y = flow_point(flow, dom, x);
  CHECK((y - std::exp(0.4) * x).norm() < 1e-10);
  CHECK(flow_jacobian(flow, dom, x) ==
        doctest::Approx(std::exp(2 * 0.4)).epsilon(1e-10));
  // inverse flow returns to the start
  const Point back = flow_point(inverse(flow), dom, y);
  CHECK((back - x).norm() < 1e-10);
  // leaving the domain is an error
  Point edge(2);
  edge << 0.95, 0.0;
  CHECK_THROWS_AS(flow_point(FlowMap{v, 1.0}, dom, edge), FlowError);
}

TEST_CASE("functional and field json specs parse") {
  const auto F = functional_from_json_string(
      R"({"outer":{"type":"linear","a":[1.0],"b":0.0},
          "statistics":[{"type":"polynomial",
                         "coefficients":[[0.0,0.0],[1.0,0.0]]}],
          "count_cutoff":10})",
      2);
  PointConfiguration cfg(2);
  Point x(2);
  x << 0.3, 0.7;
  cfg.add_point(x);
  CHECK(eval_functional(F, cfg) == doctest::Approx(0.3));

  const auto v = field_from_json_string(
      R"({"components":[{"coefficients":[[0.0],[1.0]]},
                        {"coefficients":[[0.0,1.0]]}]})");
  CHECK(v->value(x)[0] == doctest::Approx(0.3));
  CHECK(v->value(x)[1] == doctest::Approx(0.7));
  CHECK(v->divergence(x) == doctest::Approx(2.0));

  CHECK_THROWS_AS(functional_from_json_string("{bad", 2), ParameterError);
}
