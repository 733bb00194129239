#ifndef DPP_VERIFICATION_HPP
#define DPP_VERIFICATION_HPP

#include <string>
#include <vector>

#include "dpp/calculus.hpp"
#include "dpp/dynamics.hpp"
#include "dpp/sampling.hpp"

namespace dpp {

struct IdentityReport {
  std::string suite;
  std::string name;
  McEstimate lhs;
  McEstimate rhs;
  double z = 0;
  bool pass = false;
  std::int64_t dropped_samples = 0;
};

struct IbpTriple {
  std::string name;
  TestFunctional F;
  TestFunctional G;
  std::shared_ptr<const VectorField> v;
};

struct QuasiInvarianceCase {
  std::string name;
  FlowMap flow;
  std::shared_ptr<const Statistic> f;
};

struct DirichletPair {
  std::string name;
  TestFunctional F;
  TestFunctional G;
};

/// Two-sided paired Monte Carlo of E[G grad_v F] = E[F div*_v G] under the
/// DPP law, one report per triple. z is the paired z-score of LHS - RHS.
std::vector<IdentityReport> run_ibp_suite(const SpectralKernel& k,
                                          const std::vector<IbpTriple>& triples,
                                          int n_samples, std::uint64_t seed,
                                          double base_z = 3.0);

/// Paired MC of E[exp(-sum f(phi(x)))] = E[exp(-sum f(x)) * weight(x)].
std::vector<IdentityReport> run_quasi_invariance_suite(
    const SpectralKernel& k, const std::vector<QuasiInvarianceCase>& cases,
    int n_samples, std::uint64_t seed, double base_z = 3.0);

/// Dirichlet-form identities: E(F,G) = E[G HF] and E[G HF] = E[F HG],
/// two reports per pair.
std::vector<IdentityReport> run_dirichlet_suite(
    const SpectralKernel& k, const std::vector<DirichletPair>& pairs,
    int n_samples, std::uint64_t seed, double base_z = 3.0);

/// Deterministic closed-form oracle comparisons (no sampling). The z field
/// carries 3 * relative_error / tolerance so the |z| <= 3 convention holds.
std::vector<IdentityReport> run_closedform_suite(double dyson_tol = 1e-10,
                                                 double bergman_tol = 1e-8,
                                                 std::uint64_t seed = 20240901);

/// Default seeded fixture sets used by `run_all` and the CLI.
std::vector<IbpTriple> default_ibp_triples(const SpectralKernel& k, int count,
                                           std::uint64_t seed);
std::vector<QuasiInvarianceCase> default_quasi_cases(const SpectralKernel& k,
                                                     int count,
                                                     std::uint64_t seed);
std::vector<DirichletPair> default_dirichlet_pairs(const SpectralKernel& k,
                                                   int count,
                                                   std::uint64_t seed);

struct AggregateReport {
  std::vector<IdentityReport> reports;
  bool pass = false;
  int exit_code = 2;
  std::string to_json() const;
};

/// Config JSON: { "suites": [...], "n_samples": int, "seed": u64,
///                "kernel": <path or inline spec, optional> }.
/// Known suites: closedform, ibp, quasi_invariance, dirichlet, domination.
AggregateReport run_all(const std::string& config_json);

/// Per-test threshold from a familywise 3-sigma budget split across n_tests
/// (Bonferroni).
double bonferroni_threshold(double base_z, int n_tests);

}  // namespace dpp

#endif
