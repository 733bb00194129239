#ifndef DPP_CALCULUS_HPP
#define DPP_CALCULUS_HPP

#include "dpp/functional.hpp"
#include "dpp/kernel.hpp"

namespace dpp {

/// Raised when an operation needs det J (or the Janossy density) to be
/// strictly positive at the configuration and it is not.
struct InfinitePotentialError : std::runtime_error {
  InfinitePotentialError(std::string what, int index = -1)
      : std::runtime_error(std::move(what)), point_index(index) {}
  int point_index;  // best-effort diagnostic, -1 when unattributable
};

/// Potential energy U[D](x) = -log det J[D](x); +inf marker when the
/// determinant vanishes. Projection kernels use -log det K (the
/// configuration-independent Fredholm constant is dropped, which leaves the
/// gradient unchanged).
struct Potential {
  double value = 0.0;  // +inf when the configuration is singular
  bool finite() const { return std::isfinite(value); }
};

Potential potential_u(const SpectralKernel& k, const PointConfiguration& cfg);

/// beta^mu = grad rho / rho.
Point beta_field(const SpectralKernel& k, const Point& x);

/// Per-point Langevin drift beta(x_i) - grad_i U, one row per point.
Eigen::MatrixXd drift(const SpectralKernel& k, const PointConfiguration& cfg);

/// B_v = sum_k (-beta(X_k) . v(X_k) + div v(X_k)).
double b_v(const SpectralKernel& k, const VectorField& v,
           const PointConfiguration& cfg);

/// Directional derivative of U along v: sum_i grad_i U . v(x_i).
double directional_grad_u(const SpectralKernel& k, const VectorField& v,
                          const PointConfiguration& cfg);

/// Divergence operator of the integration-by-parts duality:
///   grad_v* G = -grad_v G + G (-B_v + grad_v U).
double divergence_op(const SpectralKernel& k, const VectorField& v,
                     const TestFunctional& G, const PointConfiguration& cfg);

/// Radon-Nikodym weight of the transported law:
///   prod_x p_phi(x) * det J^phi(cfg) / det J(cfg),
/// with p_phi(x) = rho(phi^{-1} x)/rho(x) * Jac(phi^{-1})(x) and
/// J^phi(x, y) = J(phi^{-1} x, phi^{-1} y).
double quasi_invariance_weight(const SpectralKernel& k, const FlowMap& flow,
                               const PointConfiguration& cfg);

/// Generator H F = sum_i (-beta . grad_i F - lap_i F + grad_i U . grad_i F).
double apply_generator(const SpectralKernel& k, const TestFunctional& F,
                       const PointConfiguration& cfg);

/// Carre-du-champ summand of the Dirichlet form: sum_i grad_i F . grad_i G.
double dirichlet_summand(const TestFunctional& F, const TestFunctional& G,
                         const PointConfiguration& cfg);

}  // namespace dpp

#endif
