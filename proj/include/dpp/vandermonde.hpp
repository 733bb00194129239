#ifndef DPP_VANDERMONDE_HPP
#define DPP_VANDERMONDE_HPP

#include <complex>
#include <vector>

#include "dpp/kernel.hpp"

namespace dpp {

/// Generalized Vandermonde determinant det((x_h ^ {i_p})) for strictly
/// increasing exponents i_1 < ... < i_k, evaluated directly.
Complex generalized_vandermonde(const std::vector<int>& indices,
                                const std::vector<Complex>& x);

/// Classical Vandermonde determinant prod_{p<q} (x_q - x_p).
Complex classical_vandermonde(const std::vector<Complex>& x);

/// Partition associated with the exponent set: (i_k-k+1, ..., i_2-1, i_1).
std::vector<int> partition_of_indices(const std::vector<int>& indices);

/// Schur polynomial s_lambda(x_1..x_k) via the Jacobi-Trudi determinant in
/// the complete homogeneous symmetric polynomials (independent of any
/// Vandermonde ratio).
Complex schur_polynomial(const std::vector<int>& lambda,
                         const std::vector<Complex>& x);

struct VandermondeSchur {
  Complex direct;      // det((x_h^{i_p}))
  Complex factorized;  // V_{1..k}(x) * s_{lambda(i)}(x)
};

/// Both evaluation routes of the generalized Vandermonde determinant.
VandermondeSchur vandermonde_schur_det(const std::vector<int>& indices,
                                       const std::vector<Complex>& x);

/// Closed form of det J for the modified Bergman kernel on k points:
/// |V_{1..k}|^2 * sum over exponent subsets of the weighted |Schur|^2.
double bergman_det_j_closed_form(double R, int N,
                                 const std::vector<Complex>& z);

/// Closed form of det(K_Dyson(theta_i, theta_j)) on N points.
double dyson_det_closed_form(int N, const std::vector<double>& theta);

}  // namespace dpp

#endif
