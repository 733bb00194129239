#include "dpp/vandermonde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace dpp {

Complex generalized_vandermonde(const std::vector<int>& indices,
                                const std::vector<Complex>& x) {
  const int k = static_cast<int>(indices.size());
  if (k != static_cast<int>(x.size()))
    throw ParameterError("indices/points size mismatch");
  for (int p = 1; p < k; ++p)
    if (indices[p] <= indices[p - 1])
      throw ParameterError("exponents must be strictly increasing");
  Eigen::MatrixXcd m(k, k);
  for (int p = 0; p < k; ++p)
    for (int h = 0; h < k; ++h) m(p, h) = std::pow(x[h], indices[p]);
  return k == 0 ? Complex(1, 0) : m.determinant();
}

Complex classical_vandermonde(const std::vector<Complex>& x) {
  Complex v = 1;
  const int k = static_cast<int>(x.size());
  for (int p = 0; p < k; ++p)
    for (int q = p + 1; q < k; ++q) v *= (x[q] - x[p]);
  return v;
}

std::vector<int> partition_of_indices(const std::vector<int>& indices) {
  const int k = static_cast<int>(indices.size());
  std::vector<int> lambda(k);
  for (int j = 0; j < k; ++j) lambda[j] = indices[k - 1 - j] - (k - 1 - j);
  return lambda;
}

Complex schur_polynomial(const std::vector<int>& lambda,
                         const std::vector<Complex>& x) {
  const int k = static_cast<int>(x.size());
  const int ell = static_cast<int>(lambda.size());
  int maxdeg = 0;
  for (int l : lambda) maxdeg = std::max(maxdeg, l);
  maxdeg += ell;  // Jacobi-Trudi entries reach h_{lambda_p - p + q}, q < ell
  // complete homogeneous symmetric polynomials from power sums:
  //   m h_m = sum_{r=1..m} p_r h_{m-r}
  std::vector<Complex> h(maxdeg + 1, 0.0), pw(maxdeg + 1, 0.0);
  h[0] = 1.0;
  for (int r = 1; r <= maxdeg; ++r)
    for (int i = 0; i < k; ++i) pw[r] += std::pow(x[i], r);
  for (int m = 1; m <= maxdeg; ++m) {
    Complex s = 0;
    for (int r = 1; r <= m; ++r) s += pw[r] * h[m - r];
    h[m] = s / double(m);
  }
  auto hh = [&](int m) -> Complex {
    if (m < 0) return 0.0;
    if (m > maxdeg) throw std::logic_error("h index out of range");
    return h[m];
  };
  if (ell == 0) return 1.0;
  Eigen::MatrixXcd jt(ell, ell);
  for (int p = 0; p < ell; ++p)
    for (int q = 0; q < ell; ++q) jt(p, q) = hh(lambda[p] - p + q);
  return jt.determinant();
}

VandermondeSchur vandermonde_schur_det(const std::vector<int>& indices,
                                       const std::vector<Complex>& x) {
  VandermondeSchur r;
  r.direct = generalized_vandermonde(indices, x);
  r.factorized = classical_vandermonde(x) *
                 schur_polynomial(partition_of_indices(indices), x);
  return r;
}

double bergman_det_j_closed_form(double R, int N,
                                 const std::vector<Complex>& z) {
  const int k = static_cast<int>(z.size());
  if (k > N) return 0.0;
  const double v2 = std::norm(classical_vandermonde(z));
  // iterate over exponent subsets 1 <= i_1 < ... < i_k <= N
  std::vector<int> idx(k);
  for (int p = 0; p < k; ++p) idx[p] = p + 1;
  double sum = 0;
  while (true) {
    double w = 1;
    for (int p = 0; p < k; ++p)
      w *= (1.0 + idx[p]) / (M_PI * (1 - std::pow(R, 2.0 * (idx[p] + 1))));
    sum += w * std::norm(schur_polynomial(partition_of_indices(idx), z));
    // next combination
    int p = k - 1;
    while (p >= 0 && idx[p] == N - (k - 1 - p)) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
  return v2 * sum;
}

double dyson_det_closed_form(int N, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != N)
    throw ParameterError("dyson closed form needs exactly N angles");
  double prod = 1;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const double s = std::sin(M_PI * (theta[j] - theta[i]) / N);
      prod *= s * s;
    }
  return std::pow(2.0, N * (N - 1)) / std::pow(double(N), N) * prod;
}

}  // namespace dpp
