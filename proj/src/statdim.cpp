#include "sketchreg/statdim.hpp"

#include "sketchreg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sketchreg {

double sd_exact(const Vector& sigma, double lambda) {
  if (lambda < 0.0) throw ContractError("sd_exact: lambda must be >= 0");
  if (sigma.size() == 0) return 0.0;
  const double smax = sigma.maxCoeff();
  if (lambda == 0.0) return static_cast<double>(numerical_rank(sigma, 1e-10));
  double sd = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma(i) > 0.0) || smax <= 0.0) continue;
    const double s2 = sigma(i) * sigma(i);
    sd += s2 / (s2 + lambda);
  }
  return sd;
}

double sd_exact_of(const MatrixRef& A, double lambda) { return sd_exact(singular_values(A), lambda); }

double tail_energy(const Vector& sigma, Index z) {
  double t = 0.0;
  for (Index i = std::max<Index>(z, 0); i < sigma.size(); ++i) t += sigma(i) * sigma(i);
  return t;
}

ResidualEstimate residual_norm_estimate(const MatrixRef& A, Index z, Rng& rng, const ResidualOptions& opts) {
  if (z < 1) throw ContractError("residual_norm_estimate: z must be >= 1");
  const Index r = std::min(A.rows(), A.cols());
  const double total = A.squaredNorm();
  ResidualEstimate out;
  if (z >= r) {
    out.near_zero = true;
    return out;
  }
  const Index block = std::min<Index>(2 * z, r);
  const Index depth = std::max(opts.iterations, 0) + 1;
  double gamma = 0.0;
  if (opts.backend == ResidualBackend::ExactSvd || block * depth >= r) {
    gamma = tail_energy(singular_values(A), z);
  } else {
    Matrix K(A.rows(), block * depth);
    Matrix Y = A * gaussian_matrix(A.cols(), block, rng);
    for (Index j = 0; j < depth; ++j) {
      Eigen::HouseholderQR<Matrix> qr(Y);
      const Matrix Qj = qr.householderQ() * Matrix::Identity(Y.rows(), block);
      K.middleCols(j * block, block) = Qj;
      if (j + 1 < depth) Y = A * (A.transpose() * Qj);
    }
    const ColumnBasis basis = column_basis(K, 1e-10);
    const Vector s = singular_values(basis.Q.transpose() * A);
    double top = 0.0;
    for (Index i = 0; i < std::min<Index>(z, s.size()); ++i) top += s(i) * s(i);
    gamma = total - top;
  }
  out.gamma = std::max(gamma, 0.0);
  out.near_zero = out.gamma <= 1e-12 * total;
  return out;
}

StatDimEstimate sd_estimate(const MatrixRef& A, double lambda, Rng& rng, const ResidualOptions& opts,
                            bool with_exact) {
  if (!(lambda > 0.0)) throw ContractError("sd_estimate: lambda must be > 0; use sd_exact for lambda = 0");
  const Index r = std::min(A.rows(), A.cols());
  StatDimEstimate est;
  if (with_exact) {
    est.exact_available = true;
    est.exact = sd_exact_of(A, lambda);
  }
  if (r == 0) {
    est.z_prime = 1;
    est.binding = false;
    return est;
  }
  Index z = 1;
  while (true) {
    if (z >= r) {
      est.z_prime = z;
      est.gamma_hat = 0.0;
      est.estimate = static_cast<double>(r);
      est.binding = false;
      break;
    }
    const ResidualEstimate g = residual_norm_estimate(A, z, rng, opts);
    if (static_cast<double>(z) >= g.gamma / lambda) {
      est.z_prime = z;
      est.gamma_hat = g.gamma;
      est.estimate = static_cast<double>(z) + g.gamma / lambda;
      break;
    }
    z *= 2;
  }
  const double ratio = est.gamma_hat / lambda;
  est.lower = 0.375 * std::min(static_cast<double>(est.z_prime), ratio);
  est.upper = 1.5 * (static_cast<double>(est.z_prime) + ratio);
  return est;
}

} // namespace sketchreg
