#include "sketchreg/problems.hpp"

#include "sketchreg/linalg.hpp"
#include "sketchreg/statdim.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sketchreg {

std::string to_string(SpectrumShape s) {
  switch (s) {
  case SpectrumShape::Geometric: return "geometric";
  case SpectrumShape::Power: return "power";
  case SpectrumShape::Flat: return "flat";
  }
  return "unknown";
}

SpectrumShape spectrum_shape_from_string(const std::string& name) {
  for (auto s : {SpectrumShape::Geometric, SpectrumShape::Power, SpectrumShape::Flat})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown spectrum shape '" + name + "'");
}

void GeneratorSpec::validate() const {
  if (n < 1 || d < 1) throw std::invalid_argument("generator: dims must be >= 1");
  if (!(sigma1 > 0.0)) throw std::invalid_argument("generator: sigma1 must be > 0");
  if (shape == SpectrumShape::Geometric && !(param > 0.0 && param <= 1.0))
    throw std::invalid_argument("generator: geometric ratio must lie in (0, 1]");
  if (shape == SpectrumShape::Power && !(param >= 0.0))
    throw std::invalid_argument("generator: power exponent must be >= 0");
  if (rank < 0 || rank > std::min(n, d)) throw std::invalid_argument("generator: rank must lie in [0, min(n, d)]");
  if (!(noise >= 0.0) || !(rhs_noise >= 0.0)) throw std::invalid_argument("generator: noise must be >= 0");
  if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("generator: density must lie in (0, 1]");
  if (rhs_cols < 1 || cols_b < 0) throw std::invalid_argument("generator: rhs_cols >= 1 and cols_b >= 0 required");
}

Vector make_spectrum(SpectrumShape shape, double param, double sigma1, Index r) {
  Vector s(r);
  for (Index i = 0; i < r; ++i) {
    switch (shape) {
    case SpectrumShape::Geometric: s(i) = sigma1 * std::pow(param, static_cast<double>(i)); break;
    case SpectrumShape::Power: s(i) = sigma1 * std::pow(static_cast<double>(i + 1), -param); break;
    case SpectrumShape::Flat: s(i) = sigma1; break;
    }
  }
  return s;
}

SparseMatrix sparse_random(Index n, Index d, double density, Rng& rng) {
  std::vector<Eigen::Triplet<double, std::int64_t>> trips;
  trips.reserve(static_cast<std::size_t>(density * static_cast<double>(n) * static_cast<double>(d) * 1.1) + 16);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j)
      if (rng.uniform() < density) trips.emplace_back(i, j, rng.normal());
  SparseMatrix M(n, d);
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();
  return M;
}

Problem generate_problem(const GeneratorSpec& spec, Rng& rng) {
  spec.validate();
  Problem p;
  if (spec.density < 1.0) {
    p.sparse = sparse_random(spec.n, spec.d, spec.density, rng);
    p.A = Matrix(*p.sparse);
    p.sigma = singular_values(p.A);
  } else {
    const Index r = spec.rank ? spec.rank : std::min(spec.n, spec.d);
    p.sigma = make_spectrum(spec.shape, spec.param, spec.sigma1, r);
    const Matrix U0 = random_orthonormal(spec.n, r, rng);
    const Matrix V0 = random_orthonormal(spec.d, r, rng);
    p.A = U0 * p.sigma.asDiagonal() * V0.transpose();
    if (spec.noise > 0.0)
      p.A += (spec.noise / std::sqrt(static_cast<double>(std::max(spec.n, spec.d)))) *
             gaussian_matrix(spec.n, spec.d, rng);
  }
  const Matrix x0 = gaussian_matrix(spec.d, spec.rhs_cols, rng);
  p.rhs = p.A * x0;
  const double scale = p.rhs.norm() > 0.0 ? p.rhs.norm() : 1.0;
  const Matrix E = gaussian_matrix(spec.n, spec.rhs_cols, rng);
  p.rhs += (spec.rhs_noise * scale / std::max(E.norm(), 1e-300)) * E;
  if (spec.cols_b > 0) {
    const Matrix W = gaussian_matrix(spec.d, spec.cols_b, rng) / std::sqrt(static_cast<double>(spec.d));
    const Matrix N = gaussian_matrix(spec.n, spec.cols_b, rng) / std::sqrt(static_cast<double>(spec.n));
    p.B = spec.cca_coupling * (p.A * W) + spec.sigma1 * N;
  }
  return p;
}

double lambda_for_sd(const Vector& sigma, double target) {
  const double r = sd_exact(sigma, 0.0);
  if (!(target > 0.0 && target < r)) throw std::invalid_argument("lambda_for_sd: target must lie in (0, rank)");
  double lo = -60.0, hi = 60.0;  // natural log of lambda
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sd_exact(sigma, std::exp(mid)) > target) lo = mid;
    else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

} // namespace sketchreg
