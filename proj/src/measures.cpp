#include "sketchreg/measures.hpp"

#include "sketchreg/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sketchreg {

std::string to_string(MeasureFlag f) {
  switch (f) {
  case MeasureFlag::Padding: return "padding";
  case MeasureFlag::Loi: return "loi";
  case MeasureFlag::Roi: return "roi";
  case MeasureFlag::Subadditive: return "subadditive";
  case MeasureFlag::LeftContraction: return "left_contraction";
  case MeasureFlag::RightContraction: return "right_contraction";
  }
  return "unknown";
}

double schatten_norm(const MatrixRef& A, double p) {
  if (A.size() == 0) return 0.0;
  const Vector s = singular_values(A);
  if (std::isinf(p)) return s(0);
  if (p == 2.0) return A.norm();
  if (p == 1.0) return s.sum();
  return std::pow(s.array().pow(p).sum(), 1.0 / p);
}

double v_norm(const MatrixRef& A, double p) {
  if (A.rows() == 0) return 0.0;
  const Vector rows = A.rowwise().norm();
  if (std::isinf(p)) return rows.maxCoeff();
  if (p == 1.0) return rows.sum();
  return std::pow(rows.array().pow(p).sum(), 1.0 / p);
}

namespace {

MeasureFlags all_flags() { return {true, true, true, true, true, true}; }

std::string scaled_name(const std::string& base, double scale) {
  if (scale == 1.0) return base;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g*", scale);
  return buf + base;
}

bool flag_declared(const MeasureFlags& fl, MeasureFlag f) {
  switch (f) {
  case MeasureFlag::Padding: return fl.padding;
  case MeasureFlag::Loi: return fl.loi;
  case MeasureFlag::Roi: return fl.roi;
  case MeasureFlag::Subadditive: return fl.subadditive;
  case MeasureFlag::LeftContraction: return fl.left_contraction;
  case MeasureFlag::RightContraction: return fl.right_contraction;
  }
  return false;
}

constexpr MeasureFlag kAllFlags[] = {MeasureFlag::Padding,     MeasureFlag::Loi,
                                     MeasureFlag::Roi,         MeasureFlag::Subadditive,
                                     MeasureFlag::LeftContraction, MeasureFlag::RightContraction};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b)); }

Matrix pad_rows(const MatrixRef& A, Index z) {
  Matrix P = Matrix::Zero(A.rows() + z, A.cols());
  P.topRows(A.rows()) = A;
  return P;
}

Matrix pad_cols(const MatrixRef& A, Index z) {
  Matrix P = Matrix::Zero(A.rows(), A.cols() + z);
  P.leftCols(A.cols()) = A;
  return P;
}

} // namespace

MatrixMeasure frobenius_sq(double scale) {
  MeasureFlags fl = all_flags();
  fl.subadditive = false;
  return {scaled_name("frobenius_sq", scale), [scale](const MatrixRef& A) { return scale * A.squaredNorm(); }, fl};
}

MatrixMeasure schatten(double p, double scale) {
  if (!(p >= 1.0)) throw ContractError("schatten: p must be >= 1");
  const std::string base = std::isinf(p) ? "schatten_inf" : "schatten" + std::to_string(static_cast<int>(p));
  return {scaled_name(base, scale), [p, scale](const MatrixRef& A) { return scale * schatten_norm(A, p); },
          all_flags()};
}

MatrixMeasure nuclear(double scale) {
  MatrixMeasure m = schatten(1.0, scale);
  m.name = scaled_name("nuclear", scale);
  return m;
}

MatrixMeasure v_norm_measure(double p, double scale) {
  if (!(p > 0.0)) throw ContractError("v_norm: p must be > 0");
  MeasureFlags fl;
  fl.padding = true;
  fl.roi = true;
  fl.right_contraction = true;
  fl.subadditive = p >= 1.0;
  const std::string base = "vnorm" + std::to_string(static_cast<int>(p));
  return {scaled_name(base, scale), [p, scale](const MatrixRef& A) { return scale * v_norm(A, p); }, fl};
}

MatrixMeasure min_of_two_norms(double l1, double l2) {
  MeasureFlags fl = all_flags();
  fl.subadditive = false;
  char buf[96];
  std::snprintf(buf, sizeof buf, "min_of_two_norms(%.17g,%.17g)", l1, l2);
  return {buf,
          [l1, l2](const MatrixRef& A) { return std::min(l1 * schatten_norm(A, 1.0), l2 * schatten_norm(A, 2.0)); },
          fl};
}

PairMeasure pair_sum(const MatrixMeasure& fl, const MatrixMeasure& fr) {
  auto l = fl.evaluate;
  auto r = fr.evaluate;
  return {fl.name + "(Y)+" + fr.name + "(X)",
          [l, r](const MatrixRef& Y, const MatrixRef& X) { return l(Y) + r(X); }, fl.flags, fr.flags};
}

PairMeasure pair_product(const MatrixMeasure& g) {
  auto e = g.evaluate;
  // f(UY, X) = g(U Y X) and f(Y, X V) = g(Y X V): the left flags of f are the
  // left flags of g and likewise on the right.
  return {g.name + "(YX)", [e](const MatrixRef& Y, const MatrixRef& X) { return e(Y * X); }, g.flags, g.flags};
}

Matrix random_contraction(Index n, Rng& rng, int terms) {
  Matrix P = Matrix::Zero(n, n);
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(terms));
  for (auto& x : w) total += (x = 0.1 + rng.uniform());
  for (int t = 0; t < terms; ++t) P += (w[static_cast<std::size_t>(t)] / total) * random_orthonormal(n, n, rng);
  return P;
}

bool spot_check(const MatrixMeasure& f, MeasureFlag flag, Rng& rng, int trials, double tol) {
  for (int t = 0; t < trials; ++t) {
    const Index n = 3 + rng.index(4);
    const Index d = 2 + rng.index(4);
    const Matrix A = gaussian_matrix(n, d, rng);
    const double fa = f(A);
    switch (flag) {
    case MeasureFlag::Padding:
      if (!close(f(pad_rows(A, 2)), fa, tol) || !close(f(pad_cols(A, 3)), fa, tol)) return false;
      break;
    case MeasureFlag::Loi:
      if (!close(f(random_orthonormal(n, n, rng) * A), fa, tol)) return false;
      break;
    case MeasureFlag::Roi:
      if (!close(f(A * random_orthonormal(d, d, rng)), fa, tol)) return false;
      break;
    case MeasureFlag::Subadditive: {
      const Matrix B = gaussian_matrix(n, d, rng);
      if (f(A + B) > fa + f(B) + tol * (1.0 + fa)) return false;
      break;
    }
    case MeasureFlag::LeftContraction:
      if (f(random_contraction(n, rng) * A) > fa + tol * (1.0 + fa)) return false;
      break;
    case MeasureFlag::RightContraction:
      if (f(A * random_contraction(d, rng)) > fa + tol * (1.0 + fa)) return false;
      break;
    }
  }
  return true;
}

bool spot_check_pair(const PairMeasure& f, MeasureFlag flag, bool left_argument, Rng& rng, int trials, double tol) {
  for (int t = 0; t < trials; ++t) {
    const Index n = 3 + rng.index(4);
    const Index k = 2 + rng.index(2);
    const Index d = 3 + rng.index(4);
    const Matrix Y = gaussian_matrix(n, k, rng);
    const Matrix X = gaussian_matrix(k, d, rng);
    const double base = f(Y, X);
    double other = base;
    bool upper_only = false;
    switch (flag) {
    case MeasureFlag::Padding:
      other = left_argument ? f(pad_rows(Y, 2), X) : f(Y, pad_cols(X, 2));
      break;
    case MeasureFlag::Loi:
      if (!left_argument) continue;
      other = f(random_orthonormal(n, n, rng) * Y, X);
      break;
    case MeasureFlag::Roi:
      if (left_argument) continue;
      other = f(Y, X * random_orthonormal(d, d, rng));
      break;
    case MeasureFlag::LeftContraction:
      if (!left_argument) continue;
      other = f(random_contraction(n, rng) * Y, X);
      upper_only = true;
      break;
    case MeasureFlag::RightContraction:
      if (left_argument) continue;
      other = f(Y, X * random_contraction(d, rng));
      upper_only = true;
      break;
    case MeasureFlag::Subadditive:
      continue;
    }
    if (upper_only ? other > base + tol * (1.0 + base) : !close(other, base, tol)) return false;
  }
  return true;
}

void verify_flags(const MatrixMeasure& f, Rng& rng) {
  for (MeasureFlag fl : kAllFlags)
    if (flag_declared(f.flags, fl) && !spot_check(f, fl, rng))
      throw ContractError("measure '" + f.name + "': declared flag '" + to_string(fl) + "' failed its spot-check");
}

void verify_flags(const PairMeasure& f, Rng& rng) {
  for (MeasureFlag fl : kAllFlags) {
    if (flag_declared(f.left, fl) && !spot_check_pair(f, fl, true, rng))
      throw ContractError("pair measure '" + f.name + "': left flag '" + to_string(fl) + "' failed its spot-check");
    if (flag_declared(f.right, fl) && !spot_check_pair(f, fl, false, rng))
      throw ContractError("pair measure '" + f.name + "': right flag '" + to_string(fl) + "' failed its spot-check");
  }
}

void register_measure(MeasureRegistry& reg, const MatrixMeasure& f, Rng& rng) {
  verify_flags(f, rng);
  reg[f.name] = f;
}

MeasureRegistry builtin_measures() {
  MeasureRegistry reg;
  Rng rng(0x5eed, 0);
  register_measure(reg, frobenius_sq(), rng);
  register_measure(reg, nuclear(), rng);
  register_measure(reg, schatten(1.0), rng);
  register_measure(reg, schatten(2.0), rng);
  register_measure(reg, schatten(std::numeric_limits<double>::infinity()), rng);
  register_measure(reg, v_norm_measure(1.0), rng);
  register_measure(reg, v_norm_measure(2.0), rng);
  MatrixMeasure mn = min_of_two_norms(1.0, 1.0);
  mn.name = "min_of_two_norms";
  register_measure(reg, mn, rng);
  return reg;
}

MatrixMeasure measure_by_name(const std::string& name, double scale) {
  const double inf = std::numeric_limits<double>::infinity();
  if (name == "frobenius_sq") return frobenius_sq(scale);
  if (name == "nuclear") return nuclear(scale);
  if (name == "schatten1") return schatten(1.0, scale);
  if (name == "schatten2") return schatten(2.0, scale);
  if (name == "schatten_inf") return schatten(inf, scale);
  if (name == "vnorm1") return v_norm_measure(1.0, scale);
  if (name == "vnorm2") return v_norm_measure(2.0, scale);
  if (name == "min_of_two_norms") return min_of_two_norms(scale, scale);
  throw std::invalid_argument("unknown measure '" + name + "'");
}

} // namespace sketchreg
