#include "sketchreg/sketch.hpp"

#include "sketchreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace sketchreg {

std::string to_string(SketchKind kind) {
  switch (kind) {
  case SketchKind::Identity: return "identity";
  case SketchKind::CountSketch: return "countsketch";
  case SketchKind::Osnap: return "osnap";
  case SketchKind::Srht: return "srht";
  case SketchKind::Gaussian: return "gaussian";
  case SketchKind::Composed: return "composed";
  }
  return "unknown";
}

SketchKind sketch_kind_from_string(const std::string& name) {
  for (auto k : {SketchKind::Identity, SketchKind::CountSketch, SketchKind::Osnap, SketchKind::Srht,
                 SketchKind::Gaussian, SketchKind::Composed})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown sketch variant '" + name + "'");
}

SketchSpec SketchSpec::identity(Side side) {
  SketchSpec s;
  s.side = side;
  return s;
}

SketchSpec SketchSpec::count_sketch(Index m, std::uint64_t seed, Side side) {
  SketchSpec s;
  s.kind = SketchKind::CountSketch;
  s.m = m;
  s.seed = seed;
  s.side = side;
  validate(s);
  return s;
}

SketchSpec SketchSpec::osnap(Index m, std::uint64_t seed, Index nz, Side side) {
  SketchSpec s;
  s.kind = SketchKind::Osnap;
  s.m = m;
  s.s = nz;
  s.seed = seed;
  s.side = side;
  validate(s);
  return s;
}

SketchSpec SketchSpec::srht(Index m, std::uint64_t seed, Side side) {
  SketchSpec s;
  s.kind = SketchKind::Srht;
  s.m = m;
  s.seed = seed;
  s.side = side;
  validate(s);
  return s;
}

SketchSpec SketchSpec::gaussian(Index m, std::uint64_t seed, Side side) {
  SketchSpec s;
  s.kind = SketchKind::Gaussian;
  s.m = m;
  s.seed = seed;
  s.side = side;
  validate(s);
  return s;
}

Index SketchSpec::osnap_sparsity() const {
  if (s > 0) return s;
  Index lg = 0;
  while ((Index{1} << lg) < m) ++lg;
  return std::clamp<Index>(lg, 1, m);
}

Index SketchSpec::output_dim(Index n) const {
  switch (kind) {
  case SketchKind::Identity: return n;
  case SketchKind::Composed: {
    Index dim = n;
    for (auto it = stages.rbegin(); it != stages.rend(); ++it) dim = it->output_dim(dim);
    return dim;
  }
  default: return m;
  }
}

std::vector<SketchSpec> SketchSpec::application_order() const {
  if (kind == SketchKind::Identity) return {};
  if (kind != SketchKind::Composed) return {*this};
  std::vector<SketchSpec> out;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    auto sub = it->application_order();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

bool SketchSpec::is_identity() const { return application_order().empty(); }

void validate(const SketchSpec& spec) {
  switch (spec.kind) {
  case SketchKind::Identity: return;
  case SketchKind::Composed:
    if (spec.stages.empty()) throw DimensionError("composed sketch needs at least one stage");
    for (const auto& st : spec.stages) validate(st);
    return;
  case SketchKind::Osnap:
    if (spec.m < 1) throw DimensionError("sketch output dimension m must be >= 1");
    if (spec.s < 0 || spec.s > spec.m) throw DimensionError("OSNAP sparsity s must lie in [1, m]");
    return;
  default:
    if (spec.m < 1) throw DimensionError("sketch output dimension m must be >= 1");
  }
}

SketchSpec with_side(SketchSpec spec, Side side) {
  spec.side = side;
  for (auto& st : spec.stages) st = with_side(st, side);
  return spec;
}

namespace {

// Output dimension of the outermost non-identity stage, or -1.
Index outer_output(const SketchSpec& s) {
  auto order = s.application_order();
  return order.empty() ? -1 : order.back().m;
}

// Bound input dimension of the innermost stage, or 0.
Index inner_input(const SketchSpec& s) {
  auto order = s.application_order();
  return order.empty() ? 0 : order.front().input_dim;
}

} // namespace

SketchSpec compose(const SketchSpec& outer, const SketchSpec& inner) {
  validate(outer);
  validate(inner);
  if (outer.is_identity()) return inner;
  if (inner.is_identity()) return with_side(outer, inner.side);
  const Index need = inner_input(outer);
  const Index have = outer_output(inner);
  if (need != 0 && need != have)
    throw DimensionError("compose: outer sketch expects input dimension " + std::to_string(need) +
                         " but inner sketch outputs " + std::to_string(have));
  SketchSpec out;
  out.kind = SketchKind::Composed;
  out.side = inner.side;
  out.seed = inner.seed;
  auto outer_order = outer.application_order();
  auto inner_order = inner.application_order();
  outer_order.front().input_dim = have;
  for (auto it = outer_order.rbegin(); it != outer_order.rend(); ++it) out.stages.push_back(*it);
  for (auto it = inner_order.rbegin(); it != inner_order.rend(); ++it) out.stages.push_back(*it);
  return with_side(out, inner.side);
}

SketchSpec reseed(const SketchSpec& spec, std::uint64_t stream) {
  SketchSpec out = spec;
  out.seed = derive_seed(spec.seed, stream);
  for (auto& st : out.stages) st = reseed(st, stream);
  return out;
}

Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht(double* data, Index size) {
  for (Index h = 1; h < size; h <<= 1) {
    for (Index i = 0; i < size; i += 2 * h) {
      for (Index j = i; j < i + h; ++j) {
        const double x = data[j];
        const double y = data[j + h];
        data[j] = x + y;
        data[j + h] = x - y;
      }
    }
  }
}

namespace {

// Random tables of one stage for a given input dimension n.
struct HashTable {
  std::vector<Index> rows;   // n * nnz_per_col target rows
  std::vector<double> vals;  // matching values
  Index per_col = 1;
};

HashTable hash_table(const SketchSpec& st, Index n) {
  Rng rng(st.seed, 1);
  HashTable t;
  t.per_col = st.kind == SketchKind::Osnap ? st.osnap_sparsity() : 1;
  t.rows.resize(static_cast<std::size_t>(n * t.per_col));
  t.vals.resize(t.rows.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(t.per_col));
  std::vector<Index> chosen;
  for (Index i = 0; i < n; ++i) {
    if (t.per_col == 1) {
      t.rows[i] = static_cast<Index>(rng.index(st.m));
      t.vals[i] = rng.sign();
      continue;
    }
    // Floyd's sampling of per_col distinct rows out of m.
    chosen.clear();
    for (Index j = st.m - t.per_col; j < st.m; ++j) {
      const Index c = static_cast<Index>(rng.index(j + 1));
      chosen.push_back(std::find(chosen.begin(), chosen.end(), c) == chosen.end() ? c : j);
    }
    for (Index k = 0; k < t.per_col; ++k) {
      t.rows[i * t.per_col + k] = chosen[k];
      t.vals[i * t.per_col + k] = scale * rng.sign();
    }
  }
  return t;
}

struct SrhtTable {
  Index padded = 1;
  std::vector<double> signs;
  std::vector<Index> samples;
};

SrhtTable srht_table(const SketchSpec& st, Index n) {
  Rng rng(st.seed, 2);
  SrhtTable t;
  t.padded = next_power_of_two(n);
  t.signs.resize(n);
  for (auto& s : t.signs) s = rng.sign();
  t.samples.resize(st.m);
  if (st.m <= t.padded) {
    std::vector<Index> pool(t.padded);
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index k = 0; k < st.m; ++k) {
      const Index j = k + static_cast<Index>(rng.index(t.padded - k));
      std::swap(pool[k], pool[j]);
      t.samples[k] = pool[k];
    }
  } else {
    for (auto& s : t.samples) s = static_cast<Index>(rng.index(t.padded));
  }
  return t;
}

Matrix gaussian_table(const SketchSpec& st, Index n) {
  Rng rng(st.seed, 3);
  Matrix G(st.m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(st.m));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < st.m; ++i) G(i, j) = scale * rng.normal();
  return G;
}

void check_input(const SketchSpec& st, Index n) {
  if (st.input_dim != 0 && st.input_dim != n)
    throw DimensionError("sketch expects input dimension " + std::to_string(st.input_dim) + ", got " +
                         std::to_string(n));
}

Matrix srht_left(const SketchSpec& st, const MatrixRef& A) {
  const auto t = srht_table(st, A.rows());
  Matrix padded = Matrix::Zero(t.padded, A.cols());
  for (Index i = 0; i < A.rows(); ++i) padded.row(i) = t.signs[i] * A.row(i);
  for (Index j = 0; j < A.cols(); ++j) fwht(padded.col(j).data(), t.padded);
  const double scale = 1.0 / std::sqrt(static_cast<double>(st.m));
  Matrix out(st.m, A.cols());
  for (Index k = 0; k < st.m; ++k) out.row(k) = scale * padded.row(t.samples[k]);
  return out;
}

Matrix left_dense(const SketchSpec& st, const MatrixRef& A, SketchStats* stats) {
  check_input(st, A.rows());
  switch (st.kind) {
  case SketchKind::CountSketch:
  case SketchKind::Osnap: {
    const auto t = hash_table(st, A.rows());
    Matrix out = Matrix::Zero(st.m, A.cols());
    for (Index j = 0; j < A.cols(); ++j)
      for (Index i = 0; i < A.rows(); ++i)
        for (Index k = 0; k < t.per_col; ++k)
          out(t.rows[i * t.per_col + k], j) += t.vals[i * t.per_col + k] * A(i, j);
    if (stats) stats->value_updates += A.size() * t.per_col;
    return out;
  }
  case SketchKind::Srht: return srht_left(st, A);
  case SketchKind::Gaussian: return gaussian_table(st, A.rows()) * A;
  default: return A;
  }
}

Matrix right_dense(const SketchSpec& st, const MatrixRef& A, SketchStats* stats) {
  check_input(st, A.cols());
  switch (st.kind) {
  case SketchKind::CountSketch:
  case SketchKind::Osnap: {
    const auto t = hash_table(st, A.cols());
    Matrix out = Matrix::Zero(A.rows(), st.m);
    for (Index j = 0; j < A.cols(); ++j)
      for (Index k = 0; k < t.per_col; ++k)
        out.col(t.rows[j * t.per_col + k]) += t.vals[j * t.per_col + k] * A.col(j);
    if (stats) stats->value_updates += A.size() * t.per_col;
    return out;
  }
  case SketchKind::Srht: return srht_left(st, A.transpose()).transpose();
  case SketchKind::Gaussian: return A * gaussian_table(st, A.cols()).transpose();
  default: return A;
  }
}

Matrix left_sparse(const SketchSpec& st, const SparseMatrix& A, SketchStats* stats) {
  check_input(st, A.rows());
  switch (st.kind) {
  case SketchKind::CountSketch:
  case SketchKind::Osnap: {
    const auto t = hash_table(st, A.rows());
    Matrix out = Matrix::Zero(st.m, A.cols());
    for (Index i = 0; i < A.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(A, i); it; ++it)
        for (Index k = 0; k < t.per_col; ++k)
          out(t.rows[i * t.per_col + k], it.col()) += t.vals[i * t.per_col + k] * it.value();
    if (stats) stats->value_updates += A.nonZeros() * t.per_col;
    return out;
  }
  case SketchKind::Srht: return srht_left(st, Matrix(A));
  case SketchKind::Gaussian: return gaussian_table(st, A.rows()) * A;
  default: return Matrix(A);
  }
}

// Walks CSR rows and scatters each entry into its hashed column; no transpose.
Matrix right_sparse(const SketchSpec& st, const SparseMatrix& A, SketchStats* stats) {
  check_input(st, A.cols());
  switch (st.kind) {
  case SketchKind::CountSketch:
  case SketchKind::Osnap: {
    const auto t = hash_table(st, A.cols());
    Matrix out = Matrix::Zero(A.rows(), st.m);
    for (Index i = 0; i < A.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(A, i); it; ++it)
        for (Index k = 0; k < t.per_col; ++k)
          out(i, t.rows[it.col() * t.per_col + k]) += t.vals[it.col() * t.per_col + k] * it.value();
    if (stats) stats->value_updates += A.nonZeros() * t.per_col;
    return out;
  }
  case SketchKind::Srht: return srht_left(st, Matrix(A.transpose())).transpose();
  case SketchKind::Gaussian: return A * gaussian_table(st, A.cols()).transpose();
  default: return Matrix(A);
  }
}

Matrix apply_stage(const SketchSpec& st, Side side, const MatrixRef& A, SketchStats* stats) {
  return side == Side::Left ? left_dense(st, A, stats) : right_dense(st, A, stats);
}

} // namespace

Matrix apply(const SketchSpec& spec, const MatrixRef& A, SketchStats* stats) {
  validate(spec);
  Matrix out = A;
  for (const auto& st : spec.application_order()) out = apply_stage(st, spec.side, out, stats);
  return out;
}

Matrix apply(const SketchSpec& spec, const SparseMatrix& A, SketchStats* stats) {
  validate(spec);
  const auto order = spec.application_order();
  if (order.empty()) return Matrix(A);
  Matrix out = spec.side == Side::Left ? left_sparse(order.front(), A, stats)
                                       : right_sparse(order.front(), A, stats);
  for (std::size_t k = 1; k < order.size(); ++k) out = apply_stage(order[k], spec.side, out, stats);
  return out;
}

Matrix materialize(const SketchSpec& spec, Index n) {
  return apply(with_side(spec, Side::Left), Matrix::Identity(n, n));
}

Matrix apply_two_sided(const SketchSpec& left, const MatrixRef& A, const SketchSpec& right, SketchStats* stats) {
  validate(left);
  validate(right);
  const auto lo = left.application_order();
  const auto ro = right.application_order();
  Matrix out = A;
  if (!lo.empty()) out = apply_stage(lo.front(), Side::Left, out, stats);
  if (!ro.empty()) out = apply_stage(ro.front(), Side::Right, out, stats);
  for (std::size_t k = 1; k < lo.size(); ++k) out = apply_stage(lo[k], Side::Left, out, stats);
  for (std::size_t k = 1; k < ro.size(); ++k) out = apply_stage(ro[k], Side::Right, out, stats);
  return out;
}

} // namespace sketchreg
