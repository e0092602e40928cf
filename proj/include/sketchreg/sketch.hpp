#pragma once

#include "sketchreg/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sketchreg {

enum class SketchKind { Identity, CountSketch, Osnap, Srht, Gaussian, Composed };
enum class Side { Left, Right };

std::string to_string(SketchKind kind);
SketchKind sketch_kind_from_string(const std::string& name);

/// Seeded description of a sketching operator.
///
/// A left sketch S is m x n and maps A (n x d) to SA. A right sketch R is
/// d x m and maps A to AR; it is the transpose of the left sketch of A^T with
/// the same seed. All random tables (hashes, signs, samples, Gaussian entries)
/// are functions of (seed, input dimension) only.
///
/// Composed sketches hold their stages outermost first; application runs from
/// the back of `stages` to the front.
struct SketchSpec {
  SketchKind kind = SketchKind::Identity;
  Index m = 0;              // output dimension; unused for Identity and Composed
  Index s = 0;              // OSNAP nonzeros per column; 0 selects ceil(log2 m)
  std::uint64_t seed = 0;
  Side side = Side::Left;
  Index input_dim = 0;      // 0 = bound at application time
  std::vector<SketchSpec> stages;

  static SketchSpec identity(Side side = Side::Left);
  static SketchSpec count_sketch(Index m, std::uint64_t seed, Side side = Side::Left);
  static SketchSpec osnap(Index m, std::uint64_t seed, Index s = 0, Side side = Side::Left);
  static SketchSpec srht(Index m, std::uint64_t seed, Side side = Side::Left);
  static SketchSpec gaussian(Index m, std::uint64_t seed, Side side = Side::Left);

  /// Output dimension when applied to an input of dimension n.
  Index output_dim(Index n) const;
  /// Effective OSNAP sparsity.
  Index osnap_sparsity() const;
  /// Stages in application order (innermost first); a single stage for
  /// non-composed specs.
  std::vector<SketchSpec> application_order() const;
  bool is_identity() const;

  bool operator==(const SketchSpec&) const = default;
};

/// Throws DimensionError on an invalid spec (m < 1, s outside [1, m], empty
/// composition).
void validate(const SketchSpec& spec);

/// outer o inner. Requires outer.input_dim (when bound) to equal inner.m.
/// Identity factors are dropped; nested compositions are flattened. The side
/// of `inner` is used for the result.
SketchSpec compose(const SketchSpec& outer, const SketchSpec& inner);

/// Same spec with every stage seed replaced by derive_seed(seed, stream).
SketchSpec reseed(const SketchSpec& spec, std::uint64_t stream);

/// Same spec as a right (or left) sketch.
SketchSpec with_side(SketchSpec spec, Side side);

/// Counts value-updates performed by the sparse kernels.
struct SketchStats {
  std::int64_t value_updates = 0;
};

Matrix apply(const SketchSpec& spec, const MatrixRef& A, SketchStats* stats = nullptr);
Matrix apply(const SketchSpec& spec, const SparseMatrix& A, SketchStats* stats = nullptr);

/// Explicit m x n matrix of a left sketch for input dimension n (testing aid).
Matrix materialize(const SketchSpec& spec, Index n);

/// In-place unnormalized fast Walsh-Hadamard transform; size must be a power of two.
void fwht(double* data, Index size);

Index next_power_of_two(Index n);

/// S A R with the first stage of each side applied before any later stage, so
/// sparse-embedding stages touch the full-size operand and the remaining
/// stages work on the reduced one.
Matrix apply_two_sided(const SketchSpec& left, const MatrixRef& A, const SketchSpec& right,
                       SketchStats* stats = nullptr);

} // namespace sketchreg
