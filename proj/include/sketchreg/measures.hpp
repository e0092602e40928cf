#pragma once

#include "sketchreg/rng.hpp"
#include "sketchreg/types.hpp"

#include <functional>
#include <map>
#include <string>

namespace sketchreg {

/// Declared invariance properties of a matrix measure. `left_contraction`
/// (`right_contraction`) means f(P A) <= f(A) (f(A P) <= f(A)) for every
/// contraction P; it follows from orthogonal invariance plus subadditivity
/// but is also declared directly for measures such as ||.||_F^2.
struct MeasureFlags {
  bool padding = false;
  bool loi = false;
  bool roi = false;
  bool subadditive = false;
  bool left_contraction = false;
  bool right_contraction = false;
};

enum class MeasureFlag { Padding, Loi, Roi, Subadditive, LeftContraction, RightContraction };
std::string to_string(MeasureFlag f);

/// Evaluators must be stateless so they can be shared across threads.
struct MatrixMeasure {
  std::string name;
  std::function<double(const MatrixRef&)> evaluate;
  MeasureFlags flags;

  double operator()(const MatrixRef& A) const { return evaluate(A); }
};

/// f(Y, X). `left` describes the behavior in Y (left multiplication and row
/// padding), `right` the behavior in X (right multiplication and column padding).
struct PairMeasure {
  std::string name;
  std::function<double(const MatrixRef& Y, const MatrixRef& X)> evaluate;
  MeasureFlags left;
  MeasureFlags right;

  double operator()(const MatrixRef& Y, const MatrixRef& X) const { return evaluate(Y, X); }
};

double schatten_norm(const MatrixRef& A, double p);  // p = infinity for the spectral norm
double v_norm(const MatrixRef& A, double p);         // l_p norm of the row 2-norms

MatrixMeasure frobenius_sq(double scale = 1.0);
MatrixMeasure schatten(double p, double scale = 1.0);
MatrixMeasure nuclear(double scale = 1.0);
MatrixMeasure v_norm_measure(double p, double scale = 1.0);
/// min(l1 ||A||_(1), l2 ||A||_(2)).
MatrixMeasure min_of_two_norms(double l1, double l2);

/// f(Y, X) = fl(Y) + fr(X).
PairMeasure pair_sum(const MatrixMeasure& fl, const MatrixMeasure& fr);
/// f(Y, X) = g(Y X).
PairMeasure pair_product(const MatrixMeasure& g);

/// Randomized falsification of one declared property on seeded inputs.
/// Returns false on the first violation found.
bool spot_check(const MatrixMeasure& f, MeasureFlag flag, Rng& rng, int trials = 5, double tol = 1e-8);
bool spot_check_pair(const PairMeasure& f, MeasureFlag flag, bool left_argument, Rng& rng, int trials = 5,
                     double tol = 1e-8);

/// Spot-checks every declared flag; throws ContractError naming the first
/// one that fails.
void verify_flags(const MatrixMeasure& f, Rng& rng);
void verify_flags(const PairMeasure& f, Rng& rng);

using MeasureRegistry = std::map<std::string, MatrixMeasure>;

/// Adds `f` after verify_flags.
void register_measure(MeasureRegistry& reg, const MatrixMeasure& f, Rng& rng);

/// frobenius_sq, nuclear, schatten1/2/inf, vnorm1/2 and min_of_two_norms,
/// all with unit scale.
MeasureRegistry builtin_measures();

/// Looks up `name` in builtin_measures() and rescales it by `scale`.
MatrixMeasure measure_by_name(const std::string& name, double scale);

/// Convex combination of seeded orthogonal matrices: a contraction.
Matrix random_contraction(Index n, Rng& rng, int terms = 3);

} // namespace sketchreg
