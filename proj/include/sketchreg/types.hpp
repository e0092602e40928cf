#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace sketchreg {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// CSR storage: row offsets, strictly increasing column indices per row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;
using MatrixRef = Eigen::Ref<const Matrix>;

/// Operand shapes do not chain or agree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed or a factor required to be invertible is not.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A declared property of an input (measure flags, regularization) does not hold.
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

inline double squared_norm(const MatrixRef& M) { return M.squaredNorm(); }

} // namespace sketchreg
