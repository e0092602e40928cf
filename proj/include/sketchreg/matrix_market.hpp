#pragma once

#include "sketchreg/types.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>

namespace sketchreg {

/// Malformed Matrix Market input; `line` is 1-based (0 when not line-specific).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Coordinate files load as SparseMatrix, array files as dense Matrix.
using MarketMatrix = std::variant<SparseMatrix, Matrix>;

/// Reads "matrix coordinate real general" or "matrix array real general".
MarketMatrix read_matrix_market(const std::filesystem::path& path);
MarketMatrix parse_matrix_market(const std::string& text);

/// Values are written in shortest round-trip decimal, so read(write(M)) == M
/// bit for bit.
void write_matrix_market(const SparseMatrix& M, const std::filesystem::path& path);
void write_matrix_market(const Matrix& M, const std::filesystem::path& path);
std::string format_matrix_market(const SparseMatrix& M);
std::string format_matrix_market(const Matrix& M);

/// Dense view of either variant.
Matrix to_dense(const MarketMatrix& M);

} // namespace sketchreg
