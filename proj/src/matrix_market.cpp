#include "sketchreg/matrix_market.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace sketchreg {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError("cannot parse number '" + std::string(tok) + "'", line);
  return value;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

} // namespace

MarketMatrix parse_matrix_market(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(is, line)) throw ParseError("empty input", 0);
  ++lineno;
  const auto head = tokens(line);
  if (head.size() != 5 || lower(std::string(head[0])) != "%%matrixmarket")
    throw ParseError("expected '%%MatrixMarket matrix <format> real general' header", lineno);
  const std::string object = lower(std::string(head[1]));
  const std::string format = lower(std::string(head[2]));
  const std::string field = lower(std::string(head[3]));
  const std::string symmetry = lower(std::string(head[4]));
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported format '" + format + "'", lineno);
  if (field != "real") throw ParseError("unsupported field '" + field + "' (only real)", lineno);
  if (symmetry != "general") throw ParseError("unsupported symmetry '" + symmetry + "' (only general)", lineno);

  // size line, skipping comments and blanks
  std::vector<std::string_view> size_tok;
  std::string size_line;
  while (std::getline(is, size_line)) {
    ++lineno;
    if (size_line.empty() || size_line[0] == '%') continue;
    size_tok = tokens(size_line);
    if (!size_tok.empty()) break;
  }
  const bool coordinate = format == "coordinate";
  if (size_tok.size() != (coordinate ? 3u : 2u))
    throw ParseError(coordinate ? "expected '<rows> <cols> <nnz>' size line" : "expected '<rows> <cols>' size line",
                     lineno);
  const auto rows = parse_number<std::int64_t>(size_tok[0], lineno);
  const auto cols = parse_number<std::int64_t>(size_tok[1], lineno);
  if (rows < 0 || cols < 0) throw ParseError("negative dimension", lineno);

  if (coordinate) {
    const auto nnz = parse_number<std::int64_t>(size_tok[2], lineno);
    if (nnz < 0 || (rows * cols > 0 && nnz > rows * cols) || (rows * cols == 0 && nnz > 0))
      throw ParseError("entry count inconsistent with dimensions", lineno);
    std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz));
    while (static_cast<std::int64_t>(triplets.size()) < nnz && std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line[0] == '%') continue;
      const auto t = tokens(line);
      if (t.empty()) continue;
      if (t.size() != 3) throw ParseError("expected '<row> <col> <value>'", lineno);
      const auto i = parse_number<std::int64_t>(t[0], lineno);
      const auto j = parse_number<std::int64_t>(t[1], lineno);
      const auto v = parse_number<double>(t[2], lineno);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("index out of range", lineno);
      triplets.emplace_back(i - 1, j - 1, v);
    }
    if (static_cast<std::int64_t>(triplets.size()) != nnz)
      throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(triplets.size()),
                       lineno);
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '%' && !tokens(line).empty())
        throw ParseError("unexpected data after the last entry", lineno);
    }
    SparseMatrix M(rows, cols);
    M.setFromTriplets(triplets.begin(), triplets.end());
    M.makeCompressed();
    return M;
  }

  Matrix M(rows, cols);
  std::int64_t k = 0;
  const std::int64_t total = rows * cols;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    for (auto tok : tokens(line)) {
      if (k >= total) throw ParseError("more values than rows*cols", lineno);
      M(k % rows, k / rows) = parse_number<double>(tok, lineno);
      ++k;
    }
  }
  if (k != total)
    throw ParseError("expected " + std::to_string(total) + " values, found " + std::to_string(k), lineno);
  return M;
}

MarketMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_matrix_market(ss.str());
}

std::string format_matrix_market(const SparseMatrix& M) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(M.rows()) + " " + std::to_string(M.cols()) + " " + std::to_string(M.nonZeros()) + "\n";
  for (Index i = 0; i < M.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(M, i); it; ++it) {
      out += std::to_string(it.row() + 1);
      out += ' ';
      out += std::to_string(it.col() + 1);
      out += ' ';
      append_double(out, it.value());
      out += '\n';
    }
  }
  return out;
}

std::string format_matrix_market(const Matrix& M) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(M.rows()) + " " + std::to_string(M.cols()) + "\n";
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      append_double(out, M(i, j));
      out += '\n';
    }
  }
  return out;
}

void write_matrix_market(const SparseMatrix& M, const std::filesystem::path& path) {
  write_text(format_matrix_market(M), path);
}

void write_matrix_market(const Matrix& M, const std::filesystem::path& path) {
  write_text(format_matrix_market(M), path);
}

Matrix to_dense(const MarketMatrix& M) {
  return std::visit([](const auto& m) -> Matrix { return Matrix(m); }, M);
}

} // namespace sketchreg
