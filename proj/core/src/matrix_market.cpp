// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ptscan/assemble.hpp"
#include "ptscan/errors.hpp"

namespace ptscan {

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << a.dim << ' ' << a.dim << ' ' << a.nnz() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < a.dim; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i + 1, a.col_idx[k] + 1,
                    a.values[k].real(), a.values[k].imag());
      os << buf;
    }
  }
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw DomainError("Matrix Market: missing header");
  }
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "complex" || symmetry != "general") {
    throw UnsupportedError("Matrix Market: only 'matrix coordinate complex general' is supported");
  }
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(std::istringstream(line) >> rows >> cols >> nnz) || rows != cols) {
    throw DomainError("Matrix Market: bad size line");
  }
  std::vector<std::vector<std::pair<std::size_t, cplx>>> entries(rows);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(is >> i >> j >> re >> im) || i == 0 || j == 0 || i > rows || j > cols) {
      throw DomainError("Matrix Market: bad entry " + std::to_string(k + 1));
    }
    entries[i - 1].emplace_back(j - 1, cplx{re, im});
  }
  SparseBuilder builder(rows);
  for (auto& row : entries) {
    for (const auto& [j, v] : row) builder.add(j, v);
    builder.finish_row();
  }
  return std::move(builder).build();
}

}  // namespace ptscan
