#pragma once

#include "relfit/types.hpp"

#include <string>

namespace relfit {

// Binary layout: 8-byte magic "RELFITMX", u32 format version (currently 1),
// u64 rows, u64 cols, then rows * cols IEEE-754 doubles in row-major order,
// all little-endian.
void save_matrix_binary(const std::string& path, const Matrix& m);

// Plain numeric CSV, one matrix row per line, full round-trip precision.
void save_matrix_csv(const std::string& path, const Matrix& m);

// Loads either format; the binary magic decides. Throws io_error on missing
// or malformed files.
Matrix load_matrix(const std::string& path);

}  // namespace relfit
