#pragma once

#include <vector>

namespace ewm {

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting; throws on a singular system.
std::vector<double> solve_dense(Matrix a, std::vector<double> b);

Matrix matmul(const Matrix& a, const Matrix& b);

// max_ij |(a*b - I)_ij| relative to the largest |a_ij| row sum
double identity_defect(const Matrix& a, const Matrix& b);

}  // namespace ewm
