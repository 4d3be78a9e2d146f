#include "ewm/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ewm {

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return {};
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.size());
    const int m = n ? static_cast<int>(b[0].size()) : 0;
    const int inner = static_cast<int>(b.size());
    Matrix out(n, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < inner; ++l)
            for (int j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    return out;
}

double identity_defect(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return 0.0;
    Matrix p = matmul(a, b);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(a[i][j]) * std::abs(b[j][i]);
        scale = std::max(scale, std::max(row, 1.0));
    }
    double defect = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            defect = std::max(defect, std::abs(p[i][j] - (i == j ? 1.0 : 0.0)));
    return defect / scale;
}

}  // namespace ewm
