#include "ewm/cauchy.hpp"

#include <stdexcept>

namespace ewm {

namespace {

void require_distinct(const RationalVector& v, const char* label) {
    const int m = static_cast<int>(v.size());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (v[i] == v[j])
                throw std::invalid_argument(std::string("CauchyMatrix: coincident ") + label +
                                            " nodes at indices " + std::to_string(i) + ", " +
                                            std::to_string(j));
}

}  // namespace

CauchyMatrix::CauchyMatrix(RationalVector x, RationalVector y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.empty() || x_.size() != y_.size())
        throw std::invalid_argument("CauchyMatrix: node vectors must be nonempty and equal length");
    require_distinct(x_, "x");
    require_distinct(y_, "y");
    const int m = size();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (x_[i] == y_[j])
                throw std::invalid_argument("CauchyMatrix: x_i = y_j at (i, j) = (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
}

Rational CauchyMatrix::entry(int i, int j) const { return Rational(1) / (x_[i] - y_[j]); }

RationalMatrix CauchyMatrix::entries() const {
    const int m = size();
    RationalMatrix a(m, RationalVector(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a[i][j] = entry(i, j);
    return a;
}

Rational CauchyMatrix::determinant() const {
    const int m = size();
    Rational num(1), den(1);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) num *= (x_[i] - x_[j]) * (y_[j] - y_[i]);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) den *= (x_[i] - y_[j]);
    return num / den;
}

RationalMatrix CauchyMatrix::inverse() const {
    const int m = size();
    RationalMatrix b(m, RationalVector(m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            // Lagrange polynomial of the x-nodes at y_i, skipping node j.
            Rational ax(1);
            for (int l = 0; l < m; ++l)
                if (l != j) ax *= (y_[i] - x_[l]) / (x_[j] - x_[l]);
            // Lagrange polynomial of the y-nodes at x_j, skipping node i.
            Rational by(1);
            for (int l = 0; l < m; ++l)
                if (l != i) by *= (x_[j] - y_[l]) / (y_[i] - y_[l]);
            b[i][j] = (x_[j] - y_[i]) * ax * by;
        }
    }
    return b;
}

CoefficientFamily coefficients(int d) {
    if (d < 3 || d % 2 == 0)
        throw std::invalid_argument("coefficients: dimension must be odd and >= 3, got " +
                                    std::to_string(d));
    CoefficientFamily fam;
    fam.dim = d;
    fam.k = d / 4;
    fam.ktilde = (d + 2) / 4;

    fam.c.reserve(fam.k);
    for (int j = 1; j <= fam.k; ++j) {
        Rational num(1), den(1);
        for (int l = 1; l <= fam.k; ++l) {
            num *= rat(d - 2 * j - 2 * l);
            if (l != j) den *= rat(2 * l - 2 * j);
        }
        fam.c.push_back(num / den);
    }

    fam.dvec.reserve(fam.ktilde);
    for (int j = 1; j <= fam.ktilde; ++j) {
        Rational num(1), den(1);
        for (int l = 1; l <= fam.ktilde; ++l) {
            num *= rat(d + 2 - 2 * l - 2 * j);
            if (l != j) den *= rat(2 * l - 2 * j);
        }
        fam.dvec.push_back(num / den);
    }
    return fam;
}

bool IdentityReport::all_hold() const {
    for (const auto& chk : checks)
        if (!chk.holds) return false;
    return true;
}

IdentityReport verify_identities(const CoefficientFamily& fam) {
    const int d = fam.dim;
    IdentityReport report;
    report.dim = d;

    auto add = [&report](std::string name, const Rational& residual) {
        report.checks.push_back({std::move(name), residual == 0, residual});
    };

    // (i) sum_j c_j/(d-2m-2j) = 1
    for (int m = 1; m <= fam.k; ++m) {
        Rational s(0);
        for (int j = 1; j <= fam.k; ++j) s += fam.c[j - 1] / rat(d - 2 * m - 2 * j);
        add("c_shifted_sum(m=" + std::to_string(m) + ")", s - 1);
    }

    // (ii) sum_j c_j/(2j) + 1 = prod_l (d-2l)/(2l)
    {
        Rational lhs(1), rhs(1);
        for (int j = 1; j <= fam.k; ++j) lhs += fam.c[j - 1] / rat(2 * j);
        for (int l = 1; l <= fam.k; ++l) rhs *= rat(d - 2 * l, 2 * l);
        add("c_even_sum", lhs - rhs);
    }

    // (iii) sum_j d_j/(d+2-2m-2j) = 1
    for (int m = 1; m <= fam.ktilde; ++m) {
        Rational s(0);
        for (int j = 1; j <= fam.ktilde; ++j) s += fam.dvec[j - 1] / rat(d + 2 - 2 * m - 2 * j);
        add("d_shifted_sum(m=" + std::to_string(m) + ")", s - 1);
    }

    // (iv) sum_j d_j/(2j) + 1 = prod_l (d+2-2l)/(2l)
    {
        Rational lhs(1), rhs(1);
        for (int j = 1; j <= fam.ktilde; ++j) lhs += fam.dvec[j - 1] / rat(2 * j);
        for (int l = 1; l <= fam.ktilde; ++l) rhs *= rat(d + 2 - 2 * l, 2 * l);
        add("d_even_sum", lhs - rhs);
    }

    // (v) sum_i c_i/(d-2i-2j)^2 = 1/c_j
    for (int j = 1; j <= fam.k; ++j) {
        Rational s(0);
        for (int i = 1; i <= fam.k; ++i) {
            Rational den = rat(d - 2 * i - 2 * j);
            s += fam.c[i - 1] / (den * den);
        }
        add("c_inverse_square(j=" + std::to_string(j) + ")", s - Rational(1) / fam.c[j - 1]);
    }

    return report;
}

namespace {

// Principal submatrices of [1/(w - 2i - 2j)] are Cauchy with x_i = w - 2i,
// y_j = 2j, so every leading minor has a product-formula determinant.
bool leading_minors_positive(int w, int n) {
    for (int m = 1; m <= n; ++m) {
        RationalVector x, y;
        for (int i = 1; i <= m; ++i) {
            x.push_back(rat(w - 2 * i));
            y.push_back(rat(2 * i));
        }
        if (CauchyMatrix(std::move(x), std::move(y)).determinant() <= 0) return false;
    }
    return true;
}

}  // namespace

bool gram_matrices_positive_definite(int d) {
    const CoefficientFamily fam = coefficients(d);
    return leading_minors_positive(d, fam.k) && leading_minors_positive(d + 2, fam.ktilde);
}

}  // namespace ewm
