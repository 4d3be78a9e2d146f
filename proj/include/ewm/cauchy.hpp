#pragma once

#include <string>
#include <vector>

#include "ewm/rational.hpp"

namespace ewm {

// m x m matrix a_ij = 1/(x_i - y_j). Construction requires all x distinct,
// all y distinct, and x_i != y_j for every pair; such a matrix is always
// invertible and both its determinant and inverse have closed forms.
class CauchyMatrix {
public:
    CauchyMatrix(RationalVector x, RationalVector y);

    int size() const { return static_cast<int>(x_.size()); }
    const RationalVector& x_nodes() const { return x_; }
    const RationalVector& y_nodes() const { return y_; }

    Rational entry(int i, int j) const;
    RationalMatrix entries() const;

    // prod_{i<j} (x_i-x_j)(y_j-y_i) / prod_{i,j} (x_i-y_j)
    Rational determinant() const;

    // b_ij = (x_j - y_i) * A_j(y_i) * B_i(x_j) with A, B the Lagrange
    // polynomials of the x- and y-nodes.
    RationalMatrix inverse() const;

private:
    RationalVector x_;
    RationalVector y_;
};

// Coefficient families for odd dimension d >= 3:
//   c_j = prod_{l=1..k} (d-2j-2l)   / prod_{l != j} (2l-2j),  k = floor(d/4)
//   d_j = prod_{l=1..kt}(d+2-2l-2j) / prod_{l != j} (2l-2j),  kt = floor((d+2)/4)
// d = 3 gives k = 0 and an empty c family.
struct CoefficientFamily {
    int dim = 0;
    int k = 0;
    int ktilde = 0;
    RationalVector c;
    RationalVector dvec;
};

CoefficientFamily coefficients(int d);

struct IdentityCheck {
    std::string name;
    bool holds = false;
    Rational residual;  // exact deviation, zero iff the identity holds
};

struct IdentityReport {
    int dim = 0;
    std::vector<IdentityCheck> checks;
    bool all_hold() const;
};

// Exact checks of the five coefficient identities:
//   (i)   sum_j c_j/(d-2m-2j) = 1                 for 1 <= m <= k
//   (ii)  sum_j c_j/(2j) + 1 = prod_l (d-2l)/(2l)
//   (iii) sum_j d_j/(d+2-2m-2j) = 1               for 1 <= m <= ktilde
//   (iv)  sum_j d_j/(2j) + 1 = prod_l (d+2-2l)/(2l)
//   (v)   sum_i c_i/(d-2i-2j)^2 = 1/c_j           for 1 <= j <= k
IdentityReport verify_identities(const CoefficientFamily& fam);

// Positive definiteness of [1/(d-2i-2j)]_{k x k} and [1/(d+2-2i-2j)]_{kt x kt}
// via exact leading principal minors (each minor is itself a Cauchy matrix).
bool gram_matrices_positive_definite(int d);

}  // namespace ewm
