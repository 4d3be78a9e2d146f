#pragma once

#include <utility>
#include <vector>

#include "ewm/cauchy.hpp"
#include "ewm/grid.hpp"
#include "ewm/linalg.hpp"

namespace ewm {

// Analytic power-law continuation sum_k coef[k] * r^expo[k] of a sampled
// field beyond the outer grid edge. An empty tail means the field is treated
// as negligible out there, and moment integrals carry a truncation check.
struct PowerTail {
    std::vector<double> coef;
    std::vector<double> expo;

    bool empty() const { return coef.empty(); }
    double value(double r) const;
    double derivative(double r) const;
    PowerTail differentiated() const;
    static PowerTail difference(const PowerTail& a, const PowerTail& b);  // a - b
};

// Radial data pair (f, g) sampled on [R, R_out]: f is the Hdot^1 component,
// g the L^2 component, both against the r^{d-1} measure.
struct ExteriorData {
    RadialGrid grid;
    std::vector<double> f;
    std::vector<double> g;
    int dim = 3;
    PowerTail f_tail;
    PowerTail g_tail;
    // Analytic samples of df/dr when the generator knows them; left empty,
    // moments fall back to 4th-order finite differencing of f.
    std::vector<double> fp;
};

// Resonance-space basis at radius R in odd dimension d: Gram matrices of the
// powers r^{2i-d} in L^2 (k of them) and Hdot^1 (ktilde of them), together
// with their explicit inverses computed from exact Cauchy-matrix algebra and
// the scaling law b_ij(R) = b_ij(1) R^{d-2i-2j}.
struct ProjectionBasis {
    int dim = 0;
    double radius = 1.0;
    int k = 0;
    int ktilde = 0;
    CoefficientFamily coeffs;
    Matrix gramL2;   // A(R),  k x k
    Matrix gramH1;   // At(R), ktilde x ktilde
    Matrix invL2;    // B(R)
    Matrix invH1;    // Bt(R)
    double inverse_defect = 0.0;  // measured max defect of A*B and At*Bt vs identity
};

ProjectionBasis build_basis(int d, double R);

struct ProjectionCoefficients {
    std::vector<double> lambda;  // ktilde coefficients of the Hdot^1 part
    std::vector<double> mu;      // k coefficients of the L^2 part
    double radius = 1.0;
    double time = 0.0;
    bool tail_flagged = false;      // moment truncation not negligible
    double tail_error_bound = 0.0;  // crude bound on the truncated moment mass
};

struct MomentCheck {
    bool flagged = false;
    double bound = 0.0;
};

// Moment integrals over [R, infinity): int f'(r) r^{2i-2} dr for i = 1..count
// and int g(r) r^{2i-1} dr. Quadrature over the grid plus the analytic tail;
// without a tail the integrand at the outer edge must satisfy
// |integrand(R_out)| * R_out <= 1e-12 * |integral| or the result is flagged.
std::vector<double> field_moments_h1(const ExteriorData& u, int count, MomentCheck* check = nullptr);
std::vector<double> field_moments_l2(const ExteriorData& u, int count, MomentCheck* check = nullptr);

ProjectionCoefficients project_coefficients(const ExteriorData& u, const ProjectionBasis& basis);

// (pi_R u, pi_R^perp u); the projected pair carries exact power tails.
std::pair<ExteriorData, ExteriorData> apply_projection(const ExteriorData& u,
                                                       const ProjectionCoefficients& coeffs,
                                                       const ProjectionBasis& basis);

struct NormSplit {
    double proj_norm_sq = 0.0;
    double perp_norm_sq = 0.0;
    bool quadrature_failure = false;  // perp came out negative beyond -1e-9
};

// ||pi_R^perp u||^2 = <u,u> - U B U^t from moment vectors and the explicit
// inverses, without sampling the projection.
NormSplit norm_via_identity(const ExteriorData& u, const ProjectionBasis& basis);

// Inner products on r >= R against r^{d-1} dr. Both arguments must share the
// grid and the dimension.
double inner_h1(const ExteriorData& a, const ExteriorData& b);
double inner_l2(const ExteriorData& a, const ExteriorData& b);
double inner_pair(const ExteriorData& a, const ExteriorData& b);
double norm_sq(const ExteriorData& a);

struct CoefficientTrackPoint {
    double radius = 1.0;
    std::vector<double> lambda;
    std::vector<double> mu;
};

struct SeminormPair {
    double pip_norm_sq = 0.0;   // weighted coefficient sum at the innermost R
    double pipp_norm_sq = 0.0;  // integrated weighted dR-derivative sum
    bool differencing_flagged = false;
};

// Seminorms of a coefficient track sampled on a uniform R-grid.
SeminormPair coefficient_seminorms(const std::vector<CoefficientTrackPoint>& track, int d);

}  // namespace ewm
