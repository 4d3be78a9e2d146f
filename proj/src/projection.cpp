#include "ewm/projection.hpp"

#include <cmath>
#include <stdexcept>

#include "ewm/quadrature.hpp"

namespace ewm {

namespace {

constexpr double kTailTolerance = 1e-12;

// int_S^inf r^e dr, finite only for e < -1
double power_integral(double s, double e) {
    if (e >= -1.0) throw std::invalid_argument("power_integral: non-integrable tail exponent");
    return -std::pow(s, e + 1.0) / (e + 1.0);
}

std::vector<double> to_doubles(const RationalVector& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
    return out;
}

void check_compatible(const ExteriorData& a, const ExteriorData& b) {
    if (a.dim != b.dim || a.grid.npoints != b.grid.npoints || a.grid.r_min != b.grid.r_min ||
        a.grid.dr != b.grid.dr)
        throw std::invalid_argument("ExteriorData: mismatched grids or dimensions");
}

double tail_cross_integral(const PowerTail& a, const PowerTail& b, double edge, int dim) {
    if (a.empty() || b.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < a.coef.size(); ++i)
        for (std::size_t j = 0; j < b.coef.size(); ++j)
            total += a.coef[i] * b.coef[j] * power_integral(edge, a.expo[i] + b.expo[j] + dim - 1);
    return total;
}

// Quadrature + analytic tail of int field(r) r^p dr over [r_min, inf).
std::vector<double> weighted_moments(const RadialGrid& grid, const std::vector<double>& field,
                                     const PowerTail& tail, const std::vector<int>& powers,
                                     MomentCheck* check) {
    std::vector<double> moments;
    std::vector<double> integrand(grid.npoints);
    const double edge = grid.r_max;
    for (int p : powers) {
        for (int n = 0; n < grid.npoints; ++n) integrand[n] = field[n] * std::pow(grid.r(n), p);
        double value = integrate_simpson(integrand, grid.dr);
        if (!tail.empty()) {
            for (std::size_t t = 0; t < tail.coef.size(); ++t)
                value += tail.coef[t] * power_integral(edge, tail.expo[t] + p);
        } else if (check != nullptr) {
            const double edge_mass = std::abs(integrand.back()) * edge;
            if (edge_mass > kTailTolerance * std::abs(value)) {
                check->flagged = true;
                check->bound += edge_mass;
            }
        }
        moments.push_back(value);
    }
    return moments;
}

}  // namespace

double PowerTail::value(double r) const {
    double v = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) v += coef[i] * std::pow(r, expo[i]);
    return v;
}

double PowerTail::derivative(double r) const {
    double v = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i)
        v += coef[i] * expo[i] * std::pow(r, expo[i] - 1.0);
    return v;
}

PowerTail PowerTail::differentiated() const {
    PowerTail out;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        if (expo[i] == 0.0) continue;
        out.coef.push_back(coef[i] * expo[i]);
        out.expo.push_back(expo[i] - 1.0);
    }
    return out;
}

PowerTail PowerTail::difference(const PowerTail& a, const PowerTail& b) {
    PowerTail out = a;
    for (std::size_t i = 0; i < b.coef.size(); ++i) {
        out.coef.push_back(-b.coef[i]);
        out.expo.push_back(b.expo[i]);
    }
    return out;
}

ProjectionBasis build_basis(int d, double R) {
    if (d < 3 || d % 2 == 0)
        throw std::invalid_argument("build_basis: dimension must be odd and >= 3");
    if (R < 1.0) throw std::invalid_argument("build_basis: radius must be >= 1");

    ProjectionBasis basis;
    basis.dim = d;
    basis.radius = R;
    basis.coeffs = coefficients(d);
    basis.k = basis.coeffs.k;
    basis.ktilde = basis.coeffs.ktilde;

    const int k = basis.k;
    const int kt = basis.ktilde;
    basis.gramL2.assign(k, std::vector<double>(k, 0.0));
    basis.invL2.assign(k, std::vector<double>(k, 0.0));
    basis.gramH1.assign(kt, std::vector<double>(kt, 0.0));
    basis.invH1.assign(kt, std::vector<double>(kt, 0.0));

    for (int i = 1; i <= k; ++i) {
        for (int j = 1; j <= k; ++j) {
            basis.gramL2[i - 1][j - 1] = std::pow(R, 2 * i + 2 * j - d) / (d - 2 * i - 2 * j);
            // b_ij(1) = c_i c_j / (d-2i-2j), exact; scaled by R^{d-2i-2j}
            const Rational b1 = basis.coeffs.c[i - 1] * basis.coeffs.c[j - 1] / rat(d - 2 * i - 2 * j);
            basis.invL2[i - 1][j - 1] = to_double(b1) * std::pow(R, d - 2 * i - 2 * j);
        }
    }
    for (int i = 1; i <= kt; ++i) {
        for (int j = 1; j <= kt; ++j) {
            basis.gramH1[i - 1][j - 1] = (2.0 * i - d) * (2.0 * j - d) *
                                         std::pow(R, 2 * i + 2 * j - d - 2) /
                                         (d + 2 - 2 * i - 2 * j);
            const Rational b1 = basis.coeffs.dvec[i - 1] * basis.coeffs.dvec[j - 1] /
                                rat((d + 2 - 2 * i - 2 * j) * (d - 2 * i) * (d - 2 * j));
            basis.invH1[i - 1][j - 1] = to_double(b1) * std::pow(R, d + 2 - 2 * i - 2 * j);
        }
    }

    basis.inverse_defect = std::max(identity_defect(basis.gramL2, basis.invL2),
                                    identity_defect(basis.gramH1, basis.invH1));
    if (basis.inverse_defect > 1e-10)
        throw std::runtime_error("build_basis: Gram inverse defect exceeds 1e-10 at d = " +
                                 std::to_string(d));
    return basis;
}

std::vector<double> field_moments_h1(const ExteriorData& u, int count, MomentCheck* check) {
    std::vector<double> fp = u.fp.empty() ? derivative4(u.f, u.grid.dr) : u.fp;
    std::vector<int> powers(count);
    for (int i = 1; i <= count; ++i) powers[i - 1] = 2 * i - 2;
    return weighted_moments(u.grid, fp, u.f_tail.differentiated(), powers, check);
}

std::vector<double> field_moments_l2(const ExteriorData& u, int count, MomentCheck* check) {
    std::vector<int> powers(count);
    for (int i = 1; i <= count; ++i) powers[i - 1] = 2 * i - 1;
    return weighted_moments(u.grid, u.g, u.g_tail, powers, check);
}

ProjectionCoefficients project_coefficients(const ExteriorData& u, const ProjectionBasis& basis) {
    if (u.dim != basis.dim) throw std::invalid_argument("project_coefficients: dimension mismatch");
    const int d = basis.dim;
    const double R = basis.radius;

    MomentCheck check;
    const std::vector<double> mh1 = field_moments_h1(u, basis.ktilde, &check);
    const std::vector<double> ml2 = field_moments_l2(u, basis.k, &check);
    const std::vector<double> dd = to_doubles(basis.coeffs.dvec);
    const std::vector<double> cc = to_doubles(basis.coeffs.c);

    ProjectionCoefficients out;
    out.radius = R;
    out.tail_flagged = check.flagged;
    out.tail_error_bound = check.bound;

    out.lambda.assign(basis.ktilde, 0.0);
    for (int j = 1; j <= basis.ktilde; ++j) {
        double s = 0.0;
        for (int i = 1; i <= basis.ktilde; ++i) {
            const double w = -std::pow(R, d + 2 - 2 * i - 2 * j) /
                             ((d - 2.0 * j) * (d + 2 - 2.0 * i - 2.0 * j));
            s += w * dd[i - 1] * dd[j - 1] * mh1[i - 1];
        }
        out.lambda[j - 1] = s;
    }

    out.mu.assign(basis.k, 0.0);
    for (int j = 1; j <= basis.k; ++j) {
        double s = 0.0;
        for (int i = 1; i <= basis.k; ++i) {
            const double w = std::pow(R, d - 2 * i - 2 * j) / (d - 2.0 * i - 2.0 * j);
            s += w * cc[i - 1] * cc[j - 1] * ml2[i - 1];
        }
        out.mu[j - 1] = s;
    }
    return out;
}

std::pair<ExteriorData, ExteriorData> apply_projection(const ExteriorData& u,
                                                       const ProjectionCoefficients& coeffs,
                                                       const ProjectionBasis& basis) {
    const int d = basis.dim;
    ExteriorData proj;
    proj.grid = u.grid;
    proj.dim = u.dim;
    proj.f.assign(u.grid.npoints, 0.0);
    proj.g.assign(u.grid.npoints, 0.0);

    proj.fp.assign(u.grid.npoints, 0.0);
    for (int n = 0; n < u.grid.npoints; ++n) {
        const double r = u.grid.r(n);
        double fv = 0.0, fpv = 0.0, gv = 0.0;
        for (int i = 1; i <= basis.ktilde; ++i) {
            fv += coeffs.lambda[i - 1] * std::pow(r, 2 * i - d);
            fpv += coeffs.lambda[i - 1] * (2.0 * i - d) * std::pow(r, 2 * i - d - 1);
        }
        for (int j = 1; j <= basis.k; ++j) gv += coeffs.mu[j - 1] * std::pow(r, 2 * j - d);
        proj.f[n] = fv;
        proj.fp[n] = fpv;
        proj.g[n] = gv;
    }
    for (int i = 1; i <= basis.ktilde; ++i) {
        proj.f_tail.coef.push_back(coeffs.lambda[i - 1]);
        proj.f_tail.expo.push_back(2.0 * i - d);
    }
    for (int j = 1; j <= basis.k; ++j) {
        proj.g_tail.coef.push_back(coeffs.mu[j - 1]);
        proj.g_tail.expo.push_back(2.0 * j - d);
    }

    ExteriorData perp;
    perp.grid = u.grid;
    perp.dim = u.dim;
    perp.f.resize(u.grid.npoints);
    perp.g.resize(u.grid.npoints);
    for (int n = 0; n < u.grid.npoints; ++n) {
        perp.f[n] = u.f[n] - proj.f[n];
        perp.g[n] = u.g[n] - proj.g[n];
    }
    if (!u.fp.empty()) {
        perp.fp.resize(u.grid.npoints);
        for (int n = 0; n < u.grid.npoints; ++n) perp.fp[n] = u.fp[n] - proj.fp[n];
    }
    perp.f_tail = PowerTail::difference(u.f_tail, proj.f_tail);
    perp.g_tail = PowerTail::difference(u.g_tail, proj.g_tail);
    return {std::move(proj), std::move(perp)};
}

double inner_h1(const ExteriorData& a, const ExteriorData& b) {
    check_compatible(a, b);
    const std::vector<double> fa = a.fp.empty() ? derivative4(a.f, a.grid.dr) : a.fp;
    const std::vector<double> fb = b.fp.empty() ? derivative4(b.f, b.grid.dr) : b.fp;
    std::vector<double> integrand(a.grid.npoints);
    for (int n = 0; n < a.grid.npoints; ++n)
        integrand[n] = fa[n] * fb[n] * std::pow(a.grid.r(n), a.dim - 1);
    double value = integrate_simpson(integrand, a.grid.dr);
    value += tail_cross_integral(a.f_tail.differentiated(), b.f_tail.differentiated(),
                                 a.grid.r_max, a.dim);
    return value;
}

double inner_l2(const ExteriorData& a, const ExteriorData& b) {
    check_compatible(a, b);
    std::vector<double> integrand(a.grid.npoints);
    for (int n = 0; n < a.grid.npoints; ++n)
        integrand[n] = a.g[n] * b.g[n] * std::pow(a.grid.r(n), a.dim - 1);
    double value = integrate_simpson(integrand, a.grid.dr);
    value += tail_cross_integral(a.g_tail, b.g_tail, a.grid.r_max, a.dim);
    return value;
}

double inner_pair(const ExteriorData& a, const ExteriorData& b) {
    return inner_h1(a, b) + inner_l2(a, b);
}

double norm_sq(const ExteriorData& a) { return inner_pair(a, a); }

NormSplit norm_via_identity(const ExteriorData& u, const ProjectionBasis& basis) {
    const int d = basis.dim;
    const std::vector<double> mh1 = field_moments_h1(u, basis.ktilde);
    const std::vector<double> ml2 = field_moments_l2(u, basis.k);

    // U_i = <f, r^{2i-d}>_{Hdot1} = (2i-d) int f' r^{2i-2};  <g, r^{2i-d}>_{L2}
    // is the plain moment.
    std::vector<double> uh(basis.ktilde);
    for (int i = 1; i <= basis.ktilde; ++i) uh[i - 1] = (2.0 * i - d) * mh1[i - 1];

    double proj = 0.0;
    for (int i = 0; i < basis.ktilde; ++i)
        for (int j = 0; j < basis.ktilde; ++j) proj += uh[i] * basis.invH1[i][j] * uh[j];
    for (int i = 0; i < basis.k; ++i)
        for (int j = 0; j < basis.k; ++j) proj += ml2[i] * basis.invL2[i][j] * ml2[j];

    NormSplit split;
    const double total = norm_sq(u);
    split.proj_norm_sq = proj;
    split.perp_norm_sq = total - proj;
    if (split.perp_norm_sq < -1e-9 * std::max(1.0, total)) split.quadrature_failure = true;
    return split;
}

SeminormPair coefficient_seminorms(const std::vector<CoefficientTrackPoint>& track, int d) {
    SeminormPair out;
    const std::size_t n = track.size();
    if (n == 0) throw std::invalid_argument("coefficient_seminorms: empty track");
    const int kt = static_cast<int>(track.front().lambda.size());
    const int k = static_cast<int>(track.front().mu.size());

    const double r0 = track.front().radius;
    for (int i = 1; i <= kt; ++i) {
        const double w = track.front().lambda[i - 1] * std::pow(r0, 2.0 * i - (d + 2.0) / 2.0);
        out.pip_norm_sq += w * w;
    }
    for (int i = 1; i <= k; ++i) {
        const double w = track.front().mu[i - 1] * std::pow(r0, 2.0 * i - d / 2.0);
        out.pip_norm_sq += w * w;
    }

    if (n < 5) {
        out.differencing_flagged = true;
        return out;
    }
    const double dr = track[1].radius - track[0].radius;
    for (std::size_t t = 1; t < n; ++t)
        if (std::abs(track[t].radius - track[t - 1].radius - dr) > 1e-9 * dr)
            out.differencing_flagged = true;
    if (out.differencing_flagged) return out;

    std::vector<double> series(n);
    std::vector<double> integrand(n, 0.0);
    for (int i = 1; i <= kt; ++i) {
        for (std::size_t t = 0; t < n; ++t) series[t] = track[t].lambda[i - 1];
        const std::vector<double> dser = derivative4(series, dr);
        for (std::size_t t = 0; t < n; ++t) {
            const double w = dser[t] * std::pow(track[t].radius, 2.0 * i - (d + 1.0) / 2.0);
            integrand[t] += w * w;
        }
    }
    for (int i = 1; i <= k; ++i) {
        for (std::size_t t = 0; t < n; ++t) series[t] = track[t].mu[i - 1];
        const std::vector<double> dser = derivative4(series, dr);
        for (std::size_t t = 0; t < n; ++t) {
            const double w = dser[t] * std::pow(track[t].radius, 2.0 * i - (d - 1.0) / 2.0);
            integrand[t] += w * w;
        }
    }
    out.pipp_norm_sq = integrate_simpson(integrand, dr);
    return out;
}

}  // namespace ewm
