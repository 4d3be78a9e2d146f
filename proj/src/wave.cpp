#include "ewm/wave.hpp"

#include <cmath>
#include <limits>

#include "ewm/quadrature.hpp"

namespace ewm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// x - sin x without cancellation for small x
double x_minus_sin(double x) {
    if (std::abs(x) > 1e-3) return x - std::sin(x);
    const double x2 = x * x;
    return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
}

void check_finite(const WaveState& s, const WaveState& last_good) {
    for (double v : s.field)
        if (!std::isfinite(v)) throw EvolveAborted("non-finite field value", last_good);
    for (double v : s.velocity)
        if (!std::isfinite(v)) throw EvolveAborted("non-finite velocity value", last_good);
}

}  // namespace

WaveEquation WaveEquation::psi_form(int ell, const RadialGrid& grid) {
    if (ell < 1) throw std::invalid_argument("WaveEquation: psi form needs ell >= 1");
    WaveEquation eq;
    eq.form_ = WaveForm::Psi;
    eq.ell_ = ell;
    eq.grid_ = grid;
    return eq;
}

WaveEquation WaveEquation::u_form(int ell, const RadialGrid& grid,
                                  const HarmonicMapProfile& profile) {
    if (ell < 1) throw std::invalid_argument("WaveEquation: u form needs ell >= 1");
    if (profile.ell != ell) throw std::invalid_argument("WaveEquation: profile ell mismatch");
    WaveEquation eq;
    eq.form_ = WaveForm::U;
    eq.ell_ = ell;
    eq.grid_ = grid;
    eq.V_.resize(grid.npoints);
    eq.sin2q_.resize(grid.npoints);
    eq.cos2q_.resize(grid.npoints);
    const double ll = ell * (ell + 1.0);
    for (int i = 0; i < grid.npoints; ++i) {
        const double r = grid.r(i);
        const double q = evaluate_Q(profile, r).first;
        eq.sin2q_[i] = std::sin(2.0 * q);
        eq.cos2q_[i] = std::cos(2.0 * q);
        eq.V_[i] = ll * (eq.cos2q_[i] - 1.0) / (r * r);
    }
    return eq;
}

WaveEquation WaveEquation::free_u_form(int dim, const RadialGrid& grid) {
    if (dim < 3 || dim % 2 == 0)
        throw std::invalid_argument("WaveEquation: free form needs odd dim >= 3");
    WaveEquation eq;
    eq.form_ = WaveForm::U;
    eq.ell_ = (dim - 3) / 2;
    eq.linear_ = true;
    eq.grid_ = grid;
    return eq;
}

void WaveEquation::acceleration(std::span<const double> f, std::vector<double>& out) const {
    const int n = grid_.npoints;
    out.assign(n, 0.0);
    const double inv_dr2 = 1.0 / (grid_.dr * grid_.dr);
    const double inv_2dr = 0.5 / grid_.dr;
    const double ll = ell_ * (ell_ + 1.0);
    const double radial = form_ == WaveForm::Psi ? 2.0 : 2.0 * ell_ + 2.0;

    for (int i = 1; i + 1 < n; ++i) {
        const double r = grid_.r(i);
        const double fxx = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv_dr2;
        const double fx = (f[i + 1] - f[i - 1]) * inv_2dr;
        double a = fxx + radial / r * fx;
        if (form_ == WaveForm::Psi) {
            a -= ll * std::sin(2.0 * f[i]) / (2.0 * r * r);
        } else if (!linear_) {
            auto [fr, gr] = nonlinear_terms(i, f[i]);
            a += -V_[i] * f[i] + fr + gr;
        }
        out[i] = a;
    }
    // both boundary nodes pinned
    out[0] = 0.0;
    out[n - 1] = 0.0;
}

std::pair<double, double> WaveEquation::nonlinear_terms(int i, double u) const {
    if (form_ != WaveForm::U || linear_) return {0.0, 0.0};
    const double r = grid_.r(i);
    const double ll = ell_ * (ell_ + 1.0);
    const double rl = std::pow(r, ell_);
    const double x = rl * u;
    const double sx = std::sin(x);
    const double fr = ll * sx * sx * sin2q_[i] / (rl * r * r);
    const double gr = ll * x_minus_sin(2.0 * x) * cos2q_[i] / (2.0 * rl * r * r);
    return {fr, gr};
}

std::vector<double> discrete_harmonic_map(const HarmonicMapProfile& profile,
                                          const RadialGrid& grid) {
    const int n = grid.npoints;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = evaluate_Q(profile, grid.r(i)).first;
    if (profile.n == 0) return q;

    const int ell = profile.ell;
    const double ll = ell * (ell + 1.0);
    const double inv_dr2 = 1.0 / (grid.dr * grid.dr);
    const double inv_2dr = 0.5 / grid.dr;

    std::vector<double> residual(n), diag(n), lower(n), upper(n), delta(n);
    double prev_sup = std::numeric_limits<double>::max();
    for (int iter = 0; iter < 50; ++iter) {
        double sup = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double r = grid.r(i);
            residual[i] = (q[i + 1] - 2.0 * q[i] + q[i - 1]) * inv_dr2 +
                          (2.0 / r) * (q[i + 1] - q[i - 1]) * inv_2dr -
                          ll * std::sin(2.0 * q[i]) / (2.0 * r * r);
            sup = std::max(sup, std::abs(residual[i]));
        }
        // quadratic convergence down to the second-difference rounding floor
        if (sup < 1e-13 || sup > 0.5 * prev_sup) break;
        prev_sup = sup;
        for (int i = 1; i + 1 < n; ++i) {
            const double r = grid.r(i);
            lower[i] = inv_dr2 - 2.0 / r * inv_2dr;
            diag[i] = -2.0 * inv_dr2 - ll * std::cos(2.0 * q[i]) / (r * r);
            upper[i] = inv_dr2 + 2.0 / r * inv_2dr;
        }
        // Thomas solve of J delta = -residual on the interior nodes
        std::vector<double> cp(n, 0.0), dp(n, 0.0);
        cp[1] = upper[1] / diag[1];
        dp[1] = -residual[1] / diag[1];
        for (int i = 2; i + 1 < n; ++i) {
            const double m = diag[i] - lower[i] * cp[i - 1];
            cp[i] = upper[i] / m;
            dp[i] = (-residual[i] - lower[i] * dp[i - 1]) / m;
        }
        delta[n - 2] = dp[n - 2];
        for (int i = n - 3; i >= 1; --i) delta[i] = dp[i] - cp[i] * delta[i + 1];
        for (int i = 1; i + 1 < n; ++i) q[i] += delta[i];
    }
    return q;
}

WaveState make_initial_data(int ell, int n, const HarmonicMapProfile& profile,
                            const RadialGrid& grid, const Bump& field_bump,
                            const Bump& velocity_bump) {
    if (profile.ell != ell || profile.n != n)
        throw std::invalid_argument("make_initial_data: profile does not match (ell, n)");
    for (const Bump* b : {&field_bump, &velocity_bump}) {
        if (!b->is_zero() && (b->support_lo() <= grid.r_min + grid.dr ||
                              b->support_hi() >= grid.r_max - grid.dr))
            throw std::invalid_argument(
                "make_initial_data: perturbation must be supported inside (1, r_max)");
    }

    WaveState s;
    s.form = WaveForm::Psi;
    s.grid = grid;
    s.ell = ell;
    s.degree = n;
    s.field = discrete_harmonic_map(profile, grid);
    s.velocity.assign(grid.npoints, 0.0);
    for (int i = 0; i < grid.npoints; ++i) {
        s.field[i] += field_bump(grid.r(i));
        s.velocity[i] += velocity_bump(grid.r(i));
    }
    for (double v : s.field)
        if (!std::isfinite(v)) throw std::invalid_argument("make_initial_data: non-finite field");

    if (std::abs(s.field.back() - n * kPi) > 0.1)
        throw std::invalid_argument("make_initial_data: endpoint does not identify degree " +
                                    std::to_string(n));
    return s;
}

std::vector<double> rhs_psi(const WaveState& state) {
    if (state.form != WaveForm::Psi) throw std::invalid_argument("rhs_psi: state is not psi-form");
    std::vector<double> a;
    WaveEquation::psi_form(state.ell, state.grid).acceleration(state.field, a);
    return a;
}

std::vector<double> rhs_u(const WaveState& state, const HarmonicMapProfile& profile) {
    if (state.form != WaveForm::U) throw std::invalid_argument("rhs_u: state is not u-form");
    std::vector<double> a;
    WaveEquation::u_form(state.ell, state.grid, profile).acceleration(state.field, a);
    return a;
}

WaveState step(const WaveState& state, double dt, const WaveEquation& eq) {
    if (std::abs(dt) > 0.8 * state.grid.dr)
        throw std::invalid_argument("step: CFL violation, need |dt| <= 0.8 dr");
    const int n = state.grid.npoints;

    std::vector<double> af, a2, a3, a4;
    std::vector<double> f2(n), f3(n), f4(n);

    eq.acceleration(state.field, af);
    const std::vector<double>& v1 = state.velocity;
    for (int i = 0; i < n; ++i) f2[i] = state.field[i] + 0.5 * dt * v1[i];
    eq.acceleration(f2, a2);
    // v2 = v + dt/2 a1
    for (int i = 0; i < n; ++i) f3[i] = state.field[i] + 0.5 * dt * (v1[i] + 0.5 * dt * af[i]);
    eq.acceleration(f3, a3);
    for (int i = 0; i < n; ++i) f4[i] = state.field[i] + dt * (v1[i] + 0.5 * dt * a2[i]);
    eq.acceleration(f4, a4);

    WaveState out = state;
    out.time = state.time + dt;
    for (int i = 1; i + 1 < n; ++i) {
        const double k1v = af[i];
        const double k2v = a2[i];
        const double k3v = a3[i];
        const double k4v = a4[i];
        const double k1f = v1[i];
        const double k2f = v1[i] + 0.5 * dt * k1v;
        const double k3f = v1[i] + 0.5 * dt * k2v;
        const double k4f = v1[i] + dt * k3v;
        out.field[i] = state.field[i] + dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        out.velocity[i] = state.velocity[i] + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    check_finite(out, state);
    return out;
}

EnergyComponents energy(const WaveState& state, const WaveEquation& eq) {
    const int n = state.grid.npoints;
    const std::vector<double> df = derivative4(state.field, state.grid.dr);
    std::vector<double> kin(n), grad(n), pot(n), quad(n);
    const double ll = state.ell * (state.ell + 1.0);
    const int weight_pow = state.form == WaveForm::Psi ? 2 : 2 * state.ell + 2;

    for (int i = 0; i < n; ++i) {
        const double r = state.grid.r(i);
        const double w = std::pow(r, weight_pow);
        kin[i] = 0.5 * state.velocity[i] * state.velocity[i] * w;
        grad[i] = 0.5 * df[i] * df[i] * w;
        if (state.form == WaveForm::Psi) {
            const double sp = std::sin(state.field[i]);
            pot[i] = 0.5 * ll * sp * sp / (r * r) * w;
            quad[i] = 0.0;
        } else {
            const double v = eq.linear() || eq.potential().empty() ? 0.0 : eq.potential()[i];
            pot[i] = 0.5 * v * state.field[i] * state.field[i] * w;
            quad[i] = (df[i] * df[i] + v * state.field[i] * state.field[i]) * w;
        }
    }
    EnergyComponents e;
    e.kinetic = integrate_simpson(kin, state.grid.dr);
    e.gradient = integrate_simpson(grad, state.grid.dr);
    e.potential = integrate_simpson(pot, state.grid.dr);
    e.quad_form = integrate_simpson(quad, state.grid.dr);
    e.total = e.kinetic + e.gradient + e.potential;
    return e;
}

double deviation_norm_sq(const WaveState& state, std::span<const double> reference,
                         double r_lo, double r_hi) {
    const RadialGrid& g = state.grid;
    r_lo = std::max(r_lo, g.r_min);
    r_hi = std::min(r_hi, g.r_max);
    if (r_hi <= r_lo) return 0.0;

    const int n = g.npoints;
    std::vector<double> dev(n);
    for (int i = 0; i < n; ++i)
        dev[i] = state.field[i] - (reference.empty() ? 0.0 : reference[i]);
    const std::vector<double> ddev = derivative4(dev, g.dr);
    const int weight_pow = state.form == WaveForm::Psi ? 2 : 2 * state.ell + 2;
    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i) {
        const double w = std::pow(g.r(i), weight_pow);
        integrand[i] = (ddev[i] * ddev[i] + state.velocity[i] * state.velocity[i]) * w;
    }

    const int i0 = g.index_at_or_above(r_lo);
    int i1 = static_cast<int>(std::floor((r_hi - g.r_min) / g.dr + 1e-12));
    i1 = std::min(i1, n - 1);
    if (i1 <= i0) {  // both ends inside one cell
        return 0.5 * (r_hi - r_lo) * (integrand[std::max(0, i0 - 1)] + integrand[i1]);
    }
    double value = integrate_simpson(std::span(integrand).subspan(i0, i1 - i0 + 1), g.dr);
    // fractional end slivers, trapezoid
    if (g.r(i0) > r_lo && i0 > 0) {
        const double t = (g.r(i0) - r_lo) / g.dr;
        const double f_lo = integrand[i0] + (integrand[i0 - 1] - integrand[i0]) * t;
        value += 0.5 * (g.r(i0) - r_lo) * (f_lo + integrand[i0]);
    }
    if (g.r(i1) < r_hi && i1 + 1 < n) {
        const double t = (r_hi - g.r(i1)) / g.dr;
        const double f_hi = integrand[i1] + (integrand[i1 + 1] - integrand[i1]) * t;
        value += 0.5 * (r_hi - g.r(i1)) * (integrand[i1] + f_hi);
    }
    return value;
}

EvolveResult evolve(const WaveState& state, const WaveEquation& eq, const EvolveOptions& opts) {
    const RadialGrid& g = state.grid;
    double max_probe = 0.0;
    for (double r : opts.probes.radii) max_probe = std::max(max_probe, r);
    if (opts.enforce_causal_margin && g.r_max < max_probe + opts.T + 5.0 * g.dr)
        throw std::invalid_argument("evolve: causal margin violated, need r_max >= " +
                                    std::to_string(max_probe + opts.T + 5.0 * g.dr));

    const double dt0 = opts.cfl * g.dr;
    const long nsteps = std::max(1L, std::lround(std::ceil(opts.T / dt0 - 1e-12)));
    const double dt = opts.T / static_cast<double>(nsteps);
    const long row_every = std::max(1L, std::lround(opts.probes.cadence / dt));
    const long snap_every =
        opts.probes.snapshot_dt > 0.0 ? std::max(1L, std::lround(opts.probes.snapshot_dt / dt)) : 0;

    EvolveResult result;
    result.ledger.probe_radii = opts.probes.radii;
    const double t0 = state.time;
    const int edge = g.npoints - 1;

    WaveState cur = state;
    double cumulative_flux = 0.0;
    double prev_flux = 0.0;

    auto record_row = [&](const WaveState& s) {
        LedgerRow row;
        row.time = s.time;
        EnergyComponents e = energy(s, eq);
        row.total = e.total;
        row.kinetic = e.kinetic;
        row.gradient = e.gradient;
        row.potential = e.potential;
        // outward energy flux through the outer edge (zero for pinned ends)
        const double fr_edge = (s.field[edge] - s.field[edge - 1]) / g.dr;
        const int weight_pow = s.form == WaveForm::Psi ? 2 : 2 * s.ell + 2;
        row.flux = -s.velocity[edge] * fr_edge * std::pow(g.r_max, weight_pow);
        row.cumulative_flux = cumulative_flux;
        for (double pr : opts.probes.radii) {
            row.core.push_back(deviation_norm_sq(s, opts.probes.reference, g.r_min, pr));
            row.exterior.push_back(
                deviation_norm_sq(s, opts.probes.reference, pr + (s.time - t0), g.r_max));
        }
        result.ledger.rows.push_back(std::move(row));
    };

    record_row(cur);
    if (snap_every > 0) result.snapshots.push_back(cur);

    for (long k = 1; k <= nsteps; ++k) {
        cur = step(cur, dt, eq);
        const double fr_edge = (cur.field[edge] - cur.field[edge - 1]) / g.dr;
        const int weight_pow = cur.form == WaveForm::Psi ? 2 : 2 * cur.ell + 2;
        const double flux = -cur.velocity[edge] * fr_edge * std::pow(g.r_max, weight_pow);
        cumulative_flux += 0.5 * dt * (flux + prev_flux);
        prev_flux = flux;
        if (k % row_every == 0 || k == nsteps) record_row(cur);
        if (snap_every > 0 && (k % snap_every == 0 || k == nsteps))
            result.snapshots.push_back(cur);
    }
    result.final_state = std::move(cur);
    return result;
}

namespace {

WaveState convert(const WaveState& state, const HarmonicMapProfile& profile, bool to_u) {
    if (profile.ell != state.ell)
        throw std::invalid_argument("convert: profile ell does not match the state");
    if (state.form == WaveForm::Psi && profile.n != state.degree)
        throw std::invalid_argument("convert: profile degree does not match the state");
    WaveState out = state;
    out.form = to_u ? WaveForm::U : WaveForm::Psi;
    for (int i = 0; i < state.grid.npoints; ++i) {
        const double r = state.grid.r(i);
        const double q = evaluate_Q(profile, r).first;
        const double rl = std::pow(r, state.ell);
        if (to_u) {
            out.field[i] = (state.field[i] - q) / rl;
            out.velocity[i] = state.velocity[i] / rl;
        } else {
            out.field[i] = q + rl * state.field[i];
            out.velocity[i] = rl * state.velocity[i];
        }
    }
    return out;
}

}  // namespace

WaveState convert_psi_to_u(const WaveState& state, const HarmonicMapProfile& profile) {
    if (state.form != WaveForm::U) return convert(state, profile, true);
    throw std::invalid_argument("convert_psi_to_u: state already in u-form");
}

WaveState convert_u_to_psi(const WaveState& state, const HarmonicMapProfile& profile) {
    if (state.form != WaveForm::Psi) return convert(state, profile, false);
    throw std::invalid_argument("convert_u_to_psi: state already in psi-form");
}

}  // namespace ewm
