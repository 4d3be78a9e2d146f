#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewm/bump.hpp"
#include "ewm/grid.hpp"
#include "ewm/harmonic_map.hpp"

namespace ewm {

enum class WaveForm { Psi, U };

// Field/velocity pair on a radial grid starting at r = 1 (Dirichlet node).
struct WaveState {
    WaveForm form = WaveForm::Psi;
    RadialGrid grid;
    std::vector<double> field;
    std::vector<double> velocity;
    double time = 0.0;
    int ell = 1;
    int degree = 0;
};

// Spatial right-hand side. Psi-form evolves the wave-map angle; u-form the
// reduced semilinear equation in dimension d = 2 ell + 3 with tables for V
// and the trig factors of Q sampled once per grid. The free variant drops
// V, F, G (linear radial wave in d dimensions, used by the channel suite).
class WaveEquation {
public:
    static WaveEquation psi_form(int ell, const RadialGrid& grid);
    static WaveEquation u_form(int ell, const RadialGrid& grid, const HarmonicMapProfile& profile);
    static WaveEquation free_u_form(int dim, const RadialGrid& grid);

    void acceleration(std::span<const double> field, std::vector<double>& out) const;

    // u-form nonlinear terms (F, G) at grid node i for field value u.
    std::pair<double, double> nonlinear_terms(int i, double u) const;

    WaveForm form() const { return form_; }
    int ell() const { return ell_; }
    int dim() const { return 2 * ell_ + 3; }
    bool linear() const { return linear_; }
    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& potential() const { return V_; }

private:
    WaveEquation() = default;
    WaveForm form_ = WaveForm::Psi;
    int ell_ = 1;
    bool linear_ = false;
    RadialGrid grid_;
    std::vector<double> V_;       // u-form potential
    std::vector<double> sin2q_;   // u-form nonlinearity tables
    std::vector<double> cos2q_;
};

// Aborted evolution (NaN/Inf); carries the last good state.
struct EvolveAborted : std::runtime_error {
    EvolveAborted(std::string msg, WaveState last)
        : std::runtime_error(std::move(msg)), last_good(std::move(last)) {}
    WaveState last_good;
};

// Discrete stationary solution of the psi-form finite-difference operator on
// the given grid (Newton on the tridiagonal system, boundary values 0 and
// Q(r_max)). Static runs stay pinned to round-off only when started here.
std::vector<double> discrete_harmonic_map(const HarmonicMapProfile& profile,
                                          const RadialGrid& grid);

// psi_0 = Q_h + bump, psi_1 = velocity bump. Bumps must be supported inside
// (1, r_max); the endpoint value must identify the degree.
WaveState make_initial_data(int ell, int n, const HarmonicMapProfile& profile,
                            const RadialGrid& grid, const Bump& field_bump,
                            const Bump& velocity_bump);

std::vector<double> rhs_psi(const WaveState& state);
std::vector<double> rhs_u(const WaveState& state, const HarmonicMapProfile& profile);

// One classical RK4 step; both boundary nodes stay pinned. dt must satisfy
// dt <= 0.8 dr. Throws EvolveAborted when a non-finite value appears.
WaveState step(const WaveState& state, double dt, const WaveEquation& eq);

struct EnergyComponents {
    double total = 0.0;
    double kinetic = 0.0;
    double gradient = 0.0;
    double potential = 0.0;
    double quad_form = 0.0;  // <H u, u> in u-form, 0 otherwise
};

EnergyComponents energy(const WaveState& state, const WaveEquation& eq);

// ((field - ref)_r^2 + velocity^2) r^{d-1} integrated over [r_lo, r_hi] with
// fractional end cells; ref may be empty (zero reference).
double deviation_norm_sq(const WaveState& state, std::span<const double> reference,
                         double r_lo, double r_hi);

struct LedgerRow {
    double time = 0.0;
    double total = 0.0;
    double kinetic = 0.0;
    double gradient = 0.0;
    double potential = 0.0;
    double flux = 0.0;             // instantaneous outer-edge flux
    double cumulative_flux = 0.0;  // time-integrated
    std::vector<double> core;      // deviation energy on [1, R] per probe
    std::vector<double> exterior;  // deviation energy on [R + (t - t0), r_max]
};

struct EnergyLedger {
    std::vector<double> probe_radii;
    std::vector<LedgerRow> rows;
};

struct ProbeSet {
    std::vector<double> radii;
    double cadence = 0.5;           // ledger row spacing in time
    double snapshot_dt = 0.0;       // 0 = keep no snapshots
    std::vector<double> reference;  // deviation reference field (empty = zero)
};

struct EvolveOptions {
    double T = 10.0;
    double cfl = 0.5;  // dt = cfl * dr
    ProbeSet probes;
    bool enforce_causal_margin = true;
};

struct EvolveResult {
    WaveState final_state;
    EnergyLedger ledger;
    std::vector<WaveState> snapshots;
};

// Advance to time T recording the ledger at the probe cadence. Requires
// r_max >= max probe radius + T + 5 dr (causal truncation) unless disabled.
EvolveResult evolve(const WaveState& state, const WaveEquation& eq, const EvolveOptions& opts);

// u = (psi - Q)/r^ell and back; the same Q samples are used both ways so the
// round trip is exact to rounding.
WaveState convert_psi_to_u(const WaveState& state, const HarmonicMapProfile& profile);
WaveState convert_u_to_psi(const WaveState& state, const HarmonicMapProfile& profile);

}  // namespace ewm
