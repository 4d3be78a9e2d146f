#pragma once

#include <utility>
#include <vector>

#include "ewm/grid.hpp"

namespace ewm {

// Trajectory of phi_ss + phi_s = l(l+1)/2 sin(2 phi) in s = log r. The mpi
// equilibria are saddles with eigenvalues (l, -(l+1)); the degree-n exterior
// harmonic map is the separatrix entering the saddle at n pi.
enum class PendulumTerminal {
    ConvergedToSaddle,  // entered |phi - m pi| + |phi_s| < 1e-6
    Transient,          // everything else (including settling at (m+1/2) pi)
};

struct PendulumSample {
    double s = 0.0;
    double phi = 0.0;
    double phidot = 0.0;
};

struct PendulumRun {
    PendulumTerminal terminal = PendulumTerminal::Transient;
    int saddle_index = 0;           // m of the basin entered, when converged
    int barriers_crossed = 0;       // number of integer-pi levels exceeded
    double max_phi = 0.0;
    double min_saddle_distance = 0.0;  // min over path of |phi - m pi| + |phi_s|
    double s_closest = 0.0;
    bool stable_mode_aligned = false;  // basin entry rode the stable eigendirection
    double ds = 0.0;                // sample spacing (0 when sampling disabled)
    std::vector<PendulumSample> samples;
};

// Adaptive dopri5 in long double at abs/rel tolerance 1e-12/1e-10. With
// sample_ds > 0 the dense output is resampled uniformly; sample_ds = 0 keeps
// only the classification (bracket scans). Throws on step-size underflow.
PendulumRun integrate_pendulum(int ell, double a, double s_max, double sample_ds = 0.0);

struct HarmonicMapProfile {
    int ell = 1;
    int n = 0;
    double shoot_param = 0.0;  // a = phi_s(0) = Q'(1)
    double alpha0 = 0.0;       // Q ~ n pi - alpha0 r^{-(l+1)}
    double fit_residual = 0.0;
    double ds = 0.0;           // uniform s spacing of the samples
    double s_end = 0.0;        // last stored s; r_max = exp(s_end)
    double min_saddle_distance = 0.0;
    std::vector<double> phi;
    std::vector<double> phidot;

    double r_max() const;
    bool is_trivial() const { return n == 0; }
};

struct ShootOptions {
    double s_max = 40.0;
    double scan_start = 1.0 / 1024.0;
    double scan_factor = 2.0;
    double sample_ds = 1.0 / 4096.0;
};

// Bisection on the barrier-crossing predicate between an undershoot witness
// (never exceeds n pi) and an overshoot witness (crosses with margin); the
// bracket is refined to the floating-point floor. n = 0 short-circuits to
// the zero map.
HarmonicMapProfile shoot(int ell, int n, const ShootOptions& opts = {});

struct AlphaFit {
    double alpha0 = 0.0;
    double correction = 0.0;  // coefficient of the r^{-2(l+1)} fit basis
    double residual = 0.0;    // rms misfit over the window
    double s_lo = 0.0;
    double s_hi = 0.0;
};

// Least squares of (n pi - Q) r^{l+1} against {1, r^{-2(l+1)}} over a window
// chosen clear of both the next asymptotic correction and the unstable-mode
// contamination near the closest saddle approach. s_hi_override <= 0 picks
// the automatic window end.
AlphaFit fit_alpha(const HarmonicMapProfile& profile, double s_hi_override = 0.0);

// (Q, Q') at radius r >= 1: cubic Hermite on the stored samples up to r_max,
// the asymptotic form n pi - alpha0 r^{-(l+1)} beyond.
std::pair<double, double> evaluate_Q(const HarmonicMapProfile& profile, double r);

}  // namespace ewm
