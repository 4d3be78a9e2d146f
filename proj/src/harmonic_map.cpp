#include "ewm/harmonic_map.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ewm {

namespace {

namespace odeint = boost::numeric::odeint;

using state_t = std::array<long double, 2>;
constexpr long double kPi = 3.14159265358979323846264338327950288L;
constexpr double kBasinRadius = 1e-6;
constexpr double kCrossingMargin = 1e-8;

struct Pendulum {
    long double gamma;  // l(l+1)/2
    void operator()(const state_t& y, state_t& dy, long double) const {
        dy[0] = y[1];
        dy[1] = -y[1] + gamma * std::sin(2.0L * y[0]);
    }
};

struct Tracker {
    int ell;
    PendulumRun run;
    bool done = false;
    double departure_floor = std::numeric_limits<double>::max();

    explicit Tracker(int ell_) : ell(ell_) {
        run.min_saddle_distance = std::numeric_limits<double>::max();
    }

    void observe(long double s, const state_t& y) {
        const double phi = static_cast<double>(y[0]);
        const double phidot = static_cast<double>(y[1]);
        run.max_phi = std::max(run.max_phi, phi);

        const long double m_near = std::floor(y[0] / kPi + 0.5L);
        const double e = static_cast<double>(y[0] - m_near * kPi);
        const double dist = std::abs(e) + std::abs(phidot);
        if (dist < run.min_saddle_distance) {
            run.min_saddle_distance = dist;
            run.s_closest = static_cast<double>(s);
        }
        if (run.terminal != PendulumTerminal::ConvergedToSaddle && dist < kBasinRadius) {
            run.terminal = PendulumTerminal::ConvergedToSaddle;
            run.saddle_index = static_cast<int>(m_near);
            // stable eigendirection: phidot = -(l+1) (phi - m pi)
            const double unstable = std::abs(phidot + (ell + 1.0) * e) / (2.0 * ell + 1.0);
            run.stable_mode_aligned = unstable <= 0.25 * dist;
        }
        if (run.terminal == PendulumTerminal::ConvergedToSaddle) {
            departure_floor = std::min(departure_floor, dist);
            if (dist > 1e3 * departure_floor && dist > 10.0 * kBasinRadius) done = true;
        } else {
            // settled into a half-integer attractor: no further barrier can fall
            const long double h_near = std::floor(y[0] / kPi);
            const double eh = static_cast<double>(y[0] - (h_near + 0.5L) * kPi);
            if (std::abs(eh) < 1e-3 && std::abs(phidot) < 1e-3) done = true;
        }
    }
};

int crossed_barriers(double max_phi) {
    const double lifted = (max_phi - kCrossingMargin) / static_cast<double>(kPi);
    return lifted > 0.0 ? static_cast<int>(std::floor(lifted)) : 0;
}

}  // namespace

PendulumRun integrate_pendulum(int ell, double a, double s_max, double sample_ds) {
    if (ell < 1) throw std::invalid_argument("integrate_pendulum: ell must be >= 1");
    if (s_max <= 0.0) throw std::invalid_argument("integrate_pendulum: s_max must be positive");

    // Tighter than the 1e-12/1e-10 accuracy budget: the dense-output samples
    // feed defect checks that difference them at the sample spacing.
    const Pendulum sys{0.5L * ell * (ell + 1.0L)};
    auto stepper = odeint::make_dense_output(1e-15L, 2e-14L,
                                             odeint::runge_kutta_dopri5<state_t, long double>());
    state_t y{0.0L, static_cast<long double>(a)};
    stepper.initialize(y, 0.0L, 1e-4L);

    Tracker tracker(ell);
    tracker.run.ds = sample_ds;
    tracker.observe(0.0L, y);
    if (sample_ds > 0.0)
        tracker.run.samples.push_back({0.0, static_cast<double>(y[0]), static_cast<double>(y[1])});

    long double next_sample = sample_ds;
    while (stepper.current_time() < s_max && !tracker.done) {
        stepper.do_step(sys);
        if (stepper.current_time_step() < 1e-14L)
            throw std::runtime_error("integrate_pendulum: step-size underflow at s = " +
                                     std::to_string(static_cast<double>(stepper.current_time())));
        if (sample_ds > 0.0) {
            while (next_sample <= stepper.current_time() && next_sample <= s_max) {
                state_t yi;
                stepper.calc_state(next_sample, yi);
                tracker.observe(next_sample, yi);
                tracker.run.samples.push_back({static_cast<double>(next_sample),
                                               static_cast<double>(yi[0]),
                                               static_cast<double>(yi[1])});
                next_sample += sample_ds;
            }
        } else {
            tracker.observe(stepper.current_time(), stepper.current_state());
        }
    }
    tracker.run.barriers_crossed = crossed_barriers(tracker.run.max_phi);
    return tracker.run;
}

double HarmonicMapProfile::r_max() const { return std::exp(s_end); }

namespace {

// Overshoot witness: the trajectory exceeded n pi with positive margin.
bool crosses_level(int ell, double a, int n, double s_max) {
    PendulumRun run = integrate_pendulum(ell, a, s_max);
    return run.barriers_crossed >= n;
}

}  // namespace

HarmonicMapProfile shoot(int ell, int n, const ShootOptions& opts) {
    if (ell < 1) throw std::invalid_argument("shoot: ell must be >= 1");
    if (n < 0) throw std::invalid_argument("shoot: degree must be >= 0");

    HarmonicMapProfile profile;
    profile.ell = ell;
    profile.n = n;
    if (n == 0) {
        profile.ds = opts.sample_ds;
        profile.s_end = opts.s_max;
        const int count = static_cast<int>(opts.s_max / opts.sample_ds) + 1;
        profile.phi.assign(count, 0.0);
        profile.phidot.assign(count, 0.0);
        return profile;
    }

    // geometric scan for the bracket
    double lo = 0.0, hi = opts.scan_start;
    int scans = 0;
    while (!crosses_level(ell, hi, n, opts.s_max)) {
        lo = hi;
        hi *= opts.scan_factor;
        if (++scans > 200)
            throw std::runtime_error("shoot: no overshoot witness in scan range (0, " +
                                     std::to_string(hi) + "]");
    }

    // bisection to the floating-point floor
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (crosses_level(ell, mid, n, opts.s_max))
            hi = mid;
        else
            lo = mid;
    }
    profile.shoot_param = lo;

    PendulumRun run = integrate_pendulum(ell, lo, opts.s_max, opts.sample_ds);
    if (run.terminal != PendulumTerminal::ConvergedToSaddle || run.saddle_index != n)
        throw std::runtime_error("shoot: separatrix run missed the n pi basin (ell = " +
                                 std::to_string(ell) + ", n = " + std::to_string(n) + ")");

    // keep samples up to the closest saddle approach; beyond it the unstable
    // mode takes over
    std::size_t cut = run.samples.size();
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
        if (run.samples[i].s >= run.s_closest) {
            cut = i + 1;
            break;
        }
    }
    profile.ds = opts.sample_ds;
    profile.phi.reserve(cut);
    profile.phidot.reserve(cut);
    for (std::size_t i = 0; i < cut; ++i) {
        profile.phi.push_back(run.samples[i].phi);
        profile.phidot.push_back(run.samples[i].phidot);
    }
    profile.s_end = run.samples[cut - 1].s;
    profile.min_saddle_distance = run.min_saddle_distance;

    const AlphaFit fit = fit_alpha(profile);
    profile.alpha0 = fit.alpha0;
    profile.fit_residual = fit.residual;
    return profile;
}

AlphaFit fit_alpha(const HarmonicMapProfile& profile, double s_hi_override) {
    AlphaFit fit;
    if (profile.n == 0) return fit;
    if (profile.phi.empty()) throw std::invalid_argument("fit_alpha: profile has no samples");

    const int ell = profile.ell;
    const double target = profile.n * static_cast<double>(kPi);

    // Contamination by the unstable mode grows like e^{(2l+1)(s - s_closest)}
    // relative to the head coefficient; back off enough for ~1e-9.
    double s_hi = profile.s_end - 21.0 / (2.0 * ell + 1.0);
    if (s_hi_override > 0.0) s_hi = std::min(s_hi_override, s_hi);
    // The neglected r^{-4(l+1)} correction must sit below ~1e-11.
    const double s_min = 27.0 / (4.0 * (ell + 1.0));
    double s_lo = std::max(s_min, s_hi - std::log(10.0));
    if (s_lo >= s_hi) {  // short profile; take the top 20% and report the misfit
        s_hi = profile.s_end * 0.9;
        s_lo = profile.s_end * 0.7;
    }

    const int i_lo = static_cast<int>(std::ceil(s_lo / profile.ds));
    const int i_hi = std::min(static_cast<int>(std::floor(s_hi / profile.ds)),
                              static_cast<int>(profile.phi.size()) - 1);
    if (i_hi - i_lo < 8) throw std::runtime_error("fit_alpha: fit window has too few samples");

    // centered least squares of y = alpha + beta x, x = e^{-2(l+1)s}
    double sx = 0.0, sy = 0.0;
    const int count = i_hi - i_lo + 1;
    std::vector<double> xs(count), ys(count);
    for (int i = i_lo; i <= i_hi; ++i) {
        const double s = i * profile.ds;
        xs[i - i_lo] = std::exp(-2.0 * (ell + 1.0) * s);
        ys[i - i_lo] = (target - profile.phi[i]) * std::exp((ell + 1.0) * s);
        sx += xs[i - i_lo];
        sy += ys[i - i_lo];
    }
    const double mx = sx / count, my = sy / count;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < count; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double beta = sxx > 0.0 ? sxy / sxx : 0.0;
    const double alpha = my - beta * mx;

    double rss = 0.0;
    for (int i = 0; i < count; ++i) {
        const double e = ys[i] - alpha - beta * xs[i];
        rss += e * e;
    }
    fit.alpha0 = alpha;
    fit.correction = beta;
    fit.residual = std::sqrt(rss / count);
    fit.s_lo = i_lo * profile.ds;
    fit.s_hi = i_hi * profile.ds;
    return fit;
}

std::pair<double, double> evaluate_Q(const HarmonicMapProfile& profile, double r) {
    if (r < 1.0) throw std::invalid_argument("evaluate_Q: r must be >= 1");
    if (profile.n == 0) return {0.0, 0.0};

    const double s = std::log(r);
    if (s >= profile.s_end) {
        const double target = profile.n * static_cast<double>(kPi);
        const double tail = profile.alpha0 * std::pow(r, -(profile.ell + 1.0));
        return {target - tail, (profile.ell + 1.0) * tail / r};
    }
    const double t = s / profile.ds;
    int i = std::min(static_cast<int>(t), static_cast<int>(profile.phi.size()) - 2);
    const double u = t - i;
    const double h = profile.ds;
    const double p0 = profile.phi[i], p1 = profile.phi[i + 1];
    const double m0 = profile.phidot[i] * h, m1 = profile.phidot[i + 1] * h;
    const double u2 = u * u, u3 = u2 * u;
    const double phi = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 +
                       (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
    const double dphi_du = (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 +
                           (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1;
    const double phidot = dphi_du / h;  // d phi / ds
    return {phi, phidot / r};
}

}  // namespace ewm
