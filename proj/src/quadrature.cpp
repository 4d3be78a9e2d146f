#include "ewm/quadrature.hpp"

#include <stdexcept>

namespace ewm {

double integrate_simpson(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    const std::size_t intervals = n - 1;
    if (intervals == 1) return 0.5 * dx * (f[0] + f[1]);
    if (intervals == 2) return dx / 3.0 * (f[0] + 4.0 * f[1] + f[2]);

    double total = 0.0;
    std::size_t simpson_end = intervals;  // index of last node covered by Simpson
    if (intervals % 2 != 0) simpson_end = intervals - 3;

    if (simpson_end >= 2) {
        double s = f[0] + f[simpson_end];
        for (std::size_t i = 1; i < simpson_end; i += 2) s += 4.0 * f[i];
        for (std::size_t i = 2; i < simpson_end; i += 2) s += 2.0 * f[i];
        total += dx / 3.0 * s;
    }
    if (simpson_end != intervals) {
        const std::size_t a = simpson_end;
        total += 3.0 * dx / 8.0 * (f[a] + 3.0 * f[a + 1] + 3.0 * f[a + 2] + f[a + 3]);
    }
    return total;
}

std::vector<double> derivative4(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("derivative4: need at least 5 samples");
    std::vector<double> d(n);
    const double inv12 = 1.0 / (12.0 * dx);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv12;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv12;
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv12;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * inv12;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * inv12;
    return d;
}

std::vector<double> derivative2(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 3) throw std::invalid_argument("derivative2: need at least 3 samples");
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    return d;
}

}  // namespace ewm
