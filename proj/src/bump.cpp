#include "ewm/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace ewm {

namespace {

std::vector<double> differentiate(const std::vector<double>& poly) {
    if (poly.size() <= 1) return {0.0};
    std::vector<double> out(poly.size() - 1);
    for (std::size_t i = 1; i < poly.size(); ++i) out[i - 1] = poly[i] * static_cast<double>(i);
    return out;
}

double horner(const std::vector<double>& poly, double x) {
    double v = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) v = v * x + poly[i];
    return v;
}

}  // namespace

Bump::Bump(double amplitude, double center, double width, int power)
    : amplitude_(amplitude), center_(center), width_(width) {
    if (width <= 0.0) throw std::invalid_argument("Bump: width must be positive");
    if (power < 1) throw std::invalid_argument("Bump: power must be >= 1");

    // (1 - xi^2)^p expanded: sum_k C(p,k) (-1)^k xi^(2k)
    std::vector<double> base(2 * power + 1, 0.0);
    double binom = 1.0;
    for (int k = 0; k <= power; ++k) {
        base[2 * k] = (k % 2 == 0 ? binom : -binom);
        binom = binom * (power - k) / (k + 1);
    }
    dcoef_.push_back(std::move(base));
    for (int n = 0; n < 2 * power + 2; ++n) dcoef_.push_back(differentiate(dcoef_.back()));
}

double Bump::derivative(double r, int order) const {
    if (is_zero()) return 0.0;
    const double xi = (r - center_) / width_;
    if (std::abs(xi) >= 1.0) return 0.0;
    const auto& poly = dcoef_[std::min<std::size_t>(order, dcoef_.size() - 1)];
    return amplitude_ * horner(poly, xi) / std::pow(width_, order);
}

}  // namespace ewm
