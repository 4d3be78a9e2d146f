#pragma once

#include <vector>

namespace ewm {

// Compactly supported polynomial bump  A * (1 - xi^2)^p,  xi = (r - c)/w,
// zero outside |xi| < 1. Derivatives of every order are evaluated from the
// expanded polynomial, so the bump can seed constructions that need exact
// higher derivatives (descent free waves, plug-back residuals).
class Bump {
public:
    Bump() = default;  // identically zero
    Bump(double amplitude, double center, double width, int power = 8);

    double operator()(double r) const { return derivative(r, 0); }
    double derivative(double r, int order) const;

    bool is_zero() const { return amplitude_ == 0.0; }
    double amplitude() const { return amplitude_; }
    double center() const { return center_; }
    double width() const { return width_; }
    double support_lo() const { return center_ - width_; }
    double support_hi() const { return center_ + width_; }

private:
    double amplitude_ = 0.0;
    double center_ = 0.0;
    double width_ = 1.0;
    std::vector<std::vector<double>> dcoef_;  // dcoef_[n] = xi-poly of the n-th derivative
};

}  // namespace ewm
