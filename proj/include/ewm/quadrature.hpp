#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ewm {

// Composite Simpson on a uniform mesh. An odd interval count is closed with
// the 3/8 rule over the last three cells, keeping 4th-order accuracy.
double integrate_simpson(std::span<const double> f, double dx);

// 4th-order first derivative on a uniform mesh: 5-point centered stencil in
// the interior, one-sided 5-point stencils at the edges. Needs >= 5 samples.
std::vector<double> derivative4(std::span<const double> f, double dx);

// 2nd-order centered first derivative (one-sided at the edges).
std::vector<double> derivative2(std::span<const double> f, double dx);

}  // namespace ewm
