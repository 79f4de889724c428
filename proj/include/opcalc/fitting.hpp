#pragma once

#include <vector>

namespace opcalc {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_abs_residual = 0.0; // in the fitted (possibly log) coordinates
};

// Ordinary least-squares line through (x_i, y_i). Needs >= 2 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fits y ~ C * x^p by least squares on (log x, log y). All x and y must be
// strictly positive. Returns slope = p, intercept = log C.
LineFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

} // namespace opcalc
