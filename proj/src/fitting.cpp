#include "opcalc/fitting.hpp"

#include <cmath>

#include "opcalc/errors.hpp"

namespace opcalc {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ParameterError("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ParameterError("fit_line: need at least two points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ParameterError("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::abs(y[i] - (f.intercept + f.slope * x[i]));
        if (r > f.max_abs_residual) f.max_abs_residual = r;
    }
    return f;
}

LineFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ParameterError("fit_power_law: size mismatch");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw DomainError("fit_power_law: nonpositive sample");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

} // namespace opcalc
