#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace opcalc {

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w; // weights, sum to 2
};

// Gauss-Legendre rule with n points. Rules are computed once (Newton on the
// Legendre recurrence, accurate to machine precision) and cached.
const GaussRule& gauss_legendre(int n);

// Integral of f over [a, b] with a single n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n);

// Composite rule: [a, b] split into `panels` equal panels, n points each.
double integrate_composite(const std::function<double(double)>& f, double a,
                           double b, int panels, int n);

// Adaptive composite quadrature on [a, b] that respects a list of interior
// breakpoints (integrand may have kinks or jumps there; panels never
// straddle one). Panel count is doubled until two successive composite
// values agree within tol * (1 + |value|) or max_doublings is exhausted,
// in which case AccuracyError is thrown.
double integrate_breakpoints(const std::function<double(double)>& f, double a,
                             double b, std::vector<double> breakpoints,
                             double tol, int n = 16, int max_doublings = 12);

// Integral over [a, b] where f may be non-smooth at one or both endpoints.
// Panels shrink geometrically (ratio 1/2) toward each flagged endpoint,
// down to a relative scale of 2^-levels, with an n-point rule per panel.
double integrate_endpoint_refined(const std::function<double(double)>& f,
                                  double a, double b, bool refine_left,
                                  bool refine_right, int levels = 40,
                                  int n = 16);

// Geometrically spaced grid from lo to hi with `per_decade` points per
// factor of 10, endpoints included. Requires 0 < lo < hi.
std::vector<double> log_grid(double lo, double hi, int per_decade);

} // namespace opcalc
