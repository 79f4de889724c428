#pragma once

#include <vector>

#include "opcalc/extension.hpp"
#include "opcalc/model_function.hpp"

namespace opcalc {

// Norm selector for difference and slice norms.
enum class PNorm {
    l1, // integral over the line
    sup // essential supremum
};

// Index set for the finite-difference smoothness integral: smoothness s,
// norm p, and the difference order n, which must exceed s. The value of n
// does not affect finiteness, only the numbers, so it is part of the index
// and recorded alongside any output.
struct BesovIndex {
    double s = 1.0;
    PNorm p = PNorm::l1;
    int n = 2;
};

struct BesovNormResult {
    // integral of ||delta_t^n f||_p / |t|^{1+s} over t_min <= |t| <= t_max
    double value = 0.0;
    // fitted slope of log ||delta_t^n f||_p against log t over the first
    // decade above t_min, plus the largest log-space fit residual
    double exponent = 0.0;
    double residual = 0.0;
};

// Finite-difference smoothness integral of a model function. The t-range
// is symmetric in sign; only 0 < t_min < t_max is passed. The difference
// norm of an unbounded-support source is integrated out to infinity with
// geometric tail panels; a tail whose octave contributions stop decaying
// is reported as a parameter error (the norm is not finite).
// The outer integral is refined until two successive panel densities agree
// to a relative 1e-6; failure to converge raises an accuracy error
// carrying the last two values.
BesovNormResult finite_difference_besov_norm(const ModelFunction& f,
                                             BesovIndex idx, double t_min,
                                             double t_max);

// L1 or sup norm of the extension field along the horizontal slice at
// height y in (0, y_max].
double slice_norm(const Extension& ext, PNorm p, double y);

// Weighted strip integral of the extension field over y_min <= |y| <= y_max:
//   p = l1:  integral of |omega(x+iy)| dx dy / |y|^s
//   p = sup: integral of sup_x |omega(x+iy)| dy / |y|^s
// Divergence shows up as growth under y_min refinement; that reading is
// the caller's.
double dynkin_integral(const Extension& ext, BesovIndex idx, double y_min);

struct ScalingFit {
    double exponent = 0.0;
    double residual = 0.0; // max |log(value) - fit| over the grid
    bool low_confidence = false;
};

// Least-squares slope of log(slice value) against log y over a decreasing
// positive grid spanning at least two decades. A fit residual above 0.05
// in log space flags the result as low-confidence.
ScalingFit fit_scaling_exponent(const Extension& ext, PNorm mode,
                                const std::vector<double>& y_grid);

} // namespace opcalc
