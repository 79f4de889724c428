#pragma once

#include <complex>
#include <vector>

#include "opcalc/model_function.hpp"

namespace opcalc {

// Almost-analytic continuation of a compactly supported profile f off the
// real axis:
//
//   F(x + iy) = chi(y) sum_{n=0}^{n0} (iy)^n / n! (f^(n) * phi_|y|)(x)
//
// where phi_u is the mollifier at scale u = |y| and chi is a smooth
// vertical cutoff, identically 1 for |y| <= y_max/2 and 0 for
// |y| >= y_max. The d-bar derivative of F vanishes to order n0 at the
// axis wherever f is smooth, which is what makes resolvent integrals
// against it converge fast.
//
// Extensions add: the sum holds the union of the components and evaluates
// omega/tilde as the sum of the parts (each with its own cutoff height).
class Extension {
public:
    Extension(ModelFunctionPtr f, int n0, double pad, double y_max);

    // dbar F at z; conjugate-symmetric: omega(conj z) = conj(omega(z)).
    std::complex<double> omega(std::complex<double> z) const;
    // F itself; equals f on the real axis.
    std::complex<double> tilde(std::complex<double> z) const;

    double y_max() const { return y_max_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    double support_lo() const; // tightest interval holding every component
    double support_hi() const;
    int taylor_order() const; // largest n0 across components

    // x-positions needing local quadrature refinement (edges, jumps).
    std::vector<double> singular_x() const;
    // panel-cut hints (includes window transitions and support edges).
    std::vector<double> structure_x() const;

    friend Extension operator+(const Extension& a, const Extension& b);

private:
    struct Component {
        ModelFunctionPtr f;
        int n0;
        double y_max;
        double sup_lo, sup_hi;
    };

    Extension() = default;
    std::complex<double> omega_upper(double x, double u) const;
    std::complex<double> tilde_upper(double x, double u) const;

    std::vector<Component> comps_;
    double y_max_ = 0.0;
    double x_lo_ = 0.0, x_hi_ = 0.0;
};

} // namespace opcalc
