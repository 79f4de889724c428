#pragma once

#include <memory>
#include <string>
#include <vector>

#include "opcalc/mollifier.hpp"
#include "opcalc/taylor.hpp"

namespace opcalc {

// C-infinity monotone step: 0 for t <= 0, 1 for t >= 1, built from
// exp(-1/t) ratios. Returns the jet in t up to the requested order.
Jet smoothstep_jet(double t, int order);

// Values of the mollified jets of f at horizontal position x and kernel
// scale u: conv_phi[n] = (f^(n) * phi_u)(x) for n = 0..n0+1 and
// conv_psi[n] = (f^(n) * psi_u)(x) for n = 0..n0, where phi is the
// mollifier and psi its scale derivative (d/du of phi_u = psi_u / u).
// Derivatives that do not exist classically are pushed onto the kernel.
struct MollifiedJet {
    std::vector<double> conv_phi;
    std::vector<double> conv_psi;
};

// A profile function on the real line, with enough structure for the
// extension machinery: pointwise values, classical derivatives away from
// singular points, and exact-or-quadrature mollified jets.
class ModelFunction {
public:
    virtual ~ModelFunction() = default;

    virtual double value(double x) const = 0;
    // n-th classical derivative; only called away from singular_points().
    virtual double derivative(int n, double x) const = 0;

    // Largest Taylor order n0 the extension may request.
    virtual int max_taylor_order() const = 0;

    // Locations where f fails to be smooth (edges, jumps).
    virtual std::vector<double> singular_points() const = 0;
    // Hints for quadrature cell boundaries (includes singular points and
    // window transition endpoints).
    virtual std::vector<double> structure_points() const = 0;

    // Support interval [lo, hi]; lo may be -infinity for one-sided tails.
    virtual double support_lo() const = 0;
    virtual double support_hi() const = 0;
    bool compactly_supported() const;

    // Largest admissible kernel scale (infinity unless a cutoff window
    // must be kept clear of singular points).
    virtual double max_kernel_scale() const;

    virtual MollifiedJet mollified_jet(double x, double u, int n0) const = 0;

    virtual std::string describe() const = 0;
};

using ModelFunctionPtr = std::shared_ptr<const ModelFunction>;

// (a - x)^gamma for x < a, zero above a. gamma > 0. Supported on
// (-inf, a]: not compact, so extensions require a cutoff window first.
ModelFunctionPtr edge_power(double gamma, double a);

// Indicator of (-inf, a): 1 below a, 0 at and above.
ModelFunctionPtr indicator_below(double a);

// exp(1 - 1/(1 - u^2)) with u = (x - center)/width; support
// [center - width, center + width], value 1 at the center.
ModelFunctionPtr smooth_bump(double center, double width);

// base(x) * W(x) where W is a C-infinity window: 0 outside [w_lo, w_hi],
// 1 on the middle part, with transition ramps of length (w_hi - w_lo)/8
// at each end. Singular points of the base must avoid the ramps; the
// construction enforces a positive separation and caps the admissible
// kernel scale at half of it.
ModelFunctionPtr cutoff_product(ModelFunctionPtr base, double w_lo, double w_hi);

// Writes f_{gamma,a} as f0 + f1 with f0 = cutoff_product(f, window)
// compactly supported and f1 = f - f0 smooth on [w_lo, infinity) and
// vanishing above a. Requires a in (w_lo, w_hi).
std::pair<ModelFunctionPtr, ModelFunctionPtr>
split_edge_function(double gamma, double a, double w_lo, double w_hi);

} // namespace opcalc
