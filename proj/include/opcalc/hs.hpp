#pragma once

#include <complex>
#include <vector>

#include "opcalc/extension.hpp"
#include "opcalc/linalg.hpp"

namespace opcalc {

using linalg::HermitianOperator;
using linalg::Matrix;

// One upper-half-plane node with its (positive) area weight and the cached
// dbar density of the extension the quadrature was built for.
struct PlanarNode {
    std::complex<double> z;
    double w = 0.0;
    std::complex<double> omega;
};

// Quadrature covering the strip 0 < Im z < y_max of an extension. The
// y-range splits into a fixed stack of dyadic bands (six for smooth
// sources, ten when singular abscissas are present; below the bottom band
// the field's contribution is beneath the working accuracy). Within each
// band the x-range is covered by Gauss-Legendre panels a quarter unit wide
// at round 0, graded dyadically toward structural abscissas, and each
// singular abscissa owns a wedge mesh in the slope coordinate (x - s)/y
// that tracks the kink lines of the extension plus an octave ladder of
// panel breaks where the wedge hands over to the tensor mesh. A refinement
// round halves the panel width; the band stack is fixed.
//
// Only upper-half-plane nodes are stored. The integrals are understood to
// run over both half-planes; consumers add each node's conjugate partner
// through the symmetry omega(conj z) = conj omega(z), which keeps outputs
// exactly Hermitian. Nodes where omega vanishes identically are dropped.
class PlanarQuadrature {
public:
    PlanarQuadrature(const Extension& ext, int round);

    const std::vector<PlanarNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    int round() const { return round_; }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

private:
    std::vector<PlanarNode> nodes_;
    int round_ = 0;
    double y_min_ = 0.0;
    double y_max_ = 0.0;
};

// Scalar Cauchy transform against the quadrature: reconstructs f(lambda)
// as (1/pi) sum w 2Re(omega(z)/(lambda - z)).
double cauchy_reconstruct(const Extension& ext, const PlanarQuadrature& quad,
                          double lambda);

enum class ResolventMode {
    tridiagonal, // one-time Householder reduction, then O(n^2) per node
    dense        // literal dense LU at every node; reference cross-check
};

// f(H) = (1/pi) Int omega(z) (H - z)^{-1} dA over both half-planes.
// The result is Hermitian by construction; a residual skew check guards
// the accumulation arithmetic.
Matrix hs_apply(const HermitianOperator& h, const Extension& ext,
                const PlanarQuadrature& quad,
                ResolventMode mode = ResolventMode::tridiagonal);

// f(H0+V) - f(H0) = -(1/pi) Int omega(z) R(z) V R0(z) dA.
Matrix hs_difference(const HermitianOperator& h0, const Matrix& v,
                     const Extension& ext, const PlanarQuadrature& quad,
                     ResolventMode mode = ResolventMode::tridiagonal);

// f(H0+V) - f(H0) - d/da f(H0 + aV)|_{a=0}
//   = (1/pi) Int omega(z) R0(z) V R(z) V R0(z) dA.
Matrix hs_second_difference(const HermitianOperator& h0, const Matrix& v,
                            const Extension& ext, const PlanarQuadrature& quad,
                            ResolventMode mode = ResolventMode::tridiagonal);

// Refinement drivers: rebuild the quadrature round after round until two
// successive outputs differ by less than tol in operator norm; the coarser
// round is then discarded. AccuracyError after max_round rounds, carrying
// the last two gaps.
struct RefinedResult {
    Matrix op;
    int round = 0;      // round index of the accepted output
    double delta = 0.0; // operator-norm gap between the last two rounds
};

RefinedResult hs_apply_refined(const HermitianOperator& h, const Extension& ext,
                               double tol, int max_round = 5,
                               ResolventMode mode = ResolventMode::tridiagonal);
RefinedResult hs_difference_refined(const HermitianOperator& h0, const Matrix& v,
                                    const Extension& ext, double tol,
                                    int max_round = 5,
                                    ResolventMode mode = ResolventMode::tridiagonal);
RefinedResult hs_second_difference_refined(
    const HermitianOperator& h0, const Matrix& v, const Extension& ext,
    double tol, int max_round = 5,
    ResolventMode mode = ResolventMode::tridiagonal);

// ---------------------------------------------------------------------------
// Trace-norm scan of the resolvent difference across a spectral window.

struct ProfilePoint {
    std::complex<double> z;
    double value = 0.0;       // S1 norm of the (compensated) difference
    double compensated = 0.0; // value * |Im z|
};

struct IntegrandProfile {
    std::vector<ProfilePoint> points;
    double sup_compensated = 0.0;
    int kappa = 0;
    double energy = 0.0; // E in the damping factor R0(-E)^kappa
};

// Scans z = x + iy with x on nx uniform points across [delta_lo, delta_hi]
// (the midpoint when nx = 1) and y from y_grid, recording
// ||R0(-E)^kappa (R(z) - R0(z)) R0(-E)^kappa||_{S1} and its product with
// |y|. kappa < 0 selects the smallest integer exceeding d/4 - 1; energy
// <= 0 selects 1 + |min eig H| + |min eig H0|.
IntegrandProfile trace_norm_integrand_profile(
    const HermitianOperator& h0, const Matrix& v, double delta_lo,
    double delta_hi, int nx, const std::vector<double>& y_grid,
    int kappa = -1, int dimension = 1, double energy = 0.0);

// Radial reduction of Int dp / (||p|^2 - z|^2 (|p|^2 + E)^{2 kappa}) over
// R^d. Requires kappa > d/4 - 1 for convergence at infinity, E > 0 when
// kappa > 0, and Im z != 0.
double momentum_integral(int d, double kappa, double energy,
                         std::complex<double> z);

} // namespace opcalc
