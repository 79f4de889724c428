#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "opcalc/hs.hpp"
#include "opcalc/linalg.hpp"
#include "opcalc/model_function.hpp"

namespace opcalc {

using linalg::cplx;

// ---------------------------------------------------------------------------
// Lattice boxes.

// Dirichlet box (-L, L)^d with spacing h on a staggered grid: per axis the
// sites are x_i = -L + (i + 1/2) h, i = 0..n-1 with n = 2L/h. Staggering
// keeps every site strictly inside the box and gives the discrete Laplacian
// the closed-form eigenvalues (2/h^2)(1 - cos(pi m h / (2L + h))).
struct LatticeSpec {
    int d = 1;                // 1, 2, or 3
    double half_width = 25.0; // L
    double spacing = 0.1;     // h; 2L/h must be an integer
    int site_cap = 4096;      // dense-algebra budget
};

// Validated 2L/h. ParameterError on malformed specs.
int lattice_axis_points(const LatticeSpec& spec);
// (2L/h)^d; ResourceError above spec.site_cap.
int lattice_site_count(const LatticeSpec& spec);
// The staggered abscissas of one axis, ascending.
std::vector<double> lattice_axis(const LatticeSpec& spec);

// Closed-form eigenvalues of the one-axis Dirichlet Laplacian, ascending:
// (2/h^2)(1 - cos(pi m h / (2L + h))), m = 1..n.
std::vector<double> laplacian_axis_eigenvalues(const LatticeSpec& spec);

// Number of free-lattice eigenvalues (d-fold sums of axis eigenvalues)
// strictly below mu. Closed form per axis, so cheap even at the site cap.
long lattice_free_count_below(const LatticeSpec& spec, double mu);

// ---------------------------------------------------------------------------
// Potentials.

// Real potential profiles V(x) = depth * shape(x) with shape(0) = 1. Wells
// take negative depth. In d >= 2 the profile is applied radially, V(|x|).
class Potential {
public:
    enum class Family { gaussian, sech2, compact_bump, power_decay };

    // depth * exp(-((x - center)/width)^2)
    static Potential gaussian(double depth, double width, double center = 0.0);
    // depth / cosh^2(x / width)
    static Potential sech2(double depth, double width);
    // depth * exp(1 - 1/(1 - (x/radius)^2)) inside |x| < radius, 0 outside
    static Potential compact_bump(double depth, double radius);
    // depth * (1 + |x|)^{-rho}; |V| meets this envelope exactly
    static Potential power_decay(double depth, double rho);

    double operator()(double x) const;
    // Value at a d-vector through the radial profile.
    double value_at(const std::array<double, 3>& x, int d) const;

    Family family() const { return family_; }
    double depth() const { return depth_; }
    double rho() const; // power_decay only; ParameterError otherwise

    // Radius beyond which |V| <= rel * |depth| (the exact support edge for
    // compact_bump). rel in (0, 1).
    double decay_radius(double rel) const;
    bool compactly_supported() const { return family_ == Family::compact_bump; }
    std::string describe() const;

private:
    Potential(Family f, double depth, double p1, double p2);
    Family family_;
    double depth_;
    double par1_; // width / radius / rho
    double par2_; // gaussian center
};

// The cube-sum norm sum_n (int_{Q_n} |V|^2 dx)^{1/2} over unit cubes
// Q_n = n + (-1/2, 1/2)^d, truncated once the analytic tail bound drops
// below 1e-10 of the running total. DivergenceError for power_decay with
// rho <= d/2 (the cube sums then fail to converge).
double l1l2_norm(const Potential& v, int d);

// ---------------------------------------------------------------------------
// Lattice Schrodinger pairs.

struct LatticePair {
    linalg::HermitianOperator h;  // -Delta_h + diag V
    linalg::HermitianOperator h0; // -Delta_h
};

// Dense Dirichlet discretization: diagonal 2d/h^2 + V(x_i), off-diagonal
// -1/h^2 between axis neighbors.
LatticePair discretize(const LatticeSpec& spec, const Potential& v);

// d = 1 only: the same Hamiltonian in symmetric-tridiagonal form, for
// eigenvalue work on boxes far beyond the dense cap. Pass zero_potential =
// true for the free operator.
linalg::SymTri tridiagonal_hamiltonian(const LatticeSpec& spec, const Potential& v,
                                       bool zero_potential = false);

// ---------------------------------------------------------------------------
// 1D scattering: Jost solutions, Wronskian, resolvent kernel.

// One Jost solution of -theta'' + V theta = k^2 theta on a uniform grid
// over [-R, R], R the radius where |V| falls below 1e-12 |depth|. side = +1
// integrates inward from +R with data e^{+ikx} (the theta_+ solution),
// side = -1 from -R with e^{-ikx}.
struct JostSolution {
    cplx k;
    int side = +1;
    std::vector<double> x;      // shared uniform grid, ascending
    std::vector<cplx> theta;    // solution samples
    std::vector<cplx> dtheta;   // derivative samples
};

// Adaptive embedded Runge-Kutta integration; requires Im k >= 0 and k != 0.
// AccuracyError if the step size underflows (stiff parameters).
JostSolution jost_solve(const Potential& v, cplx k, int side);

// w = theta_-' theta_+ - theta_- theta_+', averaged over five interior
// sample points; AccuracyError if the five values spread by more than
// 1e-6 relative. Free case: -2ik.
cplx wronskian(const JostSolution& plus, const JostSolution& minus);

// Resolvent kernel R(k^2)(x, x') = theta_+(x_>) theta_-(x_<) / w. Holds the
// solved pair; evaluation between grid nodes uses two-point quintic Hermite
// interpolation fed by the ODE (theta'' = (V - k^2) theta).
class ResolventKernel1D {
public:
    // SingularityError when |w| < 1e-12 (resonance / bound-state energy).
    ResolventKernel1D(const Potential& v, cplx k);

    cplx k() const { return k_; }
    cplx w() const { return w_; }
    double radius() const { return plus_.x.back(); }
    const JostSolution& plus() const { return plus_; }
    const JostSolution& minus() const { return minus_; }

    cplx operator()(double x, double xp) const;
    // sup |kernel| over a grid scan (the L1 -> Linf surrogate).
    double sup_abs(const std::vector<double>& xs) const;

private:
    cplx theta_at(const JostSolution& s, double x) const;
    Potential v_;
    cplx k_, w_;
    JostSolution plus_, minus_;
};

cplx resolvent_kernel_1d(const Potential& v, cplx k, double x, double xp);

// ---------------------------------------------------------------------------
// Limiting-absorption scan.

enum class LapMode {
    continuum, // Jost-kernel integral operator, sampled on the support grid
    lattice    // exact matrix norm on a Dirichlet box
};

// Records ||sqrt|V| R(z) sqrt|V||| for z = x + iy, x on nx uniform points
// across [x_lo, x_hi], y from y_ladder; value * |y| goes into the
// compensated column. The signed square root sqrt(V) = sgn(V) sqrt|V|
// differs from sqrt|V| by a diagonal sign unitary, so the recorded norm is
// the same either way. The lattice mode needs a spec; continuum is d = 1.
IntegrandProfile lap_sup_check(const Potential& v, double x_lo, double x_hi,
                               int nx, const std::vector<double>& y_ladder,
                               LapMode mode = LapMode::continuum,
                               const LatticeSpec* lattice = nullptr);

// ---------------------------------------------------------------------------
// Spectral shift function and the trace formula.

struct ScatteringData1D {
    std::vector<double> k_grid;   // ascending, k = sqrt(lambda) for lambda > 0
    std::vector<cplx> w;          // Wronskian per k
    std::vector<cplx> a;          // w / (-2ik), -> 1 as k -> infinity
    std::vector<double> x_samples;            // coarse shared x-grid
    std::vector<std::vector<cplx>> theta_plus;  // per k, on x_samples
    std::vector<std::vector<cplx>> theta_minus; // per k, on x_samples
    std::vector<double> lambda_grid; // as requested, ascending
    std::vector<double> xi;          // spectral shift samples per lambda
    std::vector<double> bound_states; // ascending negative eigenvalues
};

// xi(lambda) = -(1/pi) arg a(sqrt(lambda)) for lambda > 0, with the branch
// unwound from large k (where a -> 1) by nearest continuation; adjacent
// phase gaps above pi/2 are bisected with fresh solves, and gaps that stay
// above pi raise an AccuracyError naming the interval. For lambda < 0,
// xi = -#{bound states below lambda} from a fine-lattice eigenvalue count.
ScatteringData1D ssf_from_scattering(const Potential& v,
                                     std::vector<double> lambda_grid);

// Independent cross-check: smoothed eigenvalue-counting difference
// N_H - N_H0 of the boxed pair (same box, same boundary condition), with a
// quintic-smoothstep mollifier of the given width.
std::vector<double> ssf_box_counting(const Potential& v, double box_half_width,
                                     const std::vector<double>& lambda_grid,
                                     double smoothing_width);

struct TraceFormulaCheck {
    double lhs = 0.0;            // tr(f(H_L) - f(H0_L)) on the box
    double rhs = 0.0;            // integral of xi(lambda) f'(lambda)
    double relative_error = 0.0; // |lhs - rhs| / max(|lhs|, |rhs|)
};

// Trace-formula residual: boxed eigenvalue sums against the scattering-side
// spectral shift integral. f must be supported in (0, infinity).
TraceFormulaCheck krein_trace_check(const Potential& v, const ModelFunction& f,
                                    double box_half_width, double h = 0.05);

// ---------------------------------------------------------------------------
// Boxed trace-norm of f(H) - f(H0).

// ||f(H_L) - f(H0_L)||_{S1} for d = 1 boxes, where f vanishes above a
// finite cutoff (indicator or edge profile). Both functions of the box pair
// live on the spectral subspaces below the cutoff, so the difference has
// rank at most #{eigenvalues below it} of each operator; the norm is
// computed exactly from that subspace pair without dense n^3 work.
double boxed_s1_function_difference(const Potential& v, const ModelFunction& f,
                                    double box_half_width, double h);

} // namespace opcalc
