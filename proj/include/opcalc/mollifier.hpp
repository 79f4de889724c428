#pragma once

#include <vector>

namespace opcalc {

// Polynomial supported on [-1, 1], stored by monomial coefficients
// p(v) = sum_k coef[k] v^k. Used for the mollifier kernel family; all
// members vanish at +-1 fast enough that the kernels are C^1 on the line.
class SupportedPoly {
public:
    SupportedPoly() = default;
    explicit SupportedPoly(std::vector<double> coef);

    double operator()(double v) const;       // 0 outside [-1, 1]
    SupportedPoly derivative() const;         // formal derivative, same support
    double moment(int k) const;               // int_{-1}^{1} v^k p(v) dv, exact
    // int_{-1}^{x} p(v) dv, clamped outside the support.
    double integral_from_left(double x) const;
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coef_; }

private:
    std::vector<double> coef_;
};

// Even bump kernel of degree 8 with unit mass and vanishing 2nd and 4th
// moments:
//   phi(v) = (4725 - 44100 v^2 + 119070 v^4 - 124740 v^6 + 45045 v^8)/2048
// on [-1, 1]. The signed shape buys a mollification bias of order u^6
// instead of u^2, which keeps the inner cutoff of the planar quadrature
// coarse. C^1 at the support edges (phi = phi' = 0 there).
const SupportedPoly& mollifier_phi();
const SupportedPoly& mollifier_phi_d1();
const SupportedPoly& mollifier_phi_d2();

// psi(v) = -(v phi(v))' = -(phi + v phi'). Satisfies
// d/du (f * phi_u)(x) = (1/u) (f * psi_u)(x) for the scaled family
// phi_u(v) = phi(v/u)/u. Zero total mass; moments int v^k psi = k mu_k.
const SupportedPoly& mollifier_psi();
const SupportedPoly& mollifier_psi_d1();

// 6th moment of phi (the first nonvanishing one beyond the mass).
double mollifier_mu6();

// J(c, p, P) = int_{-1}^{1} max(c + v, 0)^p P(v) dv for p > -1, where P
// is supported on [-1, 1]. This is the workhorse for convolving edge
// powers with the kernel family. Accurate across the whole range of c:
//   c <= -1      : 0
//   c >  2       : binomial series in 1/c using exact moments of P
//   -1 < c <= 2  : split at the singularity; a finite Taylor sum handles
//                  the singular piece exactly, Gauss panels the rest.
double edge_kernel_integral(double c, double p, const SupportedPoly& P);

} // namespace opcalc
