#include <doctest.h>

#include <cmath>
#include <vector>

#include "opcalc/errors.hpp"
#include "opcalc/mollifier.hpp"
#include "opcalc/quadrature.hpp"

using namespace opcalc;

TEST_SUITE_BEGIN("mollifier");

// The kernel coefficients are exact dyadic rationals, so the low moments
// come out as exact rationals too: mass 1, vanishing 2nd and 4th moments,
// 6th moment exactly 1/143.
TEST_CASE("kernel moments are the designed exact rationals") {
    const auto& phi = mollifier_phi();
    CHECK(phi.moment(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(phi.moment(1)) < 1e-16);
    CHECK(std::abs(phi.moment(2)) < 1e-15);
    CHECK(std::abs(phi.moment(3)) < 1e-16);
    CHECK(std::abs(phi.moment(4)) < 1e-15);
    CHECK(phi.moment(6) == doctest::Approx(1.0 / 143.0).epsilon(1e-14));
    CHECK(mollifier_mu6() == doctest::Approx(1.0 / 143.0).epsilon(1e-14));
}

TEST_CASE("kernel is C^1 at the support edges") {
    const auto& phi = mollifier_phi();
    const auto& dphi = mollifier_phi_d1();
    CHECK(std::abs(phi(1.0)) < 1e-13);
    CHECK(std::abs(phi(-1.0)) < 1e-13);
    CHECK(std::abs(dphi(1.0)) < 1e-12);
    CHECK(std::abs(dphi(-1.0)) < 1e-12);
    CHECK(phi(0.0) == doctest::Approx(4725.0 / 2048.0).epsilon(1e-15));
    // outside the support everything is zero
    CHECK(phi(1.5) == 0.0);
    CHECK(dphi(-2.0) == 0.0);
}

TEST_CASE("scale kernel psi = -(phi + v phi') pointwise and in moments") {
    const auto& phi = mollifier_phi();
    const auto& dphi = mollifier_phi_d1();
    const auto& psi = mollifier_psi();
    for (double v : {-0.9, -0.4, 0.0, 0.3, 0.77, 0.999}) {
        CHECK(psi(v) == doctest::Approx(-(phi(v) + v * dphi(v))).epsilon(1e-13));
    }
    CHECK(std::abs(psi(1.0)) < 1e-12);
    CHECK(std::abs(psi(-1.0)) < 1e-12);
    // int v^k psi = k * mu_k(phi)
    CHECK(std::abs(psi.moment(0)) < 1e-14);
    CHECK(std::abs(psi.moment(2)) < 1e-14);
    CHECK(std::abs(psi.moment(4)) < 1e-13);
    CHECK(psi.moment(6) == doctest::Approx(6.0 / 143.0).epsilon(1e-13));
}

// Functional meaning of psi: u d/du (f * phi_u) = f * psi_u. For f = x^6
// the convolutions are exact polynomials in u via the moments:
// f * phi_u = x^6 + u^6/143, f * psi_u = 6 u^6 / 143.
TEST_CASE("psi implements the scale derivative of the mollification") {
    const auto& phi = mollifier_phi();
    const auto& psi = mollifier_psi();
    const auto& rule = gauss_legendre(32);
    const double x = 0.7, u = 0.31;
    double conv_phi = 0.0, conv_psi = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = x - u * rule.x[i];
        const double f = std::pow(t, 6);
        conv_phi += rule.w[i] * f * phi(rule.x[i]);
        conv_psi += rule.w[i] * f * psi(rule.x[i]);
    }
    const double u6 = std::pow(u, 6);
    CHECK(conv_phi == doctest::Approx(std::pow(x, 6) + u6 / 143.0).epsilon(1e-13));
    CHECK(conv_psi == doctest::Approx(6.0 * u6 / 143.0).epsilon(1e-7));
}

TEST_CASE("left integral of the kernel behaves like a CDF") {
    const auto& phi = mollifier_phi();
    CHECK(phi.integral_from_left(-1.0) == 0.0);
    CHECK(phi.integral_from_left(-2.5) == 0.0);
    CHECK(phi.integral_from_left(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi.integral_from_left(7.0) == doctest::Approx(1.0).epsilon(1e-15));
    // even kernel: half the mass below 0
    CHECK(phi.integral_from_left(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    const double direct = integrate_gl([&](double v) { return phi(v); }, -1.0, 0.3, 64);
    CHECK(phi.integral_from_left(0.3) == doctest::Approx(direct).epsilon(1e-14));
}

namespace {

// Independent slow evaluation of J(c,p,P) for -1 < c <= 2: expand
// P(w - c) by brute-force binomial expansion in long double and integrate
// each monomial in closed form. Mild cancellation, absorbed by the extra
// precision.
double brute_substitution(double c, double p, const SupportedPoly& P) {
    const auto& coef = P.coefficients();
    const int deg = P.degree();
    std::vector<long double> e(deg + 1, 0.0L);
    for (int k = 0; k <= deg; ++k) {
        // v^k = (w - c)^k = sum_j C(k,j) w^j (-c)^{k-j}
        long double b = 1.0L;
        for (int j = 0; j <= k; ++j) {
            e[j] += (long double)coef[k] * b * powl((long double)-c, k - j);
            b = b * (k - j) / (j + 1);
        }
    }
    const long double w_lo = c > 1.0 ? (long double)(c - 1.0) : 0.0L;
    const long double w_hi = (long double)(c + 1.0);
    long double acc = 0.0L;
    for (int j = 0; j <= deg; ++j) {
        const long double ex = (long double)p + j + 1;
        const long double hi = powl(w_hi, ex);
        const long double lo = w_lo > 0.0L ? powl(w_lo, ex) : 0.0L;
        acc += e[j] * (hi - lo) / ex;
    }
    return (double)acc;
}

// Independent oracle for c > 2: the integrand is smooth, plain Gauss.
double brute_smooth(double c, double p, const SupportedPoly& P) {
    return integrate_gl([&](double v) { return std::pow(c + v, p) * P(v); }, -1.0,
                        1.0, 64);
}

} // namespace

TEST_CASE("edge kernel integral: exact special cases") {
    const auto& phi = mollifier_phi();
    // p = 0: plain kernel mass above the cut.
    for (double c : {-0.5, 0.2, 0.9}) {
        const double expect = 1.0 - phi.integral_from_left(-c);
        CHECK(edge_kernel_integral(c, 0.0, phi) == doctest::Approx(expect).epsilon(1e-13));
    }
    CHECK(edge_kernel_integral(1.5, 0.0, phi) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(edge_kernel_integral(100.0, 0.0, phi) == doctest::Approx(1.0).epsilon(1e-13));
    // p = 1 with c >= 1: int (c+v) phi = c because the first moment vanishes.
    for (double c : {1.0, 1.5, 2.0, 2.5, 5.0, 1e4}) {
        CHECK(edge_kernel_integral(c, 1.0, phi) ==
              doctest::Approx(c).epsilon(1e-13));
    }
    // p = 2 with c >= 1: c^2 exactly (second moment vanishes too).
    for (double c : {1.2, 3.0, 10.0}) {
        CHECK(edge_kernel_integral(c, 2.0, phi) ==
              doctest::Approx(c * c).epsilon(1e-13));
    }
}

// The expansion oracle cancels catastrophically once c-powers grow, so it
// covers the lower range only; the upper range gets a heavy quadrature
// oracle below, where the singularity has left the domain.
TEST_CASE("edge kernel integral matches the long-double expansion oracle") {
    const std::vector<const SupportedPoly*> kernels = {
        &mollifier_phi(), &mollifier_phi_d1(), &mollifier_phi_d2(),
        &mollifier_psi(), &mollifier_psi_d1()};
    const std::vector<double> cs = {-0.99, -0.6, -0.1, 0.0, 0.15, 0.5, 0.85, 1.0};
    const std::vector<double> ps = {-0.75, -0.5, -0.25, 0.5, 1.5};
    for (const auto* P : kernels) {
        for (double c : cs) {
            for (double p : ps) {
                const double got = edge_kernel_integral(c, p, *P);
                const double want = brute_substitution(c, p, *P);
                CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
            }
        }
    }
}

TEST_CASE("edge kernel integral matches heavy quadrature above the singular range") {
    const std::vector<const SupportedPoly*> kernels = {
        &mollifier_phi(), &mollifier_phi_d1(), &mollifier_phi_d2(),
        &mollifier_psi(), &mollifier_psi_d1()};
    const auto& rule = gauss_legendre(16);
    for (const auto* P : kernels) {
        for (double c : {1.05, 1.25, 1.45, 1.6, 1.95, 2.0}) {
            for (double p : {-0.75, -0.5, -0.25, 0.5, 1.5}) {
                // w^p is smooth on [c-1, c+1] since c > 1
                const double w_lo = c - 1.0, w_hi = c + 1.0;
                double want = 0.0;
                const int N = 2000;
                for (int k = 0; k < N; ++k) {
                    const double a = w_lo + (w_hi - w_lo) * k / N;
                    const double b = w_lo + (w_hi - w_lo) * (k + 1) / N;
                    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                    for (std::size_t i = 0; i < rule.x.size(); ++i) {
                        const double w = mid + half * rule.x[i];
                        want += half * rule.w[i] * std::pow(w, p) * (*P)(w - c);
                    }
                }
                const double got = edge_kernel_integral(c, p, *P);
                CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
            }
        }
    }
}

TEST_CASE("edge kernel integral matches plain quadrature for large offsets") {
    const std::vector<const SupportedPoly*> kernels = {
        &mollifier_phi(), &mollifier_phi_d2(), &mollifier_psi()};
    for (const auto* P : kernels) {
        for (double c : {2.001, 2.5, 4.0, 20.0, 1000.0}) {
            for (double p : {-0.75, -0.25, 0.5, 1.5}) {
                const double got = edge_kernel_integral(c, p, *P);
                const double want = brute_smooth(c, p, *P);
                // The plain-quadrature oracle accumulates roundoff on the
                // integrand scale c^p * max|P|, which dominates when the
                // vanishing moments cancel the value to near zero.
                const double slack = 1e-13 * std::pow(c, std::max(p, 0.0));
                CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)) + slack);
            }
        }
    }
}

TEST_CASE("edge kernel integral is continuous across the branch seam") {
    // gap small enough that the genuine dJ/dc variation is ~1e-12
    for (double p : {-0.75, 0.5, 1.5}) {
        const double below = edge_kernel_integral(2.0 - 1e-12, p, mollifier_phi());
        const double above = edge_kernel_integral(2.0 + 1e-12, p, mollifier_phi());
        CHECK(std::abs(below - above) <= 1e-10 * (1.0 + std::abs(above)));
    }
    // same at the piecewise seam c = 1 inside the substitution branch
    for (double p : {-0.75, 0.5, 1.5}) {
        const double below = edge_kernel_integral(1.0 - 1e-12, p, mollifier_phi_d1());
        const double above = edge_kernel_integral(1.0 + 1e-12, p, mollifier_phi_d1());
        CHECK(std::abs(below - above) <= 1e-10 * (1.0 + std::abs(above)));
    }
}

TEST_CASE("edge kernel integral input validation") {
    CHECK(edge_kernel_integral(-1.0, 0.5, mollifier_phi()) == 0.0);
    CHECK(edge_kernel_integral(-3.7, -0.5, mollifier_phi()) == 0.0);
    CHECK_THROWS_AS(edge_kernel_integral(0.5, -1.0, mollifier_phi()), ParameterError);
    CHECK_THROWS_AS(edge_kernel_integral(0.5, -1.5, mollifier_phi()), ParameterError);
}

TEST_SUITE_END();
