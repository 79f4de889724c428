#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "opcalc/errors.hpp"
#include "opcalc/extension.hpp"
#include "opcalc/hs.hpp"
#include "opcalc/linalg.hpp"
#include "opcalc/model_function.hpp"

using namespace opcalc;
using cplx = std::complex<double>;
using linalg::HermitianOperator;
using linalg::Matrix;

TEST_SUITE_BEGIN("hs");

namespace {

// The quadrature builds dominate this suite's runtime, so the fixtures are
// shared across cases.
const Extension& bump_ext() {
    static const Extension e(smooth_bump(0.0, 1.0), 4, 0.5, 0.4);
    return e;
}
const Extension& edge_ext() {
    static const Extension e(cutoff_product(edge_power(0.5, 1.0), -1.0, 2.0), 2,
                             0.5, 0.3);
    return e;
}
const Extension& indicator_ext() {
    static const Extension e(cutoff_product(indicator_below(1.0), -1.0, 2.0), 2,
                             0.5, 0.3);
    return e;
}
const PlanarQuadrature& bump_q(int round) {
    static const PlanarQuadrature q0(bump_ext(), 0);
    static const PlanarQuadrature q1(bump_ext(), 1);
    static const PlanarQuadrature q2(bump_ext(), 2);
    return round == 0 ? q0 : round == 1 ? q1 : q2;
}

double bump_value(double t) { return smooth_bump(0.0, 1.0)->value(t); }

} // namespace

TEST_CASE("planar quadrature geometry invariants") {
    const auto& q = bump_q(0);
    CHECK(q.round() == 0);
    CHECK(q.y_max() == 0.4);
    CHECK(q.y_min() == doctest::Approx(0.4 / 64.0).epsilon(1e-15));
    for (const auto& nd : q.nodes()) {
        CHECK(nd.w > 0.0);
        CHECK(nd.z.imag() > 0.0);
        CHECK(nd.z.imag() < 0.4);
        CHECK(nd.omega != cplx(0.0, 0.0)); // zero-field nodes are pruned
    }

    // Node counts are pinned: they change only when the mesh layout does.
    CHECK(bump_q(0).size() == 18744);
    CHECK(bump_q(1).size() == 24204);
    const PlanarQuadrature qe(edge_ext(), 0);
    CHECK(qe.size() == 32350);
    CHECK(qe.y_min() == doctest::Approx(0.3 / 1024.0).epsilon(1e-15));
    const PlanarQuadrature qi(indicator_ext(), 0);
    CHECK(qi.size() == 21567);

    CHECK_THROWS_AS(PlanarQuadrature(bump_ext(), -1), ParameterError);
    CHECK_THROWS_AS(PlanarQuadrature(bump_ext(), 9), ParameterError);

    // Two singular abscissas closer than four smoothing heights cannot get
    // disjoint wedge meshes.
    const Extension close_pair =
        Extension(cutoff_product(edge_power(0.5, 1.0), -1.0, 2.0), 2, 0.5, 0.3) +
        Extension(cutoff_product(edge_power(0.5, 1.8), -0.2, 2.8), 2, 0.5, 0.3);
    CHECK_THROWS_AS(PlanarQuadrature(close_pair, 0), ParameterError);
}

TEST_CASE("cauchy reconstruction of a smooth bump") {
    const PlanarQuadrature& q = bump_q(2);
    for (double lam : {-0.8, 0.0, 0.55}) {
        const double cp = cauchy_reconstruct(bump_ext(), q, lam);
        CHECK(std::abs(cp - bump_value(lam)) < 1e-7);
    }
    // Outside the support the transform decays to zero.
    CHECK(std::abs(cauchy_reconstruct(bump_ext(), q, 1.2)) < 1e-7);
    CHECK(std::abs(cauchy_reconstruct(bump_ext(), q, -2.0)) < 1e-7);
}

TEST_CASE("cauchy reconstruction of a windowed edge power") {
    const PlanarQuadrature q(edge_ext(), 2);
    // Flat part of the window, away from the edge.
    CHECK(std::abs(cauchy_reconstruct(edge_ext(), q, 0.5) - std::sqrt(0.5)) < 1e-6);
    CHECK(std::abs(cauchy_reconstruct(edge_ext(), q, 0.9) - std::sqrt(0.1)) < 5e-6);
    CHECK(std::abs(cauchy_reconstruct(edge_ext(), q, 1.1)) < 1e-6);
    // At the edge itself the reconstruction sees the mass of the field
    // truncated at y_min; the value is stable across rounds.
    CHECK(cauchy_reconstruct(edge_ext(), q, 1.0) ==
          doctest::Approx(4.554101652806967e-03).epsilon(1e-4));
}

TEST_CASE("cauchy reconstruction of a windowed indicator") {
    const PlanarQuadrature q(indicator_ext(), 2);
    CHECK(std::abs(cauchy_reconstruct(indicator_ext(), q, 0.3) - 1.0) < 1e-7);
    CHECK(std::abs(cauchy_reconstruct(indicator_ext(), q, 1.7)) < 1e-7);
    // A symmetric mollifier splits the jump evenly.
    CHECK(std::abs(cauchy_reconstruct(indicator_ext(), q, 1.0) - 0.5) < 1e-6);
}

TEST_CASE("a diagonal operator reproduces the scalar transform") {
    const PlanarQuadrature& q = bump_q(0);
    const std::vector<double> lam = {-1.1, -0.6, 0.0, 0.3, 0.8, 1.2};
    const int n = static_cast<int>(lam.size());
    Matrix h(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = lam[i];
    const Matrix a = hs_apply(HermitianOperator(h), bump_ext(), q);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j)
                CHECK(std::abs(a(i, i) - cauchy_reconstruct(bump_ext(), q, lam[i])) <
                      1e-13);
            else
                CHECK(std::abs(a(i, j)) < 1e-13);
        }
}

TEST_CASE("tridiagonal and dense resolvent paths agree") {
    const PlanarQuadrature& q = bump_q(0);
    const HermitianOperator h(linalg::random_hermitian_spectrum(16, 11, -1.4, 1.4));
    const Matrix a = hs_apply(h, bump_ext(), q, ResolventMode::tridiagonal);
    const Matrix b = hs_apply(h, bump_ext(), q, ResolventMode::dense);
    CHECK(linalg::max_abs(linalg::sub(a, b)) < 1e-12);
}

TEST_CASE("operator calculus matches the spectral calculus") {
    const PlanarQuadrature& q = bump_q(2);
    const HermitianOperator h(linalg::random_hermitian_spectrum(20, 3, -1.4, 1.4));
    const Matrix a = hs_apply(h, bump_ext(), q);
    const Matrix b = h.apply_function(bump_value);
    CHECK(linalg::operator_norm(linalg::sub(a, b)) < 5e-7);
    // Hermiticity of the output
    CHECK(linalg::max_abs(linalg::sub(a, linalg::adjoint(a))) < 1e-12);
}

TEST_CASE("difference path is consistent and linear") {
    const PlanarQuadrature& q = bump_q(0);
    const Matrix h0m = linalg::random_hermitian_spectrum(14, 5, -1.2, 1.0);
    const Matrix v = linalg::random_hermitian(14, 7, 0.1);
    const HermitianOperator h0(h0m);
    const HermitianOperator h1(linalg::add(h0m, v));

    const Matrix d = hs_difference(h0, v, bump_ext(), q);
    const Matrix dd =
        linalg::sub(hs_apply(h1, bump_ext(), q), hs_apply(h0, bump_ext(), q));
    CHECK(linalg::max_abs(linalg::sub(d, dd)) < 1e-12);

    const Matrix ddense = hs_difference(h0, v, bump_ext(), q, ResolventMode::dense);
    CHECK(linalg::max_abs(linalg::sub(d, ddense)) < 1e-12);

    Matrix bad(13, 13);
    CHECK_THROWS_AS(hs_difference(h0, bad, bump_ext(), q), ParameterError);
}

TEST_CASE("second difference matches the literal kernel") {
    const PlanarQuadrature& q = bump_q(0);
    const Matrix h0m = linalg::random_hermitian_spectrum(12, 9, -1.2, 1.2);
    const Matrix v = linalg::random_hermitian(12, 13, 0.05);
    const HermitianOperator h0(h0m);
    const Matrix a = hs_second_difference(h0, v, bump_ext(), q);
    const Matrix b = hs_second_difference(h0, v, bump_ext(), q, ResolventMode::dense);
    const double scale = linalg::max_abs(a);
    CHECK(scale > 1e-6); // the probe has to be nontrivial
    CHECK(linalg::max_abs(linalg::sub(a, b)) < 1e-12 * (1.0 + scale));
}

TEST_CASE("second difference is quadratically small in the perturbation") {
    const PlanarQuadrature& q = bump_q(0);
    const Matrix h0m = linalg::random_hermitian_spectrum(10, 17, -1.2, 1.2);
    const Matrix v = linalg::random_hermitian(10, 19, 1.0);
    const HermitianOperator h0(h0m);
    double ratio[2];
    int k = 0;
    for (double eps : {1e-2, 1e-3}) {
        Matrix ve(10, 10);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) ve(i, j) = eps * v(i, j);
        ratio[k++] = linalg::operator_norm(hs_second_difference(h0, ve, bump_ext(), q)) /
                     (eps * eps);
    }
    CHECK(std::abs(ratio[1] / ratio[0] - 1.0) < 0.02);

    // First-order consistency: difference minus Gateaux derivative is the
    // second difference, so the chain must close.
    const double eps = 1e-2;
    Matrix ve(10, 10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) ve(i, j) = eps * v(i, j);
    const Matrix lhs = linalg::sub(
        hs_difference(h0, ve, bump_ext(), q),
        linalg::gateaux_derivative(h0, ve, bump_value, [](double t) {
            return smooth_bump(0.0, 1.0)->derivative(1, t);
        }));
    const Matrix rhs = hs_second_difference(h0, ve, bump_ext(), q);
    // Both sides carry independent quadrature errors of the size of the
    // scalar transform's accuracy at this round, times |V|^2 effects.
    CHECK(linalg::operator_norm(linalg::sub(lhs, rhs)) < 5e-6);
}

TEST_CASE("refinement driver stops once rounds agree") {
    const HermitianOperator h(linalg::random_hermitian_spectrum(10, 23, -1.3, 1.3));
    const RefinedResult r = hs_apply_refined(h, bump_ext(), 1e-5, 3);
    CHECK(r.round >= 1);
    CHECK(r.round <= 3);
    CHECK(r.delta <= 1e-5);
    CHECK(linalg::operator_norm(linalg::sub(r.op, h.apply_function(bump_value))) <
          1e-5);

    CHECK_THROWS_AS(hs_apply_refined(h, bump_ext(), 1e-16, 1), AccuracyError);
    CHECK_THROWS_AS(hs_apply_refined(h, bump_ext(), 0.0, 3), ParameterError);
    CHECK_THROWS_AS(hs_apply_refined(h, bump_ext(), 1e-5, 0), ParameterError);
}

TEST_CASE("trace norm profile matches a dense evaluation") {
    const int n = 30, m = 4;
    const Matrix h0m = linalg::random_hermitian_spectrum(n, 21, 0.2, 4.0);
    Matrix v(n, n);
    const Matrix vs = linalg::random_hermitian(m, 31, 0.5);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) v(9 + i, 9 + j) = vs(i, j);
    const HermitianOperator h0(h0m);
    const HermitianOperator h1(linalg::add(h0m, v));

    const std::vector<double> ys = {1e-1, 1e-2, 1e-3};
    const IntegrandProfile pr =
        trace_norm_integrand_profile(h0, v, 0.8, 1.6, 2, ys);
    CHECK(pr.kappa == 0); // dimension 1 needs no damping
    REQUIRE(pr.points.size() == 6);

    const double emin0 = h0.eig().eval.front();
    const double emin1 = h1.eig().eval.front();
    CHECK(pr.energy ==
          doctest::Approx(1.0 + std::abs(emin1) + std::abs(emin0)).epsilon(1e-12));

    double sup = 0.0;
    for (const auto& p : pr.points) {
        const Matrix d = linalg::sub(h1.resolvent(p.z), h0.resolvent(p.z));
        const double want = linalg::schatten_norm(d, 1.0);
        CHECK(p.value == doctest::Approx(want).epsilon(1e-6));
        CHECK(p.compensated ==
              doctest::Approx(p.value * std::abs(p.z.imag())).epsilon(1e-12));
        sup = std::max(sup, p.compensated);
    }
    CHECK(pr.sup_compensated == doctest::Approx(sup).epsilon(1e-12));

    // Higher dimension switches the default damping on.
    const IntegrandProfile pr5 =
        trace_norm_integrand_profile(h0, v, 0.8, 1.6, 1, {1e-1}, -1, 5);
    CHECK(pr5.kappa == 1);
    CHECK(pr5.points.size() == 1);
    CHECK(pr5.points[0].value > 0.0);

    // Vanishing perturbation short-circuits to zero.
    Matrix zero(n, n);
    const IntegrandProfile pr0 =
        trace_norm_integrand_profile(h0, zero, 0.8, 1.6, 1, {1e-1});
    CHECK(pr0.points[0].value == 0.0);

    CHECK_THROWS_AS(trace_norm_integrand_profile(h0, v, 0.8, 1.6, 1, {0.0}),
                    ParameterError);
    CHECK_THROWS_AS(trace_norm_integrand_profile(h0, v, 0.8, 1.6, 0, {1e-1}),
                    ParameterError);
    CHECK_THROWS_AS(trace_norm_integrand_profile(h0, v, 0.8, 0.8, 2, {1e-1}),
                    ParameterError);
}

TEST_CASE("momentum integral closed form in one dimension") {
    // For d = 1 without damping the integral has an explicit value through
    // the square root of -z.
    auto closed = [](cplx z) {
        return std::numbers::pi / std::abs(z.imag()) *
               std::imag(1.0 / std::sqrt(-z));
    };
    for (cplx z : {cplx(0.3, 1e-3), cplx(-0.5, 1e-2), cplx(2.0, 1e-5),
                   cplx(1.0, 0.5)}) {
        const double got = momentum_integral(1, 0.0, 0.0, z);
        CHECK(got == doctest::Approx(closed(z)).epsilon(1e-10));
    }
}

TEST_CASE("momentum integral stays bounded with damping in three dimensions") {
    const double a = 1e-4 * momentum_integral(3, 1.0, 1.0, cplx(1.0, 1e-4));
    const double b = 1e-6 * momentum_integral(3, 1.0, 1.0, cplx(1.0, 1e-6));
    CHECK(a == doctest::Approx(4.934555e+00).epsilon(1e-4));
    CHECK(b == doctest::Approx(a).epsilon(1e-3));

    CHECK_THROWS_AS(momentum_integral(4, 0.0, 1.0, cplx(1.0, 0.1)), ParameterError);
    CHECK_THROWS_AS(momentum_integral(1, 0.0, 0.0, cplx(1.0, 0.0)), ParameterError);
    CHECK_THROWS_AS(momentum_integral(3, 1.0, 0.0, cplx(1.0, 0.1)), ParameterError);
    CHECK_THROWS_AS(momentum_integral(0, 0.0, 0.0, cplx(1.0, 0.1)), ParameterError);
}

TEST_SUITE_END();
