#include <doctest.h>

#include <cmath>
#include <complex>

#include "opcalc/errors.hpp"
#include "opcalc/linalg.hpp"

using namespace opcalc;
using namespace opcalc::linalg;

namespace {

// Dense symmetric tridiagonal for comparisons.
Matrix densify(const SymTri& t, cplx shift = 0.0) {
    const int n = t.dim();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = t.d[i] - shift;
        if (i + 1 < n) {
            m(i, i + 1) = t.e[i];
            m(i + 1, i) = t.e[i];
        }
    }
    return m;
}

SymTri laplacian_tri(int n) {
    SymTri t;
    t.d.assign(n, 2.0);
    t.e.assign(n - 1, -1.0);
    return t;
}

} // namespace

TEST_SUITE("linalg") {

TEST_CASE("complex tridiagonalization is a unitary similarity") {
    const Matrix a = random_hermitian(40, 7);
    const TridiagC td = tridiagonalize(a, true);
    const int n = 40;
    // Q unitary
    const Matrix qq = matmul(adjoint(td.q), td.q);
    CHECK(max_abs(sub(qq, Matrix::identity(n))) < 1e-12);
    // A Q = Q T with T assembled from (d, e); subdiagonal real nonnegative
    for (double e : td.t.e) CHECK(e >= 0.0);
    const Matrix lhs = matmul(a, td.q);
    const Matrix rhs = matmul(td.q, densify(td.t));
    CHECK(max_abs(sub(lhs, rhs)) < 1e-11 * max_abs(a));
}

TEST_CASE("real tridiagonalization is an orthogonal similarity") {
    const Matrix ac = random_hermitian(30, 11);
    RealMatrix a(30, 30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) a(i, j) = ac(i, j).real();
    // symmetrize exactly
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < i; ++j) a(i, j) = a(j, i);
    const TridiagR td = tridiagonalize(a, true);
    const RealMatrix qq = matmul(transpose(td.q), td.q);
    RealMatrix eye(30, 30);
    for (int i = 0; i < 30; ++i) eye(i, i) = 1.0;
    CHECK(max_abs(sub(qq, eye)) < 1e-12);
    const Matrix lhs = matmul(to_complex(a), to_complex(td.q));
    const Matrix rhs = matmul(to_complex(td.q), densify(td.t));
    CHECK(max_abs(sub(lhs, rhs)) < 1e-11 * max_abs(to_complex(a)));
}

TEST_CASE("discrete second difference eigenvalues match the closed form") {
    // This tridiagonal matrix has eigenvalues 2 - 2 cos(k pi / (n+1)).
    const int n = 20;
    const auto ev = symtri_eigenvalues(laplacian_tri(n));
    for (int k = 1; k <= n; ++k) {
        const double want = 2.0 - 2.0 * std::cos(k * M_PI / (n + 1));
        CHECK(ev[k - 1] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("full Hermitian eigensolver satisfies residual and unitarity bounds") {
    const int n = 50;
    const Matrix a = random_hermitian(n, 3);
    const Eigensystem es = eigh(a);
    // ascending
    for (int i = 0; i + 1 < n; ++i) CHECK(es.eval[i] <= es.eval[i + 1]);
    // unitarity
    CHECK(max_abs(sub(matmul(adjoint(es.evec), es.evec), Matrix::identity(n))) < 1e-12);
    // residuals columnwise
    const Matrix av = matmul(a, es.evec);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const cplx r = av(i, j) - es.eval[j] * es.evec(i, j);
            worst = std::max(worst, std::abs(r));
        }
    CHECK(worst < 1e-11 * max_abs(a) * n);
    // trace preserved
    double tr = 0.0, se = 0.0;
    for (int i = 0; i < n; ++i) {
        tr += a(i, i).real();
        se += es.eval[i];
    }
    CHECK(tr == doctest::Approx(se).epsilon(1e-10));
}

TEST_CASE("real symmetric eigensolver on an exactly known 3x3") {
    // A = R diag(1, 2, 5) R^T for a plane rotation R in coords (0, 1).
    const double c = std::cos(0.3), s = std::sin(0.3);
    RealMatrix r(3, 3);
    r(0, 0) = c; r(0, 1) = -s; r(1, 0) = s; r(1, 1) = c; r(2, 2) = 1.0;
    RealMatrix d(3, 3);
    d(0, 0) = 1.0; d(1, 1) = 2.0; d(2, 2) = 5.0;
    const RealMatrix a = matmul(r, matmul(d, transpose(r)));
    const RealEigensystem es = eigh(a);
    CHECK(es.eval[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(es.eval[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(es.eval[2] == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("subset eigenvectors match the sine oracle for the second difference") {
    const int n = 24;
    const SymTri t = laplacian_tri(n);
    const auto ev = symtri_eigenvalues(t);
    const std::vector<int> idx{0, 1, 11, 23};
    const RealMatrix v = symtri_eigenvectors_subset(t, ev, idx);
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const int k = idx[c] + 1; // mode number
        // oracle vector, normalized
        std::vector<double> w(n);
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            w[i] = std::sin((i + 1) * k * M_PI / (n + 1));
            nrm += w[i] * w[i];
        }
        nrm = std::sqrt(nrm);
        // sign-align with the computed vector
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += w[i] / nrm * v(i, (int)c);
        const double sign = dot >= 0 ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i)
            CHECK(v(i, (int)c) == doctest::Approx(sign * w[i] / nrm).epsilon(5e-10));
    }
}

TEST_CASE("subset eigenvectors are orthogonal in a near-degenerate cluster") {
    SymTri t;
    t.d = {1.0, 1.0 + 1e-13, 4.0};
    t.e = {1e-14, 1e-14};
    const auto ev = symtri_eigenvalues(t);
    const RealMatrix v = symtri_eigenvectors_subset(t, ev, {0, 1});
    double dot = 0.0;
    for (int i = 0; i < 3; ++i) dot += v(i, 0) * v(i, 1);
    CHECK(std::abs(dot) < 1e-10);
}

TEST_CASE("partial dense eigensolver agrees with the full one") {
    const Matrix ac = random_hermitian(32, 17);
    RealMatrix a(32, 32);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) a(i, j) = 0.5 * (ac(i, j).real() + ac(j, i).real());
    const RealEigensystem full = eigh(a);
    const PartialRealEig part = eigh_partial(a, {0, 5, 31});
    for (int i = 0; i < 32; ++i)
        CHECK(part.eval[i] == doctest::Approx(full.eval[i]).epsilon(1e-11));
    const std::vector<int> idx{0, 5, 31};
    for (std::size_t c = 0; c < idx.size(); ++c) {
        double dot = 0.0;
        for (int i = 0; i < 32; ++i) dot += part.vec(i, (int)c) * full.evec(i, idx[c]);
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("LU inverse reproduces the identity") {
    const Matrix a = random_hermitian(30, 23);
    Matrix shifted = a;
    for (int i = 0; i < 30; ++i) shifted(i, i) += cplx(0.0, 2.0);
    const Matrix inv = inverse(shifted);
    CHECK(max_abs(sub(matmul(shifted, inv), Matrix::identity(30))) < 1e-12 * 30);
}

TEST_CASE("LU rejects singular input") {
    Matrix a(2, 2);
    a(0, 0) = 1.0; a(0, 1) = 2.0; a(1, 0) = 2.0; a(1, 1) = 4.0;
    CHECK_THROWS_AS(lu_factor(a), SingularityError);
}

TEST_CASE("shifted tridiagonal LU solves forward and transposed systems") {
    const int n = 37;
    SymTri t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (int i = 0; i < n; ++i) t.d[i] = std::cos(2.1 * i) + 2.0;
    for (int i = 0; i + 1 < n; ++i) t.e[i] = std::sin(1.3 * i) * 0.7;
    const cplx z(0.37, 0.21);
    const TriLU f = tri_lu_shifted(t, z);
    const Matrix dense = densify(t, z);

    Matrix b(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 3; ++j) b(i, j) = cplx(std::sin(i + j), std::cos(2 * i - j));
    const Matrix x = tri_lu_solve_columns(f, b);
    CHECK(max_abs(sub(matmul(dense, x), b)) < 1e-12 * max_abs(b) * n);

    Matrix c(3, n);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = cplx(std::cos(i * j), 0.3 * i - 0.1 * j);
    const Matrix y = tri_lu_solve_rows(f, c);
    CHECK(max_abs(sub(matmul(y, dense), c)) < 1e-12 * max_abs(c) * n);

    const Matrix inv = tri_lu_inverse(f);
    CHECK(max_abs(sub(matmul(dense, inv), Matrix::identity(n))) < 1e-11 * n);
}

TEST_CASE("shifted tridiagonal LU detects spectral shifts") {
    const SymTri t = laplacian_tri(12);
    const double ev1 = 2.0 - 2.0 * std::cos(M_PI / 13.0);
    CHECK_THROWS_AS(tri_lu_shifted(t, cplx(ev1, 0.0)), SingularityError);
}

TEST_CASE("singular values of a fixed 2x2") {
    Matrix a(2, 2);
    a(0, 0) = 3.0; a(0, 1) = 0.0; a(1, 0) = 4.0; a(1, 1) = 5.0;
    const auto s = singular_values(a);
    CHECK(s[0] == doctest::Approx(std::sqrt(45.0)).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("Schatten norms of a diagonal matrix") {
    Matrix a(2, 2);
    a(0, 0) = 3.0; a(1, 1) = -4.0;
    CHECK(schatten_norm(a, 1.0) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(schatten_norm(a, 2.0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(operator_norm(a) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(schatten_norm(a, 0.5), ParameterError);
}

TEST_CASE("HermitianOperator validates input and caches the spectrum") {
    Matrix bad(2, 2);
    bad(0, 1) = cplx(1.0, 0.0);
    bad(1, 0) = cplx(0.5, 0.0);
    CHECK_THROWS_AS(HermitianOperator{bad}, ParameterError);

    const HermitianOperator h(random_hermitian(20, 5));
    const Eigensystem& e1 = h.eig();
    const Eigensystem& e2 = h.eig();
    CHECK(&e1 == &e2);
}

TEST_CASE("apply_function reproduces powers of the operator") {
    const Matrix a = random_hermitian(18, 29);
    const HermitianOperator h(a);
    const Matrix sq = h.apply_function([](double x) { return x * x; });
    CHECK(max_abs(sub(sq, matmul(a, a))) < 1e-11 * max_abs(a) * max_abs(a) * 18);
}

TEST_CASE("negative spectral projection is an idempotent that commutes") {
    const Matrix a = random_hermitian(16, 31);
    const HermitianOperator h(a);
    const Matrix p = h.spectral_projection_negative();
    CHECK(max_abs(sub(matmul(p, p), p)) < 1e-11);
    CHECK(max_abs(sub(matmul(p, a), matmul(a, p))) < 1e-10 * max_abs(a));
}

TEST_CASE("resolvent at a spectral point is singular") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    const HermitianOperator h(a);
    CHECK_THROWS_AS(h.resolvent(cplx(1.0, 0.0)), SingularityError);
    const Matrix r = h.resolvent(cplx(0.0, 1.0));
    CHECK(std::abs(r(0, 0) - 1.0 / cplx(1.0, -1.0)) < 1e-14);
}

TEST_CASE("derivative of the square matches the anticommutator") {
    const Matrix h0m = random_hermitian(14, 41);
    const Matrix v = random_hermitian(14, 43);
    const HermitianOperator h0(h0m);
    const Matrix d = gateaux_derivative(
        h0, v, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
    const Matrix want = add(matmul(h0m, v), matmul(v, h0m));
    CHECK(max_abs(sub(d, want)) < 1e-10 * max_abs(want));
}

TEST_CASE("derivative matches a symmetric finite difference for a cubic") {
    const int n = 12;
    const Matrix h0m = random_hermitian(n, 47);
    const Matrix v = random_hermitian(n, 53);
    const HermitianOperator h0(h0m);
    const Matrix d = gateaux_derivative(
        h0, v, [](double x) { return x * x * x; },
        [](double x) { return 3.0 * x * x; });
    const double t = 1e-5;
    Matrix hp = h0m, hm = h0m;
    axpy(hp, t, v);
    axpy(hm, -t, v);
    const Matrix fp = HermitianOperator(hp).apply_function([](double x) { return x * x * x; });
    const Matrix fm = HermitianOperator(hm).apply_function([](double x) { return x * x * x; });
    Matrix fd = sub(fp, fm);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fd(i, j) /= 2.0 * t;
    CHECK(max_abs(sub(d, fd)) < 1e-7 * max_abs(d));
}

TEST_CASE("spectrum-constrained random Hermitian stays in range") {
    const Matrix a = random_hermitian_spectrum(24, 61, -0.25, 2.75);
    const auto ev = eigvalsh(a);
    CHECK(ev.front() >= -0.25 - 1e-10);
    CHECK(ev.back() <= 2.75 + 1e-10);
    // Hermitian by construction
    CHECK(max_abs(sub(a, adjoint(a))) < 1e-12);
}

} // TEST_SUITE
