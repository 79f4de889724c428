#include "opcalc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "opcalc/errors.hpp"

namespace opcalc::linalg {

namespace {

double abs2(double x) { return x * x; }
double abs2(const cplx& x) { return std::norm(x); }
double conj_(double x) { return x; }
cplx conj_(const cplx& x) { return std::conj(x); }

void check_square(int r, int c, const char* who) {
    if (r != c) throw ParameterError(std::string(who) + ": matrix not square");
}

} // namespace

Matrix to_complex(const RealMatrix& a) {
    Matrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

RealMatrix real_part(const Matrix& a) {
    RealMatrix m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).real();
    return m;
}

namespace {

// ikj ordering: the inner loop streams rows of b and c contiguously.
template <class T>
Dense<T> matmul_impl(const Dense<T>& a, const Dense<T>& b) {
    if (a.cols() != b.rows()) throw ParameterError("matmul: shape mismatch");
    Dense<T> c(a.rows(), b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    for (int i = 0; i < m; ++i) {
        T* crow = c.row(i);
        const T* arow = a.row(i);
        for (int l = 0; l < k; ++l) {
            const T s = arow[l];
            if (s == T(0)) continue;
            const T* brow = b.row(l);
            for (int j = 0; j < n; ++j) crow[j] += s * brow[j];
        }
    }
    return c;
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) { return matmul_impl(a, b); }
RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) { return matmul_impl(a, b); }

template <class T>
Dense<T> transpose(const Dense<T>& a) {
    Dense<T> m(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(j, i) = a(i, j);
    return m;
}
template Dense<double> transpose(const Dense<double>&);
template Dense<cplx> transpose(const Dense<cplx>&);

Matrix adjoint(const Matrix& a) {
    Matrix m(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(j, i) = std::conj(a(i, j));
    return m;
}

namespace {
template <class T>
Dense<T> add_impl(const Dense<T>& a, const Dense<T>& b, double sb) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ParameterError("add/sub: shape mismatch");
    Dense<T> c(a.rows(), a.cols());
    const std::size_t n = (std::size_t)a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) c.data()[i] = a.data()[i] + sb * b.data()[i];
    return c;
}
} // namespace

Matrix add(const Matrix& a, const Matrix& b) { return add_impl(a, b, 1.0); }
Matrix sub(const Matrix& a, const Matrix& b) { return add_impl(a, b, -1.0); }
RealMatrix add(const RealMatrix& a, const RealMatrix& b) { return add_impl(a, b, 1.0); }
RealMatrix sub(const RealMatrix& a, const RealMatrix& b) { return add_impl(a, b, -1.0); }

void axpy(Matrix& y, cplx alpha, const Matrix& x) {
    if (y.rows() != x.rows() || y.cols() != x.cols())
        throw ParameterError("axpy: shape mismatch");
    const std::size_t n = (std::size_t)y.rows() * y.cols();
    for (std::size_t i = 0; i < n; ++i) y.data()[i] += alpha * x.data()[i];
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    const std::size_t n = (std::size_t)a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}
double max_abs(const RealMatrix& a) {
    double m = 0.0;
    const std::size_t n = (std::size_t)a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}
double fro_norm(const Matrix& a) {
    double s = 0.0;
    const std::size_t n = (std::size_t)a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) s += std::norm(a.data()[i]);
    return std::sqrt(s);
}

// ---- implicit-shift QL ----

namespace {

// Classic implicit QL with Wilkinson shift. e couples d[i], d[i+1]; a
// scratch slot is appended because a full-length sweep writes one past the
// last physical off-diagonal. Rotations are accumulated into the columns
// of *z when present.
template <class ZT>
void ql_impl(std::vector<double>& d, const std::vector<double>& ein, Dense<ZT>* z) {
    const int n = (int)d.size();
    if ((int)ein.size() != (n > 0 ? n - 1 : 0))
        throw ParameterError("symtri_ql: off-diagonal length mismatch");
    if (n <= 1) return;
    std::vector<double> e(ein);
    e.push_back(0.0);

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m <= n - 2; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) + dd == dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw AccuracyError("symtri_ql: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool early = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        early = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (int k = 0; k < z->rows(); ++k) {
                            const ZT zf = (*z)(k, i + 1);
                            (*z)(k, i + 1) = s * (*z)(k, i) + c * zf;
                            (*z)(k, i) = c * (*z)(k, i) - s * zf;
                        }
                    }
                }
                if (early) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

template <class ZT>
void sort_eigensystem(std::vector<double>& d, Dense<ZT>* z) {
    const int n = (int)d.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return d[a] < d[b]; });
    std::vector<double> ds(n);
    for (int i = 0; i < n; ++i) ds[i] = d[order[i]];
    d.swap(ds);
    if (z) {
        Dense<ZT> zs(z->rows(), z->cols());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < z->rows(); ++i) zs(i, j) = (*z)(i, order[j]);
        *z = std::move(zs);
    }
}

} // namespace

void symtri_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z) {
    ql_impl(d, e, z);
}
void symtri_ql(std::vector<double>& d, std::vector<double>& e, RealMatrix* z) {
    ql_impl(d, e, z);
}

std::vector<double> symtri_eigenvalues(SymTri t) {
    ql_impl<double>(t.d, t.e, nullptr);
    std::sort(t.d.begin(), t.d.end());
    return t.d;
}

// ---- Householder tridiagonalization (one templated body) ----

namespace {

template <class T>
void tridiagonalize_impl(Dense<T> a, bool want_q, SymTri& t, Dense<T>& q) {
    const int n = a.rows();
    check_square(a.rows(), a.cols(), "tridiagonalize");
    t.d.assign(n, 0.0);
    t.e.assign(n > 0 ? n - 1 : 0, 0.0);
    if (want_q) q = Dense<T>::identity(n);

    std::vector<T> esub(n > 0 ? n - 1 : 0, T(0));
    std::vector<T> v(n), p(n), w(n);

    for (int i = n - 1; i >= 1; --i) {
        // Reflect column i's above-diagonal part x onto the (i-1) axis.
        double sig2 = 0.0;
        for (int k = 0; k < i; ++k) sig2 += abs2(a(k, i));
        const double sigma = std::sqrt(sig2);
        if (sigma == 0.0) {
            esub[i - 1] = T(0);
            continue;
        }
        const T alpha = a(i - 1, i);
        const double absa = std::abs(alpha);
        const T phase = absa > 0.0 ? alpha * (1.0 / absa) : T(1);
        // v = x + phase*sigma*e_{i-1};  P = I - beta v v^*,
        // beta = 2/||v||^2 = 1/(sigma (sigma + |alpha|)).
        for (int k = 0; k < i; ++k) v[k] = a(k, i);
        v[i - 1] += phase * sigma;
        const double beta = 1.0 / (sigma * (sigma + absa));

        // p = beta A v on the active block (rows 0..i-1).
        for (int r = 0; r < i; ++r) {
            T s(0);
            const T* arow = a.row(r);
            for (int k = 0; k < i; ++k) s += arow[k] * v[k];
            p[r] = beta * s;
        }
        // w = p - (beta/2)(v^* p) v keeps A <- A - v w^* - w v^* Hermitian.
        T vp(0);
        for (int k = 0; k < i; ++k) vp += conj_(v[k]) * p[k];
        const T kappa = 0.5 * beta * vp;
        for (int k = 0; k < i; ++k) w[k] = p[k] - kappa * v[k];

        for (int r = 0; r < i; ++r) {
            const T vr = v[r], wr = w[r];
            T* arow = a.row(r);
            for (int c = 0; c < i; ++c)
                arow[c] -= vr * conj_(w[c]) + wr * conj_(v[c]);
        }
        // Column i collapses to a single entry by construction.
        for (int k = 0; k < i - 1; ++k) {
            a(k, i) = T(0);
            a(i, k) = T(0);
        }
        a(i - 1, i) = -phase * sigma;
        a(i, i - 1) = conj_(a(i - 1, i));
        esub[i - 1] = a(i, i - 1);

        if (want_q) {
            // Q <- Q P accumulates the basis with Q^* A_orig Q = T.
            for (int r = 0; r < n; ++r) {
                T s(0);
                const T* qrow = q.row(r);
                for (int k = 0; k < i; ++k) s += qrow[k] * v[k];
                const T f = beta * s;
                T* qr = q.row(r);
                for (int k = 0; k < i; ++k) qr[k] -= f * conj_(v[k]);
            }
        }
    }

    // Phase-scale the subdiagonal to be real nonnegative: T' = D^* T D with
    // |D_kk| = 1, folded into Q.
    std::vector<T> dphase(n, T(1));
    for (int k = 0; k + 1 < n; ++k) {
        const double m = std::abs(esub[k]);
        t.e[k] = m;
        dphase[k + 1] = m > 0.0 ? (esub[k] * dphase[k]) * (1.0 / m) : dphase[k];
    }
    for (int k = 0; k < n; ++k) {
        double dk;
        if constexpr (std::is_same_v<T, cplx>) dk = a(k, k).real();
        else dk = a(k, k);
        t.d[k] = dk;
    }
    if (want_q)
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < n; ++r) q(r, c) = q(r, c) * dphase[c];
}

} // namespace

TridiagC tridiagonalize(const Matrix& a, bool want_q) {
    TridiagC r;
    tridiagonalize_impl<cplx>(a, want_q, r.t, r.q);
    return r;
}
TridiagR tridiagonalize(const RealMatrix& a, bool want_q) {
    TridiagR r;
    tridiagonalize_impl<double>(a, want_q, r.t, r.q);
    return r;
}

// ---- full eigensolvers ----

Eigensystem eigh(const Matrix& a) {
    TridiagC td = tridiagonalize(a, true);
    Eigensystem es;
    es.eval = std::move(td.t.d);
    ql_impl(es.eval, td.t.e, &td.q);
    es.evec = std::move(td.q);
    sort_eigensystem(es.eval, &es.evec);
    return es;
}

RealEigensystem eigh(const RealMatrix& a) {
    TridiagR td = tridiagonalize(a, true);
    RealEigensystem es;
    es.eval = std::move(td.t.d);
    ql_impl(es.eval, td.t.e, &td.q);
    es.evec = std::move(td.q);
    sort_eigensystem(es.eval, &es.evec);
    return es;
}

std::vector<double> eigvalsh(const Matrix& a) {
    TridiagC td = tridiagonalize(a, false);
    return symtri_eigenvalues(std::move(td.t));
}
std::vector<double> eigvalsh(const RealMatrix& a) {
    TridiagR td = tridiagonalize(a, false);
    return symtri_eigenvalues(std::move(td.t));
}

// ---- inverse iteration for selected tridiagonal eigenvectors ----

namespace {

// Real tridiagonal LU with partial pivoting, factor T - lambda.
struct RealTriLU {
    std::vector<double> dl, dd, du, du2;
    std::vector<int> swapped;
    int n = 0;
    bool singular = false;
};

RealTriLU real_tri_lu(const SymTri& t, double lambda, double piv_floor) {
    const int n = t.dim();
    RealTriLU f;
    f.n = n;
    f.dd.resize(n);
    f.dl.assign(n > 1 ? n - 1 : 0, 0.0);
    f.du.assign(n > 1 ? n - 1 : 0, 0.0);
    f.du2.assign(n > 2 ? n - 2 : 0, 0.0);
    f.swapped.assign(n > 1 ? n - 1 : 0, 0);
    for (int i = 0; i < n; ++i) f.dd[i] = t.d[i] - lambda;
    for (int i = 0; i + 1 < n; ++i) f.dl[i] = f.du[i] = t.e[i];

    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(f.dd[i]) >= std::abs(f.dl[i])) {
            double piv = f.dd[i];
            if (std::abs(piv) < piv_floor) piv = std::copysign(piv_floor, piv == 0.0 ? 1.0 : piv);
            const double fact = f.dl[i] / piv;
            f.dd[i] = piv;
            f.dl[i] = fact;
            f.dd[i + 1] -= fact * f.du[i];
            if (i + 2 < n) f.du2[i] = 0.0;
        } else {
            const double fact = f.dd[i] / f.dl[i];
            f.dd[i] = f.dl[i];
            f.dl[i] = fact;
            const double tmp = f.du[i];
            f.du[i] = f.dd[i + 1];
            f.dd[i + 1] = tmp - fact * f.dd[i + 1];
            if (i + 2 < n) {
                f.du2[i] = f.du[i + 1];
                f.du[i + 1] = -fact * f.du[i + 1];
            }
            f.swapped[i] = 1;
        }
    }
    if (std::abs(f.dd[n - 1]) < piv_floor)
        f.dd[n - 1] = std::copysign(piv_floor, f.dd[n - 1] == 0.0 ? 1.0 : f.dd[n - 1]);
    return f;
}

void real_tri_solve(const RealTriLU& f, double* b) {
    const int n = f.n;
    for (int i = 0; i + 1 < n; ++i) {
        if (!f.swapped[i]) {
            b[i + 1] -= f.dl[i] * b[i];
        } else {
            const double tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - f.dl[i] * b[i];
        }
    }
    b[n - 1] /= f.dd[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - f.du[n - 2] * b[n - 1]) / f.dd[n - 2];
    for (int i = n - 3; i >= 0; --i)
        b[i] = (b[i] - f.du[i] * b[i + 1] - f.du2[i] * b[i + 2]) / f.dd[i];
}

} // namespace

RealMatrix symtri_eigenvectors_subset(const SymTri& t,
                                      const std::vector<double>& evals,
                                      const std::vector<int>& idx) {
    const int n = t.dim();
    if ((int)evals.size() != n)
        throw ParameterError("symtri_eigenvectors_subset: eigenvalue count mismatch");
    double scale = 0.0;
    for (double x : t.d) scale = std::max(scale, std::abs(x));
    for (double x : t.e) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;
    const double piv_floor = 1e-300;
    const double cluster_gap = 1e-7 * scale;

    RealMatrix out(n, (int)idx.size());
    // Vectors already built, keyed by eigenvalue index, for cluster
    // orthogonalization.
    std::vector<std::pair<int, std::vector<double>>> built;

    for (std::size_t c = 0; c < idx.size(); ++c) {
        const int j = idx[c];
        if (j < 0 || j >= n) throw ParameterError("symtri_eigenvectors_subset: index out of range");
        double lambda = evals[j];
        // Tiny separation nudge keeps repeated shifts from producing the
        // same Krylov direction in exactly degenerate clusters.
        lambda += 1e-12 * scale * (double)(c % 3);

        std::vector<double> b(n);
        std::uint64_t s = 0x9e3779b97f4a7c15ull ^ (0x100000001b3ull * (j + 1));
        for (int i = 0; i < n; ++i) {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            b[i] = (double)(s % 2000001) / 1000000.0 - 1.0;
        }
        const RealTriLU f = real_tri_lu(t, lambda, piv_floor);
        for (int sweep = 0; sweep < 3; ++sweep) {
            real_tri_solve(f, b.data());
            // Orthogonalize inside near-degenerate clusters each sweep.
            for (const auto& prev : built)
                if (std::abs(evals[prev.first] - evals[j]) < cluster_gap) {
                    double dot = 0.0;
                    for (int i = 0; i < n; ++i) dot += prev.second[i] * b[i];
                    for (int i = 0; i < n; ++i) b[i] -= dot * prev.second[i];
                }
            double nrm = 0.0;
            for (double x : b) nrm += x * x;
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) throw AccuracyError("inverse iteration produced a null vector");
            for (double& x : b) x /= nrm;
        }
        for (int i = 0; i < n; ++i) out(i, (int)c) = b[i];
        built.emplace_back(j, b);
    }
    return out;
}

PartialRealEig eigh_partial(const RealMatrix& a, const std::vector<int>& idx) {
    TridiagR td = tridiagonalize(a, true);
    PartialRealEig r;
    r.eval = symtri_eigenvalues(td.t);
    const RealMatrix vt = symtri_eigenvectors_subset(td.t, r.eval, idx);
    r.vec = matmul(td.q, vt);
    return r;
}

// ---- dense complex LU ----

LUFactors lu_factor(Matrix a) {
    check_square(a.rows(), a.cols(), "lu_factor");
    const int n = a.rows();
    LUFactors f;
    f.piv.resize(n);
    const double scale = max_abs(a);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        f.piv[k] = piv;
        if (best < 1e-14 * (scale + 1e-300))
            throw SingularityError("lu_factor: matrix is singular to working precision");
        if (piv != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
        const cplx inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cplx m = a(i, k) * inv;
            a(i, k) = m;
            const cplx* krow = a.row(k);
            cplx* irow = a.row(i);
            for (int j = k + 1; j < n; ++j) irow[j] -= m * krow[j];
        }
    }
    f.a = std::move(a);
    return f;
}

void lu_solve_inplace(const LUFactors& f, Matrix& b) {
    const int n = f.a.rows();
    if (b.rows() != n) throw ParameterError("lu_solve: shape mismatch");
    const int m = b.cols();
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k)
            for (int j = 0; j < m; ++j) std::swap(b(k, j), b(f.piv[k], j));
    // forward (unit lower)
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) {
            const cplx m_ik = f.a(i, k);
            if (m_ik == cplx(0)) continue;
            const cplx* brow = b.row(k);
            cplx* irow = b.row(i);
            for (int j = 0; j < m; ++j) irow[j] -= m_ik * brow[j];
        }
    // back (upper)
    for (int k = n - 1; k >= 0; --k) {
        const cplx inv = 1.0 / f.a(k, k);
        cplx* krow = b.row(k);
        for (int j = 0; j < m; ++j) krow[j] *= inv;
        for (int i = 0; i < k; ++i) {
            const cplx u = f.a(i, k);
            if (u == cplx(0)) continue;
            cplx* irow = b.row(i);
            for (int j = 0; j < m; ++j) irow[j] -= u * krow[j];
        }
    }
}

Matrix inverse(const Matrix& a) {
    LUFactors f = lu_factor(a);
    Matrix b = Matrix::identity(a.rows());
    lu_solve_inplace(f, b);
    return b;
}

// ---- shifted tridiagonal LU ----

TriLU tri_lu_shifted(const SymTri& t, cplx z) {
    const int n = t.dim();
    TriLU f;
    f.n = n;
    f.dd.resize(n);
    f.dl.assign(n > 1 ? n - 1 : 0, cplx(0));
    f.du.assign(n > 1 ? n - 1 : 0, cplx(0));
    f.du2.assign(n > 2 ? n - 2 : 0, cplx(0));
    f.swapped.assign(n > 1 ? n - 1 : 0, 0);
    double scale = std::abs(z);
    for (double x : t.d) scale = std::max(scale, std::abs(x));
    for (double x : t.e) scale = std::max(scale, std::abs(x));
    const double floor = 1e-14 * (scale + 1e-300);

    for (int i = 0; i < n; ++i) f.dd[i] = t.d[i] - z;
    for (int i = 0; i + 1 < n; ++i) f.dl[i] = f.du[i] = t.e[i];

    for (int i = 0; i + 1 < n; ++i) {
        if (std::abs(f.dd[i]) >= std::abs(f.dl[i])) {
            if (std::abs(f.dd[i]) < floor)
                throw SingularityError("tri_lu_shifted: shift is in the spectrum to working precision");
            const cplx fact = f.dl[i] / f.dd[i];
            f.dl[i] = fact;
            f.dd[i + 1] -= fact * f.du[i];
            if (i + 2 < n) f.du2[i] = cplx(0);
        } else {
            const cplx fact = f.dd[i] / f.dl[i];
            f.dd[i] = f.dl[i];
            f.dl[i] = fact;
            const cplx tmp = f.du[i];
            f.du[i] = f.dd[i + 1];
            f.dd[i + 1] = tmp - fact * f.dd[i + 1];
            if (i + 2 < n) {
                f.du2[i] = f.du[i + 1];
                f.du[i + 1] = -fact * f.du[i + 1];
            }
            f.swapped[i] = 1;
        }
    }
    if (std::abs(f.dd[n - 1]) < floor)
        throw SingularityError("tri_lu_shifted: shift is in the spectrum to working precision");
    return f;
}

void tri_lu_solve(const TriLU& f, cplx* b) {
    const int n = f.n;
    for (int i = 0; i + 1 < n; ++i) {
        if (!f.swapped[i]) {
            b[i + 1] -= f.dl[i] * b[i];
        } else {
            const cplx tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - f.dl[i] * b[i];
        }
    }
    b[n - 1] /= f.dd[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - f.du[n - 2] * b[n - 1]) / f.dd[n - 2];
    for (int i = n - 3; i >= 0; --i)
        b[i] = (b[i] - f.du[i] * b[i + 1] - f.du2[i] * b[i + 2]) / f.dd[i];
}

Matrix tri_lu_solve_columns(const TriLU& f, const Matrix& b) {
    if (b.rows() != f.n) throw ParameterError("tri_lu_solve_columns: shape mismatch");
    // Work on the transpose so each solve streams a contiguous row.
    Matrix bt = transpose(b);
    std::vector<cplx> col(f.n);
    for (int c = 0; c < b.cols(); ++c) tri_lu_solve(f, bt.row(c));
    return transpose(bt);
}

Matrix tri_lu_solve_rows(const TriLU& f, const Matrix& b) {
    if (b.cols() != f.n) throw ParameterError("tri_lu_solve_rows: shape mismatch");
    // X (T - z) = B with T - z symmetric (not Hermitian): X^T solves
    // (T - z) X^T = B^T, i.e. row-wise solves of B itself.
    Matrix x = b;
    for (int r = 0; r < x.rows(); ++r) tri_lu_solve(f, x.row(r));
    return x;
}

Matrix tri_lu_inverse(const TriLU& f) {
    Matrix b = Matrix::identity(f.n);
    for (int c = 0; c < f.n; ++c) {
        // identity columns are unit vectors; solve in place on rows of the
        // transpose (identity is symmetric, reuse b's rows directly).
        tri_lu_solve(f, b.row(c));
    }
    return transpose(b);
}

// ---- singular values, Schatten norms ----

std::vector<double> singular_values(const Matrix& a) {
    // sigma(A) = sqrt(eig(A^* A)); adequate for the moderate dimensions and
    // diagnostic accuracy this library targets.
    const Matrix m = matmul(adjoint(a), a);
    std::vector<double> ev = eigvalsh(m);
    std::vector<double> s(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const double v = ev[ev.size() - 1 - i];
        s[i] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    return s;
}

double operator_norm(const Matrix& a) {
    const std::vector<double> s = singular_values(a);
    return s.empty() ? 0.0 : s.front();
}

double schatten_norm(const Matrix& a, double p) {
    if (!(p >= 1.0)) throw ParameterError("schatten_norm: need p >= 1");
    const std::vector<double> s = singular_values(a);
    if (std::isinf(p)) return s.empty() ? 0.0 : s.front();
    double sum = 0.0;
    for (std::size_t i = s.size(); i-- > 0;) sum += std::pow(s[i], p);
    return std::pow(sum, 1.0 / p);
}

// ---- HermitianOperator ----

HermitianOperator::HermitianOperator(Matrix h, double tol) : m_h(std::move(h)) {
    check_square(m_h.rows(), m_h.cols(), "HermitianOperator");
    double dev = 0.0;
    for (int i = 0; i < m_h.rows(); ++i)
        for (int j = i; j < m_h.cols(); ++j)
            dev = std::max(dev, std::abs(m_h(i, j) - std::conj(m_h(j, i))));
    if (dev > tol * (1.0 + max_abs(m_h)))
        throw ParameterError("HermitianOperator: matrix is not Hermitian within tolerance");
}

const Eigensystem& HermitianOperator::eig() const {
    std::call_once(m_once, [this] {
        m_eig = std::make_shared<Eigensystem>(linalg::eigh(m_h));
    });
    return *m_eig;
}

namespace {
Matrix apply_function_impl(const Eigensystem& es, const std::function<double(double)>& f) {
    const int n = es.evec.rows();
    Matrix w = es.evec;
    for (int c = 0; c < n; ++c) {
        const double fc = f(es.eval[c]);
        for (int r = 0; r < n; ++r) w(r, c) *= fc;
    }
    return matmul(w, adjoint(es.evec));
}
} // namespace

Matrix HermitianOperator::apply_function(const std::function<double(double)>& f) const {
    return apply_function_impl(eig(), f);
}

Matrix HermitianOperator::spectral_projection_negative() const {
    return apply_function_impl(eig(), [](double x) { return x < 0.0 ? 1.0 : 0.0; });
}

Matrix HermitianOperator::resolvent(cplx z) const {
    Matrix a = m_h;
    for (int i = 0; i < a.rows(); ++i) a(i, i) -= z;
    return inverse(a);
}

Matrix gateaux_derivative(const HermitianOperator& h0, const Matrix& v,
                          const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime) {
    const Eigensystem& es = h0.eig();
    const int n = h0.dim();
    if (v.rows() != n || v.cols() != n)
        throw ParameterError("gateaux_derivative: shape mismatch");
    double scale = 1.0;
    for (double l : es.eval) scale = std::max(scale, std::abs(l));
    const Matrix vhat = matmul(adjoint(es.evec), matmul(v, es.evec));
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double li = es.eval[i], lj = es.eval[j];
            double dd;
            if (std::abs(li - lj) <= 1e-8 * scale) dd = fprime(0.5 * (li + lj));
            else dd = (f(li) - f(lj)) / (li - lj);
            m(i, j) = dd * vhat(i, j);
        }
    return matmul(es.evec, matmul(m, adjoint(es.evec)));
}

// ---- deterministic random matrices ----

Matrix random_hermitian(int n, std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix h(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = g(gen) * scale;
        for (int j = i + 1; j < n; ++j) {
            const double re = g(gen) * scale / std::sqrt(2.0);
            const double im = g(gen) * scale / std::sqrt(2.0);
            h(i, j) = cplx(re, im);
            h(j, i) = cplx(re, -im);
        }
    }
    return h;
}

Matrix random_hermitian_spectrum(int n, std::uint64_t seed, double lo, double hi) {
    if (!(hi > lo)) throw ParameterError("random_hermitian_spectrum: empty range");
    // Random unitary extracted as the eigenbasis of a GUE draw.
    const Eigensystem es = eigh(random_hermitian(n, seed));
    std::mt19937_64 gen(seed ^ 0xabcdef1234567890ull);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> lam(n);
    for (int i = 0; i < n; ++i) lam[i] = u(gen);
    std::sort(lam.begin(), lam.end());
    Matrix w = es.evec;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) w(r, c) *= lam[c];
    return matmul(w, adjoint(es.evec));
}

} // namespace opcalc::linalg
