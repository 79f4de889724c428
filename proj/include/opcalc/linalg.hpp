#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace opcalc::linalg {

using cplx = std::complex<double>;

// Dense row-major matrix over double or complex<double>.
template <class T>
class Dense {
public:
    Dense() = default;
    Dense(int rows, int cols) : m_rows(rows), m_cols(cols), m_a((std::size_t)rows * cols, T(0)) {}

    static Dense identity(int n) {
        Dense m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int rows() const { return m_rows; }
    int cols() const { return m_cols; }

    T& operator()(int i, int j) { return m_a[(std::size_t)i * m_cols + j]; }
    const T& operator()(int i, int j) const { return m_a[(std::size_t)i * m_cols + j]; }

    T* row(int i) { return m_a.data() + (std::size_t)i * m_cols; }
    const T* row(int i) const { return m_a.data() + (std::size_t)i * m_cols; }

    T* data() { return m_a.data(); }
    const T* data() const { return m_a.data(); }

private:
    int m_rows = 0, m_cols = 0;
    std::vector<T> m_a;
};

using Matrix = Dense<cplx>;
using RealMatrix = Dense<double>;

Matrix to_complex(const RealMatrix& a);
RealMatrix real_part(const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
Matrix adjoint(const Matrix& a);
template <class T> Dense<T> transpose(const Dense<T>& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
RealMatrix add(const RealMatrix& a, const RealMatrix& b);
RealMatrix sub(const RealMatrix& a, const RealMatrix& b);
void axpy(Matrix& y, cplx alpha, const Matrix& x); // y += alpha * x

double max_abs(const Matrix& a);
double max_abs(const RealMatrix& a);
double fro_norm(const Matrix& a);

// ---- symmetric tridiagonal core ----

// d has length n, e length n-1 with e[i] = T(i+1, i).
struct SymTri {
    std::vector<double> d;
    std::vector<double> e;
    int dim() const { return (int)d.size(); }
};

// Implicit-shift QL on (d, e). Eigenvalues land in d (unsorted). If z is
// non-null its COLUMNS are rotated along, so z initialized to the
// tridiagonalizing basis ends up holding eigenvectors in columns.
void symtri_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z);
void symtri_ql(std::vector<double>& d, std::vector<double>& e, RealMatrix* z);

// Eigenvalues only, sorted ascending. O(n^2), no vector storage.
std::vector<double> symtri_eigenvalues(SymTri t);

// Selected eigenvectors by inverse iteration on the tridiagonal matrix.
// `evals` must hold converged eigenvalues sorted ascending (all of them);
// `idx` selects which ones to build vectors for. Vectors come back as the
// columns of the result, in the order of idx, orthonormalized within
// near-degenerate clusters.
RealMatrix symtri_eigenvectors_subset(const SymTri& t,
                                      const std::vector<double>& evals,
                                      const std::vector<int>& idx);

// ---- Householder tridiagonalization ----

struct TridiagC {
    SymTri t;
    Matrix q; // unitary, q^* A q = T; empty when want_q = false
};
struct TridiagR {
    SymTri t;
    RealMatrix q;
};

TridiagC tridiagonalize(const Matrix& a, bool want_q);
TridiagR tridiagonalize(const RealMatrix& a, bool want_q);

// ---- full and partial Hermitian eigensolvers ----

struct Eigensystem {
    std::vector<double> eval; // ascending
    Matrix evec;              // columns
};
struct RealEigensystem {
    std::vector<double> eval;
    RealMatrix evec;
};

Eigensystem eigh(const Matrix& a);
RealEigensystem eigh(const RealMatrix& a);
std::vector<double> eigvalsh(const Matrix& a);
std::vector<double> eigvalsh(const RealMatrix& a);

// Eigenvalues (all, ascending) plus eigenvectors for the selected
// positions only, via tridiagonal inverse iteration + back-transform.
// Returns vectors as columns in idx order. Much cheaper than eigh when
// only a few vectors are needed.
struct PartialRealEig {
    std::vector<double> eval;  // all eigenvalues ascending
    RealMatrix vec;            // n x idx.size()
};
PartialRealEig eigh_partial(const RealMatrix& a, const std::vector<int>& idx);

// ---- dense LU with partial pivoting (complex) ----

struct LUFactors {
    Matrix a;             // packed L\U
    std::vector<int> piv; // row swaps, applied in order
};

LUFactors lu_factor(Matrix a);
void lu_solve_inplace(const LUFactors& f, Matrix& b); // B := A^{-1} B
Matrix inverse(const Matrix& a);

// ---- shifted tridiagonal LU (complex shift, partial pivoting) ----

struct TriLU {
    std::vector<cplx> dl, dd, du, du2;
    std::vector<int> swapped; // 1 where rows i, i+1 were exchanged
    int n = 0;
};

TriLU tri_lu_shifted(const SymTri& t, cplx z);
void tri_lu_solve(const TriLU& f, cplx* b);                  // (T - z) x = b
Matrix tri_lu_solve_columns(const TriLU& f, const Matrix& b);
// Solves X (T - z) = B using symmetry of T - z (equals column-solves of
// transposed right-hand side).
Matrix tri_lu_solve_rows(const TriLU& f, const Matrix& b);
Matrix tri_lu_inverse(const TriLU& f);

// ---- singular values and Schatten norms ----

std::vector<double> singular_values(const Matrix& a); // descending
double operator_norm(const Matrix& a);
// p in [1, inf); p = infinity is operator_norm. Computed from the full
// singular value set, so only for moderate dimensions.
double schatten_norm(const Matrix& a, double p);

// ---- Hermitian operator with cached spectral decomposition ----

class HermitianOperator {
public:
    // Checks Hermiticity up to `tol * max_abs`; throws ParameterError.
    explicit HermitianOperator(Matrix h, double tol = 1e-12);

    int dim() const { return m_h.rows(); }
    const Matrix& matrix() const { return m_h; }
    const Eigensystem& eig() const; // computed once, thread-safe

    // f(H) through the spectral decomposition.
    Matrix apply_function(const std::function<double(double)>& f) const;
    // Orthogonal projection onto the strictly negative spectral subspace.
    Matrix spectral_projection_negative() const;
    // (H - z)^{-1} by dense LU; SingularityError if z is (numerically) in
    // the spectrum.
    Matrix resolvent(cplx z) const;

private:
    Matrix m_h;
    mutable std::shared_ptr<Eigensystem> m_eig;
    mutable std::once_flag m_once;
};

// Derivative of f at h0 in direction v: U (f[l_i, l_j] o (U^* V U)) U^*,
// with the divided difference f[a,b] falling back to fprime near the
// diagonal (|a - b| below 1e-8 times the spectral scale).
Matrix gateaux_derivative(const HermitianOperator& h0, const Matrix& v,
                          const std::function<double(double)>& f,
                          const std::function<double(double)>& fprime);

// ---- deterministic random test matrices ----

// Dense Hermitian with independent Gaussian entries (GUE-like), fixed by
// the seed.
Matrix random_hermitian(int n, std::uint64_t seed, double scale = 1.0);
// Hermitian with prescribed eigenvalue range: eigenvalues uniform in
// [lo, hi], conjugated by a random unitary.
Matrix random_hermitian_spectrum(int n, std::uint64_t seed, double lo, double hi);

} // namespace opcalc::linalg
