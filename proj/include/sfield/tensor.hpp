#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sfield/errors.hpp"

namespace sfield {

struct Point4 {
    double x[4]{0, 0, 0, 0};
    double operator[](int i) const { return x[i]; }
    double& operator[](int i) { return x[i]; }
};

// Plain 4x4 real matrix. Index semantics (which slot is local/global,
// upper/lower) are carried by the caller; see docs/conventions.md.
struct Matrix4 {
    double m[4][4]{};

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    static Matrix4 identity() {
        Matrix4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }
    static Matrix4 zero() { return Matrix4{}; }
    static Matrix4 diag(double a, double b, double c, double d) {
        Matrix4 r;
        r.m[0][0] = a;
        r.m[1][1] = b;
        r.m[2][2] = c;
        r.m[3][3] = d;
        return r;
    }
};

Matrix4 operator+(const Matrix4& a, const Matrix4& b);
Matrix4 operator-(const Matrix4& a, const Matrix4& b);
Matrix4 operator*(const Matrix4& a, const Matrix4& b);
Matrix4 operator*(double s, const Matrix4& a);
Matrix4 transpose(const Matrix4& a);

double max_abs(const Matrix4& a);
double max_abs_diff(const Matrix4& a, const Matrix4& b);
bool is_finite(const Matrix4& a);

// eta = diag(+1,-1,-1,-1); the fixed local Lorentz metric.
Matrix4 minkowski_eta();
inline double eta_diag(int k) { return k == 0 ? 1.0 : -1.0; }

double det4(const Matrix4& a);

// Inverse via Gaussian elimination with partial pivoting. Throws Degenerate
// when |det| <= 1e-10 * (max|entry|)^4.
Matrix4 invert4(const Matrix4& a);

// Symmetric 4x4 eigendecomposition (cyclic Jacobi). Eigenvalues sorted in
// descending order, eigenvectors are the matching columns of `vectors`,
// each column sign-fixed so its largest-magnitude entry is positive.
struct EigenSym4 {
    double values[4];
    Matrix4 vectors;
};
EigenSym4 eigen_symmetric(const Matrix4& a);

// exp(eta*K) for antisymmetric K: a Lorentz matrix L with L^T eta L = eta.
Matrix4 lorentz_from_generator(const Matrix4& antisym);

// ---------------------------------------------------------------------------
// Indexed tensors: rank 1..4, per-slot variance tags, row-major flat storage
// (slot 0 is the outermost / slowest index).
// ---------------------------------------------------------------------------

enum class Variance { GlobalUpper, GlobalLower, LocalUpper, LocalLower };

Variance flipped(Variance v);

struct IndexedTensor {
    int rank = 0;
    std::vector<Variance> variance;
    std::vector<double> components;  // size 4^rank

    static IndexedTensor vector(Variance v, double c0, double c1, double c2, double c3);

    std::size_t flat_index(const int idx[]) const;
    double at(std::initializer_list<int> idx) const;
    double& at(std::initializer_list<int> idx);
};

// Contracts `metric` with one slot and flips that slot's variance tag:
//   out[..., a, ...] = sum_b metric(a, b) * t[..., b, ...]
// The caller supplies the metric matching the slot's index family
// (eta for local slots, g or g-inverse for global slots).
IndexedTensor reindex(const IndexedTensor& t, int slot, const Matrix4& metric);

// ---------------------------------------------------------------------------
// Small dense linear solve, templated so it can run on plain doubles or on
// jet scalars (value + derivatives). `pivot_mag` must be visible for T.
// ---------------------------------------------------------------------------

inline double pivot_mag(double v) { return std::fabs(v); }

template <class T, int N>
void solve_linear(T a[N][N], T b[N], T x[N]) {
    int perm[N];
    for (int i = 0; i < N; ++i) perm[i] = i;
    double scale = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) scale = std::max(scale, pivot_mag(a[i][j]));
    if (scale == 0.0) throw SingularSystem("zero system matrix");

    for (int col = 0; col < N; ++col) {
        int piv = col;
        double best = pivot_mag(a[perm[col]][col]);
        for (int r = col + 1; r < N; ++r) {
            double mag = pivot_mag(a[perm[r]][col]);
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (best <= 1e-13 * scale) throw SingularSystem("rank-deficient linear system");
        std::swap(perm[col], perm[piv]);
        for (int r = col + 1; r < N; ++r) {
            T f = a[perm[r]][col] / a[perm[col]][col];
            for (int c = col; c < N; ++c) a[perm[r]][c] = a[perm[r]][c] - f * a[perm[col]][c];
            b[perm[r]] = b[perm[r]] - f * b[perm[col]];
        }
    }
    for (int row = N - 1; row >= 0; --row) {
        T acc = b[perm[row]];
        for (int c = row + 1; c < N; ++c) acc = acc - a[perm[row]][c] * x[c];
        x[row] = acc / a[perm[row]][row];
    }
}

}  // namespace sfield
