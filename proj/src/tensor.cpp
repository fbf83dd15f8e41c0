#include "sfield/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace sfield {

Matrix4 operator+(const Matrix4& a, const Matrix4& b) {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

Matrix4 operator-(const Matrix4& a, const Matrix4& b) {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

Matrix4 operator*(double s, const Matrix4& a) {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

Matrix4 transpose(const Matrix4& a) {
    Matrix4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[j][i];
    return r;
}

double max_abs(const Matrix4& a) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r = std::max(r, std::fabs(a.m[i][j]));
    return r;
}

double max_abs_diff(const Matrix4& a, const Matrix4& b) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r = std::max(r, std::fabs(a.m[i][j] - b.m[i][j]));
    return r;
}

bool is_finite(const Matrix4& a) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!std::isfinite(a.m[i][j])) return false;
    return true;
}

Matrix4 minkowski_eta() { return Matrix4::diag(1.0, -1.0, -1.0, -1.0); }

double det4(const Matrix4& a) {
    // LU with partial pivoting; sign tracked through row swaps.
    double lu[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) lu[i][j] = a.m[i][j];
    double det = 1.0;
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(lu[r][col]) > std::fabs(lu[piv][col])) piv = r;
        if (piv != col) {
            for (int c = 0; c < 4; ++c) std::swap(lu[col][c], lu[piv][c]);
            det = -det;
        }
        if (lu[col][col] == 0.0) return 0.0;
        det *= lu[col][col];
        for (int r = col + 1; r < 4; ++r) {
            double f = lu[r][col] / lu[col][col];
            for (int c = col; c < 4; ++c) lu[r][c] -= f * lu[col][c];
        }
    }
    return det;
}

Matrix4 invert4(const Matrix4& a) {
    double scale = max_abs(a);
    double d = det4(a);
    if (std::fabs(d) <= 1e-10 * scale * scale * scale * scale)
        throw Degenerate("matrix is degenerate (|det| below scale-aware threshold)");

    // Gauss-Jordan on [a | I].
    double w[4][8];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) w[i][j] = a.m[i][j];
        for (int j = 0; j < 4; ++j) w[i][4 + j] = (i == j) ? 1.0 : 0.0;
    }
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(w[r][col]) > std::fabs(w[piv][col])) piv = r;
        if (piv != col)
            for (int c = 0; c < 8; ++c) std::swap(w[col][c], w[piv][c]);
        double p = w[col][col];
        for (int c = 0; c < 8; ++c) w[col][c] /= p;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = w[r][col];
            if (f == 0.0) continue;
            for (int c = 0; c < 8; ++c) w[r][c] -= f * w[col][c];
        }
    }
    Matrix4 inv;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) inv.m[i][j] = w[i][4 + j];
    return inv;
}

EigenSym4 eigen_symmetric(const Matrix4& a) {
    double v[4][4];
    double q[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            v[i][j] = 0.5 * (a.m[i][j] + a.m[j][i]);
            q[i][j] = (i == j) ? 1.0 : 0.0;
        }

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) off += v[i][j] * v[i][j];
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p) {
            for (int r = p + 1; r < 4; ++r) {
                if (std::fabs(v[p][r]) < 1e-300) continue;
                double theta = (v[r][r] - v[p][p]) / (2.0 * v[p][r]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < 4; ++k) {
                    double vkp = v[k][p], vkr = v[k][r];
                    v[k][p] = c * vkp - s * vkr;
                    v[k][r] = s * vkp + c * vkr;
                }
                for (int k = 0; k < 4; ++k) {
                    double vpk = v[p][k], vrk = v[r][k];
                    v[p][k] = c * vpk - s * vrk;
                    v[r][k] = s * vpk + c * vrk;
                    double qkp = q[k][p], qkr = q[k][r];
                    q[k][p] = c * qkp - s * qkr;
                    q[k][r] = s * qkp + c * qkr;
                }
            }
        }
    }

    // Sort eigenvalues descending (stable), sign-fix each column.
    int order[4] = {0, 1, 2, 3};
    std::stable_sort(order, order + 4, [&](int i, int j) { return v[i][i] > v[j][j]; });
    EigenSym4 out;
    for (int c = 0; c < 4; ++c) {
        int src = order[c];
        out.values[c] = v[src][src];
        int big = 0;
        for (int rws = 1; rws < 4; ++rws)
            if (std::fabs(q[rws][src]) > std::fabs(q[big][src])) big = rws;
        double sgn = q[big][src] < 0 ? -1.0 : 1.0;
        for (int rws = 0; rws < 4; ++rws) out.vectors.m[rws][c] = sgn * q[rws][src];
    }
    return out;
}

Matrix4 lorentz_from_generator(const Matrix4& antisym) {
    Matrix4 g = minkowski_eta() * antisym;  // eta*K is the Lorentz algebra element
    // Scaling and squaring with a Taylor series for the scaled exponential.
    double norm = max_abs(g);
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    double f = std::ldexp(1.0, -squarings);
    Matrix4 gs = f * g;
    Matrix4 result = Matrix4::identity();
    Matrix4 term = Matrix4::identity();
    for (int n = 1; n <= 24; ++n) {
        term = (1.0 / n) * (term * gs);
        result = result + term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

Variance flipped(Variance v) {
    switch (v) {
        case Variance::GlobalUpper: return Variance::GlobalLower;
        case Variance::GlobalLower: return Variance::GlobalUpper;
        case Variance::LocalUpper: return Variance::LocalLower;
        case Variance::LocalLower: return Variance::LocalUpper;
    }
    return v;
}

IndexedTensor IndexedTensor::vector(Variance v, double c0, double c1, double c2, double c3) {
    IndexedTensor t;
    t.rank = 1;
    t.variance = {v};
    t.components = {c0, c1, c2, c3};
    return t;
}

std::size_t IndexedTensor::flat_index(const int idx[]) const {
    std::size_t f = 0;
    for (int s = 0; s < rank; ++s) f = f * 4 + static_cast<std::size_t>(idx[s]);
    return f;
}

double IndexedTensor::at(std::initializer_list<int> idx) const {
    int buf[4] = {0, 0, 0, 0};
    int s = 0;
    for (int i : idx) buf[s++] = i;
    return components[flat_index(buf)];
}

double& IndexedTensor::at(std::initializer_list<int> idx) {
    int buf[4] = {0, 0, 0, 0};
    int s = 0;
    for (int i : idx) buf[s++] = i;
    return components[flat_index(buf)];
}

IndexedTensor reindex(const IndexedTensor& t, int slot, const Matrix4& metric) {
    IndexedTensor out = t;
    out.variance[slot] = flipped(t.variance[slot]);

    std::size_t stride = 1;
    for (int s = slot + 1; s < t.rank; ++s) stride *= 4;
    std::size_t block = stride * 4;

    for (std::size_t base = 0; base < t.components.size(); base += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            double in[4], res[4];
            for (int b = 0; b < 4; ++b) in[b] = t.components[base + b * stride + inner];
            for (int a = 0; a < 4; ++a) {
                double s = 0.0;
                for (int b = 0; b < 4; ++b) s += metric.m[a][b] * in[b];
                res[a] = s;
            }
            for (int a = 0; a < 4; ++a) out.components[base + a * stride + inner] = res[a];
        }
    }
    return out;
}

}  // namespace sfield
