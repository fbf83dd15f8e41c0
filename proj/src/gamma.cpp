#include "sfield/gamma.hpp"

#include <cmath>

namespace sfield {

CMat4 operator+(const CMat4& a, const CMat4& b) {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

CMat4 operator-(const CMat4& a, const CMat4& b) {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

CMat4 operator*(const CMat4& a, const CMat4& b) {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cx s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m[i][k] * b.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

CMat4 operator*(cx s, const CMat4& a) {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

CMat4 dagger(const CMat4& a) {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.m[i][j] = std::conj(a.m[j][i]);
    return r;
}

cx trace(const CMat4& a) { return a.m[0][0] + a.m[1][1] + a.m[2][2] + a.m[3][3]; }

double max_abs(const CMat4& a) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r = std::max(r, std::abs(a.m[i][j]));
    return r;
}

double max_abs_diff(const CMat4& a, const CMat4& b) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r = std::max(r, std::abs(a.m[i][j] - b.m[i][j]));
    return r;
}

Spinor operator*(const CMat4& a, const Spinor& v) {
    Spinor r{};
    for (int i = 0; i < 4; ++i) {
        cx s = 0.0;
        for (int j = 0; j < 4; ++j) s += a.m[i][j] * v[j];
        r[i] = s;
    }
    return r;
}

Spinor operator*(const Spinor& rv, const CMat4& a) {
    Spinor r{};
    for (int j = 0; j < 4; ++j) {
        cx s = 0.0;
        for (int i = 0; i < 4; ++i) s += rv[i] * a.m[i][j];
        r[j] = s;
    }
    return r;
}

Spinor operator+(const Spinor& a, const Spinor& b) {
    Spinor r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + b[i];
    return r;
}

Spinor operator-(const Spinor& a, const Spinor& b) {
    Spinor r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] - b[i];
    return r;
}

Spinor operator*(cx s, const Spinor& a) {
    Spinor r;
    for (int i = 0; i < 4; ++i) r[i] = s * a[i];
    return r;
}

cx dot(const Spinor& row, const Spinor& col) {
    return row[0] * col[0] + row[1] * col[1] + row[2] * col[2] + row[3] * col[3];
}

double norm(const Spinor& v) {
    double s = 0.0;
    for (const cx& c : v) s += std::norm(c);
    return std::sqrt(s);
}

static void fill_lowered(GammaSet& gs) {
    for (int k = 0; k < 4; ++k) gs.down[k] = cx(eta_diag(k)) * gs.up[k];
}

GammaSet GammaSet::dirac_rep() {
    const cx I(0.0, 1.0);
    GammaSet gs;
    // gamma^0 = diag(1,1,-1,-1)
    gs.up[0].m[0][0] = 1.0;
    gs.up[0].m[1][1] = 1.0;
    gs.up[0].m[2][2] = -1.0;
    gs.up[0].m[3][3] = -1.0;
    // gamma^i = [[0, sigma_i], [-sigma_i, 0]]
    // sigma_1
    gs.up[1].m[0][3] = 1.0;
    gs.up[1].m[1][2] = 1.0;
    gs.up[1].m[2][1] = -1.0;
    gs.up[1].m[3][0] = -1.0;
    // sigma_2
    gs.up[2].m[0][3] = -I;
    gs.up[2].m[1][2] = I;
    gs.up[2].m[2][1] = I;
    gs.up[2].m[3][0] = -I;
    // sigma_3
    gs.up[3].m[0][2] = 1.0;
    gs.up[3].m[1][3] = -1.0;
    gs.up[3].m[2][0] = -1.0;
    gs.up[3].m[3][1] = 1.0;
    fill_lowered(gs);
    return gs;
}

GammaSet GammaSet::weyl_rep() {
    const cx I(0.0, 1.0);
    GammaSet gs;
    // gamma^0 = [[0, I2], [I2, 0]]
    gs.up[0].m[0][2] = 1.0;
    gs.up[0].m[1][3] = 1.0;
    gs.up[0].m[2][0] = 1.0;
    gs.up[0].m[3][1] = 1.0;
    // gamma^i = [[0, sigma_i], [-sigma_i, 0]]
    gs.up[1].m[0][3] = 1.0;
    gs.up[1].m[1][2] = 1.0;
    gs.up[1].m[2][1] = -1.0;
    gs.up[1].m[3][0] = -1.0;
    gs.up[2].m[0][3] = -I;
    gs.up[2].m[1][2] = I;
    gs.up[2].m[2][1] = I;
    gs.up[2].m[3][0] = -I;
    gs.up[3].m[0][2] = 1.0;
    gs.up[3].m[1][3] = -1.0;
    gs.up[3].m[2][0] = -1.0;
    gs.up[3].m[3][1] = 1.0;
    fill_lowered(gs);
    return gs;
}

CMat4 sigma(const GammaSet& gs, int k, int l) { return cx(0.5) * (gs.down[k] * gs.down[l]); }

Spinor adjoint(const GammaSet& gs, const Spinor& psi) {
    Spinor conj;
    for (int i = 0; i < 4; ++i) conj[i] = std::conj(psi[i]);
    return conj * gs.up[0];
}

CMat4 global_gamma(const GammaSet& gs, const Matrix4& H, int mu) {
    CMat4 g;
    for (int k = 0; k < 4; ++k) g = g + cx(H.m[k][mu]) * gs.up[k];
    return g;
}

SpinDensity spin_density(const GammaSet& gs, const Spinor& psi, const Matrix4& H) {
    const cx i8(0.0, 0.125);
    Spinor bar = adjoint(gs, psi);
    double scale = std::max(1.0, norm(psi) * norm(psi));

    SpinDensity out;
    for (int mu = 0; mu < 4; ++mu) {
        CMat4 gmu = global_gamma(gs, H, mu);
        for (int k = 0; k < 4; ++k)
            for (int l = k + 1; l < 4; ++l) {
                CMat4 op = gmu * gs.down[k] * gs.down[l] - gs.down[l] * gs.down[k] * gmu;
                cx val = i8 * dot(bar * op, psi);
                if (std::fabs(val.imag()) > 1e-10 * scale)
                    throw NonRealDensity("spin density has a non-real component");
                out.s[mu][k][l] = val.real();
                out.s[mu][l][k] = -val.real();
            }
    }
    return out;
}

CMat4 spinor_rep(const GammaSet& gs, const Matrix4& antisym) {
    // exponent = 1/8 K_{kl} [gamma^k, gamma^l]
    CMat4 gen;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            if (antisym.m[k][l] == 0.0) continue;
            CMat4 comm = gs.up[k] * gs.up[l] - gs.up[l] * gs.up[k];
            gen = gen + cx(0.125 * antisym.m[k][l]) * comm;
        }
    // Scaling-and-squaring exponential.
    double nrm = max_abs(gen);
    int squarings = 0;
    while (nrm > 0.5) {
        nrm *= 0.5;
        ++squarings;
    }
    cx f(std::ldexp(1.0, -squarings));
    CMat4 scaled = f * gen;
    CMat4 result = CMat4::identity();
    CMat4 term = CMat4::identity();
    for (int n = 1; n <= 24; ++n) {
        term = cx(1.0 / n) * (term * scaled);
        result = result + term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

}  // namespace sfield
