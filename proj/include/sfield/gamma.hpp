#pragma once

#include <array>
#include <complex>

#include "sfield/errors.hpp"
#include "sfield/tensor.hpp"

namespace sfield {

using cx = std::complex<double>;

struct CMat4 {
    cx m[4][4]{};

    cx& operator()(int i, int j) { return m[i][j]; }
    cx operator()(int i, int j) const { return m[i][j]; }

    static CMat4 identity() {
        CMat4 r;
        for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
        return r;
    }
    static CMat4 zero() { return CMat4{}; }
};

CMat4 operator+(const CMat4& a, const CMat4& b);
CMat4 operator-(const CMat4& a, const CMat4& b);
CMat4 operator*(const CMat4& a, const CMat4& b);
CMat4 operator*(cx s, const CMat4& a);
CMat4 dagger(const CMat4& a);
cx trace(const CMat4& a);
double max_abs(const CMat4& a);
double max_abs_diff(const CMat4& a, const CMat4& b);

using Spinor = std::array<cx, 4>;  // also used for row (adjoint) components

Spinor operator*(const CMat4& a, const Spinor& v);  // column action
Spinor operator*(const Spinor& r, const CMat4& a);  // row action
Spinor operator+(const Spinor& a, const Spinor& b);
Spinor operator-(const Spinor& a, const Spinor& b);
Spinor operator*(cx s, const Spinor& a);
cx dot(const Spinor& row, const Spinor& col);
double norm(const Spinor& v);

// The four local-frame gamma matrices, {gamma^k, gamma^l} = 2 eta^{kl} I,
// gamma^0 Hermitian, gamma^1..3 anti-Hermitian. `up[k]` is gamma^k and
// `down[k]` = eta_{kl} gamma^l.
struct GammaSet {
    CMat4 up[4];
    CMat4 down[4];

    static GammaSet dirac_rep();
    static GammaSet weyl_rep();
};

// S_kl = 1/2 gamma_k gamma_l (plain product, not antisymmetrized).
CMat4 sigma(const GammaSet& gs, int k, int l);

// psibar = psi^dagger gamma^0, as row components.
Spinor adjoint(const GammaSet& gs, const Spinor& psi);

// Global gamma: gamma^mu(x) = h_k^mu gamma^k, with H(k,mu) = h_k^mu.
CMat4 global_gamma(const GammaSet& gs, const Matrix4& H, int mu);

// Matter spin density S^mu_kl = (i/8) psibar (gamma^mu gamma_k gamma_l -
// gamma_l gamma_k gamma^mu) psi; antisymmetric in (k,l), real up to rounding.
struct SpinDensity {
    double s[4][4][4]{};  // [mu][k][l]
};
SpinDensity spin_density(const GammaSet& gs, const Spinor& psi, const Matrix4& H);

// Spinor representation of the Lorentz transformation exp(eta*K):
// S = exp(1/8 K_{kl} [gamma^k, gamma^l]), satisfying
// S^{-1} gamma^k S = L^k_l gamma^l for L = lorentz_from_generator(K).
CMat4 spinor_rep(const GammaSet& gs, const Matrix4& antisym);

}  // namespace sfield
