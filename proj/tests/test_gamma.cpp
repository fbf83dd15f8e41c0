#include <doctest.h>

#include <algorithm>

#include "sfield/gamma.hpp"
#include "sfield/oracles.hpp"
#include "support.hpp"

using namespace sfield;

namespace {

Spinor random_spinor(SplitMix64& rng) {
    Spinor s;
    for (int i = 0; i < 4; ++i) s[i] = cx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return s;
}

void check_clifford(const GammaSet& gs) {
    Matrix4 eta = minkowski_eta();
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            CMat4 anti = gs.up[k] * gs.up[l] + gs.up[l] * gs.up[k];
            CMat4 expect = cx(2.0 * eta.m[k][l]) * CMat4::identity();
            CHECK(max_abs_diff(anti, expect) == 0.0);
        }
}

oracle::RawCMat raw(const CMat4& m) {
    oracle::RawCMat r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = m.m[i][j];
    return r;
}

}  // namespace

TEST_CASE("dirac representation basics") {
    GammaSet gs = GammaSet::dirac_rep();
    CHECK(gs.up[0].m[0][0] == cx(1.0));
    CHECK(gs.up[0].m[2][2] == cx(-1.0));
    CHECK(max_abs_diff(gs.up[0] * gs.up[0], CMat4::identity()) == 0.0);
    CMat4 minus = cx(-1.0) * CMat4::identity();
    CHECK(max_abs_diff(gs.up[1] * gs.up[1], minus) == 0.0);

    // Hermiticity pattern: gamma^0 Hermitian, gamma^i anti-Hermitian.
    CHECK(max_abs_diff(dagger(gs.up[0]), gs.up[0]) == 0.0);
    for (int i = 1; i < 4; ++i)
        CHECK(max_abs_diff(dagger(gs.up[i]), cx(-1.0) * gs.up[i]) == 0.0);
}

TEST_CASE("clifford relation holds exactly in both representations") {
    check_clifford(GammaSet::dirac_rep());
    check_clifford(GammaSet::weyl_rep());
}

TEST_CASE("traces: tr gamma^k = 0, tr gamma^k gamma^l = 4 eta^{kl}") {
    for (const GammaSet& gs : {GammaSet::dirac_rep(), GammaSet::weyl_rep()}) {
        for (int k = 0; k < 4; ++k) CHECK(std::abs(trace(gs.up[k])) == 0.0);
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
                cx t = trace(gs.up[k] * gs.up[l]);
                CHECK(std::abs(t - cx(4.0 * minkowski_eta().m[k][l])) == 0.0);
            }
    }
}

TEST_CASE("four distinct lowered gammas are completely antisymmetric") {
    for (const GammaSet& gs : {GammaSet::dirac_rep(), GammaSet::weyl_rep()}) {
        CMat4 base = gs.down[0] * gs.down[1] * gs.down[2] * gs.down[3];
        int perm[4] = {0, 1, 2, 3};
        do {
            // permutation sign by counting inversions
            int inv = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    if (perm[i] > perm[j]) ++inv;
            CMat4 prod =
                gs.down[perm[0]] * gs.down[perm[1]] * gs.down[perm[2]] * gs.down[perm[3]];
            CMat4 expect = cx(inv % 2 == 0 ? 1.0 : -1.0) * base;
            CHECK(max_abs_diff(prod, expect) == 0.0);
        } while (std::next_permutation(perm, perm + 4));
    }
}

TEST_CASE("sigma values") {
    GammaSet gs = GammaSet::dirac_rep();
    for (int k = 0; k < 4; ++k) {
        CMat4 skk = sigma(gs, k, k);
        CMat4 expect = cx(0.5 * eta_diag(k)) * CMat4::identity();
        CHECK(max_abs_diff(skk, expect) == 0.0);
    }
    CMat4 sum = sigma(gs, 0, 1) + sigma(gs, 1, 0);
    CHECK(max_abs(sum) == 0.0);  // 1/2 {gamma_0, gamma_1} = eta_{01} I = 0

    CMat4 s12 = sigma(gs, 1, 2);
    CHECK(max_abs_diff(dagger(s12), cx(-1.0) * s12) == 0.0);  // anti-Hermitian
}

TEST_CASE("adjoint spinor examples and bilinear reality") {
    GammaSet gs = GammaSet::dirac_rep();
    Spinor e0{cx(1), cx(0), cx(0), cx(0)};
    Spinor b0 = adjoint(gs, e0);
    CHECK(b0[0] == cx(1.0));
    Spinor e2{cx(0), cx(0), cx(1), cx(0)};
    Spinor b2 = adjoint(gs, e2);
    CHECK(b2[2] == cx(-1.0));

    SplitMix64 rng(3001);
    for (int i = 0; i < 100; ++i) {
        Spinor psi = random_spinor(rng);
        cx v = dot(adjoint(gs, psi), psi);
        CHECK(std::fabs(v.imag()) < 1e-14);
    }
}

TEST_CASE("spin density: zero field, antisymmetry, oracle match") {
    GammaSet gs = GammaSet::dirac_rep();
    Matrix4 flat = Matrix4::identity();

    Spinor zero{};
    SpinDensity z = spin_density(gs, zero, flat);
    for (int mu = 0; mu < 4; ++mu)
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) CHECK(z.s[mu][k][l] == 0.0);

    SplitMix64 rng(3002);
    for (int rep = 0; rep < 25; ++rep) {
        Spinor psi = random_spinor(rng);
        Matrix4 H = testsupport::random_near_identity(rng);
        SpinDensity sd = spin_density(gs, psi, H);
        for (int mu = 0; mu < 4; ++mu)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    CHECK(sd.s[mu][k][l] == -sd.s[mu][l][k]);
    }

    // Independent element-wise expansion, flat vierbein.
    for (int rep = 0; rep < 10; ++rep) {
        Spinor psi = random_spinor(rng);
        Spinor bar = adjoint(gs, psi);
        SpinDensity sd = spin_density(gs, psi, flat);
        cx psiraw[4], barraw[4];
        for (int i = 0; i < 4; ++i) {
            psiraw[i] = psi[i];
            barraw[i] = bar[i];
        }
        for (int mu = 0; mu < 4; ++mu)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    oracle::RawCMat chain1[3] = {raw(gs.up[mu]), raw(gs.down[k]), raw(gs.down[l])};
                    oracle::RawCMat chain2[3] = {raw(gs.down[l]), raw(gs.down[k]), raw(gs.up[mu])};
                    cx v = cx(0, 0.125) * (oracle::gamma_product_expand(chain1, 3, psiraw, barraw) -
                                           oracle::gamma_product_expand(chain2, 3, psiraw, barraw));
                    CHECK(std::fabs(v.imag()) < 1e-12);
                    CHECK(sd.s[mu][k][l] == doctest::Approx(v.real()).epsilon(1e-12));
                }
    }
}

TEST_CASE("gamma product expansion oracle basics") {
    GammaSet gs = GammaSet::dirac_rep();
    SplitMix64 rng(3003);
    Spinor psi = random_spinor(rng);
    Spinor bar = adjoint(gs, psi);
    cx psiraw[4], barraw[4];
    for (int i = 0; i < 4; ++i) {
        psiraw[i] = psi[i];
        barraw[i] = bar[i];
    }

    oracle::RawCMat id[1] = {raw(CMat4::identity())};
    CHECK(oracle::gamma_product_expand(id, 1, psiraw, barraw) ==
          dot(bar, psi));

    oracle::RawCMat g0[1] = {raw(gs.up[0])};
    cx expect = 0.0;
    for (int i = 0; i < 4; ++i) expect += std::conj(psi[i]) * psi[i];
    CHECK(std::abs(oracle::gamma_product_expand(g0, 1, psiraw, barraw) - expect) < 1e-14);

    // Random 3-chain against the main-path matrix product.
    for (int rep = 0; rep < 20; ++rep) {
        int i = rng.next() % 4, j = rng.next() % 4, k = rng.next() % 4;
        oracle::RawCMat chain[3] = {raw(gs.up[i]), raw(gs.down[j]), raw(gs.up[k])};
        cx main = dot(bar * (gs.up[i] * gs.down[j] * gs.up[k]), psi);
        cx via = oracle::gamma_product_expand(chain, 3, psiraw, barraw);
        CHECK(std::abs(main - via) < 1e-12);
    }
}

TEST_CASE("spinor representation intertwines with the vector representation") {
    SplitMix64 rng(3004);
    for (const GammaSet& gs : {GammaSet::dirac_rep(), GammaSet::weyl_rep()}) {
        for (int rep = 0; rep < 10; ++rep) {
            Matrix4 K = testsupport::random_antisymmetric(rng);
            Matrix4 L = lorentz_from_generator(K);
            CMat4 S = spinor_rep(gs, K);
            CMat4 Sinv = spinor_rep(gs, -1.0 * K);
            CHECK(max_abs_diff(S * Sinv, CMat4::identity()) < 1e-12);
            for (int k = 0; k < 4; ++k) {
                CMat4 lhs = Sinv * gs.up[k] * S;
                CMat4 rhs;
                for (int l = 0; l < 4; ++l) rhs = rhs + cx(L.m[k][l]) * gs.up[l];
                CHECK(max_abs_diff(lhs, rhs) < 1e-12);
            }
            // gamma^0 S^dagger gamma^0 = S^{-1}
            CMat4 conj = gs.up[0] * dagger(S) * gs.up[0];
            CHECK(max_abs_diff(conj, Sinv) < 1e-12);
        }
    }
}

TEST_CASE("spin density behaves identically in the weyl representation") {
    GammaSet gs = GammaSet::weyl_rep();
    SplitMix64 rng(3005);
    for (int rep = 0; rep < 10; ++rep) {
        Spinor psi;
        for (int i = 0; i < 4; ++i) psi[i] = cx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        Matrix4 H = testsupport::random_near_identity(rng);
        SpinDensity sd = spin_density(gs, psi, H);
        for (int mu = 0; mu < 4; ++mu)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) CHECK(sd.s[mu][k][l] == -sd.s[mu][l][k]);
        // The psibar psi bilinear stays real here too.
        CHECK(std::fabs(dot(adjoint(gs, psi), psi).imag()) < 1e-14);
    }
}
