#include <doctest.h>

#include "sfield/oracles.hpp"
#include "sfield/tensor.hpp"
#include "support.hpp"

using namespace sfield;
using testsupport::random_antisymmetric;
using testsupport::random_matrix;
using testsupport::random_near_identity;

TEST_CASE("minkowski eta convention and self-inverse") {
    Matrix4 eta = minkowski_eta();
    CHECK(eta.m[0][0] == 1.0);
    CHECK(eta.m[1][1] == -1.0);
    CHECK(eta.m[2][2] == -1.0);
    CHECK(eta.m[3][3] == -1.0);
    CHECK(max_abs_diff(eta * eta, Matrix4::identity()) == 0.0);
    CHECK(max_abs_diff(eta, transpose(eta)) == 0.0);
}

TEST_CASE("invert4 on identity and diagonal matrices") {
    CHECK(max_abs_diff(invert4(Matrix4::identity()), Matrix4::identity()) == 0.0);
    Matrix4 d = Matrix4::diag(2, -1, -1, -1);
    Matrix4 expect = Matrix4::diag(0.5, -1, -1, -1);
    CHECK(max_abs_diff(invert4(d), expect) < 1e-15);
}

TEST_CASE("invert4 multiplies back to the identity on random matrices") {
    SplitMix64 rng(1001);
    int done = 0;
    while (done < 100) {
        Matrix4 m = random_matrix(rng);
        if (std::fabs(det4(m)) <= 0.1) continue;
        ++done;
        Matrix4 prod = invert4(m) * m;
        CHECK(max_abs_diff(prod, Matrix4::identity()) < 1e-12);
    }
}

TEST_CASE("invert4 rejects degenerate input") {
    Matrix4 sing;
    sing.m[0][0] = 1.0;
    sing.m[1][1] = 1.0;
    sing.m[2][2] = 1.0;  // row 3 all zero
    CHECK_THROWS_AS(invert4(sing), Degenerate);
}

TEST_CASE("double inverse returns the original") {
    SplitMix64 rng(1002);
    for (int i = 0; i < 50; ++i) {
        Matrix4 m = random_near_identity(rng);
        CHECK(max_abs_diff(invert4(invert4(m)), m) < 1e-10);
    }
}

TEST_CASE("det4 basics and cofactor oracle") {
    CHECK(det4(Matrix4::identity()) == 1.0);
    CHECK(det4(Matrix4::diag(2, 3, -1, 5)) == doctest::Approx(-30.0).epsilon(1e-14));

    SplitMix64 rng(1003);
    for (int i = 0; i < 100; ++i) {
        Matrix4 m = random_matrix(rng);
        double expect = oracle::det4_cofactor(m.m);
        double got = det4(m);
        CHECK(std::fabs(got - expect) <= 1e-12 * std::max(1.0, std::fabs(expect)));
    }
}

TEST_CASE("det4 is multiplicative") {
    SplitMix64 rng(1004);
    for (int i = 0; i < 50; ++i) {
        Matrix4 a = random_matrix(rng), b = random_matrix(rng);
        double lhs = det4(a * b);
        double rhs = det4(a) * det4(b);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(1.0, std::fabs(rhs)));
    }
}

TEST_CASE("reindex with eta: examples and involution") {
    Matrix4 eta = minkowski_eta();

    IndexedTensor t = IndexedTensor::vector(Variance::LocalUpper, 1, 0, 0, 0);
    IndexedTensor low = reindex(t, 0, eta);
    CHECK(low.variance[0] == Variance::LocalLower);
    CHECK(low.components[0] == 1.0);
    CHECK(low.components[1] == 0.0);

    IndexedTensor t2 = IndexedTensor::vector(Variance::LocalUpper, 0, 1, 0, 0);
    IndexedTensor low2 = reindex(t2, 0, eta);
    CHECK(low2.components[1] == -1.0);

    // Lower then raise with eta restores the tensor exactly.
    SplitMix64 rng(1005);
    IndexedTensor r;
    r.rank = 2;
    r.variance = {Variance::LocalUpper, Variance::LocalLower};
    r.components.resize(16);
    for (auto& c : r.components) c = rng.uniform(-2, 2);
    IndexedTensor back = reindex(reindex(r, 0, eta), 0, eta);
    for (int i = 0; i < 16; ++i) CHECK(back.components[i] == r.components[i]);
    CHECK(back.variance[0] == r.variance[0]);
}

TEST_CASE("reindex contracts the requested slot of a rank-3 tensor") {
    // t[a][b][c] = a + 10b + 100c; lower slot 1 with eta flips b=1..3 terms.
    IndexedTensor t;
    t.rank = 3;
    t.variance = {Variance::LocalUpper, Variance::LocalUpper, Variance::LocalUpper};
    t.components.resize(64);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) t.at({a, b, c}) = a + 10 * b + 100 * c;
    IndexedTensor r = reindex(t, 1, minkowski_eta());
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                CHECK(r.at({a, b, c}) == (b == 0 ? 1.0 : -1.0) * t.at({a, b, c}));
}

TEST_CASE("symmetric eigendecomposition reconstructs and orders") {
    SplitMix64 rng(1006);
    for (int i = 0; i < 40; ++i) {
        Matrix4 m = random_matrix(rng);
        Matrix4 sym;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) sym.m[a][b] = 0.5 * (m.m[a][b] + m.m[b][a]);
        EigenSym4 eig = eigen_symmetric(sym);
        for (int c = 1; c < 4; ++c) CHECK(eig.values[c - 1] >= eig.values[c]);
        // Q D Q^T = sym
        Matrix4 recon{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (int c = 0; c < 4; ++c)
                    acc += eig.vectors.m[a][c] * eig.values[c] * eig.vectors.m[b][c];
                recon.m[a][b] = acc;
            }
        CHECK(max_abs_diff(recon, sym) < 1e-12 * std::max(1.0, max_abs(sym)));
    }
}

TEST_CASE("lorentz_from_generator satisfies L^T eta L = eta") {
    SplitMix64 rng(1007);
    Matrix4 eta = minkowski_eta();
    for (int i = 0; i < 20; ++i) {
        Matrix4 K = random_antisymmetric(rng);
        Matrix4 L = lorentz_from_generator(K);
        CHECK(max_abs_diff(transpose(L) * eta * L, eta) < 1e-13);
    }
}

TEST_CASE("solve_linear handles a known system and flags singular ones") {
    double a[2][2] = {{2, 1}, {1, 3}};
    double b[2] = {5, 10};
    double x[2];
    solve_linear<double, 2>(a, b, x);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(3.0));

    double s[2][2] = {{1, 2}, {2, 4}};
    double sb[2] = {1, 2}, sx[2];
    CHECK_THROWS_AS((solve_linear<double, 2>(s, sb, sx)), SingularSystem);
}
