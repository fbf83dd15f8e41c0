#pragma once

// Shared helpers for the test suites: deterministic random values, random
// well-conditioned matrices, and expression-string builders for smooth
// orthonormal frames and vierbein bundles.

#include <array>
#include <cmath>
#include <string>

#include "sfield/scenario.hpp"

namespace testsupport {

using sfield::Matrix4;
using sfield::Point4;
using sfield::SplitMix64;

inline Point4 random_point(SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    Point4 p;
    for (int a = 0; a < 4; ++a) p.x[a] = rng.uniform(lo, hi);
    return p;
}

inline Matrix4 random_matrix(SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    Matrix4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m.m[i][j] = rng.uniform(lo, hi);
    return m;
}

// Identity plus a small random perturbation; comfortably invertible.
inline Matrix4 random_near_identity(SplitMix64& rng, double eps = 0.2) {
    Matrix4 m = Matrix4::identity();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m.m[i][j] += rng.uniform(-eps, eps);
    return m;
}

inline Matrix4 random_antisymmetric(SplitMix64& rng, double scale = 0.5) {
    Matrix4 k;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double v = rng.uniform(-scale, scale);
            k.m[i][j] = v;
            k.m[j][i] = -v;
        }
    return k;
}

// --- expression-string matrix algebra -------------------------------------

using ExprMat = std::array<std::array<std::string, 4>, 4>;

inline ExprMat expr_identity() {
    ExprMat m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m[i][j] = (i == j) ? "1" : "0";
    return m;
}

inline ExprMat expr_mul(const ExprMat& a, const ExprMat& b) {
    ExprMat r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::string acc;
            for (int k = 0; k < 4; ++k) {
                if (a[i][k] == "0" || b[k][j] == "0") continue;
                std::string term = "(" + a[i][k] + ")*(" + b[k][j] + ")";
                acc = acc.empty() ? term : acc + " + " + term;
            }
            r[i][j] = acc.empty() ? "0" : acc;
        }
    return r;
}

// Elementary Lorentz factors with position-dependent angles.
inline ExprMat expr_rotation(int axis_a, int axis_b, const std::string& angle) {
    ExprMat m = expr_identity();
    m[axis_a][axis_a] = "cos(" + angle + ")";
    m[axis_b][axis_b] = "cos(" + angle + ")";
    m[axis_a][axis_b] = "-sin(" + angle + ")";
    m[axis_b][axis_a] = "sin(" + angle + ")";
    return m;
}

inline ExprMat expr_boost(int axis, const std::string& rapidity) {
    ExprMat m = expr_identity();
    m[0][0] = "cosh(" + rapidity + ")";
    m[axis][axis] = "cosh(" + rapidity + ")";
    m[0][axis] = "sinh(" + rapidity + ")";
    m[axis][0] = "sinh(" + rapidity + ")";
    return m;
}

inline std::string random_angle_expr(SplitMix64& rng) {
    const char* coords[4] = {"x0", "x1", "x2", "x3"};
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.3f*sin(%s + %.3f*%s)", rng.uniform(-0.4, 0.4),
                  coords[rng.next() % 4], rng.uniform(-0.8, 0.8), coords[rng.next() % 4]);
    return buf;
}

// A smooth orthonormal frame: product of 2-3 elementary rotations/boosts with
// smooth position-dependent parameters.
inline sfield::FrameField random_smooth_frame(SplitMix64& rng) {
    ExprMat m = expr_identity();
    int factors = 2 + static_cast<int>(rng.next() % 2);
    for (int f = 0; f < factors; ++f) {
        int which = static_cast<int>(rng.next() % 6);
        std::string ang = random_angle_expr(rng);
        ExprMat e;
        if (which < 3) e = expr_boost(1 + which, ang);
        else {
            int pairs[3][2] = {{1, 2}, {1, 3}, {2, 3}};
            e = expr_rotation(pairs[which - 3][0], pairs[which - 3][1], ang);
        }
        m = expr_mul(m, e);
    }
    sfield::FrameField out;
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) out.entry(k, j) = sfield::parse_expression(m[k][j]);
    return out;
}

// A smooth nondegenerate bundle: identity plus small smooth entries.
inline sfield::VierbeinBundle random_smooth_bundle(SplitMix64& rng, double eps = 0.15) {
    std::array<sfield::Expression, 16> e;
    const char* coords[4] = {"x0", "x1", "x2", "x3"};
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s %.4f*sin(%.3f*%s + %.3f*%s)",
                          (k == mu) ? "1 +" : "", eps * rng.uniform(0.3, 1.0),
                          rng.uniform(-1.0, 1.0), coords[rng.next() % 4], rng.uniform(-1.0, 1.0),
                          coords[rng.next() % 4]);
            e[k * 4 + mu] = sfield::parse_expression(buf);
        }
    return sfield::VierbeinBundle(e);
}

// FRW-style bundle h_k^mu = diag(1, 1/a, 1/a, 1/a) with a = exp(x0).
inline sfield::VierbeinBundle frw_bundle() {
    std::array<sfield::Expression, 16> e;
    for (int i = 0; i < 16; ++i) e[i] = sfield::parse_expression("0");
    e[0] = sfield::parse_expression("1");
    for (int k = 1; k < 4; ++k) e[k * 4 + k] = sfield::parse_expression("1/exp(x0)");
    return sfield::VierbeinBundle(e);
}

// The matching lower-index FRW metric, 10 components for the metric oracle.
inline std::array<sfield::Expression, 10> frw_metric_lower() {
    std::array<sfield::Expression, 10> g;
    for (int i = 0; i < 10; ++i) g[i] = sfield::parse_expression("0");
    g[0] = sfield::parse_expression("1");
    g[4] = sfield::parse_expression("-exp(x0)^2");
    g[7] = sfield::parse_expression("-exp(x0)^2");
    g[9] = sfield::parse_expression("-exp(x0)^2");
    return g;
}

// Schwarzschild-form diagonal vierbein (mass parameter M bound as constant).
inline sfield::VierbeinBundle schwarzschild_bundle(double M) {
    std::map<std::string, double> c{{"M", M}};
    std::array<sfield::Expression, 16> e;
    for (int i = 0; i < 16; ++i) e[i] = sfield::parse_expression("0");
    e[0] = sfield::parse_expression("1/sqrt(1 - 2*M/x1)", c);
    e[5] = sfield::parse_expression("sqrt(1 - 2*M/x1)", c);
    e[10] = sfield::parse_expression("1/x1", c);
    e[15] = sfield::parse_expression("1/(x1*sin(x2))", c);
    return sfield::VierbeinBundle(e);
}

inline std::array<sfield::Expression, 10> schwarzschild_metric_lower(double M) {
    std::map<std::string, double> c{{"M", M}};
    std::array<sfield::Expression, 10> g;
    for (int i = 0; i < 10; ++i) g[i] = sfield::parse_expression("0");
    g[0] = sfield::parse_expression("1 - 2*M/x1", c);
    g[4] = sfield::parse_expression("-1/(1 - 2*M/x1)", c);
    g[7] = sfield::parse_expression("-x1^2", c);
    g[9] = sfield::parse_expression("-(x1*sin(x2))^2", c);
    return g;
}

// Milne-style vierbein: flat spacetime in hyperbolic coordinates; every
// curvature component vanishes identically.
inline sfield::VierbeinBundle milne_bundle() {
    std::array<sfield::Expression, 16> e;
    for (int i = 0; i < 16; ++i) e[i] = sfield::parse_expression("0");
    e[0] = sfield::parse_expression("1");
    e[5] = sfield::parse_expression("1/x0");
    e[10] = sfield::parse_expression("1/(x0*sinh(x1))");
    e[15] = sfield::parse_expression("1/(x0*sinh(x1)*sin(x2))");
    return sfield::VierbeinBundle(e);
}

// Plane-wave Dirac field psi = u exp(+i theta), theta = E x0 + kz x3, with u
// in the null space of (gamma.p - m). E=1, kz=0.8, m=0.6 gives p^2 = m^2.
struct PlaneWave {
    sfield::DiracField field;
    double E = 1.0, kz = 0.8, mass = 0.6;
    std::array<sfield::cx, 4> u;
};

PlaneWave make_plane_wave(const sfield::GammaSet& gs);

}  // namespace testsupport
