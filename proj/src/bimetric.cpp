#include "sfield/bimetric.hpp"

#include <cmath>
#include <utility>

namespace sfield {

namespace {

// First-order jet: value plus 4-gradient. Used to push derivatives through
// the pointwise linear solves and the composite vierbein construction.
struct Jet1 {
    double v = 0.0;
    double g[4] = {0, 0, 0, 0};

    static Jet1 constant(double c) {
        Jet1 j;
        j.v = c;
        return j;
    }
};

Jet1 operator+(const Jet1& a, const Jet1& b) {
    Jet1 r;
    r.v = a.v + b.v;
    for (int i = 0; i < 4; ++i) r.g[i] = a.g[i] + b.g[i];
    return r;
}
Jet1 operator-(const Jet1& a, const Jet1& b) {
    Jet1 r;
    r.v = a.v - b.v;
    for (int i = 0; i < 4; ++i) r.g[i] = a.g[i] - b.g[i];
    return r;
}
Jet1 operator*(const Jet1& a, const Jet1& b) {
    Jet1 r;
    r.v = a.v * b.v;
    for (int i = 0; i < 4; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    return r;
}
Jet1 operator/(const Jet1& a, const Jet1& b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    Jet1 r;
    r.v = a.v / b.v;
    for (int i = 0; i < 4; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
    return r;
}
Jet1 operator*(double s, const Jet1& a) {
    Jet1 r;
    r.v = s * a.v;
    for (int i = 0; i < 4; ++i) r.g[i] = s * a.g[i];
    return r;
}
Jet1 jet1_sqrt(const Jet1& a) {
    if (a.v <= 0.0) throw DomainError("sqrt of non-positive value");
    Jet1 r;
    r.v = std::sqrt(a.v);
    for (int i = 0; i < 4; ++i) r.g[i] = 0.5 * a.g[i] / r.v;
    return r;
}
double pivot_mag(const Jet1& a) { return std::fabs(a.v); }

Jet1 jet1_of(const Jet2& j) {
    Jet1 r;
    r.v = j.v;
    for (int i = 0; i < 4; ++i) r.g[i] = j.g[i];
    return r;
}

// d_nu phi as a first-order jet (value from the gradient, gradient from the
// Hessian of the order-2 jet).
Jet1 jet1_of_gradient(const Jet2& j, int nu) {
    Jet1 r;
    r.v = j.g[nu];
    for (int i = 0; i < 4; ++i) r.g[i] = j.h[nu][i];
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// VierbeinBundle
// ---------------------------------------------------------------------------

VierbeinBundle::VierbeinBundle() {
    for (int k = 0; k < 4; ++k) entry(k, k) = parse_expression("1");
}

VierbeinBundle::VierbeinBundle(const std::array<Expression, 16>& entries) : e_(entries) {}

Matrix4 VierbeinBundle::value(const Point4& p) const {
    Matrix4 H;
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) H.m[k][mu] = entry(k, mu).eval(p);
    if (!is_finite(H)) throw DomainError("non-finite vierbein value");
    return H;
}

// Shared tail: given H, dH (and optionally ddH already filled), complete the
// inverse, its derivative and the volume density det(h^k_mu) = 1/det(H).
static void finish_jets(VierbeinJets& V) {
    Matrix4 inv = invert4(V.H);  // throws Degenerate
    V.Hinv = transpose(inv);

    // d(inv) = -inv * dH * inv, then transpose into Hinv layout.
    for (int nu = 0; nu < 4; ++nu) {
        Matrix4 dHnu;
        for (int k = 0; k < 4; ++k)
            for (int mu = 0; mu < 4; ++mu) dHnu.m[k][mu] = V.dH[k][mu][nu];
        Matrix4 dinv = -1.0 * (inv * dHnu * inv);
        for (int k = 0; k < 4; ++k)
            for (int mu = 0; mu < 4; ++mu) V.dHinv[k][mu][nu] = dinv.m[mu][k];
    }

    double detH = det4(V.H);
    V.det = 1.0 / detH;
    for (int nu = 0; nu < 4; ++nu) {
        double tr = 0.0;  // tr(inv * d_nu H)
        for (int mu = 0; mu < 4; ++mu)
            for (int k = 0; k < 4; ++k) tr += inv.m[mu][k] * V.dH[k][mu][nu];
        V.ddet[nu] = -V.det * tr;
    }
}

VierbeinJets VierbeinBundle::jets(const Point4& p) const {
    VierbeinJets V;
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) {
            Jet2 j = entry(k, mu).eval_jet2(p);
            V.H.m[k][mu] = j.v;
            for (int nu = 0; nu < 4; ++nu) {
                V.dH[k][mu][nu] = j.g[nu];
                for (int rho = 0; rho < 4; ++rho) V.ddH[k][mu][nu][rho] = j.h[nu][rho];
            }
        }
    if (!is_finite(V.H)) throw DomainError("non-finite vierbein value");
    finish_jets(V);
    return V;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

Matrix4 gravity_metric_from(const Matrix4& H) {
    Matrix4 g;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu; nu < 4; ++nu) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += eta_diag(k) * H.m[k][mu] * H.m[k][nu];
            g.m[mu][nu] = s;
            g.m[nu][mu] = s;
        }
    if (!is_finite(g)) throw DomainError("non-finite metric");
    return g;
}

Matrix4 gravity_metric(const VierbeinBundle& hg, const Point4& p) {
    return gravity_metric_from(hg.value(p));
}

Matrix4 sfield_metric(const SFieldConfig& s, const VierbeinBundle& hg, const Point4& p) {
    Matrix4 out;
    if (s.lambda == 0.0) return out;
    Matrix4 ghat = gravity_metric(hg, p);
    Jet2 phi = s.phi.eval_jet2(p);
    double up[4];
    for (int mu = 0; mu < 4; ++mu) {
        double v = 0.0;
        for (int nu = 0; nu < 4; ++nu) v += ghat.m[mu][nu] * phi.g[nu];
        up[mu] = v;
    }
    double l2 = s.lambda * s.lambda;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) out.m[mu][nu] = l2 * up[mu] * up[nu];
    return out;
}

static void check_lorentz_signature(const Matrix4& g) {
    EigenSym4 eig = eigen_symmetric(g);
    double scale = std::max(1.0, max_abs(g));
    int pos = 0, neg = 0;
    for (double v : eig.values) {
        if (v > 1e-12 * scale) ++pos;
        else if (v < -1e-12 * scale) ++neg;
    }
    if (pos + neg < 4) throw Degenerate("metric has a near-zero eigenvalue");
    if (pos != 1 || neg != 3)
        throw WrongSignature("metric eigen-signature is not (1 positive, 3 negative)");
}

MetricPair composite_metric(const VierbeinBundle& hg, const SFieldConfig& s, const Point4& p) {
    MetricPair mp;
    mp.upper = gravity_metric(hg, p) + sfield_metric(s, hg, p);
    check_lorentz_signature(mp.upper);
    mp.lower = invert4(mp.upper);
    return mp;
}

Matrix4 composite_vierbein(const Matrix4& g_upper) {
    check_lorentz_signature(g_upper);
    EigenSym4 eig = eigen_symmetric(g_upper);
    // H = |D|^{1/2} Q^T, eigenvalues already sorted (+,-,-,-).
    Matrix4 H;
    for (int i = 0; i < 4; ++i) {
        double r = std::sqrt(std::fabs(eig.values[i]));
        for (int mu = 0; mu < 4; ++mu) H.m[i][mu] = r * eig.vectors.m[mu][i];
    }
    return H;
}

Matrix4 bundle_relation(const Matrix4& Hgrav, const Matrix4& Hs) {
    return Hgrav * invert4(Hs);
}

// ---------------------------------------------------------------------------
// Composite bundle jets
// ---------------------------------------------------------------------------

template <class T>
static void tmat_solve4(const T a[4][4], const T b[4], T x[4]) {
    T m[4][4], rhs[4];
    for (int i = 0; i < 4; ++i) {
        rhs[i] = b[i];
        for (int j = 0; j < 4; ++j) m[i][j] = a[i][j];
    }
    solve_linear<T, 4>(m, rhs, x);
}

// Analytic composite vierbein (value + gradient): H_comp = M * H_grav with
// M = I + alpha (eta w) w^T, w the local-frame components of the scaled
// metric gradient of phi, alpha = (sqrt(1+s)-1)/s, s = w.eta.w. This gauge
// reproduces g = g-hat + g-underbar exactly and reduces to the identity when
// lambda = 0.
void BimetricBundle::jet1_composite(const Point4& p, Matrix4& H, double dH[4][4][4]) const {
    Jet1 Hg[4][4];
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) Hg[k][mu] = jet1_of(gravity_.entry(k, mu).eval_jet2(p));
    Jet2 phi = sfield_.phi.eval_jet2(p);

    // g-hat^{mu nu} and v^mu = lambda g-hat^{mu nu} d_nu phi.
    Jet1 ghat[4][4];
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            Jet1 s = Jet1::constant(0.0);
            for (int k = 0; k < 4; ++k) s = s + eta_diag(k) * (Hg[k][mu] * Hg[k][nu]);
            ghat[mu][nu] = s;
        }
    Jet1 v[4];
    for (int mu = 0; mu < 4; ++mu) {
        Jet1 s = Jet1::constant(0.0);
        for (int nu = 0; nu < 4; ++nu) s = s + ghat[mu][nu] * jet1_of_gradient(phi, nu);
        v[mu] = sfield_.lambda * s;
    }

    // Local components w: sum_k h_k^mu w^k = v^mu.
    Jet1 a[4][4], w[4];
    for (int mu = 0; mu < 4; ++mu)
        for (int k = 0; k < 4; ++k) a[mu][k] = Hg[k][mu];
    try {
        tmat_solve4(a, v, w);
    } catch (const SingularSystem&) {
        throw Degenerate("gravity vierbein is degenerate");
    }

    Jet1 s = Jet1::constant(0.0);
    for (int k = 0; k < 4; ++k) s = s + eta_diag(k) * (w[k] * w[k]);
    if (1.0 + s.v <= 0.0)
        throw WrongSignature("scalar-field contribution destroys the Lorentz signature");

    Jet1 alpha;
    if (std::fabs(s.v) < 1e-6) {
        // (sqrt(1+s)-1)/s expanded about s = 0.
        Jet1 s2 = s * s;
        alpha = Jet1::constant(0.5) - 0.125 * s + 0.0625 * s2 - (5.0 / 128.0) * (s2 * s);
    } else {
        alpha = (jet1_sqrt(Jet1::constant(1.0) + s) - Jet1::constant(1.0)) / s;
    }

    Jet1 Hc[4][4];
    for (int i = 0; i < 4; ++i)
        for (int mu = 0; mu < 4; ++mu) {
            Jet1 acc = Hg[i][mu];
            for (int j = 0; j < 4; ++j)
                acc = acc + (alpha * (eta_diag(i) * (w[i] * w[j]))) * Hg[j][mu];
            Hc[i][mu] = acc;
        }

    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) {
            H.m[k][mu] = Hc[k][mu].v;
            for (int nu = 0; nu < 4; ++nu) dH[k][mu][nu] = Hc[k][mu].g[nu];
        }
}

VierbeinJets BimetricBundle::composite_jets(const Point4& p) const {
    VierbeinJets V;
    jet1_composite(p, V.H, V.dH);

    // Second derivative of the composite entries by central differences of
    // the analytic first derivative.
    const double h = 1e-5;
    for (int rho = 0; rho < 4; ++rho) {
        Point4 hi = p, lo = p;
        hi.x[rho] += h;
        lo.x[rho] -= h;
        Matrix4 Hh, Hl;
        double dHh[4][4][4], dHl[4][4][4];
        jet1_composite(hi, Hh, dHh);
        jet1_composite(lo, Hl, dHl);
        for (int k = 0; k < 4; ++k)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu)
                    V.ddH[k][mu][nu][rho] = (dHh[k][mu][nu] - dHl[k][mu][nu]) / (2.0 * h);
    }
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu)
                for (int rho = nu + 1; rho < 4; ++rho) {
                    double sym = 0.5 * (V.ddH[k][mu][nu][rho] + V.ddH[k][mu][rho][nu]);
                    V.ddH[k][mu][nu][rho] = sym;
                    V.ddH[k][mu][rho][nu] = sym;
                }

    finish_jets(V);
    return V;
}

VierbeinJets BimetricBundle::jets(const Point4& p) const {
    if (!has_sfield()) return gravity_.jets(p);
    return composite_jets(p);
}

Matrix4 BimetricBundle::value(const Point4& p) const {
    if (!has_sfield()) return gravity_.value(p);
    Matrix4 H;
    double dH[4][4][4];
    jet1_composite(p, H, dH);
    return H;
}

// ---------------------------------------------------------------------------
// Frames and connections
// ---------------------------------------------------------------------------

FrameField::FrameField() {
    for (int k = 0; k < 4; ++k) entry(k, k) = parse_expression("1");
}

double frame_orthonormality_residual(const FrameField& f, const Point4& p) {
    Matrix4 F;
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) F.m[k][j] = f.entry(k, j).eval(p);
    Matrix4 r = F * minkowski_eta() * transpose(F) - minkowski_eta();
    return max_abs(r);
}

ConnectionField ConnectionField::zero() { return ConnectionField{}; }

ConnectionField ConnectionField::from_direct(const std::array<Expression, 24>& entries) {
    ConnectionField c;
    c.mode = Mode::Direct;
    c.direct = entries;
    return c;
}

ConnectionField ConnectionField::from_frame(FrameField f) {
    ConnectionField c;
    c.mode = Mode::Frame;
    c.frame = std::move(f);
    return c;
}

ConnectionField ConnectionField::levi_civita() {
    ConnectionField c;
    c.mode = Mode::LeviCivita;
    return c;
}

static void set_pair(double A[4][4][4], int k, int l, int mu, double v) {
    A[k][l][mu] = v;
    A[l][k][mu] = -v;
}

// Torsion-free solve, templated over the scalar so the same code yields
// values (double) and values-plus-derivatives (Jet1). Unknowns are the 24
// independent components A^{kl}_mu with k<l; equations demand that the
// induced global connection is symmetric in its lower indices.
template <class T>
static void levi_civita_solve(const T H[4][4], const T dH[4][4][4], T A[6][4]) {
    // Hinv(k,mu) = h^k_mu via the transposed 4x4 inverse.
    T inv[4][4];  // inv[mu][k], inv*H = I in the [mu][k]x[k][nu] sense
    {
        T m[4][4], rhs[4], x[4];
        // Solve H^T X = e_mu column by column: easier to Gauss the 4x4 directly.
        // Build the plain matrix inverse of H (treating H as [k][mu]).
        for (int col = 0; col < 4; ++col) {
            for (int i = 0; i < 4; ++i) {
                rhs[i] = T::constant(i == col ? 1.0 : 0.0);
                for (int j = 0; j < 4; ++j) m[i][j] = H[i][j];
            }
            try {
                solve_linear<T, 4>(m, rhs, x);
            } catch (const SingularSystem&) {
                throw Degenerate("vierbein is degenerate");
            }
            // x solves H x = e_col -> x[mu] = inv[mu][col]
            for (int mu = 0; mu < 4; ++mu) inv[mu][col] = x[mu];
        }
    }
    auto Hinv = [&](int k, int mu) -> const T& { return inv[mu][k]; };

    // Gamma0^nu_{sigma mu} = -sum_a h^a_sigma d_mu h_a^nu.
    T G0[4][4][4];
    for (int nu = 0; nu < 4; ++nu)
        for (int sg = 0; sg < 4; ++sg)
            for (int mu = 0; mu < 4; ++mu) {
                T acc = T::constant(0.0);
                for (int aa = 0; aa < 4; ++aa) acc = acc - Hinv(aa, sg) * dH[aa][nu][mu];
                G0[nu][sg][mu] = acc;
            }

    // Coefficient of the unknown u_(pair,muq) inside the A-part of
    // Gamma^nu_{sigma mu}: only contributes when mu == muq.
    auto lcoeff = [&](int nu, int sg, int pair) -> T {
        int pk = kPairK[pair], pl = kPairL[pair];
        return T::constant(-eta_diag(pk)) * (Hinv(pk, sg) * H[pl][nu]) +
               T::constant(eta_diag(pl)) * (Hinv(pl, sg) * H[pk][nu]);
    };

    T M[24][24], rhs[24], u[24];
    int eq = 0;
    for (int nu = 0; nu < 4; ++nu)
        for (int pr = 0; pr < 6; ++pr) {
            int rho = kPairK[pr], mu = kPairL[pr];  // rho < mu
            rhs[eq] = G0[nu][mu][rho] - G0[nu][rho][mu];
            for (int q = 0; q < 24; ++q) {
                int qpair = q / 4, qmu = q % 4;
                T c = T::constant(0.0);
                if (qmu == mu) c = c + lcoeff(nu, rho, qpair);
                if (qmu == rho) c = c - lcoeff(nu, mu, qpair);
                M[eq][q] = c;
            }
            ++eq;
        }
    solve_linear<T, 24>(M, rhs, u);
    for (int pr = 0; pr < 6; ++pr)
        for (int mu = 0; mu < 4; ++mu) A[pr][mu] = u[pr * 4 + mu];
}

// double lacks a static constant(); wrap it.
struct DScalar {
    double v;
    static DScalar constant(double c) { return {c}; }
};
static DScalar operator+(DScalar a, DScalar b) { return {a.v + b.v}; }
static DScalar operator-(DScalar a, DScalar b) { return {a.v - b.v}; }
static DScalar operator*(DScalar a, DScalar b) { return {a.v * b.v}; }
static DScalar operator/(DScalar a, DScalar b) { return {a.v / b.v}; }
static double pivot_mag(DScalar a) { return std::fabs(a.v); }

void levi_civita_connection(const BimetricBundle& b, const Point4& p, double A[4][4][4]) {
    VierbeinJets V = b.jets(p);
    DScalar H[4][4], dH[4][4][4], S[6][4];
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) {
            H[k][mu] = {V.H.m[k][mu]};
            for (int nu = 0; nu < 4; ++nu) dH[k][mu][nu] = {V.dH[k][mu][nu]};
        }
    levi_civita_solve<DScalar>(H, dH, S);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int mu = 0; mu < 4; ++mu) A[i][j][mu] = 0.0;
    for (int pr = 0; pr < 6; ++pr)
        for (int mu = 0; mu < 4; ++mu) set_pair(A, kPairK[pr], kPairL[pr], mu, S[pr][mu].v);
}

ConnectionJet connection_jet(const ConnectionField& c, const BimetricBundle& b, const Point4& p) {
    ConnectionJet out;
    switch (c.mode) {
        case ConnectionField::Mode::Direct: {
            for (int pr = 0; pr < 6; ++pr) {
                int k = kPairK[pr], l = kPairL[pr];
                for (int mu = 0; mu < 4; ++mu) {
                    Jet2 j = c.direct[pr * 4 + mu].eval_jet2(p);
                    set_pair(out.A, k, l, mu, j.v);
                    for (int nu = 0; nu < 4; ++nu) {
                        out.dA[k][l][mu][nu] = j.g[nu];
                        out.dA[l][k][mu][nu] = -j.g[nu];
                    }
                }
            }
            return out;
        }
        case ConnectionField::Mode::Frame: {
            double res = frame_orthonormality_residual(c.frame, p);
            if (res > 1e-6)
                throw FrameNotOrthonormal("frame breaks a.eta.a^T = eta (residual " +
                                          std::to_string(res) + ")");
            Jet2 F[4][4];
            for (int k = 0; k < 4; ++k)
                for (int j = 0; j < 4; ++j) F[k][j] = c.frame.entry(k, j).eval_jet2(p);
            // A^{kl}_mu = -eta_jj a^k_j d_mu a^l_j;
            // d_nu A^{kl}_mu by the product rule with the frame Hessian.
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    for (int mu = 0; mu < 4; ++mu) {
                        double a = 0.0;
                        for (int j = 0; j < 4; ++j) a -= eta_diag(j) * F[k][j].v * F[l][j].g[mu];
                        out.A[k][l][mu] = a;
                        for (int nu = 0; nu < 4; ++nu) {
                            double d = 0.0;
                            for (int j = 0; j < 4; ++j)
                                d -= eta_diag(j) * (F[k][j].g[nu] * F[l][j].g[mu] +
                                                    F[k][j].v * F[l][j].h[mu][nu]);
                            out.dA[k][l][mu][nu] = d;
                        }
                    }
            return out;
        }
        case ConnectionField::Mode::LeviCivita: {
            VierbeinJets V = b.jets(p);
            Jet1 H[4][4], dH[4][4][4], S[6][4];
            for (int k = 0; k < 4; ++k)
                for (int mu = 0; mu < 4; ++mu) {
                    H[k][mu].v = V.H.m[k][mu];
                    for (int nu = 0; nu < 4; ++nu) {
                        H[k][mu].g[nu] = V.dH[k][mu][nu];
                        dH[k][mu][nu].v = V.dH[k][mu][nu];
                        for (int rho = 0; rho < 4; ++rho)
                            dH[k][mu][nu].g[rho] = V.ddH[k][mu][nu][rho];
                    }
                }
            levi_civita_solve<Jet1>(H, dH, S);
            for (int pr = 0; pr < 6; ++pr) {
                int k = kPairK[pr], l = kPairL[pr];
                for (int mu = 0; mu < 4; ++mu) {
                    set_pair(out.A, k, l, mu, S[pr][mu].v);
                    for (int nu = 0; nu < 4; ++nu) {
                        out.dA[k][l][mu][nu] = S[pr][mu].g[nu];
                        out.dA[l][k][mu][nu] = -S[pr][mu].g[nu];
                    }
                }
            }
            return out;
        }
    }
    throw Error("corrupt connection mode");
}

void local_connection(const ConnectionField& c, const BimetricBundle& b, const Point4& p,
                      double A[4][4][4]) {
    ConnectionJet j = connection_jet(c, b, p);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            for (int mu = 0; mu < 4; ++mu) A[k][l][mu] = j.A[k][l][mu];
}

// ---------------------------------------------------------------------------
// Global connection, torsion, curvature
// ---------------------------------------------------------------------------

GlobalConnectionValue global_connection(const VierbeinJets& V, const ConnectionJet& C) {
    GlobalConnectionValue out;
    for (int nu = 0; nu < 4; ++nu)
        for (int sg = 0; sg < 4; ++sg)
            for (int mu = 0; mu < 4; ++mu) {
                double acc = 0.0;
                for (int a = 0; a < 4; ++a) acc -= V.Hinv.m[a][sg] * V.dH[a][nu][mu];
                for (int k = 0; k < 4; ++k)
                    for (int cidx = 0; cidx < 4; ++cidx)
                        acc -= eta_diag(k) * V.Hinv.m[k][sg] * C.A[k][cidx][mu] * V.H.m[cidx][nu];
                out.G[nu][sg][mu] = acc;
            }
    return out;
}

double vierbein_postulate_residual(const VierbeinJets& V, const ConnectionJet& C,
                                   const GlobalConnectionValue& G) {
    double worst = 0.0;
    for (int k = 0; k < 4; ++k)
        for (int nu = 0; nu < 4; ++nu)
            for (int mu = 0; mu < 4; ++mu) {
                // d_mu h^{k nu} + A^k_{l mu} h^{l nu} + Gamma^nu_{rho mu} h^{k rho},
                // with h^{k nu} = eta^{kk} h_k^nu and both eta factors of the
                // A-term cancelling (eta diagonal).
                double r = eta_diag(k) * V.dH[k][nu][mu];
                for (int l = 0; l < 4; ++l) r += C.A[k][l][mu] * V.H.m[l][nu];
                for (int rho = 0; rho < 4; ++rho)
                    r += eta_diag(k) * G.G[nu][rho][mu] * V.H.m[k][rho];
                worst = std::max(worst, std::fabs(r));
            }
    return worst;
}

void torsion(const GlobalConnectionValue& G, double T[4][4][4]) {
    for (int nu = 0; nu < 4; ++nu)
        for (int rho = 0; rho < 4; ++rho)
            for (int mu = 0; mu < 4; ++mu) T[nu][rho][mu] = G.G[nu][rho][mu] - G.G[nu][mu][rho];
}

CurvatureValue curvature(const ConnectionJet& C) {
    CurvatureValue out;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) {
                    double r = C.dA[k][l][mu][nu] - C.dA[k][l][nu][mu];
                    for (int m = 0; m < 4; ++m)
                        r += eta_diag(m) *
                             (C.A[k][m][nu] * C.A[m][l][mu] - C.A[k][m][mu] * C.A[m][l][nu]);
                    out.R[k][l][mu][nu] = r;
                }
    return out;
}

CurvatureScalars ricci_scalar_lagrangian(const VierbeinJets& V, const CurvatureValue& Rv) {
    CurvatureScalars out;
    for (int l = 0; l < 4; ++l)
        for (int mu = 0; mu < 4; ++mu) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                for (int nu = 0; nu < 4; ++nu) acc += V.H.m[k][nu] * Rv.R[k][l][mu][nu];
            out.Rlm.m[l][mu] = acc;
        }
    for (int l = 0; l < 4; ++l)
        for (int mu = 0; mu < 4; ++mu) out.R += V.H.m[l][mu] * out.Rlm.m[l][mu];
    out.LIB = V.det * out.R;
    return out;
}

Matrix4 einstein_tensor_B(const VierbeinJets& V, const CurvatureScalars& S) {
    Matrix4 B;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double acc = 0.0;
            for (int l = 0; l < 4; ++l) acc += V.H.m[l][mu] * S.Rlm.m[l][nu];
            B.m[mu][nu] = acc - (mu == nu ? 0.5 * S.R : 0.0);
        }
    return B;
}

// ---------------------------------------------------------------------------
// Diagnostics and conversions
// ---------------------------------------------------------------------------

VolumeElementReport volume_element_check(const VierbeinBundle& hg, const SFieldConfig& s,
                                         const Point4& p) {
    VolumeElementReport rep;
    Matrix4 H = hg.value(p);
    rep.det_gravity = det4(H);

    Matrix4 gs = sfield_metric(s, hg, p);
    EigenSym4 eig = eigen_symmetric(gs);
    double scale = std::max(1.0, max_abs(gs));
    for (double v : eig.values)
        if (std::fabs(v) > 1e-12 * scale) ++rep.sfield_rank;
    rep.equal_determinants_possible = (rep.sfield_rank == 4);

    try {
        composite_metric(hg, s, p);
        rep.composite_nondegenerate = true;
    } catch (const Error&) {
        rep.composite_nondegenerate = false;
    }
    return rep;
}

IndexedTensor local_global_convert(const IndexedTensor& t, const VierbeinJets& V, int slot) {
    Matrix4 M;
    Variance newtag;
    switch (t.variance[slot]) {
        case Variance::LocalUpper:  // A^mu = h_k^mu A^k
            M = transpose(V.H);
            newtag = Variance::GlobalUpper;
            break;
        case Variance::GlobalUpper:  // A^k = h^k_nu A^nu
            M = V.Hinv;
            newtag = Variance::LocalUpper;
            break;
        case Variance::LocalLower:  // A_mu = h^k_mu A_k
            M = transpose(V.Hinv);
            newtag = Variance::GlobalLower;
            break;
        case Variance::GlobalLower:  // A_k = h_k^mu A_mu
            M = V.H;
            newtag = Variance::LocalLower;
            break;
        default: throw Error("bad variance tag");
    }
    IndexedTensor out = reindex(t, slot, M);
    out.variance[slot] = newtag;
    return out;
}

}  // namespace sfield
