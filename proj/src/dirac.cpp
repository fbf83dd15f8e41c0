#include "sfield/dirac.hpp"

#include <cmath>
#include <functional>

namespace sfield {

namespace {

const cx kI(0.0, 1.0);

Spinor conj_row(const Spinor& v) {
    Spinor r;
    for (int i = 0; i < 4; ++i) r[i] = std::conj(v[i]);
    return r;
}

// A^{kl}_mu gamma_k gamma_l for each mu.
void connection_matrices(const GammaSet& gs, const ConnectionJet& C, CMat4 Amat[4]) {
    for (int mu = 0; mu < 4; ++mu) {
        Amat[mu] = CMat4::zero();
        for (int pr = 0; pr < 6; ++pr) {
            int k = kPairK[pr], l = kPairL[pr];
            double a = C.A[k][l][mu];
            if (a == 0.0) continue;
            // antisymmetric pair: A^{kl} gamma_k gamma_l + A^{lk} gamma_l gamma_k
            CMat4 prod = gs.down[k] * gs.down[l] - gs.down[l] * gs.down[k];
            Amat[mu] = Amat[mu] + cx(a) * prod;
        }
    }
}

// Density term matrix (1/h)(h gamma^mu)_{,mu} = (h_{,mu}/h) gamma^mu
// + (d_mu h_k^mu) gamma^k.
CMat4 density_matrix(const GammaSet& gs, const VierbeinJets& V) {
    CMat4 D;
    for (int mu = 0; mu < 4; ++mu)
        D = D + cx(V.ddet[mu] / V.det) * global_gamma(gs, V.H, mu);
    for (int k = 0; k < 4; ++k) {
        double div = 0.0;
        for (int mu = 0; mu < 4; ++mu) div += V.dH[k][mu][mu];
        D = D + cx(div) * gs.up[k];
    }
    return D;
}

double spinor_scale(const DiracJets& d) {
    double s = norm(d.psi) * norm(d.psi);
    for (int mu = 0; mu < 4; ++mu) s = std::max(s, norm(d.psi) * norm(d.dpsi[mu]));
    return std::max(1.0, (1.0 + std::fabs(d.mass)) * s);
}

struct PointEval {
    VierbeinJets V;
    ConnectionJet C;
};
PointEval eval_background(const Background& bg, const Point4& p) {
    PointEval pe;
    pe.V = bg.bundle.jets(p);
    pe.C = connection_jet(bg.connection, bg.bundle, p);
    return pe;
}

}  // namespace

bool DiracField::is_zero() const {
    for (const auto& c : psi)
        if (!c.re.is_zero_literal() || !c.im.is_zero_literal()) return false;
    return true;
}

DiracJets dirac_jets(const DiracField& d, const Point4& p) {
    DiracJets out;
    out.mass = d.mass;
    for (int a = 0; a < 4; ++a) {
        Jet2 re = d.psi[a].re.eval_jet2(p);
        Jet2 im = d.psi[a].im.eval_jet2(p);
        out.psi[a] = cx(re.v, im.v);
        for (int mu = 0; mu < 4; ++mu) out.dpsi[mu][a] = cx(re.g[mu], im.g[mu]);
    }
    return out;
}

SpinorDerivatives covariant_spinor_derivative(const GammaSet& gs, const DiracJets& d,
                                              const ConnectionJet& C, AdjointSign sign) {
    CMat4 Amat[4];
    connection_matrices(gs, C, Amat);
    Spinor bar = adjoint(gs, d.psi);
    double s = (sign == AdjointSign::AsPrinted) ? 1.0 : -1.0;

    SpinorDerivatives out;
    for (int mu = 0; mu < 4; ++mu) {
        out.dpsi_cov[mu] = d.dpsi[mu] + cx(0.25) * (Amat[mu] * d.psi);
        Spinor dbar = conj_row(d.dpsi[mu]) * gs.up[0];
        out.dpsibar_cov[mu] = dbar + cx(0.25 * s) * (bar * Amat[mu]);
    }
    return out;
}

AdjointDiagnostic adjoint_sign_diagnostic(const GammaSet& gs, const DiracJets& d,
                                          const ConnectionJet& C) {
    SpinorDerivatives printed = covariant_spinor_derivative(gs, d, C, AdjointSign::AsPrinted);
    SpinorDerivatives standard = covariant_spinor_derivative(gs, d, C, AdjointSign::Standard);
    AdjointDiagnostic out;
    for (int mu = 0; mu < 4; ++mu) {
        Spinor lhs = conj_row(printed.dpsi_cov[mu]) * gs.up[0];  // (psi_{;mu})^dagger gamma^0
        for (int a = 0; a < 4; ++a) {
            out.as_printed = std::max(out.as_printed, std::abs(lhs[a] - printed.dpsibar_cov[mu][a]));
            out.standard = std::max(out.standard, std::abs(lhs[a] - standard.dpsibar_cov[mu][a]));
        }
    }
    return out;
}

cx dirac_lagrangian_complex_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                               const DiracJets& d) {
    Spinor bar = adjoint(gs, d.psi);
    CMat4 Amat[4];
    connection_matrices(gs, C, Amat);

    cx L = cx(d.mass) * dot(bar, d.psi);
    for (int mu = 0; mu < 4; ++mu) {
        CMat4 gmu = global_gamma(gs, V.H, mu);
        Spinor dbar = conj_row(d.dpsi[mu]) * gs.up[0];
        L += cx(0.5) * kI * (dot(bar * gmu, d.dpsi[mu]) - dot(dbar * gmu, d.psi));
        CMat4 sym = gmu * Amat[mu] + Amat[mu] * gmu;
        L += cx(0.125) * kI * dot(bar * sym, d.psi);
    }
    return L;
}

double dirac_lagrangian_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                           const DiracJets& d) {
    cx L = dirac_lagrangian_complex_at(gs, V, C, d);
    if (std::fabs(L.imag()) > 1e-10 * spinor_scale(d))
        throw NonRealLagrangian("Dirac Lagrangian has a non-real part");
    return L.real();
}

DiracResidual dirac_residual_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                                const DiracJets& d) {
    Spinor bar = adjoint(gs, d.psi);
    CMat4 Amat[4];
    connection_matrices(gs, C, Amat);
    CMat4 D = density_matrix(gs, V);

    DiracResidual out;
    out.res_psi = cx(d.mass) * d.psi + cx(0.5) * kI * (D * d.psi);
    out.res_psibar = cx(d.mass) * bar - cx(0.5) * kI * (bar * D);
    for (int mu = 0; mu < 4; ++mu) {
        CMat4 gmu = global_gamma(gs, V.H, mu);
        Spinor dbar = conj_row(d.dpsi[mu]) * gs.up[0];
        CMat4 sym = gmu * Amat[mu] + Amat[mu] * gmu;
        out.res_psi = out.res_psi + kI * (gmu * d.dpsi[mu]) + cx(0.125) * kI * (sym * d.psi);
        out.res_psibar = out.res_psibar - kI * (dbar * gmu) + cx(0.125) * kI * (bar * sym);
    }
    return out;
}

DiracResidual dirac_residual_density_at(const GammaSet& gs, const VierbeinJets& V,
                                        const ConnectionJet& C, const DiracJets& d) {
    Spinor bar = adjoint(gs, d.psi);
    CMat4 Amat[4];
    connection_matrices(gs, C, Amat);
    double h = V.det;

    DiracResidual out;
    out.res_psi = cx(h * d.mass) * d.psi;
    out.res_psibar = cx(h * d.mass) * bar;
    for (int mu = 0; mu < 4; ++mu) {
        CMat4 gmu = global_gamma(gs, V.H, mu);
        Spinor dbar = conj_row(d.dpsi[mu]) * gs.up[0];
        CMat4 sym = gmu * Amat[mu] + Amat[mu] * gmu;
        out.res_psi = out.res_psi + cx(0.5 * h) * kI * (gmu * d.dpsi[mu]) +
                      cx(0.125 * h) * kI * (sym * d.psi);
        out.res_psibar = out.res_psibar - cx(0.5 * h) * kI * (dbar * gmu) +
                         cx(0.125 * h) * kI * (bar * sym);

        // + i/2 (h gamma^mu psi)_{,mu} expanded term by term; the adjoint line
        // carries the opposite sign.
        CMat4 dgmu;  // d_mu (gamma^mu) contribution for this mu
        for (int k = 0; k < 4; ++k) dgmu = dgmu + cx(V.dH[k][mu][mu]) * gs.up[k];
        out.res_psi = out.res_psi +
                      cx(0.5) * kI *
                          (cx(V.ddet[mu]) * (gmu * d.psi) + cx(h) * (dgmu * d.psi) +
                           cx(h) * (gmu * d.dpsi[mu]));
        out.res_psibar = out.res_psibar -
                         cx(0.5) * kI *
                             (cx(V.ddet[mu]) * (bar * gmu) + cx(h) * (bar * dgmu) +
                              cx(h) * (dbar * gmu));
    }
    return out;
}

OnshellCheck onshell_lagrangian_check_at(const GammaSet& gs, const VierbeinJets& V,
                                         const ConnectionJet& C, const DiracJets& d) {
    DiracResidual r = dirac_residual_at(gs, V, C, d);
    Spinor bar = adjoint(gs, d.psi);
    cx twoL = 2.0 * dirac_lagrangian_complex_at(gs, V, C, d);
    cx bilinear = dot(bar, r.res_psi) + dot(r.res_psibar, d.psi);

    OnshellCheck out;
    out.two_lagrangian = std::abs(twoL);
    out.bound = (norm(r.res_psi) + norm(r.res_psibar)) * norm(d.psi);
    out.identity_residual = std::abs(twoL - bilinear) / spinor_scale(d);
    return out;
}

Matrix4 stress_energy_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                         const DiracJets& d) {
    Spinor bar = adjoint(gs, d.psi);
    CMat4 Amat[4];
    connection_matrices(gs, C, Amat);
    double scale = spinor_scale(d) * std::max(1.0, max_abs(V.H));

    Matrix4 T;
    for (int l = 0; l < 4; ++l)
        for (int mu = 0; mu < 4; ++mu) {
            Spinor dbar = conj_row(d.dpsi[mu]) * gs.up[0];
            cx val = cx(0.5) * kI *
                     (dot(bar * gs.up[l], d.dpsi[mu]) - dot(dbar * gs.up[l], d.psi));
            CMat4 sym = gs.up[l] * Amat[mu] + Amat[mu] * gs.up[l];
            val += cx(0.125) * kI * dot(bar * sym, d.psi);
            if (std::fabs(val.imag()) > 1e-10 * scale)
                throw NonRealTensor("stress-energy has a non-real component");
            T.m[l][mu] = val.real();
        }
    return T;
}

void field_eq_A_residual_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                            const DiracJets& d, double res[4][4][4]) {
    SpinDensity S = spin_density(gs, d.psi, V.H);
    const Matrix4& H = V.H;
    double h = V.det;

    for (int mu = 0; mu < 4; ++mu)
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
                double acc = 0.0;
                for (int a = 0; a < 4; ++a) {
                    // d_a [ h (h_k^a h_l^mu - h_k^mu h_l^a) ]
                    acc += V.ddet[a] * (H.m[k][a] * H.m[l][mu] - H.m[k][mu] * H.m[l][a]);
                    acc += h * (V.dH[k][a][a] * H.m[l][mu] + H.m[k][a] * V.dH[l][mu][a] -
                                V.dH[k][mu][a] * H.m[l][a] - H.m[k][mu] * V.dH[l][a][a]);
                    for (int m = 0; m < 4; ++m) {
                        // - (h h_m^a h_l^mu - h h_m^mu h_l^a) A^m_{k a}
                        acc -= h * (H.m[m][a] * H.m[l][mu] - H.m[m][mu] * H.m[l][a]) *
                               eta_diag(k) * C.A[m][k][a];
                        // - (h h_k^mu h_m^a - h h_k^a h_m^mu) A_l^m_a
                        acc -= h * (H.m[k][mu] * H.m[m][a] - H.m[k][a] * H.m[m][mu]) *
                               eta_diag(l) * C.A[l][m][a];
                    }
                }
                res[mu][k][l] = acc - h * S.s[mu][k][l];
            }
}

Matrix4 field_eq_h_residual_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                               const DiracJets& d) {
    CurvatureScalars cs = ricci_scalar_lagrangian(V, curvature(C));
    Matrix4 T = stress_energy_at(gs, V, C, d);
    Matrix4 res;
    for (int l = 0; l < 4; ++l)
        for (int mu = 0; mu < 4; ++mu)
            res.m[l][mu] = V.det * (V.Hinv.m[l][mu] * cs.R - 2.0 * cs.Rlm.m[l][mu]) + T.m[l][mu];
    return res;
}

CommutatorCheck commutator_check(const Background& bg, const DiracField& d, const Point4& p,
                                 double step) {
    // First covariant derivative as a pointwise function.
    auto W_at = [&](const Point4& q, Spinor W[4]) {
        PointEval pe = eval_background(bg, q);
        DiracJets dj = dirac_jets(d, q);
        CMat4 Amat[4];
        connection_matrices(bg.gammas, pe.C, Amat);
        for (int mu = 0; mu < 4; ++mu) W[mu] = dj.dpsi[mu] + cx(0.25) * (Amat[mu] * dj.psi);
    };

    PointEval pe = eval_background(bg, p);
    DiracJets dj = dirac_jets(d, p);
    CMat4 Amat[4];
    connection_matrices(bg.gammas, pe.C, Amat);
    GlobalConnectionValue G = global_connection(pe.V, pe.C);
    CurvatureValue R = curvature(pe.C);

    Spinor W0[4];
    W_at(p, W0);

    // dW[nu][mu] = d_nu W_mu by central differences.
    Spinor dW[4][4];
    for (int nu = 0; nu < 4; ++nu) {
        Point4 hi = p, lo = p;
        hi.x[nu] += step;
        lo.x[nu] -= step;
        Spinor Wh[4], Wl[4];
        W_at(hi, Wh);
        W_at(lo, Wl);
        for (int mu = 0; mu < 4; ++mu) dW[nu][mu] = cx(1.0 / (2.0 * step)) * (Wh[mu] - Wl[mu]);
    }

    auto second = [&](int mu, int nu) {  // psi_{;mu;nu}
        Spinor r = dW[nu][mu] + cx(0.25) * (Amat[nu] * W0[mu]);
        for (int rho = 0; rho < 4; ++rho) r = r - cx(G.G[rho][mu][nu]) * W0[rho];
        return r;
    };

    CommutatorCheck out;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
            Spinor lhs = second(mu, nu) - second(nu, mu);

            CMat4 Rmat;
            for (int pr = 0; pr < 6; ++pr) {
                int k = kPairK[pr], l = kPairL[pr];
                CMat4 prod = bg.gammas.down[k] * bg.gammas.down[l] -
                             bg.gammas.down[l] * bg.gammas.down[k];
                Rmat = Rmat + cx(R.R[k][l][mu][nu]) * prod;
            }
            Spinor rhs = cx(0.25) * (Rmat * dj.psi);
            for (int rho = 0; rho < 4; ++rho)
                rhs = rhs - cx(G.G[rho][mu][nu] - G.G[rho][nu][mu]) * W0[rho];

            for (int a = 0; a < 4; ++a) {
                out.lhs_scale = std::max(out.lhs_scale, std::abs(lhs[a]));
                out.rhs_scale = std::max(out.rhs_scale, std::abs(rhs[a]));
                out.diff = std::max(out.diff, std::abs(lhs[a] - rhs[a]));
            }
        }
    return out;
}

static Matrix4 mixed_stress_tensor(const Background& bg, const DiracField& d, const Point4& q) {
    PointEval pe = eval_background(bg, q);
    DiracJets dj = dirac_jets(d, q);
    Matrix4 Tl = stress_energy_at(bg.gammas, pe.V, pe.C, dj);
    // T^mu_nu = h_l^mu T^l_nu
    Matrix4 T;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double s = 0.0;
            for (int l = 0; l < 4; ++l) s += pe.V.H.m[l][mu] * Tl.m[l][nu];
            T.m[mu][nu] = s;
        }
    return T;
}

static std::array<double, 4> covariant_divergence_fd(
    const Point4& p, double step, const GlobalConnectionValue& G, const Matrix4& at_p,
    const std::function<Matrix4(const Point4&)>& field) {
    std::array<double, 4> div{};
    Matrix4 dT[4];  // dT[mu] = d_mu field
    for (int mu = 0; mu < 4; ++mu) {
        Point4 hi = p, lo = p;
        hi.x[mu] += step;
        lo.x[mu] -= step;
        dT[mu] = (1.0 / (2.0 * step)) * (field(hi) - field(lo));
    }
    for (int nu = 0; nu < 4; ++nu) {
        double acc = 0.0;
        for (int mu = 0; mu < 4; ++mu) {
            acc += dT[mu].m[mu][nu];
            for (int rho = 0; rho < 4; ++rho) {
                acc += G.G[mu][rho][mu] * at_p.m[rho][nu];
                acc -= G.G[rho][nu][mu] * at_p.m[mu][rho];
            }
        }
        div[nu] = acc;
    }
    return div;
}

std::array<double, 4> naive_T_divergence(const Background& bg, const DiracField& d,
                                         const Point4& p, double step) {
    PointEval pe = eval_background(bg, p);
    GlobalConnectionValue G = global_connection(pe.V, pe.C);
    Matrix4 Tp = mixed_stress_tensor(bg, d, p);
    return covariant_divergence_fd(p, step, G, Tp,
                                   [&](const Point4& q) { return mixed_stress_tensor(bg, d, q); });
}

static Matrix4 einstein_B_at(const Background& bg, const Point4& q) {
    PointEval pe = eval_background(bg, q);
    CurvatureScalars cs = ricci_scalar_lagrangian(pe.V, curvature(pe.C));
    return einstein_tensor_B(pe.V, cs);
}

std::array<double, 4> B_divergence(const Background& bg, const Point4& p, double step) {
    PointEval pe = eval_background(bg, p);
    GlobalConnectionValue G = global_connection(pe.V, pe.C);
    Matrix4 Bp = einstein_B_at(bg, p);
    return covariant_divergence_fd(p, step, G, Bp,
                                   [&](const Point4& q) { return einstein_B_at(bg, q); });
}

CurrentValue current_and_divergence(const Background& bg, const DiracField& d, const Point4& p,
                                    double step) {
    auto J_at = [&](const Point4& q, std::array<double, 4>& J) {
        PointEval pe = eval_background(bg, q);
        DiracJets dj = dirac_jets(d, q);
        Spinor bar = adjoint(bg.gammas, dj.psi);
        double scale = std::max(1.0, norm(dj.psi) * norm(dj.psi)) * std::max(1.0, max_abs(pe.V.H));
        for (int mu = 0; mu < 4; ++mu) {
            cx v = cx(pe.V.det) * dot(bar * global_gamma(bg.gammas, pe.V.H, mu), dj.psi);
            if (std::fabs(v.imag()) > 1e-10 * scale)
                throw NonRealCurrent("current has a non-real component");
            J[mu] = v.real();
        }
    };
    CurrentValue out;
    J_at(p, out.J);
    for (int mu = 0; mu < 4; ++mu) {
        Point4 hi = p, lo = p;
        hi.x[mu] += step;
        lo.x[mu] -= step;
        std::array<double, 4> Jh, Jl;
        J_at(hi, Jh);
        J_at(lo, Jl);
        out.div += (Jh[mu] - Jl[mu]) / (2.0 * step);
    }
    return out;
}

std::array<double, 4> four_momentum(const Background& bg, const SliceSpec& slice) {
    std::array<double, 4> P{};
    const int n = slice.n;
    double d3 = 1.0;
    for (int i = 0; i < 3; ++i) d3 *= (slice.hi[i] - slice.lo[i]) / n;

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Point4 q;
                q.x[0] = slice.x0;
                q.x[1] = slice.lo[0] + (i + 0.5) * (slice.hi[0] - slice.lo[0]) / n;
                q.x[2] = slice.lo[1] + (j + 0.5) * (slice.hi[1] - slice.lo[1]) / n;
                q.x[3] = slice.lo[2] + (k + 0.5) * (slice.hi[2] - slice.lo[2]) / n;

                PointEval pe = eval_background(bg, q);
                CurvatureScalars cs = ricci_scalar_lagrangian(pe.V, curvature(pe.C));
                Matrix4 B = einstein_tensor_B(pe.V, cs);
                // h h_j^nu B_mu^j dsigma_nu with B_mu^j = h^j_rho B^rho_mu and
                // dsigma = (d3x, 0, 0, 0).
                for (int mu = 0; mu < 4; ++mu) {
                    double acc = 0.0;
                    for (int jj = 0; jj < 4; ++jj)
                        for (int rho = 0; rho < 4; ++rho)
                            acc += pe.V.H.m[jj][0] * pe.V.Hinv.m[jj][rho] * B.m[rho][mu];
                    P[mu] += pe.V.det * acc * d3;
                }
            }
    return P;
}

std::array<double, 4> conservation_experimental(const Background& bg, const DiracField& d,
                                                const Point4& p, double step) {
    std::array<double, 4> res = naive_T_divergence(bg, d, p, step);

    PointEval pe = eval_background(bg, p);
    DiracJets dj = dirac_jets(d, p);
    SpinDensity S = spin_density(bg.gammas, dj.psi, pe.V.H);
    Matrix4 T = mixed_stress_tensor(bg, d, p);
    CurvatureValue R = curvature(pe.C);

    // Documented reading: S^alpha_{nu mu} = S^alpha_{kl} h^k_nu h^l_mu, the
    // garbled third bracket term dropped.
    double Sg[4][4][4];
    for (int a = 0; a < 4; ++a)
        for (int nu = 0; nu < 4; ++nu)
            for (int mu = 0; mu < 4; ++mu) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l)
                        acc += S.s[a][k][l] * pe.V.Hinv.m[k][nu] * pe.V.Hinv.m[l][mu];
                Sg[a][nu][mu] = acc;
            }

    for (int nu = 0; nu < 4; ++nu) {
        double acc = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            for (int a = 0; a < 4; ++a) {
                double bracket = Sg[a][nu][mu];
                if (a == nu) {
                    double tr = 0.0;
                    for (int lam = 0; lam < 4; ++lam) tr += Sg[lam][lam][mu];
                    bracket -= 0.5 * tr;
                }
                acc += bracket * T.m[mu][a];
            }
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
                for (int mu = 0; mu < 4; ++mu) acc += R.R[k][l][mu][nu] * S.s[mu][k][l];
        res[nu] += acc;
    }
    return res;
}

}  // namespace sfield
