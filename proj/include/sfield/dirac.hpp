#pragma once

#include <array>

#include "sfield/bimetric.hpp"
#include "sfield/gamma.hpp"

namespace sfield {

struct ComplexExpression {
    Expression re, im;
};

struct DiracField {
    ComplexExpression psi[4];
    double mass = 0.0;

    bool is_zero() const;
};

// Pointwise spinor data: value and coordinate gradient of each component.
struct DiracJets {
    Spinor psi{};
    Spinor dpsi[4]{};  // [mu]
    double mass = 0.0;
};
DiracJets dirac_jets(const DiracField& d, const Point4& p);

// Sign convention for the connection term in the adjoint covariant
// derivative: AsPrinted uses +1/4 A psibar gamma gamma, Standard uses -1/4
// (the choice consistent with (psi_{;mu})^dagger gamma^0 = psibar_{;mu}).
enum class AdjointSign { AsPrinted, Standard };

// Everything pointwise operators need about the background.
struct Background {
    const BimetricBundle& bundle;
    const ConnectionField& connection;
    const GammaSet& gammas;
};

struct SpinorDerivatives {
    Spinor dpsi_cov[4];     // psi_{;mu}
    Spinor dpsibar_cov[4];  // psibar_{;mu} (row components)
};
SpinorDerivatives covariant_spinor_derivative(const GammaSet& gs, const DiracJets& d,
                                              const ConnectionJet& C, AdjointSign sign);

// Residuals of the two hermiticity identities
// (psi_{;mu})^dagger gamma^0 - psibar_{;mu}, one per sign convention.
struct AdjointDiagnostic {
    double as_printed = 0.0;
    double standard = 0.0;
};
AdjointDiagnostic adjoint_sign_diagnostic(const GammaSet& gs, const DiracJets& d,
                                          const ConnectionJet& C);

// L_D = m psibar psi + i/2 [psibar gamma^mu psi_{,mu} - psibar_{,mu} gamma^mu psi]
//     + i/8 A^{kl}_mu psibar (gamma^mu gamma_k gamma_l + gamma_k gamma_l gamma^mu) psi
double dirac_lagrangian_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                           const DiracJets& d);
cx dirac_lagrangian_complex_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                               const DiracJets& d);

// Field-equation residuals. res_psi is the psi equation (column), res_psibar
// the adjoint equation (row). The density variant carries the volume factor
// and groups the derivative differently; the two must agree after dividing
// by the density.
struct DiracResidual {
    Spinor res_psi{};
    Spinor res_psibar{};
};
DiracResidual dirac_residual_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                                const DiracJets& d);
DiracResidual dirac_residual_density_at(const GammaSet& gs, const VierbeinJets& V,
                                        const ConnectionJet& C, const DiracJets& d);

// |2 L_D| against the Schwarz bound from the residual bilinears, plus the
// residual of the identity 2 L_D = psibar.res_psi + res_psibar.psi.
struct OnshellCheck {
    double two_lagrangian = 0.0;
    double bound = 0.0;
    double identity_residual = 0.0;  // relative to max(1, scale)
};
OnshellCheck onshell_lagrangian_check_at(const GammaSet& gs, const VierbeinJets& V,
                                         const ConnectionJet& C, const DiracJets& d);

// T^l_mu = i/2 [psibar gamma^l psi_{,mu} - psibar_{,mu} gamma^l psi]
//        + i/8 A_{kj mu} psibar (gamma^l gamma^k gamma^j + gamma^k gamma^j gamma^l) psi
// (gamma^l is the local frame gamma). Stored as T(l, mu).
Matrix4 stress_energy_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                         const DiracJets& d);

// Residual of the connection field equation (antisymmetric in k,l):
//   (h h_k^a h_l^mu - h h_k^mu h_l^a)_{,a}
//   - (h h_m^a h_l^mu - h h_m^mu h_l^a) A^m_{k a}
//   - (h h_k^mu h_m^a - h h_k^a h_m^mu) A_l^m_a  -  h S^mu_{kl}
void field_eq_A_residual_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                            const DiracJets& d, double res[4][4][4]);  // [mu][k][l]

// Residual of the vierbein field equation: h (h^l_mu R - 2 R^l_mu) + T^l_mu.
Matrix4 field_eq_h_residual_at(const GammaSet& gs, const VierbeinJets& V, const ConnectionJet& C,
                               const DiracJets& d);

// Second covariant derivative commutator versus its curvature form; the
// nested outer derivative uses central differences with `step`.
struct CommutatorCheck {
    double lhs_scale = 0.0;
    double rhs_scale = 0.0;
    double diff = 0.0;
};
CommutatorCheck commutator_check(const Background& bg, const DiracField& d, const Point4& p,
                                 double step);

// Covariant divergence T^mu_nu;mu (finite-difference outer derivative);
// generally nonzero, returned for reporting.
std::array<double, 4> naive_T_divergence(const Background& bg, const DiracField& d,
                                         const Point4& p, double step);

// Covariant divergence B^mu_nu;mu; the contracted Bianchi identity makes it
// vanish for torsion-free configurations.
std::array<double, 4> B_divergence(const Background& bg, const Point4& p, double step);

// J^mu = h psibar gamma^mu psi and its ordinary divergence d_mu J^mu.
struct CurrentValue {
    std::array<double, 4> J{};
    double div = 0.0;
};
CurrentValue current_and_divergence(const Background& bg, const DiracField& d, const Point4& p,
                                    double step);

// P_mu = sum over a constant-x0 midpoint grid of h h_j^nu B_mu^j dsigma_nu
// with dsigma = (d^3x, 0, 0, 0).
struct SliceSpec {
    double x0 = 0.0;
    double lo[3] = {-1, -1, -1};
    double hi[3] = {1, 1, 1};
    int n = 8;
};
std::array<double, 4> four_momentum(const Background& bg, const SliceSpec& slice);

// Experimental evaluation of the torsionful conservation relation, one
// documented index reading (see docs/equations.md); informational only.
std::array<double, 4> conservation_experimental(const Background& bg, const DiracField& d,
                                                const Point4& p, double step);

}  // namespace sfield
