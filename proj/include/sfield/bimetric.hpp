#pragma once

#include <array>

#include "sfield/expr.hpp"
#include "sfield/tensor.hpp"

namespace sfield {

// Pointwise evaluation of a vierbein field together with everything the
// downstream operators need. Index conventions (see docs/conventions.md):
//   H(k,mu)       = h_k^mu        (local k, global mu; fundamental field)
//   Hinv(k,mu)    = h^k_mu        (matrix inverse, transposed layout)
//   dH[k][mu][nu] = d_nu h_k^mu
//   det           = det(h^k_mu)   (volume density, 1/det(H))
struct VierbeinJets {
    Matrix4 H;
    double dH[4][4][4]{};
    double ddH[4][4][4][4]{};
    Matrix4 Hinv;
    double dHinv[4][4][4]{};
    double det = 1.0;
    double ddet[4]{};
};

struct SFieldConfig {
    Expression phi;        // dimensionless scalar
    double lambda = 0.0;   // coupling, >= 0
};

// 16 analytic entries h_k^mu(x).
class VierbeinBundle {
  public:
    VierbeinBundle();  // identity bundle
    explicit VierbeinBundle(const std::array<Expression, 16>& entries);

    const Expression& entry(int k, int mu) const { return e_[k * 4 + mu]; }
    Expression& entry(int k, int mu) { return e_[k * 4 + mu]; }

    Matrix4 value(const Point4& p) const;
    VierbeinJets jets(const Point4& p) const;

  private:
    std::array<Expression, 16> e_;
};

// g-hat^{mu nu} = h_i^mu h_j^nu eta^{ij}.
Matrix4 gravity_metric_from(const Matrix4& H);
Matrix4 gravity_metric(const VierbeinBundle& hg, const Point4& p);

// g-underbar^{mu nu} = lambda^2 d^mu phi d^nu phi, gradient raised with g-hat.
Matrix4 sfield_metric(const SFieldConfig& s, const VierbeinBundle& hg, const Point4& p);

// g^{mu nu} = g-hat + g-underbar, plus its inverse. Checks the (+,-,-,-)
// eigen-signature and non-degeneracy.
struct MetricPair {
    Matrix4 upper;
    Matrix4 lower;
};
MetricPair composite_metric(const VierbeinBundle& hg, const SFieldConfig& s, const Point4& p);

// Pointwise vierbein factorization H^T eta H = g for a symmetric g with
// Lorentz signature. Gauge: symmetric eigendecomposition g = Q D Q^T with
// eigenvalues sorted descending (positive first), H = |D|^{1/2} Q^T,
// eigenvector columns sign-fixed. Any other valid factor differs from this
// one by a local Lorentz transformation.
Matrix4 composite_vierbein(const Matrix4& g_upper);

// A_i^j with hgrav_i^mu = A_i^j hs_j^mu.
Matrix4 bundle_relation(const Matrix4& Hgrav, const Matrix4& Hs);

// The composite bimetric bundle: gravity vierbein plus the scalar-field
// contribution, evaluated analytically (for lambda != 0 a closed-form rank-1
// vierbein update; second derivatives of the update by central differences
// of the analytic first derivatives).
class BimetricBundle {
  public:
    explicit BimetricBundle(VierbeinBundle gravity)
        : gravity_(std::move(gravity)) {}
    BimetricBundle(VierbeinBundle gravity, SFieldConfig sfield)
        : gravity_(std::move(gravity)), sfield_(std::move(sfield)) {}

    const VierbeinBundle& gravity() const { return gravity_; }
    const SFieldConfig& sfield() const { return sfield_; }
    bool has_sfield() const { return sfield_.lambda != 0.0 && !sfield_.phi.is_zero_literal(); }

    VierbeinJets jets(const Point4& p) const;
    Matrix4 value(const Point4& p) const;

  private:
    VierbeinJets composite_jets(const Point4& p) const;
    void jet1_composite(const Point4& p, Matrix4& H, double dH[4][4][4]) const;

    VierbeinBundle gravity_;
    SFieldConfig sfield_;
};

// ---------------------------------------------------------------------------
// Connections
// ---------------------------------------------------------------------------

// Local Lorentz frame field a^k_j(x); orthonormal in the sense
// a eta a^T = eta at every sample point.
struct FrameField {
    std::array<Expression, 16> a;  // row-major [k][j]

    FrameField();  // identity frame
    const Expression& entry(int k, int j) const { return a[k * 4 + j]; }
    Expression& entry(int k, int j) { return a[k * 4 + j]; }
};

double frame_orthonormality_residual(const FrameField& f, const Point4& p);

// Index pairs (k<l) for the antisymmetric local pair of A^{kl}_mu.
inline constexpr int kPairK[6] = {0, 0, 0, 1, 1, 2};
inline constexpr int kPairL[6] = {1, 2, 3, 2, 3, 3};

// Local affine connection A^{kl}_mu, antisymmetric in (k,l). Three sources:
//   Direct      — user expressions for the k<l components,
//   Frame       — derived from a frame field, A^{kl}_mu = -a^k_j d_mu a^{lj},
//   LeviCivita  — the unique antisymmetric A making the induced global
//                 connection torsion-free (pointwise 24x24 solve).
struct ConnectionField {
    enum class Mode { Direct, Frame, LeviCivita };
    Mode mode = Mode::Direct;
    std::array<Expression, 24> direct;  // [pair*4 + mu], all "0" by default
    FrameField frame;

    static ConnectionField zero();
    static ConnectionField from_direct(const std::array<Expression, 24>& entries);
    static ConnectionField from_frame(FrameField f);
    static ConnectionField levi_civita();
};

// Connection value and first derivative at a point:
//   A[k][l][mu]      = A^{kl}_mu
//   dA[k][l][mu][nu] = d_nu A^{kl}_mu
struct ConnectionJet {
    double A[4][4][4]{};
    double dA[4][4][4][4]{};
};

ConnectionJet connection_jet(const ConnectionField& c, const BimetricBundle& b, const Point4& p);

// Value-only variant of the above.
void local_connection(const ConnectionField& c, const BimetricBundle& b, const Point4& p,
                      double A[4][4][4]);

// Torsion-free connection values at a point (also reachable through
// ConnectionField::levi_civita()).
void levi_civita_connection(const BimetricBundle& b, const Point4& p, double A[4][4][4]);

// Global affine connection Gamma^nu_{rho mu} fixed by the vanishing covariant
// derivative of the raised vierbein:
//   0 = d_mu h^{k nu} + A^k_{l mu} h^{l nu} + Gamma^nu_{rho mu} h^{k rho}.
// G[nu][rho][mu]: nu upper, rho contracted, mu the derivative index.
struct GlobalConnectionValue {
    double G[4][4][4]{};
};
GlobalConnectionValue global_connection(const VierbeinJets& V, const ConnectionJet& C);

// Max-abs residual of the defining equation after back-substitution.
double vierbein_postulate_residual(const VierbeinJets& V, const ConnectionJet& C,
                                   const GlobalConnectionValue& G);

// T^nu_{rho mu} = Gamma^nu_{rho mu} - Gamma^nu_{mu rho}.
void torsion(const GlobalConnectionValue& G, double T[4][4][4]);

// Curvature R^{kl}_{mu nu} of the local connection:
//   R^{kl}_{mu nu} = (A^{kl}_{mu,nu} - A^{kl}_{nu,mu})
//                  + eta_{mn} (A^{km}_nu A^{nl}_mu - A^{km}_mu A^{nl}_nu),
// antisymmetric in (k,l) and (mu,nu).
struct CurvatureValue {
    double R[4][4][4][4]{};  // [k][l][mu][nu]
};
CurvatureValue curvature(const ConnectionJet& C);

// Contractions: R^l_mu = h_k^nu R^{kl}_{mu nu}, R = h_l^mu R^l_mu,
// L = det * R.
struct CurvatureScalars {
    Matrix4 Rlm;  // [l][mu]
    double R = 0.0;
    double LIB = 0.0;
};
CurvatureScalars ricci_scalar_lagrangian(const VierbeinJets& V, const CurvatureValue& Rv);

// B^mu_nu = R^mu_nu - 1/2 delta^mu_nu R (upper mu first index).
Matrix4 einstein_tensor_B(const VierbeinJets& V, const CurvatureScalars& S);

// Informational diagnostic: the gradient-squared scalar contribution has
// rank <= 1, so its own vierbein determinant vanishes and the
// equal-volume-element condition cannot hold; reported, not enforced.
struct VolumeElementReport {
    double det_gravity = 0.0;
    int sfield_rank = 0;
    bool equal_determinants_possible = false;
    bool composite_nondegenerate = false;
};
VolumeElementReport volume_element_check(const VierbeinBundle& hg, const SFieldConfig& s,
                                         const Point4& p);

// Converts one slot of an indexed tensor between the local and global frames:
// A^mu = h_k^mu A^k and A^k = h^k_nu A^nu (lower-index analogues likewise).
IndexedTensor local_global_convert(const IndexedTensor& t, const VierbeinJets& V, int slot);

}  // namespace sfield
