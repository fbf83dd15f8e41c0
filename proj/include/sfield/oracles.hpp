#pragma once

// Deliberately naive reference implementations used only by the test suite.
// This module depends on the expression evaluator and raw arrays alone; it
// shares no linear-algebra or geometry code with the main path.

#include <array>
#include <complex>

#include "sfield/expr.hpp"

namespace sfield::oracle {

// Cofactor (Laplace) expansion determinant.
double det4_cofactor(const double m[4][4]);

// Textbook Levi-Civita connection and curvature from a metric given as the
// 10 independent lower-index components, order 00,01,02,03,11,12,13,22,23,33.
// Conventions used here:
//   Gamma^nu_{rho mu} = 1/2 g^{nu s} (d_rho g_{s mu} + d_mu g_{s rho} - d_s g_{rho mu})
//   R^r_{s m n} = d_m Gamma^r_{n s} - d_n Gamma^r_{m s}
//              + Gamma^r_{m l} Gamma^l_{n s} - Gamma^r_{n l} Gamma^l_{m s}
//   Ricci_{s n} = R^r_{s r n},  scalar = g^{s n} Ricci_{s n}
// Gamma derivatives for the Riemann tensor use central differences
// ("finite-difference everything").
struct MetricOracleResult {
    double gamma[4][4][4];    // Gamma^nu_{rho mu}
    double riemann[4][4][4][4];
    double ricci[4][4];
    double scalar;
};

MetricOracleResult christoffel_from_metric(const std::array<Expression, 10>& g_lower,
                                           const Point4& p, double fd_step = 1e-5);

// Element-wise expansion of psibar * M1 * ... * Mk * psi with explicit loops.
using RawCMat = std::array<std::array<std::complex<double>, 4>, 4>;
std::complex<double> gamma_product_expand(const RawCMat* mats, int count,
                                          const std::complex<double> psi[4],
                                          const std::complex<double> psibar[4]);

}  // namespace sfield::oracle
