#include "sfield/oracles.hpp"

#include <cmath>

namespace sfield::oracle {

static double det3(double a, double b, double c, double d, double e, double f, double g,
                   double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

double det4_cofactor(const double m[4][4]) {
    double det = 0.0;
    for (int col = 0; col < 4; ++col) {
        double sub[9];
        int idx = 0;
        for (int r = 1; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                if (c == col) continue;
                sub[idx++] = m[r][c];
            }
        double minor = det3(sub[0], sub[1], sub[2], sub[3], sub[4], sub[5], sub[6], sub[7], sub[8]);
        det += ((col % 2 == 0) ? 1.0 : -1.0) * m[0][col] * minor;
    }
    return det;
}

namespace {

const int kSym[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};

void metric_at(const std::array<Expression, 10>& g, const Point4& p, double out[4][4]) {
    double v[10];
    for (int i = 0; i < 10; ++i) v[i] = g[i].eval(p);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out[a][b] = v[kSym[a][b]];
}

// Cofactor inverse; throws Degenerate on vanishing determinant.
void invert_cofactor(const double m[4][4], double out[4][4]) {
    double det = det4_cofactor(m);
    if (std::fabs(det) < 1e-14) throw Degenerate("oracle metric is degenerate");
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double sub[9];
            int idx = 0;
            for (int i = 0; i < 4; ++i) {
                if (i == r) continue;
                for (int j = 0; j < 4; ++j) {
                    if (j == c) continue;
                    sub[idx++] = m[i][j];
                }
            }
            double minor =
                det3(sub[0], sub[1], sub[2], sub[3], sub[4], sub[5], sub[6], sub[7], sub[8]);
            out[c][r] = (((r + c) % 2 == 0) ? 1.0 : -1.0) * minor / det;
        }
}

void christoffel_at(const std::array<Expression, 10>& g, const Point4& p, double gamma[4][4][4]) {
    double gv[4][4], ginv[4][4];
    metric_at(g, p, gv);
    invert_cofactor(gv, ginv);

    double dg[4][4][4];  // dg[a][b][mu] = d_mu g_{ab}
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
            Jet2 j = g[kSym[a][b]].eval_jet2(p);
            for (int mu = 0; mu < 4; ++mu) {
                dg[a][b][mu] = j.g[mu];
                dg[b][a][mu] = j.g[mu];
            }
        }

    for (int nu = 0; nu < 4; ++nu)
        for (int rho = 0; rho < 4; ++rho)
            for (int mu = 0; mu < 4; ++mu) {
                double acc = 0.0;
                for (int s = 0; s < 4; ++s)
                    acc += 0.5 * ginv[nu][s] * (dg[s][mu][rho] + dg[s][rho][mu] - dg[rho][mu][s]);
                gamma[nu][rho][mu] = acc;
            }
}

}  // namespace

MetricOracleResult christoffel_from_metric(const std::array<Expression, 10>& g, const Point4& p,
                                           double fd_step) {
    MetricOracleResult out{};
    christoffel_at(g, p, out.gamma);

    // d_m Gamma by central differences.
    double dgamma[4][4][4][4];  // [m][r][n][s] = d_m Gamma^r_{n s}
    for (int m = 0; m < 4; ++m) {
        Point4 hi = p, lo = p;
        hi.x[m] += fd_step;
        lo.x[m] -= fd_step;
        double gh[4][4][4], gl[4][4][4];
        christoffel_at(g, hi, gh);
        christoffel_at(g, lo, gl);
        for (int r = 0; r < 4; ++r)
            for (int n = 0; n < 4; ++n)
                for (int s = 0; s < 4; ++s)
                    dgamma[m][r][n][s] = (gh[r][n][s] - gl[r][n][s]) / (2.0 * fd_step);
    }

    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    double acc = dgamma[m][r][n][s] - dgamma[n][r][m][s];
                    for (int l = 0; l < 4; ++l)
                        acc += out.gamma[r][m][l] * out.gamma[l][n][s] -
                               out.gamma[r][n][l] * out.gamma[l][m][s];
                    out.riemann[r][s][m][n] = acc;
                }

    for (int s = 0; s < 4; ++s)
        for (int n = 0; n < 4; ++n) {
            double acc = 0.0;
            for (int r = 0; r < 4; ++r) acc += out.riemann[r][s][r][n];
            out.ricci[s][n] = acc;
        }

    double gv[4][4], ginv[4][4];
    metric_at(g, p, gv);
    invert_cofactor(gv, ginv);
    out.scalar = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int n = 0; n < 4; ++n) out.scalar += ginv[s][n] * out.ricci[s][n];
    return out;
}

std::complex<double> gamma_product_expand(const RawCMat* mats, int count,
                                          const std::complex<double> psi[4],
                                          const std::complex<double> psibar[4]) {
    // Fold the chain onto psi one matrix at a time, rightmost first.
    std::complex<double> vec[4] = {psi[0], psi[1], psi[2], psi[3]};
    for (int m = count - 1; m >= 0; --m) {
        std::complex<double> next[4];
        for (int i = 0; i < 4; ++i) {
            std::complex<double> acc = 0.0;
            for (int j = 0; j < 4; ++j) acc += mats[m][i][j] * vec[j];
            next[i] = acc;
        }
        for (int i = 0; i < 4; ++i) vec[i] = next[i];
    }
    std::complex<double> acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += psibar[i] * vec[i];
    return acc;
}

}  // namespace sfield::oracle
