#include "support.hpp"

namespace testsupport {

PlaneWave make_plane_wave(const sfield::GammaSet& gs) {
    PlaneWave pw;
    // gamma.p for p_mu = (E, 0, 0, kz).
    sfield::CMat4 P = sfield::cx(pw.E) * gs.up[0] + sfield::cx(pw.kz) * gs.up[3];
    // (gamma.p - m)(gamma.p + m) = (p^2 - m^2) I = 0, so any nonzero column
    // of (gamma.p + m) spans part of the null space of (gamma.p - m).
    sfield::CMat4 proj = P + sfield::cx(pw.mass) * sfield::CMat4::identity();
    int col = 0;
    double best = 0.0;
    for (int c = 0; c < 4; ++c) {
        double mag = 0.0;
        for (int r = 0; r < 4; ++r) mag += std::abs(proj.m[r][c]);
        if (mag > best) {
            best = mag;
            col = c;
        }
    }
    double nrm = 0.0;
    for (int r = 0; r < 4; ++r) nrm += std::norm(proj.m[r][col]);
    nrm = std::sqrt(nrm);
    for (int r = 0; r < 4; ++r) pw.u[r] = proj.m[r][col] / nrm;

    std::map<std::string, double> c{{"E", pw.E}, {"kz", pw.kz}};
    for (int a = 0; a < 4; ++a) {
        char re[16], im[16];
        std::snprintf(re, sizeof re, "u%dre", a);
        std::snprintf(im, sizeof im, "u%dim", a);
        c[re] = pw.u[a].real();
        c[im] = pw.u[a].imag();
    }
    const std::string th = "(E*x0 + kz*x3)";
    for (int a = 0; a < 4; ++a) {
        std::string ua_re = "u" + std::to_string(a) + "re";
        std::string ua_im = "u" + std::to_string(a) + "im";
        pw.field.psi[a].re =
            sfield::parse_expression(ua_re + "*cos" + th + " - " + ua_im + "*sin" + th, c);
        pw.field.psi[a].im =
            sfield::parse_expression(ua_re + "*sin" + th + " + " + ua_im + "*cos" + th, c);
    }
    pw.field.mass = pw.mass;
    return pw;
}

}  // namespace testsupport
