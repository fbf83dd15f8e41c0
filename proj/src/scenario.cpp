#include "sfield/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "sfield/version.hpp"

namespace sfield {

// ---------------------------------------------------------------------------
// Check catalogue
// ---------------------------------------------------------------------------

namespace {

enum CheckIdx {
    CK_EQ03,
    CK_EQ04,
    CK_EQ05,
    CK_EQ08,
    CK_EQ15,
    CK_EQ16P,
    CK_EQ16S,
    CK_EQ18,
    CK_EQ2223,
    CK_EQ23,
    CK_EQ24,
    CK_EQ29,
    CK_EQ30,
    CK_EQ33A,
    CK_EQ33,
    CK_EQ37,
    CK_EQ42,
    CK_EQ43,
    CK_EQ45,
    CK_EQ47,
    CK_COUNT
};

enum class CheckClass {
    Assert,        // default tolerance, fails the run
    Promotable,    // informational unless a tolerance override asserts it
    InfoAlways,    // never fails the run
    Bianchi        // asserted only for torsion-free configurations
};

struct CheckDef {
    const char* name;
    const char* equation;
    double default_tol;
    CheckClass cls;
};

constexpr CheckDef kChecks[CK_COUNT] = {
    {"eq03_metric_inverse", "Eq. 3", 1e-12, CheckClass::Assert},
    {"eq04_vierbein_reconstruction", "Eq. 4", 1e-10, CheckClass::Assert},
    {"eq05_lorentz_invariance", "Eq. 5", 1e-12, CheckClass::Assert},
    {"eq08_volume_element", "Eq. 8", 0.0, CheckClass::InfoAlways},
    {"eq15_connection_antisymmetry", "Eq. 15", 1e-8, CheckClass::Assert},
    {"eq16_adjoint_as_printed", "Eq. 16", 0.0, CheckClass::InfoAlways},
    {"eq16_adjoint_standard", "Eq. 16", 0.0, CheckClass::InfoAlways},
    {"eq18_vierbein_postulate", "Eq. 18", 1e-10, CheckClass::Assert},
    {"eq22_eq23_equivalence", "Eq. 22-23", 1e-10, CheckClass::Assert},
    {"eq23_dirac_residual", "Eq. 23", 0.0, CheckClass::Promotable},
    {"eq24_onshell_identity", "Eq. 24", 1e-10, CheckClass::Assert},
    {"eq29_commutator", "Eq. 29", 0.0, CheckClass::Promotable},
    {"eq30_curvature_antisymmetry", "Eq. 30", 1e-10, CheckClass::Assert},
    {"eq33_residual_antisymmetry", "Eq. 33", 1e-10, CheckClass::Assert},
    {"eq33_connection_equation", "Eq. 33", 0.0, CheckClass::Promotable},
    {"eq37_vierbein_equation", "Eq. 37", 0.0, CheckClass::Promotable},
    {"eq42_stress_divergence", "Eq. 42", 0.0, CheckClass::InfoAlways},
    {"eq43_conservation_experimental", "Eq. 43", 0.0, CheckClass::InfoAlways},
    {"eq45_bianchi_divergence", "Eq. 45", 1e-6, CheckClass::Bianchi},
    {"eq47_current_divergence", "Eq. 47", 0.0, CheckClass::Promotable},
};

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& c : kChecks) v.emplace_back(c.name);
        return v;
    }();
    return names;
}

// ---------------------------------------------------------------------------
// Sampling and the worker map
// ---------------------------------------------------------------------------

std::vector<Point4> sample_points(const SampleSpec& spec) {
    std::vector<Point4> pts;
    if (spec.mode == SampleSpec::Mode::Random) {
        SplitMix64 rng(spec.seed);
        pts.reserve(spec.count);
        for (int i = 0; i < spec.count; ++i) {
            Point4 p;
            for (int a = 0; a < 4; ++a) p.x[a] = rng.uniform(spec.lo[a], spec.hi[a]);
            pts.push_back(p);
        }
    } else {
        int n = spec.grid_n;
        pts.reserve(static_cast<std::size_t>(n) * n * n * n);
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    for (int i3 = 0; i3 < n; ++i3) {
                        Point4 p;
                        int idx[4] = {i0, i1, i2, i3};
                        for (int a = 0; a < 4; ++a)
                            p.x[a] = spec.lo[a] + (idx[a] + 0.5) * (spec.hi[a] - spec.lo[a]) / n;
                        pts.push_back(p);
                    }
    }
    return pts;
}

static void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (const char* env = std::getenv("SFIELD_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) workers = static_cast<unsigned>(v);
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Per-point evaluation
// ---------------------------------------------------------------------------

namespace {

struct PointChecks {
    double v[CK_COUNT] = {};
    double torsion_max = 0.0;
    int sfield_rank = 0;
};

std::string describe_point(const Point4& p) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g, %.6g)", p.x[0], p.x[1], p.x[2], p.x[3]);
    return buf;
}

double spinor_max(const Spinor& s) {
    double m = 0.0;
    for (const cx& c : s) m = std::max(m, std::abs(c));
    return m;
}

PointChecks evaluate_point(const Scenario& s, const Background& bg, const Matrix4& lorentz,
                           const Point4& p) {
    PointChecks out;
    const GammaSet& gs = bg.gammas;

    // Metric layer.
    MetricPair mp = composite_metric(s.gravity, s.sfield, p);
    {
        Matrix4 prod = mp.upper * mp.lower;
        out.v[CK_EQ03] = max_abs_diff(prod, Matrix4::identity());
    }
    {
        Matrix4 hv = composite_vierbein(mp.upper);
        Matrix4 recon = transpose(hv) * minkowski_eta() * hv;
        double r = max_abs_diff(recon, mp.upper);
        Matrix4 Hc = bg.bundle.value(p);
        Matrix4 recon2 = transpose(Hc) * minkowski_eta() * Hc;
        out.v[CK_EQ04] = std::max(r, max_abs_diff(recon2, mp.upper));
    }
    {
        // Constant local Lorentz transformation applied to the gravity bundle.
        Matrix4 H = s.gravity.value(p);
        Matrix4 Ht = lorentz * H;
        Matrix4 ghat = gravity_metric_from(H);
        Matrix4 ghat_t = gravity_metric_from(Ht);
        double r = max_abs_diff(ghat, ghat_t);

        Jet2 phi = s.sfield.phi.eval_jet2(p);
        auto smetric = [&](const Matrix4& g) {
            Matrix4 gs_;
            double up[4];
            for (int mu = 0; mu < 4; ++mu) {
                double v = 0.0;
                for (int nu = 0; nu < 4; ++nu) v += g.m[mu][nu] * phi.g[nu];
                up[mu] = v;
            }
            double l2 = s.sfield.lambda * s.sfield.lambda;
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) gs_.m[mu][nu] = l2 * up[mu] * up[nu];
            return gs_;
        };
        Matrix4 gund = smetric(ghat), gund_t = smetric(ghat_t);
        r = std::max(r, max_abs_diff(gund, gund_t));
        r = std::max(r, max_abs_diff(ghat + gund, ghat_t + gund_t));
        out.v[CK_EQ05] = r;
    }
    {
        VolumeElementReport ver = volume_element_check(s.gravity, s.sfield, p);
        out.sfield_rank = ver.sfield_rank;
        out.v[CK_EQ08] = 0.0;
    }

    // Connection layer.
    VierbeinJets V = bg.bundle.jets(p);
    ConnectionJet C = connection_jet(bg.connection, bg.bundle, p);
    {
        double r = 0.0;
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
                for (int mu = 0; mu < 4; ++mu)
                    r = std::max(r, std::fabs(C.A[k][l][mu] + C.A[l][k][mu]));
        out.v[CK_EQ15] = r;
    }
    GlobalConnectionValue G = global_connection(V, C);
    out.v[CK_EQ18] = vierbein_postulate_residual(V, C, G);
    {
        double T[4][4][4];
        torsion(G, T);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    out.torsion_max = std::max(out.torsion_max, std::fabs(T[a][b][c]));
    }

    CurvatureValue R = curvature(C);
    {
        double r = 0.0;
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
                for (int mu = 0; mu < 4; ++mu)
                    for (int nu = 0; nu < 4; ++nu) {
                        r = std::max(r, std::fabs(R.R[k][l][mu][nu] + R.R[l][k][mu][nu]));
                        r = std::max(r, std::fabs(R.R[k][l][mu][nu] + R.R[k][l][nu][mu]));
                    }
        out.v[CK_EQ30] = r;
    }

    // Dirac layer.
    DiracJets dj = dirac_jets(s.dirac, p);
    {
        AdjointDiagnostic ad = adjoint_sign_diagnostic(gs, dj, C);
        out.v[CK_EQ16P] = ad.as_printed;
        out.v[CK_EQ16S] = ad.standard;
    }
    DiracResidual r23 = dirac_residual_at(gs, V, C, dj);
    DiracResidual r22 = dirac_residual_density_at(gs, V, C, dj);
    {
        double r = 0.0;
        for (int a = 0; a < 4; ++a) {
            r = std::max(r, std::abs(r22.res_psi[a] / V.det - r23.res_psi[a]));
            r = std::max(r, std::abs(r22.res_psibar[a] / V.det - r23.res_psibar[a]));
        }
        out.v[CK_EQ2223] = r;
        out.v[CK_EQ23] = std::max(spinor_max(r23.res_psi), spinor_max(r23.res_psibar));
    }
    out.v[CK_EQ24] = onshell_lagrangian_check_at(gs, V, C, dj).identity_residual;
    out.v[CK_EQ29] = commutator_check(bg, s.dirac, p, s.fd_nested).diff;

    {
        double res33[4][4][4];
        field_eq_A_residual_at(gs, V, C, dj, res33);
        double anti = 0.0, mag = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    anti = std::max(anti, std::fabs(res33[mu][k][l] + res33[mu][l][k]));
                    mag = std::max(mag, std::fabs(res33[mu][k][l]));
                }
        out.v[CK_EQ33A] = anti;
        out.v[CK_EQ33] = mag;
    }
    out.v[CK_EQ37] = max_abs(field_eq_h_residual_at(gs, V, C, dj));

    {
        auto div = naive_T_divergence(bg, s.dirac, p, s.fd_outer);
        for (double d : div) out.v[CK_EQ42] = std::max(out.v[CK_EQ42], std::fabs(d));
    }
    if (s.experimental_eq43) {
        auto div = conservation_experimental(bg, s.dirac, p, s.fd_outer);
        for (double d : div) out.v[CK_EQ43] = std::max(out.v[CK_EQ43], std::fabs(d));
    }
    {
        auto div = B_divergence(bg, p, s.fd_outer);
        for (double d : div) out.v[CK_EQ45] = std::max(out.v[CK_EQ45], std::fabs(d));
    }
    out.v[CK_EQ47] = std::fabs(current_and_divergence(bg, s.dirac, p, s.fd_outer).div);

    return out;
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// run_all_checks
// ---------------------------------------------------------------------------

bool CheckReport::passed() const {
    if (!error.empty()) return false;
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail) return false;
    return true;
}

CheckReport run_all_checks(const Scenario& s) {
    CheckReport rep;
    rep.scenario = s.source_path;
    rep.version = kVersion;
    rep.timestamp = iso_timestamp();
    rep.seed = s.sample.seed;
    rep.fd_nested = s.fd_nested;
    rep.fd_outer = s.fd_outer;

    std::vector<Point4> pts = sample_points(s.sample);
    rep.points = static_cast<int>(pts.size());

    GammaSet gs = GammaSet::dirac_rep();
    BimetricBundle bundle(s.gravity, s.sfield);
    Background bg{bundle, s.connection, gs};

    // Fixed boost for the invariance spot check (rapidity 0.3 along x1).
    Matrix4 K;
    K.m[0][1] = 0.3;
    K.m[1][0] = -0.3;
    Matrix4 lorentz = lorentz_from_generator(K);

    std::vector<PointChecks> results(pts.size());
    std::vector<std::string> errors(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        try {
            results[i] = evaluate_point(s, bg, lorentz, pts[i]);
        } catch (const Error& e) {
            errors[i] = std::string(e.what()) + " at point " + describe_point(pts[i]);
        }
    });
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!errors[i].empty()) {
            rep.error = errors[i];
            return rep;
        }

    double torsion_max = 0.0;
    int sfield_rank = 0;
    for (const auto& r : results) {
        torsion_max = std::max(torsion_max, r.torsion_max);
        sfield_rank = std::max(sfield_rank, r.sfield_rank);
    }
    bool torsion_free = torsion_max < 1e-10;

    for (int c = 0; c < CK_COUNT; ++c) {
        if (c == CK_EQ43 && !s.experimental_eq43) continue;
        const CheckDef& def = kChecks[c];
        CheckRecord rec;
        rec.name = def.name;
        rec.equation = def.equation;
        rec.points = rep.points;
        for (const auto& r : results) rec.max_residual = std::max(rec.max_residual, r.v[c]);

        auto user = s.tolerances.find(def.name);
        switch (def.cls) {
            case CheckClass::Assert:
                rec.tolerance = (user != s.tolerances.end()) ? user->second : def.default_tol;
                rec.status = rec.max_residual <= rec.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
                break;
            case CheckClass::Promotable:
                if (user != s.tolerances.end()) {
                    rec.tolerance = user->second;
                    rec.status =
                        rec.max_residual <= rec.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
                } else {
                    rec.status = CheckStatus::Info;
                }
                break;
            case CheckClass::InfoAlways: rec.status = CheckStatus::Info; break;
            case CheckClass::Bianchi:
                if (torsion_free) {
                    rec.tolerance = (user != s.tolerances.end()) ? user->second : def.default_tol;
                    rec.status =
                        rec.max_residual <= rec.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
                    rec.note = "torsion-free configuration: contracted Bianchi identity asserted";
                } else {
                    rec.status = CheckStatus::Info;
                    rec.note = "torsionful configuration: divergence reported only";
                }
                break;
        }

        if (c == CK_EQ08) {
            std::ostringstream os;
            os << "scalar-gradient metric rank " << sfield_rank
               << "; equal bundle volume elements unattainable for this coupling (informational)";
            rec.note = os.str();
        }
        if (c == CK_EQ16P) {
            rec.note = "hermiticity residual with the printed (+) adjoint sign";
            if (s.adjoint_sign == AdjointSign::AsPrinted) rec.note += " [active convention]";
        }
        if (c == CK_EQ16S) {
            rec.note = "hermiticity residual with the standard (-) adjoint sign";
            if (s.adjoint_sign == AdjointSign::Standard) rec.note += " [active convention]";
        }
        if (c == CK_EQ24) rec.note = "residual relative to the spinor scale";
        if (c == CK_EQ43) rec.note = "experimental single-reading evaluation; informational";

        rep.checks.push_back(std::move(rec));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

ConvergenceTable convergence_study(const Scenario& s, const std::vector<double>& steps) {
    if (steps.size() < 3) throw ValidationError("steps (need at least 3)");
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (!(steps[i] < steps[i - 1]) || !(steps[i] > 0))
            throw ValidationError("steps (must be positive, strictly decreasing)");

    std::vector<Point4> pts = sample_points(s.sample);
    GammaSet gs = GammaSet::dirac_rep();
    BimetricBundle bundle(s.gravity, s.sfield);
    Background bg{bundle, s.connection, gs};

    struct Row {
        const char* name;
        const char* equation;
    };
    const Row rows[] = {{"eq29_commutator", "Eq. 29"},
                        {"eq42_stress_divergence", "Eq. 42"},
                        {"eq45_bianchi_divergence", "Eq. 45"},
                        {"eq47_current_divergence", "Eq. 47"}};

    ConvergenceTable table;
    table.steps = steps;
    for (const Row& row : rows) {
        ConvergenceRow cr;
        cr.name = row.name;
        cr.equation = row.equation;
        cr.residuals.assign(steps.size(), 0.0);
        table.rows.push_back(cr);
    }

    for (std::size_t si = 0; si < steps.size(); ++si) {
        double step = steps[si];
        std::vector<std::array<double, 4>> vals(pts.size());
        std::vector<std::string> errors(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            try {
                std::array<double, 4> v{};
                v[0] = commutator_check(bg, s.dirac, pts[i], step).diff;
                for (double d : naive_T_divergence(bg, s.dirac, pts[i], step))
                    v[1] = std::max(v[1], std::fabs(d));
                for (double d : B_divergence(bg, pts[i], step)) v[2] = std::max(v[2], std::fabs(d));
                v[3] = std::fabs(current_and_divergence(bg, s.dirac, pts[i], step).div);
                vals[i] = v;
            } catch (const Error& e) {
                errors[i] = std::string(e.what()) + " at point " + describe_point(pts[i]);
            }
        });
        for (const auto& e : errors)
            if (!e.empty()) throw Error(e);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (int r = 0; r < 4; ++r)
                table.rows[r].residuals[si] = std::max(table.rows[r].residuals[si], vals[i][r]);
    }

    // Observed order: least-squares slope in log-log; saturated when the
    // residuals sit at the rounding floor or stop decreasing.
    for (auto& row : table.rows) {
        double floor_val = 1e-12;
        bool at_floor = row.residuals.back() < floor_val;
        bool decreasing = true;
        for (std::size_t i = 1; i < row.residuals.size(); ++i)
            if (row.residuals[i] > row.residuals[i - 1]) decreasing = false;
        if (at_floor || !decreasing) {
            row.saturated = true;
            continue;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = table.steps.size();
        for (std::size_t i = 0; i < n; ++i) {
            double lx = std::log(table.steps[i]);
            double ly = std::log(std::max(row.residuals[i], 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        double denom = n * sxx - sx * sx;
        row.order = (denom != 0.0) ? (n * sxy - sx * sy) / denom : 0.0;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Scenario loading
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

struct RawEntry {
    std::string section;
    std::string key;
    std::string value;
    bool quoted = false;
    int line = 0;
};

std::vector<RawEntry> tokenize_scenario(const std::string& text) {
    std::vector<RawEntry> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(strip_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        RawEntry e;
        e.section = section;
        e.key = trim(t.substr(0, eq));
        e.line = lineno;
        std::string v = trim(t.substr(eq + 1));
        if (!v.empty() && v.front() == '"') {
            if (v.size() < 2 || v.back() != '"')
                throw ParseError("line " + std::to_string(lineno) + ": unterminated quoted value");
            e.value = v.substr(1, v.size() - 2);
            e.quoted = true;
        } else {
            e.value = v;
        }
        if (e.key.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

double parse_number(const RawEntry& e) {
    try {
        std::size_t used = 0;
        double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ParseError("line " + std::to_string(e.line) + ": " + e.section + "." + e.key +
                         ": expected a number, got '" + e.value + "'");
    }
}

Expression parse_expr_field(const RawEntry& e, const std::map<std::string, double>& constants) {
    if (!e.quoted)
        throw ValidationError(e.section + "." + e.key + " (expression values must be quoted)");
    try {
        return parse_expression(e.value, constants);
    } catch (const Error& err) {
        throw ParseError(e.section + "." + e.key + ": " + err.what());
    }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
    Scenario s;
    s.source_path = name;
    std::vector<RawEntry> entries = tokenize_scenario(text);

    // First pass: constants only, so later expressions can use them.
    for (const auto& e : entries)
        if (e.section == "constants") s.constants[e.key] = parse_number(e);

    bool dirac_section = false;
    bool dirac_mass_seen = false;
    std::string connection_mode = "direct";
    std::array<Expression, 24> direct_entries;
    FrameField frame;
    bool any_frame_key = false, any_direct_key = false;

    for (const auto& e : entries) {
        const std::string& sec = e.section;
        if (sec == "constants") continue;

        if (sec == "gravity_vierbein") {
            if (e.key.size() == 3 && e.key[0] == 'h' && e.key[1] >= '0' && e.key[1] <= '3' &&
                e.key[2] >= '0' && e.key[2] <= '3') {
                s.gravity.entry(e.key[1] - '0', e.key[2] - '0') = parse_expr_field(e, s.constants);
            } else {
                throw ValidationError("gravity_vierbein." + e.key);
            }
        } else if (sec == "sfield") {
            if (e.key == "phi") s.sfield.phi = parse_expr_field(e, s.constants);
            else if (e.key == "lambda") s.sfield.lambda = parse_number(e);
            else throw ValidationError("sfield." + e.key);
        } else if (sec == "connection") {
            if (e.key == "mode") {
                connection_mode = e.value;
                if (connection_mode != "direct" && connection_mode != "frame" &&
                    connection_mode != "levi-civita")
                    throw ValidationError("connection.mode");
            } else if (e.key.size() == 5 && e.key[0] == 'A' && e.key[3] == '_') {
                int k = e.key[1] - '0', l = e.key[2] - '0', mu = e.key[4] - '0';
                int pair = -1;
                for (int pr = 0; pr < 6; ++pr)
                    if (kPairK[pr] == k && kPairL[pr] == l) pair = pr;
                if (pair < 0 || mu < 0 || mu > 3) throw ValidationError("connection." + e.key);
                direct_entries[pair * 4 + mu] = parse_expr_field(e, s.constants);
                any_direct_key = true;
            } else if (e.key.size() == 3 && e.key[0] == 'a' && e.key[1] >= '0' &&
                       e.key[1] <= '3' && e.key[2] >= '0' && e.key[2] <= '3') {
                frame.entry(e.key[1] - '0', e.key[2] - '0') = parse_expr_field(e, s.constants);
                any_frame_key = true;
            } else {
                throw ValidationError("connection." + e.key);
            }
        } else if (sec == "dirac") {
            dirac_section = true;
            if (e.key == "mass") {
                s.dirac.mass = parse_number(e);
                dirac_mass_seen = true;
                if (s.dirac.mass < 0) throw ValidationError("dirac.mass (must be >= 0)");
            } else if (e.key.size() == 7 && e.key.rfind("psi", 0) == 0 &&
                       (e.key.substr(4) == "_re" || e.key.substr(4) == "_im")) {
                int a = e.key[3] - '0';
                if (a < 0 || a > 3) throw ValidationError("dirac." + e.key);
                Expression ex = parse_expr_field(e, s.constants);
                if (e.key.substr(4) == "_re") s.dirac.psi[a].re = ex;
                else s.dirac.psi[a].im = ex;
            } else {
                throw ValidationError("dirac." + e.key);
            }
        } else if (sec == "options") {
            if (e.key == "adjoint_sign") {
                if (e.value == "as-printed") s.adjoint_sign = AdjointSign::AsPrinted;
                else if (e.value == "standard") s.adjoint_sign = AdjointSign::Standard;
                else throw ValidationError("options.adjoint_sign");
            } else if (e.key == "fd_nested") {
                s.fd_nested = parse_number(e);
            } else if (e.key == "fd_outer") {
                s.fd_outer = parse_number(e);
            } else if (e.key == "experimental_eq43") {
                s.experimental_eq43 = (e.value == "true" || e.value == "1");
            } else {
                throw ValidationError("options." + e.key);
            }
        } else if (sec == "sample") {
            if (e.key == "mode") {
                if (e.value == "random") s.sample.mode = SampleSpec::Mode::Random;
                else if (e.value == "grid") s.sample.mode = SampleSpec::Mode::Grid;
                else throw ValidationError("sample.mode");
            } else if (e.key == "box") {
                std::istringstream bs(e.value);
                double vals[8];
                for (int i = 0; i < 8; ++i)
                    if (!(bs >> vals[i])) throw ValidationError("sample.box (need 8 numbers)");
                for (int a = 0; a < 4; ++a) {
                    s.sample.lo[a] = vals[2 * a];
                    s.sample.hi[a] = vals[2 * a + 1];
                }
            } else if (e.key == "count") {
                s.sample.count = static_cast<int>(parse_number(e));
            } else if (e.key == "grid_n") {
                s.sample.grid_n = static_cast<int>(parse_number(e));
            } else if (e.key == "seed") {
                s.sample.seed = static_cast<std::uint64_t>(parse_number(e));
            } else {
                throw ValidationError("sample." + e.key);
            }
        } else if (sec == "tolerances") {
            const auto& names = check_names();
            if (std::find(names.begin(), names.end(), e.key) == names.end())
                throw ValidationError("tolerances." + e.key + " (unknown check)");
            s.tolerances[e.key] = parse_number(e);
        } else {
            throw ValidationError("[" + sec + "] (unknown section)");
        }
    }

    if (dirac_section && !dirac_mass_seen) throw ValidationError("dirac.mass");
    if (s.sfield.lambda < 0) throw ValidationError("sfield.lambda (must be >= 0)");
    if (s.sample.count < 1) throw ValidationError("sample.count (must be >= 1)");
    if (s.sample.grid_n < 1) throw ValidationError("sample.grid_n (must be >= 1)");
    for (int a = 0; a < 4; ++a)
        if (!(s.sample.hi[a] > s.sample.lo[a])) throw ValidationError("sample.box (empty axis)");

    if (connection_mode == "direct") {
        s.connection = ConnectionField::from_direct(direct_entries);
        if (any_frame_key) throw ValidationError("connection (frame keys with direct mode)");
    } else if (connection_mode == "frame") {
        s.connection = ConnectionField::from_frame(frame);
        if (any_direct_key) throw ValidationError("connection (direct keys with frame mode)");
    } else {
        s.connection = ConnectionField::levi_civita();
        if (any_direct_key || any_frame_key)
            throw ValidationError("connection (component keys with levi-civita mode)");
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path);
}

}  // namespace sfield
