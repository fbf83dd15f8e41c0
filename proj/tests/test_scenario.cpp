#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sfield/scenario.hpp"
#include "support.hpp"

using namespace sfield;

namespace {

const CheckRecord* find_check(const CheckReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string strip_timestamp(const std::string& json) {
    std::istringstream in(json);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos) out << line << "\n";
    return out.str();
}

const char* kFlat = R"scn(
[sample]
mode = random
count = 16
seed = 7
)scn";

const char* kPlaneWave = R"scn(
[constants]
E  = 1.0
kz = 0.8

[dirac]
mass = 0.6
psi0_re = "2*cos(E*x0 + kz*x3)"
psi0_im = "2*sin(E*x0 + kz*x3)"
psi2_re = "-cos(E*x0 + kz*x3)"
psi2_im = "-sin(E*x0 + kz*x3)"

[sample]
count = 16
seed = 9

[tolerances]
eq23_dirac_residual = 1e-10
eq47_current_divergence = 1e-8
)scn";

}  // namespace

TEST_CASE("scenario defaults: identity vierbein, zero fields") {
    Scenario s = parse_scenario_text(kFlat, "flat");
    CHECK(s.sample.count == 16);
    CHECK(s.sample.seed == 7);
    CHECK(s.sfield.lambda == 0.0);
    CHECK(s.dirac.is_zero());
    CHECK(s.dirac.mass == 0.0);
    Point4 p{0.4, -0.3, 0.2, 0.9};
    CHECK(max_abs_diff(s.gravity.value(p), Matrix4::identity()) == 0.0);
}

TEST_CASE("scenario parse and validation errors") {
    // Unknown symbol inside an expression names the field.
    try {
        parse_scenario_text("[sfield]\nphi = \"x9\"\nlambda = 0.1\n", "t");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("sfield.phi") != std::string::npos);
    }

    // A matter section without a mass.
    try {
        parse_scenario_text("[dirac]\npsi0_re = \"1\"\n", "t");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field == "dirac.mass");
    }

    CHECK_THROWS_AS(parse_scenario_text("[dirac]\nmass = -1\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_scenario_text("[nosuch]\nx = 1\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_scenario_text("[sample]\nbox = 1 2 3\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_scenario_text("[sample]\nbox = 1 -1 0 1 0 1 0 1\n", "t"),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario_text("[tolerances]\nnope = 1e-3\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_scenario_text("[gravity_vierbein]\nh44 = \"1\"\n", "t"),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario_text("missing equals\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[sfield]\nphi = \"x0\nlambda = 1\n", "t"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[connection]\nmode = direct\na00 = \"1\"\n", "t"),
                    ValidationError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.scn"), ParseError);
}

TEST_CASE("flat scenario: every check passes with tiny residuals") {
    Scenario s = parse_scenario_text(kFlat, "flat");
    CheckReport rep = run_all_checks(s);
    CHECK(rep.error.empty());
    CHECK(rep.passed());
    CHECK(rep.points == 16);

    for (const auto& c : rep.checks) {
        INFO(c.name);
        if (c.status != CheckStatus::Info) CHECK(c.status == CheckStatus::Pass);
        CHECK(c.max_residual < 1e-12);
    }

    // Informational records stay informational.
    CHECK(find_check(rep, "eq08_volume_element")->status == CheckStatus::Info);
    CHECK(find_check(rep, "eq42_stress_divergence")->status == CheckStatus::Info);
    // Flat is torsion-free, so the Bianchi record is asserted.
    CHECK(find_check(rep, "eq45_bianchi_divergence")->status == CheckStatus::Pass);
    // The experimental record is absent unless enabled.
    CHECK(find_check(rep, "eq43_conservation_experimental") == nullptr);

    s.experimental_eq43 = true;
    CheckReport rep2 = run_all_checks(s);
    CHECK(find_check(rep2, "eq43_conservation_experimental") != nullptr);
}

TEST_CASE("plane-wave scenario passes its promoted assertions") {
    Scenario s = parse_scenario_text(kPlaneWave, "pw");
    CheckReport rep = run_all_checks(s);
    CHECK(rep.error.empty());
    CHECK(rep.passed());
    const CheckRecord* eq23 = find_check(rep, "eq23_dirac_residual");
    REQUIRE(eq23 != nullptr);
    CHECK(eq23->status == CheckStatus::Pass);
    CHECK(eq23->max_residual < 1e-10);
    const CheckRecord* eq47 = find_check(rep, "eq47_current_divergence");
    CHECK(eq47->status == CheckStatus::Pass);
}

TEST_CASE("off-shell assertion fails the run") {
    const char* text = R"scn(
[dirac]
mass = 1.0
psi0_re = "1"

[sample]
count = 8
seed = 3

[tolerances]
eq23_dirac_residual = 1e-10
)scn";
    Scenario s = parse_scenario_text(text, "fail");
    CheckReport rep = run_all_checks(s);
    CHECK_FALSE(rep.passed());
    const CheckRecord* eq23 = find_check(rep, "eq23_dirac_residual");
    CHECK(eq23->status == CheckStatus::Fail);
    CHECK(eq23->max_residual > 0.5);
}

TEST_CASE("degenerate vierbein surfaces as an error with the offending point") {
    const char* text = R"scn(
[gravity_vierbein]
h00 = "x0"

[sample]
mode = grid
grid_n = 1
box = -0.5 0.5 -1 1 -1 1 -1 1
)scn";
    // The single grid midpoint sits at x0 = 0, where the vierbein degenerates.
    Scenario s = parse_scenario_text(text, "degenerate");
    CheckReport rep = run_all_checks(s);
    CHECK_FALSE(rep.error.empty());
    CHECK_FALSE(rep.passed());
    CHECK(rep.error.find("at point") != std::string::npos);
}

TEST_CASE("grid sampling produces n^4 midpoints") {
    SampleSpec spec;
    spec.mode = SampleSpec::Mode::Grid;
    spec.grid_n = 3;
    auto pts = sample_points(spec);
    CHECK(pts.size() == 81);
    // Midpoints of [-1,1] thirds: -2/3, 0, 2/3.
    CHECK(pts[0].x[0] == doctest::Approx(-2.0 / 3.0));
    CHECK(pts[80].x[3] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("identical scenario and seed give byte-identical reports modulo timestamp") {
    Scenario s = parse_scenario_text(kPlaneWave, "pw");
    CheckReport r1 = run_all_checks(s);
    CheckReport r2 = run_all_checks(s);
    CHECK(strip_timestamp(report_to_json(r1)) == strip_timestamp(report_to_json(r2)));

    Scenario s2 = s;
    s2.sample.seed = 10;
    CheckReport r3 = run_all_checks(s2);
    CHECK(strip_timestamp(report_to_json(r1)) != strip_timestamp(report_to_json(r3)));
}

TEST_CASE("report JSON carries the environment block and equation tags") {
    Scenario s = parse_scenario_text(kFlat, "flat");
    CheckReport rep = run_all_checks(s);
    std::string json = report_to_json(rep);
    CHECK(json.find("\"version\"") != std::string::npos);
    CHECK(json.find("\"seed\": 7") != std::string::npos);
    CHECK(json.find("\"fd_steps\"") != std::string::npos);
    CHECK(json.find("\"overall\": \"pass\"") != std::string::npos);
    for (const auto& c : rep.checks) {
        CHECK(json.find("\"" + c.name + "\"") != std::string::npos);
        CHECK(!c.equation.empty());
    }
    CHECK(json.find("0.0001") != std::string::npos);  // nested FD step
    CHECK(report_to_text(rep).find("overall: pass") != std::string::npos);
}

TEST_CASE("convergence study: second order for the commutator, validation errors") {
    const char* text = R"scn(
[gravity_vierbein]
h00 = "1 + 0.05*sin(x1)"
h11 = "1 + 0.05*sin(x0 + x2)"
h22 = "1"
h33 = "1 - 0.04*sin(x3)"

[connection]
mode = direct
A01_0 = "0.3*sin(x0 + 0.4*x1)"
A12_2 = "-0.2*sin(x2 + 0.3*x0)"
A23_1 = "0.25*sin(x3)"

[dirac]
mass = 0.5
psi0_re = "cos(0.4*x0 - 0.2*x1)"
psi0_im = "sin(0.4*x0 - 0.2*x1)"
psi1_re = "0.3*cos(0.1*x2)"

[sample]
count = 6
seed = 21
)scn";
    Scenario s = parse_scenario_text(text, "smooth");
    ConvergenceTable t = convergence_study(s, {1e-3, 5e-4, 2.5e-4});
    REQUIRE(t.rows.size() == 4);
    const ConvergenceRow* eq29 = nullptr;
    for (const auto& row : t.rows)
        if (row.name == "eq29_commutator") eq29 = &row;
    REQUIRE(eq29 != nullptr);
    CHECK_FALSE(eq29->saturated);
    CHECK(eq29->order >= 1.8);
    CHECK(eq29->order <= 2.5);

    CHECK_THROWS_AS(convergence_study(s, {1e-3}), ValidationError);
    CHECK_THROWS_AS(convergence_study(s, {1e-3, 2e-3, 4e-3}), ValidationError);

    // Linear fields leave the commutator at the rounding floor: saturated.
    Scenario flat = parse_scenario_text(kFlat, "flat");
    ConvergenceTable tf = convergence_study(flat, {1e-3, 5e-4, 2.5e-4});
    for (const auto& row : tf.rows)
        if (row.name == "eq29_commutator") CHECK(row.saturated);

    std::string json = convergence_to_json(t);
    CHECK(json.find("eq29_commutator") != std::string::npos);
    std::string txt = convergence_to_text(t);
    CHECK(txt.find("eq29_commutator") != std::string::npos);
}

TEST_CASE("frw levi-civita scenario: structural checks pass, bianchi asserted") {
    const char* text = R"scn(
[gravity_vierbein]
h00 = "1"
h11 = "1/exp(x0)"
h22 = "1/exp(x0)"
h33 = "1/exp(x0)"

[connection]
mode = levi-civita

[sample]
box = -0.5 0.5 -0.5 0.5 -0.5 0.5 -0.5 0.5
count = 12
seed = 11
)scn";
    Scenario s = parse_scenario_text(text, "frw");
    CheckReport rep = run_all_checks(s);
    CHECK(rep.error.empty());
    CHECK(rep.passed());
    const CheckRecord* eq45 = find_check(rep, "eq45_bianchi_divergence");
    CHECK(eq45->status == CheckStatus::Pass);
    CHECK(eq45->note.find("torsion-free") != std::string::npos);
}

TEST_CASE("torsionful scenario leaves the bianchi record informational") {
    const char* text = R"scn(
[connection]
mode = direct
A01_0 = "0.3"

[sample]
count = 8
seed = 2
)scn";
    Scenario s = parse_scenario_text(text, "torsion");
    CheckReport rep = run_all_checks(s);
    CHECK(rep.passed());
    const CheckRecord* eq45 = find_check(rep, "eq45_bianchi_divergence");
    CHECK(eq45->status == CheckStatus::Info);
    CHECK(eq45->note.find("torsionful") != std::string::npos);
}

TEST_CASE("adjoint-sign diagnostics report both conventions") {
    const char* text = R"scn(
[connection]
mode = direct
A01_0 = "0.2"
A12_1 = "-0.15"

[dirac]
mass = 0.5
psi0_re = "cos(0.5*x0)"
psi0_im = "sin(0.5*x0)"
psi3_re = "0.4"

[sample]
count = 8
seed = 17
)scn";
    Scenario s = parse_scenario_text(text, "diag");
    CheckReport rep = run_all_checks(s);
    const CheckRecord* printed = find_check(rep, "eq16_adjoint_as_printed");
    const CheckRecord* standard = find_check(rep, "eq16_adjoint_standard");
    REQUIRE(printed != nullptr);
    REQUIRE(standard != nullptr);
    CHECK(printed->status == CheckStatus::Info);
    CHECK(standard->status == CheckStatus::Info);
    CHECK(standard->max_residual < 1e-12);
    CHECK(printed->max_residual > 1e-6);
}

TEST_CASE("scalar-field scenario: rank-1 contribution flagged, run still passes") {
    const char* text = R"scn(
[sfield]
phi = "x1"
lambda = 0.1

[sample]
count = 12
seed = 19
)scn";
    Scenario s = parse_scenario_text(text, "sfield");
    CheckReport rep = run_all_checks(s);
    CHECK(rep.passed());
    const CheckRecord* eq8 = find_check(rep, "eq08_volume_element");
    REQUIRE(eq8 != nullptr);
    CHECK(eq8->status == CheckStatus::Info);
    CHECK(eq8->note.find("rank 1") != std::string::npos);
}

TEST_CASE("worker count does not change the report") {
    Scenario s = parse_scenario_text(kPlaneWave, "pw");
    setenv("SFIELD_THREADS", "1", 1);
    std::string r1 = strip_timestamp(report_to_json(run_all_checks(s)));
    setenv("SFIELD_THREADS", "7", 1);
    std::string r7 = strip_timestamp(report_to_json(run_all_checks(s)));
    unsetenv("SFIELD_THREADS");
    CHECK(r1 == r7);
}
