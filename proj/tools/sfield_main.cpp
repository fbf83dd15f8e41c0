// Command-line front end: `check` runs every enabled verification over the
// scenario's sample points and emits a JSON report, `converge` sweeps the
// finite-difference steps, `report` prints a human-readable summary.
//
// Exit codes: 0 all asserted checks pass, 1 check failure or evaluation
// error, 2 input error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sfield/scenario.hpp"
#include "sfield/version.hpp"

namespace {

int apply_tol_overrides(sfield::Scenario& s, const std::vector<std::string>& tols) {
    for (const std::string& t : tols) {
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --tol expects NAME=VALUE, got '" << t << "'\n";
            return 2;
        }
        std::string name = t.substr(0, eq);
        const auto& names = sfield::check_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            std::cerr << "error: unknown check name '" << name << "'\n";
            return 2;
        }
        try {
            s.tolerances[name] = std::stod(t.substr(eq + 1));
        } catch (...) {
            std::cerr << "error: bad tolerance value in '" << t << "'\n";
            return 2;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sfield: numerical verification for bimetric vierbein field configurations"};
    app.set_version_flag("--version", sfield::kVersion);
    app.require_subcommand(1);

    std::string scenario_path, out_path, steps_arg;
    std::vector<std::string> tol_args;
    bool force_json = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int points = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario file")->required();
        cmd->add_option("--tol", tol_args, "override a check tolerance (NAME=VALUE)");
        cmd->add_option("--seed", seed, "override the sample seed")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--points", points, "override the random sample count");
    };

    CLI::App* check = app.add_subcommand("check", "run all checks, emit a JSON report");
    add_common(check);
    check->add_option("--out", out_path, "write the JSON report to a file");
    check->add_flag("--json", force_json, "print the JSON report to stdout even with --out");

    CLI::App* converge = app.add_subcommand("converge", "residuals versus finite-difference step");
    add_common(converge);
    converge->add_option("--steps", steps_arg, "comma-separated steps, strictly decreasing")
        ->required();
    converge->add_option("--out", out_path, "write the JSON table to a file");
    converge->add_flag("--json", force_json, "print JSON instead of the text table");

    CLI::App* report = app.add_subcommand("report", "run all checks, print a readable summary");
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sfield::Scenario s;
    try {
        s = sfield::load_scenario(scenario_path);
    } catch (const sfield::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (int rc = apply_tol_overrides(s, tol_args); rc != 0) return rc;
    if (seed_set) s.sample.seed = seed;
    if (points > 0) s.sample.count = points;

    try {
        if (check->parsed() || report->parsed()) {
            sfield::CheckReport rep = sfield::run_all_checks(s);
            if (report->parsed()) {
                std::cout << sfield::report_to_text(rep);
            } else {
                std::string json = sfield::report_to_json(rep);
                if (!out_path.empty()) {
                    std::ofstream out(out_path);
                    if (!out) {
                        std::cerr << "error: cannot write " << out_path << "\n";
                        return 2;
                    }
                    out << json;
                    if (force_json) std::cout << json;
                    else
                        std::cout << "report written to " << out_path << " ("
                                  << (rep.passed() ? "pass" : "fail") << ")\n";
                } else {
                    std::cout << json;
                }
            }
            if (!rep.error.empty()) {
                std::cerr << "error: " << rep.error << "\n";
                return 1;
            }
            return rep.passed() ? 0 : 1;
        }

        // converge
        std::vector<double> steps;
        std::istringstream ss(steps_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                steps.push_back(std::stod(tok));
            } catch (...) {
                std::cerr << "error: bad step '" << tok << "'\n";
                return 2;
            }
        }
        sfield::ConvergenceTable table;
        try {
            table = sfield::convergence_study(s, steps);
        } catch (const sfield::ValidationError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        std::string payload =
            force_json ? sfield::convergence_to_json(table) : sfield::convergence_to_text(table);
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return 2;
            }
            out << sfield::convergence_to_json(table);
        }
        std::cout << payload;
        return 0;
    } catch (const sfield::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
