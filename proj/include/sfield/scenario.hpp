#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfield/dirac.hpp"

namespace sfield {

struct SampleSpec {
    enum class Mode { Random, Grid };
    Mode mode = Mode::Random;
    double lo[4] = {-1, -1, -1, -1};
    double hi[4] = {1, 1, 1, 1};
    int count = 64;  // random mode
    int grid_n = 3;  // grid mode: grid_n^4 midpoints
    std::uint64_t seed = 42;
};

struct Scenario {
    std::map<std::string, double> constants;
    VierbeinBundle gravity;
    SFieldConfig sfield;
    ConnectionField connection;
    DiracField dirac;
    AdjointSign adjoint_sign = AdjointSign::AsPrinted;
    SampleSpec sample;
    std::map<std::string, double> tolerances;  // per-check overrides
    bool experimental_eq43 = false;
    double fd_nested = 1e-4;  // nested covariant derivatives
    double fd_outer = 1e-5;   // single outer divergences
    std::string source_path;
};

// Line-oriented scenario file: [section] headers, key = value pairs,
// expressions as quoted strings (see README for the full format).
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& name);

enum class CheckStatus { Pass, Fail, Info };

struct CheckRecord {
    std::string name;
    std::string equation;
    int points = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;  // 0 for purely informational records
    CheckStatus status = CheckStatus::Info;
    std::string note;
};

struct CheckReport {
    std::string scenario;
    std::string version;
    std::string timestamp;
    std::uint64_t seed = 0;
    int points = 0;
    double fd_nested = 0.0;
    double fd_outer = 0.0;
    std::vector<CheckRecord> checks;
    std::string error;  // nonempty when evaluation aborted (with the offending point)

    bool passed() const;
};

CheckReport run_all_checks(const Scenario& s);

// Valid names for tolerance overrides.
const std::vector<std::string>& check_names();

struct ConvergenceRow {
    std::string name;
    std::string equation;
    std::vector<double> residuals;  // parallel to steps
    double order = 0.0;
    bool saturated = false;
};
struct ConvergenceTable {
    std::vector<double> steps;
    std::vector<ConvergenceRow> rows;
};

// Residual versus finite-difference step for every FD-based check, with the
// observed order from a log-log least-squares fit. Needs >= 3 strictly
// decreasing steps.
ConvergenceTable convergence_study(const Scenario& s, const std::vector<double>& steps);

// Deterministic 64-bit PRNG (splitmix64).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

std::vector<Point4> sample_points(const SampleSpec& spec);

// report.cpp — serialization. Numbers carry 17 significant digits; field
// order is fixed so identical runs are byte-identical up to the timestamp.
std::string report_to_json(const CheckReport& r);
std::string report_to_text(const CheckReport& r);
std::string convergence_to_json(const ConvergenceTable& t);
std::string convergence_to_text(const ConvergenceTable& t);

}  // namespace sfield
