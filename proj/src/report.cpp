#include <cstdio>
#include <sstream>

#include "sfield/scenario.hpp"

namespace sfield {

namespace {

// 17 significant digits: enough to reproduce every double bit-exactly.
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s == "inf") s = "1e999";
    if (s == "-inf") s = "-1e999";
    if (s == "nan" || s == "-nan") s = "null";
    return s;
}

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Info: return "informational";
    }
    return "?";
}

}  // namespace

std::string report_to_json(const CheckReport& r) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"version\": " << jstr(r.version) << ",\n";
    os << "  \"scenario\": " << jstr(r.scenario) << ",\n";
    os << "  \"timestamp\": " << jstr(r.timestamp) << ",\n";
    os << "  \"seed\": " << r.seed << ",\n";
    os << "  \"points\": " << r.points << ",\n";
    os << "  \"fd_steps\": {\"nested\": " << num(r.fd_nested) << ", \"outer\": " << num(r.fd_outer)
       << "},\n";
    if (!r.error.empty()) os << "  \"error\": " << jstr(r.error) << ",\n";
    os << "  \"checks\": [\n";
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
        const CheckRecord& c = r.checks[i];
        os << "    {\"name\": " << jstr(c.name) << ", \"equation\": " << jstr(c.equation)
           << ", \"points\": " << c.points << ", \"max_residual\": " << num(c.max_residual)
           << ", \"tolerance\": " << num(c.tolerance) << ", \"status\": \"" << status_name(c.status)
           << "\", \"note\": " << jstr(c.note) << "}";
        os << (i + 1 < r.checks.size() ? ",\n" : "\n");
    }
    os << "  ],\n";
    os << "  \"overall\": \"" << (r.passed() ? "pass" : "fail") << "\"\n";
    os << "}\n";
    return os.str();
}

std::string report_to_text(const CheckReport& r) {
    std::ostringstream os;
    os << "scenario: " << r.scenario << "  (seed " << r.seed << ", " << r.points << " points)\n";
    if (!r.error.empty()) {
        os << "ERROR: " << r.error << "\n";
        return os.str();
    }
    char line[256];
    for (const auto& c : r.checks) {
        const char* st = status_name(c.status);
        if (c.status == CheckStatus::Info) {
            std::snprintf(line, sizeof line, "%-14s %-32s max %-12.3e  %s\n", st, c.name.c_str(),
                          c.max_residual, c.note.c_str());
        } else {
            std::snprintf(line, sizeof line, "%-14s %-32s max %-12.3e  tol %-9.1e %s\n", st,
                          c.name.c_str(), c.max_residual, c.tolerance, c.note.c_str());
        }
        os << line;
    }
    os << "overall: " << (r.passed() ? "pass" : "fail") << "\n";
    return os.str();
}

std::string convergence_to_json(const ConvergenceTable& t) {
    std::ostringstream os;
    os << "{\n  \"steps\": [";
    for (std::size_t i = 0; i < t.steps.size(); ++i)
        os << num(t.steps[i]) << (i + 1 < t.steps.size() ? ", " : "");
    os << "],\n  \"checks\": [\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        os << "    {\"name\": " << jstr(row.name) << ", \"equation\": " << jstr(row.equation)
           << ", \"residuals\": [";
        for (std::size_t i = 0; i < row.residuals.size(); ++i)
            os << num(row.residuals[i]) << (i + 1 < row.residuals.size() ? ", " : "");
        os << "], ";
        if (row.saturated) os << "\"order\": \"saturated\"}";
        else os << "\"order\": " << num(row.order) << "}";
        os << (r + 1 < t.rows.size() ? ",\n" : "\n");
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string convergence_to_text(const ConvergenceTable& t) {
    std::ostringstream os;
    os << "step";
    for (double s : t.steps) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %12.3e", s);
        os << buf;
    }
    os << "   order\n";
    for (const auto& row : t.rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-28s", row.name.c_str());
        os << buf;
        for (double v : row.residuals) {
            std::snprintf(buf, sizeof buf, " %12.3e", v);
            os << buf;
        }
        if (row.saturated) os << "   saturated";
        else {
            std::snprintf(buf, sizeof buf, "   %.2f", row.order);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace sfield
