#include "sfield/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace sfield {

// ---------------------------------------------------------------------------
// Jet arithmetic
// ---------------------------------------------------------------------------

Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v + b.v;
    for (int i = 0; i < 4; ++i) {
        r.g[i] = a.g[i] + b.g[i];
        for (int j = 0; j < 4; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
    }
    return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v - b.v;
    for (int i = 0; i < 4; ++i) {
        r.g[i] = a.g[i] - b.g[i];
        for (int j = 0; j < 4; ++j) r.h[i][j] = a.h[i][j] - b.h[i][j];
    }
    return r;
}

Jet2 operator-(const Jet2& a) {
    Jet2 r;
    r.v = -a.v;
    for (int i = 0; i < 4; ++i) {
        r.g[i] = -a.g[i];
        for (int j = 0; j < 4; ++j) r.h[i][j] = -a.h[i][j];
    }
    return r;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    for (int i = 0; i < 4; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            r.h[i][j] = a.h[i][j] * b.v + a.v * b.h[i][j] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.v == 0.0) throw DomainError("division by zero");
    // 1/b first, then multiply.
    Jet2 inv;
    double iv = 1.0 / b.v;
    inv.v = iv;
    for (int i = 0; i < 4; ++i) inv.g[i] = -b.g[i] * iv * iv;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            inv.h[i][j] = (-b.h[i][j] + 2.0 * b.g[i] * b.g[j] * iv) * iv * iv;
    return a * inv;
}

// Chain rule for a scalar function with first and second derivatives f1, f2.
static Jet2 apply_unary(const Jet2& a, double f0, double f1, double f2, const char* what) {
    if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(f2))
        throw DomainError(std::string("non-finite value in ") + what);
    Jet2 r;
    r.v = f0;
    for (int i = 0; i < 4; ++i) r.g[i] = f1 * a.g[i];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.h[i][j] = f1 * a.h[i][j] + f2 * a.g[i] * a.g[j];
    return r;
}

Jet2 sin(const Jet2& a) { return apply_unary(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v), "sin"); }
Jet2 cos(const Jet2& a) { return apply_unary(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v), "cos"); }

Jet2 tan(const Jet2& a) {
    double t = std::tan(a.v);
    double d = 1.0 + t * t;
    return apply_unary(a, t, d, 2.0 * t * d, "tan");
}

Jet2 exp(const Jet2& a) {
    double e = std::exp(a.v);
    return apply_unary(a, e, e, e, "exp");
}

Jet2 log(const Jet2& a) {
    if (a.v <= 0.0) throw DomainError("log of non-positive argument");
    return apply_unary(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v), "log");
}

Jet2 sqrt(const Jet2& a) {
    if (a.v <= 0.0) throw DomainError("sqrt of non-positive argument (derivative undefined at 0)");
    double s = std::sqrt(a.v);
    return apply_unary(a, s, 0.5 / s, -0.25 / (s * a.v), "sqrt");
}

Jet2 sinh(const Jet2& a) { return apply_unary(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v), "sinh"); }
Jet2 cosh(const Jet2& a) { return apply_unary(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v), "cosh"); }

Jet2 tanh(const Jet2& a) {
    double t = std::tanh(a.v);
    double d = 1.0 - t * t;
    return apply_unary(a, t, d, -2.0 * t * d, "tanh");
}

static bool near_integer(double c, long long& n) {
    double r = std::nearbyint(c);
    if (std::fabs(c - r) > 1e-12 || std::fabs(r) > 1e15) return false;
    n = static_cast<long long>(r);
    return true;
}

Jet2 pow_const(const Jet2& a, double c) {
    long long n;
    if (near_integer(c, n)) {
        if (a.v == 0.0 && n < 0) throw DomainError("zero raised to negative power");
        double f0 = std::pow(a.v, static_cast<double>(n));
        double f1 = (n == 0) ? 0.0 : n * std::pow(a.v, static_cast<double>(n - 1));
        double f2 = (n == 0 || n == 1)
                        ? 0.0
                        : static_cast<double>(n) * (n - 1) * std::pow(a.v, static_cast<double>(n - 2));
        if (a.v == 0.0) {
            if (n == 0) { f0 = 1.0; f1 = 0.0; f2 = 0.0; }
            if (n == 1) { f1 = 1.0; f2 = 0.0; }
            if (n == 2) { f1 = 0.0; f2 = 2.0; }
            if (n >= 3) { f1 = 0.0; f2 = 0.0; }
        }
        return apply_unary(a, f0, f1, f2, "^");
    }
    if (a.v <= 0.0) throw DomainError("non-positive base with non-integer exponent");
    double f0 = std::pow(a.v, c);
    double f1 = c * f0 / a.v;
    double f2 = c * (c - 1.0) * f0 / (a.v * a.v);
    return apply_unary(a, f0, f1, f2, "^");
}

static Jet2 pow_jet(const Jet2& a, const Jet2& b) {
    if (a.v <= 0.0) throw DomainError("non-positive base with non-constant exponent");
    return exp(b * log(a));
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class NodeKind { Number, Coord, Constant, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class FuncKind { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh };

struct ExprNode {
    NodeKind kind;
    double number = 0.0;      // Number / Constant value
    int coord = 0;            // Coord axis
    std::string name;         // Constant name
    FuncKind func = FuncKind::Sin;
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

static NodePtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
}

Expression::Expression() : root_(make_number(0.0)) {}

bool Expression::is_zero_literal() const {
    return root_->kind == NodeKind::Number && root_->number == 0.0;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

static double check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite value in ") + what);
    return v;
}

static double eval_node(const ExprNode* n, const Point4& p) {
    switch (n->kind) {
        case NodeKind::Number: return n->number;
        case NodeKind::Coord: return p.x[n->coord];
        case NodeKind::Constant: return n->number;
        case NodeKind::Neg: return -eval_node(n->a.get(), p);
        case NodeKind::Add: return eval_node(n->a.get(), p) + eval_node(n->b.get(), p);
        case NodeKind::Sub: return eval_node(n->a.get(), p) - eval_node(n->b.get(), p);
        case NodeKind::Mul:
            return check_finite(eval_node(n->a.get(), p) * eval_node(n->b.get(), p), "*");
        case NodeKind::Div: {
            double d = eval_node(n->b.get(), p);
            if (d == 0.0) throw DomainError("division by zero");
            return check_finite(eval_node(n->a.get(), p) / d, "/");
        }
        case NodeKind::Pow: {
            double base = eval_node(n->a.get(), p);
            double e = eval_node(n->b.get(), p);
            long long dummy;
            if (base < 0.0 && !near_integer(e, dummy))
                throw DomainError("negative base with non-integer exponent");
            if (base == 0.0 && e < 0.0) throw DomainError("zero raised to negative power");
            return check_finite(std::pow(base, e), "^");
        }
        case NodeKind::Func: {
            double a = eval_node(n->a.get(), p);
            switch (n->func) {
                case FuncKind::Sin: return std::sin(a);
                case FuncKind::Cos: return std::cos(a);
                case FuncKind::Tan: return check_finite(std::tan(a), "tan");
                case FuncKind::Exp: return check_finite(std::exp(a), "exp");
                case FuncKind::Log:
                    if (a <= 0.0) throw DomainError("log of non-positive argument");
                    return std::log(a);
                case FuncKind::Sqrt:
                    if (a < 0.0) throw DomainError("sqrt of negative argument");
                    return std::sqrt(a);
                case FuncKind::Sinh: return check_finite(std::sinh(a), "sinh");
                case FuncKind::Cosh: return check_finite(std::cosh(a), "cosh");
                case FuncKind::Tanh: return std::tanh(a);
            }
            break;
        }
    }
    throw Error("corrupt expression node");
}

static Jet2 eval_jet_node(const ExprNode* n, const Point4& p) {
    switch (n->kind) {
        case NodeKind::Number: return Jet2::constant(n->number);
        case NodeKind::Coord: return Jet2::coordinate(n->coord, p.x[n->coord]);
        case NodeKind::Constant: return Jet2::constant(n->number);
        case NodeKind::Neg: return -eval_jet_node(n->a.get(), p);
        case NodeKind::Add: return eval_jet_node(n->a.get(), p) + eval_jet_node(n->b.get(), p);
        case NodeKind::Sub: return eval_jet_node(n->a.get(), p) - eval_jet_node(n->b.get(), p);
        case NodeKind::Mul: return eval_jet_node(n->a.get(), p) * eval_jet_node(n->b.get(), p);
        case NodeKind::Div: return eval_jet_node(n->a.get(), p) / eval_jet_node(n->b.get(), p);
        case NodeKind::Pow: {
            const ExprNode* e = n->b.get();
            if (e->kind == NodeKind::Number || e->kind == NodeKind::Constant)
                return pow_const(eval_jet_node(n->a.get(), p), e->number);
            if (e->kind == NodeKind::Neg &&
                (e->a->kind == NodeKind::Number || e->a->kind == NodeKind::Constant))
                return pow_const(eval_jet_node(n->a.get(), p), -e->a->number);
            return pow_jet(eval_jet_node(n->a.get(), p), eval_jet_node(e, p));
        }
        case NodeKind::Func: {
            Jet2 a = eval_jet_node(n->a.get(), p);
            switch (n->func) {
                case FuncKind::Sin: return sin(a);
                case FuncKind::Cos: return cos(a);
                case FuncKind::Tan: return tan(a);
                case FuncKind::Exp: return exp(a);
                case FuncKind::Log: return log(a);
                case FuncKind::Sqrt: return sqrt(a);
                case FuncKind::Sinh: return sinh(a);
                case FuncKind::Cosh: return cosh(a);
                case FuncKind::Tanh: return tanh(a);
            }
            break;
        }
    }
    throw Error("corrupt expression node");
}

double Expression::eval(const Point4& p) const { return eval_node(root_.get(), p); }

Jet2 Expression::eval_jet2_raw(const Point4& p) const { return eval_jet_node(root_.get(), p); }

Jet2 Expression::eval_jet2(const Point4& p) const {
    Jet2 j = eval_jet_node(root_.get(), p);
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k) {
            double s = 0.5 * (j.h[i][k] + j.h[k][i]);
            j.h[i][k] = s;
            j.h[k][i] = s;
        }
    return j;
}

std::array<double, 4> fd_gradient(const Expression& e, const Point4& p, double step) {
    if (!(step > 0.0)) throw Error("fd_gradient requires a positive step");
    std::array<double, 4> g;
    for (int mu = 0; mu < 4; ++mu) {
        Point4 hi = p, lo = p;
        hi.x[mu] += step;
        lo.x[mu] -= step;
        g[mu] = (e.eval(hi) - e.eval(lo)) / (2.0 * step);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Printer: fully parenthesized, reparses to the identical AST.
// ---------------------------------------------------------------------------

static const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
        case FuncKind::Tan: return "tan";
        case FuncKind::Exp: return "exp";
        case FuncKind::Log: return "log";
        case FuncKind::Sqrt: return "sqrt";
        case FuncKind::Sinh: return "sinh";
        case FuncKind::Cosh: return "cosh";
        case FuncKind::Tanh: return "tanh";
    }
    return "?";
}

static void print_node(const ExprNode* n, std::string& out) {
    char buf[40];
    switch (n->kind) {
        case NodeKind::Number:
            std::snprintf(buf, sizeof buf, "%.17g", n->number);
            out += buf;
            return;
        case NodeKind::Coord:
            out += 'x';
            out += static_cast<char>('0' + n->coord);
            return;
        case NodeKind::Constant: out += n->name; return;
        case NodeKind::Neg:
            out += "(-";
            print_node(n->a.get(), out);
            out += ')';
            return;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
        case NodeKind::Pow: {
            char op = n->kind == NodeKind::Add   ? '+'
                      : n->kind == NodeKind::Sub ? '-'
                      : n->kind == NodeKind::Mul ? '*'
                      : n->kind == NodeKind::Div ? '/'
                                                 : '^';
            out += '(';
            print_node(n->a.get(), out);
            out += op;
            print_node(n->b.get(), out);
            out += ')';
            return;
        }
        case NodeKind::Func:
            out += func_name(n->func);
            out += '(';
            print_node(n->a.get(), out);
            out += ')';
            return;
    }
}

std::string Expression::str() const {
    std::string out;
    print_node(root_.get(), out);
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
  public:
    Parser(const std::string& text, const std::map<std::string, double>& constants)
        : s_(text), constants_(constants) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

  private:
    const std::string& s_;
    const std::map<std::string, double>& constants_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw SyntaxError(std::string("expected ") + what, pos_);
    }

    NodePtr expr() {
        NodePtr a = term();
        for (;;) {
            if (accept('+')) {
                auto n = std::make_shared<ExprNode>();
                n->kind = NodeKind::Add;
                n->a = a;
                n->b = term();
                a = n;
            } else if (accept('-')) {
                auto n = std::make_shared<ExprNode>();
                n->kind = NodeKind::Sub;
                n->a = a;
                n->b = term();
                a = n;
            } else {
                return a;
            }
        }
    }

    NodePtr term() {
        NodePtr a = factor();
        for (;;) {
            if (accept('*')) {
                auto n = std::make_shared<ExprNode>();
                n->kind = NodeKind::Mul;
                n->a = a;
                n->b = factor();
                a = n;
            } else if (accept('/')) {
                auto n = std::make_shared<ExprNode>();
                n->kind = NodeKind::Div;
                n->a = a;
                n->b = factor();
                a = n;
            } else {
                return a;
            }
        }
    }

    NodePtr factor() {
        if (accept('-')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Neg;
            n->a = factor();
            return n;
        }
        NodePtr b = base();
        if (accept('^')) {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Pow;
            n->a = b;
            n->b = factor();  // right-associative
            return n;
        }
        return b;
    }

    NodePtr base() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw SyntaxError("expected a number, name or '('", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' belongs to a following name, not this number
            }
        }
        std::string tok = s_.substr(start, pos_ - start);
        try {
            return make_number(std::stod(tok));
        } catch (...) {
            throw SyntaxError("malformed number '" + tok + "'", start);
        }
    }

    NodePtr ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);

        if (peek() == '(') {
            FuncKind f;
            if (name == "sin") f = FuncKind::Sin;
            else if (name == "cos") f = FuncKind::Cos;
            else if (name == "tan") f = FuncKind::Tan;
            else if (name == "exp") f = FuncKind::Exp;
            else if (name == "log") f = FuncKind::Log;
            else if (name == "sqrt") f = FuncKind::Sqrt;
            else if (name == "sinh") f = FuncKind::Sinh;
            else if (name == "cosh") f = FuncKind::Cosh;
            else if (name == "tanh") f = FuncKind::Tanh;
            else throw UnknownSymbol(name);
            ++pos_;  // '('
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Func;
            n->func = f;
            n->a = expr();
            expect(')', "')'");
            return n;
        }

        if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '3') {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Coord;
            n->coord = name[1] - '0';
            return n;
        }
        auto it = constants_.find(name);
        if (it == constants_.end()) throw UnknownSymbol(name);
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::Constant;
        n->name = name;
        n->number = it->second;
        return n;
    }
};

}  // namespace

Expression parse_expression(const std::string& text, const std::map<std::string, double>& constants) {
    Parser p(text, constants);
    return Expression(p.run());
}

}  // namespace sfield
