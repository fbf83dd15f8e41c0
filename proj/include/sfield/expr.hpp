#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>

#include "sfield/errors.hpp"
#include "sfield/tensor.hpp"

namespace sfield {

// Value, 4-gradient and 4x4 Hessian at a point, propagated by forward-mode
// differentiation. The Hessian is symmetric by construction.
struct Jet2 {
    double v = 0.0;
    double g[4] = {0, 0, 0, 0};
    double h[4][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};

    static Jet2 constant(double c) {
        Jet2 j;
        j.v = c;
        return j;
    }
    static Jet2 coordinate(int axis, double value) {
        Jet2 j;
        j.v = value;
        j.g[axis] = 1.0;
        return j;
    }
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
inline Jet2 operator*(double s, const Jet2& a) { return Jet2::constant(s) * a; }
inline Jet2 operator+(const Jet2& a, double s) { return a + Jet2::constant(s); }
inline Jet2 operator-(double s, const Jet2& a) { return Jet2::constant(s) - a; }
inline Jet2 operator/(const Jet2& a, double s) { return a / Jet2::constant(s); }
inline Jet2 operator/(double s, const Jet2& a) { return Jet2::constant(s) / a; }

Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 tan(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 sqrt(const Jet2& a);
Jet2 sinh(const Jet2& a);
Jet2 cosh(const Jet2& a);
Jet2 tanh(const Jet2& a);
Jet2 pow_const(const Jet2& a, double c);

inline double pivot_mag(const Jet2& a) { return std::fabs(a.v); }

struct ExprNode;

// Parsed analytic function of the coordinates x0..x3. Immutable after parse;
// evaluation is pure, so expressions can be shared across threads freely.
class Expression {
  public:
    Expression();  // literal 0

    double eval(const Point4& p) const;
    Jet2 eval_jet2(const Point4& p) const;      // Hessian symmetrized
    Jet2 eval_jet2_raw(const Point4& p) const;  // without the symmetrization step

    std::string str() const;

    bool is_zero_literal() const;

  private:
    friend Expression parse_expression(const std::string&, const std::map<std::string, double>&);
    explicit Expression(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}
    std::shared_ptr<const ExprNode> root_;
};

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' factor)?          (^ right-associative,
//   base   := NUMBER | IDENT | IDENT '(' expr ')'       binds tighter than unary -)
//           | '(' expr ')'
// IDENT is [a-zA-Z_][a-zA-Z0-9_]*; x0..x3 are coordinates; sin cos tan exp log
// sqrt sinh cosh tanh are functions; anything else must be a bound constant.
Expression parse_expression(const std::string& text,
                            const std::map<std::string, double>& constants = {});

// Central differences (e(p+s e_mu) - e(p-s e_mu)) / (2s); the independent
// first-derivative oracle for the jet path.
std::array<double, 4> fd_gradient(const Expression& e, const Point4& p, double step);

}  // namespace sfield
