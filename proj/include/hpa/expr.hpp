#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"

namespace hpa {

// Parse failure at a 1-based column.
struct ExprParseError : PreconditionError {
    ExprParseError(const std::string& msg, int col)
        : PreconditionError("expression: " + msg + " at column " + std::to_string(col)), column(col) {}
    int column;
};

struct ExprVars {
    double x = 0, y = 0, z = 0, t = 0;
};

// Small expression tree over x, y, z, t with + - * / ^, unary minus, and abs/exp/sin/cos/sqrt/log.
class Expr {
public:
    enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

    static Expr parse(const std::string& text) {
        Parser p{text};
        Expr e;
        e.root_ = p.expression();
        p.skip();
        if (p.pos < text.size()) throw ExprParseError("unexpected '" + std::string(1, text[p.pos]) + "'", p.col());
        return e;
    }

    double eval(const ExprVars& v) const { return eval(*root_, v); }
    double operator()(double x, double y, double z = 0, double t = 0) const { return eval({x, y, z, t}); }

    // Fully parenthesized canonical form; parse(print()) gives the same tree.
    std::string print() const { return print(*root_); }

    bool uses(char var) const { return uses(*root_, var); }

private:
    struct Node {
        Op op = Op::Num;
        double value = 0;
        char var = 0;
        std::string fn;
        int col = 0;
        std::shared_ptr<Node> a, b;
    };
    std::shared_ptr<Node> root_;

    static std::shared_ptr<Node> make(Op op, int col, std::shared_ptr<Node> a = {}, std::shared_ptr<Node> b = {}) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->col = col;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    struct Parser {
        const std::string& s;
        std::size_t pos = 0;

        int col() const { return static_cast<int>(pos) + 1; }
        void skip() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        // expression := term (('+' | '-') term)*
        std::shared_ptr<Node> expression() {
            auto lhs = term();
            while (true) {
                skip();
                const int c = col();
                if (eat('+')) lhs = make(Op::Add, c, lhs, term());
                else if (eat('-')) lhs = make(Op::Sub, c, lhs, term());
                else return lhs;
            }
        }
        // term := unary (('*' | '/') unary)*
        std::shared_ptr<Node> term() {
            auto lhs = unary();
            while (true) {
                skip();
                const int c = col();
                if (eat('*')) lhs = make(Op::Mul, c, lhs, unary());
                else if (eat('/')) lhs = make(Op::Div, c, lhs, unary());
                else return lhs;
            }
        }
        // unary := '-' unary | power; so -x^2 is -(x^2)
        std::shared_ptr<Node> unary() {
            skip();
            const int c = col();
            if (eat('-')) return make(Op::Neg, c, unary());
            if (eat('+')) return unary();
            return power();
        }
        // power := primary ('^' unary)?, right associative
        std::shared_ptr<Node> power() {
            auto base = primary();
            skip();
            const int c = col();
            if (eat('^')) return make(Op::Pow, c, base, unary());
            return base;
        }
        std::shared_ptr<Node> primary() {
            skip();
            const int c = col();
            if (pos >= s.size()) throw ExprParseError("unexpected end of input", c);
            const char ch = s[pos];
            if (ch == '(') {
                ++pos;
                auto e = expression();
                if (!eat(')')) throw ExprParseError("expected ')'", col());
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
                const char* begin = s.c_str() + pos;
                char* end = nullptr;
                const double v = std::strtod(begin, &end);
                if (end == begin) throw ExprParseError("malformed number", c);
                pos += static_cast<std::size_t>(end - begin);
                auto n = make(Op::Num, c);
                n->value = v;
                return n;
            }
            if (std::isalpha(static_cast<unsigned char>(ch))) {
                std::string id;
                while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) id += s[pos++];
                if (id == "x" || id == "y" || id == "z" || id == "t") {
                    auto n = make(Op::Var, c);
                    n->var = id[0];
                    return n;
                }
                if (id == "pi") {
                    auto n = make(Op::Num, c);
                    n->value = 3.141592653589793;
                    return n;
                }
                if (id == "abs" || id == "exp" || id == "sin" || id == "cos" || id == "sqrt" || id == "log") {
                    if (!eat('(')) throw ExprParseError("expected '(' after " + id, col());
                    auto n = make(Op::Call, c, expression());
                    n->fn = id;
                    if (!eat(')')) throw ExprParseError("expected ')'", col());
                    return n;
                }
                throw ExprParseError("unknown identifier '" + id + "'", c);
            }
            throw ExprParseError("unexpected '" + std::string(1, ch) + "'", c);
        }
    };

    static double domain_error(const Node& n, const std::string& what) {
        throw NumericError("expression: domain error: " + what + " (column " + std::to_string(n.col) + ")");
    }

    static double eval(const Node& n, const ExprVars& v) {
        switch (n.op) {
        case Op::Num: return n.value;
        case Op::Var: return n.var == 'x' ? v.x : n.var == 'y' ? v.y : n.var == 'z' ? v.z : v.t;
        case Op::Neg: return -eval(*n.a, v);
        case Op::Add: return eval(*n.a, v) + eval(*n.b, v);
        case Op::Sub: return eval(*n.a, v) - eval(*n.b, v);
        case Op::Mul: return eval(*n.a, v) * eval(*n.b, v);
        case Op::Div: {
            const double num = eval(*n.a, v), den = eval(*n.b, v);
            if (den == 0) return domain_error(n, "division by zero");
            return num / den;
        }
        case Op::Pow: {
            const double b = eval(*n.a, v), e = eval(*n.b, v);
            if (b < 0 && e != std::floor(e)) return domain_error(n, "negative base with non-integer exponent");
            if (b == 0 && e < 0) return domain_error(n, "zero to a negative power");
            return std::pow(b, e);
        }
        case Op::Call: {
            const double a = eval(*n.a, v);
            if (n.fn == "abs") return std::abs(a);
            if (n.fn == "exp") return std::exp(a);
            if (n.fn == "sin") return std::sin(a);
            if (n.fn == "cos") return std::cos(a);
            if (n.fn == "sqrt") {
                if (a < 0) return domain_error(n, "sqrt of a negative number");
                return std::sqrt(a);
            }
            if (a <= 0) return domain_error(n, "log of a non-positive number");
            return std::log(a);
        }
        }
        return 0;
    }

    static std::string number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static std::string print(const Node& n) {
        switch (n.op) {
        case Op::Num: return n.value < 0 ? "(" + number(n.value) + ")" : number(n.value);
        case Op::Var: return std::string(1, n.var);
        case Op::Neg: return "(-" + print(*n.a) + ")";
        case Op::Add: return "(" + print(*n.a) + " + " + print(*n.b) + ")";
        case Op::Sub: return "(" + print(*n.a) + " - " + print(*n.b) + ")";
        case Op::Mul: return "(" + print(*n.a) + " * " + print(*n.b) + ")";
        case Op::Div: return "(" + print(*n.a) + " / " + print(*n.b) + ")";
        case Op::Pow: return "(" + print(*n.a) + " ^ " + print(*n.b) + ")";
        case Op::Call: return n.fn + "(" + print(*n.a) + ")";
        }
        return "";
    }

    static bool uses(const Node& n, char var) {
        if (n.op == Op::Var) return n.var == var;
        return (n.a && uses(*n.a, var)) || (n.b && uses(*n.b, var));
    }
};

} // namespace hpa
