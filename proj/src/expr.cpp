#include "permot/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace permot {

struct Expr::Node {
    enum Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Abs, Exp, Log, Min, Max } kind;
    double value = 0.0;
    int var = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

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

    [[noreturn]] void fail(const std::string& msg) {
        throw invalid_input("expression error at position " + std::to_string(pos) + ": " + msg);
    }

    NodePtr make(Expr::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (eat('+')) left = make(Expr::Node::Add, left, term());
            else if (eat('-')) left = make(Expr::Node::Sub, left, term());
            else return left;
        }
    }

    NodePtr term() {
        NodePtr left = factor();
        for (;;) {
            if (eat('*')) left = make(Expr::Node::Mul, left, factor());
            else if (eat('/')) left = make(Expr::Node::Div, left, factor());
            else return left;
        }
    }

    NodePtr factor() {
        if (eat('-')) return make(Expr::Node::Neg, factor());
        if (eat('+')) return factor();
        NodePtr base = atom();
        if (eat('^')) return make(Expr::Node::Pow, base, factor());  // right assoc
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            double v = std::strtod(s.c_str() + pos, &end);
            pos = size_t(end - s.c_str());
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Const;
            n->value = v;
            return n;
        }
        if (c == '(') {
            ++pos;
            NodePtr inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (c == '|') {
            ++pos;
            NodePtr inner = expr();
            if (!eat('|')) fail("expected closing '|'");
            return make(Expr::Node::Abs, inner);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "x" || name == "x1" || name == "x2" || name == "x3") {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Var;
                n->var = (name == "x" || name == "x1") ? 0 : (name == "x2" ? 1 : 2);
                return n;
            }
            if (name == "pi") {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Const;
                n->value = 3.14159265358979323846;
                return n;
            }
            if (!eat('(')) fail("unknown identifier '" + name + "'");
            NodePtr a = expr();
            if (name == "abs" || name == "exp" || name == "log") {
                if (!eat(')')) fail("expected ')'");
                auto kind = name == "abs" ? Expr::Node::Abs
                          : name == "exp" ? Expr::Node::Exp
                                          : Expr::Node::Log;
                return make(kind, a);
            }
            if (name == "min" || name == "max") {
                if (!eat(',')) fail("expected ','");
                NodePtr b = expr();
                if (!eat(')')) fail("expected ')'");
                return make(name == "min" ? Expr::Node::Min : Expr::Node::Max, a, b);
            }
            fail("unknown function '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const Expr::Node* n, const Point& p) {
    switch (n->kind) {
        case Expr::Node::Const: return n->value;
        case Expr::Node::Var: return n->var < p.dim ? p[n->var] : 0.0;
        case Expr::Node::Add: return eval_node(n->a.get(), p) + eval_node(n->b.get(), p);
        case Expr::Node::Sub: return eval_node(n->a.get(), p) - eval_node(n->b.get(), p);
        case Expr::Node::Mul: return eval_node(n->a.get(), p) * eval_node(n->b.get(), p);
        case Expr::Node::Div: return eval_node(n->a.get(), p) / eval_node(n->b.get(), p);
        case Expr::Node::Pow: return std::pow(eval_node(n->a.get(), p), eval_node(n->b.get(), p));
        case Expr::Node::Neg: return -eval_node(n->a.get(), p);
        case Expr::Node::Abs: return std::fabs(eval_node(n->a.get(), p));
        case Expr::Node::Exp: return std::exp(eval_node(n->a.get(), p));
        case Expr::Node::Log: return std::log(eval_node(n->a.get(), p));
        case Expr::Node::Min: return std::min(eval_node(n->a.get(), p), eval_node(n->b.get(), p));
        case Expr::Node::Max: return std::max(eval_node(n->a.get(), p), eval_node(n->b.get(), p));
    }
    return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    Parser parser(text);
    Expr e;
    e.root_ = parser.expr();
    parser.skip();
    if (parser.pos != text.size()) parser.fail("trailing input");
    e.text_ = text;
    return e;
}

double Expr::eval(const Point& p) const { return eval_node(root_.get(), p); }

Point Expr::grad(const Point& p, double h) const {
    Point g = Point::zero(p.dim);
    for (int i = 0; i < p.dim; ++i) {
        Point hi = p, lo = p;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (eval(hi) - eval(lo)) / (2.0 * h);
    }
    return g;
}

}  // namespace permot
