#include "frontlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace frontlab {

SyntaxError::SyntaxError(std::size_t off, std::string exp, const std::string& text)
    : std::runtime_error("syntax error at byte " + std::to_string(off) + ": expected " +
                         exp + " in \"" + text + "\""),
      offset(off),
      expected(std::move(exp)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t off, const std::string& n)
    : std::runtime_error("unknown identifier \"" + n + "\" at byte " + std::to_string(off)),
      offset(off),
      name(n) {}

Expr num(double x) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = x;
    return n;
}
Expr var_u() {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::VarU;
    return n;
}
Expr var_v() {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::VarV;
    return n;
}
Expr make_unary(NodeKind kind, Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(a);
    return n;
}
Expr make_binary(NodeKind kind, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

// ---- tokenizer / parser -------------------------------------------------

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::size_t offset;
    double number = 0.0;
    std::string ident;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= text_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        const char c = text_[pos_];
        switch (c) {
            case '+': tok_.kind = Tok::Plus; ++pos_; return;
            case '-': tok_.kind = Tok::Minus; ++pos_; return;
            case '*': tok_.kind = Tok::Star; ++pos_; return;
            case '/': tok_.kind = Tok::Slash; ++pos_; return;
            case '^': tok_.kind = Tok::Caret; ++pos_; return;
            case '(': tok_.kind = Tok::LParen; ++pos_; return;
            case ')': tok_.kind = Tok::RParen; ++pos_; return;
            case ',': tok_.kind = Tok::Comma; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.'))
                ++end;
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                std::size_t e = end + 1;
                if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
                if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                    while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
                    end = e;
                }
            }
            tok_.kind = Tok::Number;
            tok_.number = std::stod(text_.substr(pos_, end - pos_));
            pos_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            tok_.kind = Tok::Ident;
            tok_.ident = text_.substr(pos_, end - pos_);
            pos_ = end;
            return;
        }
        throw SyntaxError(pos_, "a token", text_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token tok_;
};

NodeKind function_kind(const std::string& name) {
    static const std::map<std::string, NodeKind> table = {
        {"sin", NodeKind::Sin},   {"cos", NodeKind::Cos}, {"tan", NodeKind::Tan},
        {"exp", NodeKind::Exp},   {"log", NodeKind::Log}, {"sqrt", NodeKind::Sqrt},
        {"atan", NodeKind::Atan}, {"abs", NodeKind::Abs},
    };
    auto it = table.find(name);
    return it == table.end() ? NodeKind::Number : it->second;
}

bool is_function_name(const std::string& name) {
    return name == "sin" || name == "cos" || name == "tan" || name == "exp" ||
           name == "log" || name == "sqrt" || name == "atan" || name == "abs";
}

class Parser {
public:
    Parser(const std::string& text) : text_(text), lex_(text) {}

    Expr parse_all() {
        Expr e = parse_sum();
        if (lex_.peek().kind != Tok::End)
            throw SyntaxError(lex_.peek().offset, "operator or end of input", text_);
        return e;
    }

private:
    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            const Tok k = lex_.peek().kind;
            if (k == Tok::Plus) {
                lex_.take();
                e = make_binary(NodeKind::Add, e, parse_product());
            } else if (k == Tok::Minus) {
                lex_.take();
                e = make_binary(NodeKind::Sub, e, parse_product());
            } else {
                return e;
            }
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            const Tok k = lex_.peek().kind;
            if (k == Tok::Star) {
                lex_.take();
                e = make_binary(NodeKind::Mul, e, parse_unary());
            } else if (k == Tok::Slash) {
                lex_.take();
                e = make_binary(NodeKind::Div, e, parse_unary());
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (lex_.peek().kind == Tok::Minus) {
            lex_.take();
            return make_unary(NodeKind::Neg, parse_unary());
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (lex_.peek().kind == Tok::Caret) {
            lex_.take();
            // right-associative; the exponent may carry a unary minus
            Expr exponent;
            if (lex_.peek().kind == Tok::Minus) {
                lex_.take();
                exponent = make_unary(NodeKind::Neg, parse_power());
            } else {
                exponent = parse_power();
            }
            return make_binary(NodeKind::Pow, base, exponent);
        }
        return base;
    }

    Expr parse_atom() {
        const Token t = lex_.take();
        switch (t.kind) {
            case Tok::Number:
                return num(t.number);
            case Tok::LParen: {
                Expr e = parse_sum();
                expect(Tok::RParen, ")");
                return e;
            }
            case Tok::Ident: {
                if (t.ident == "u") return var_u();
                if (t.ident == "v") return var_v();
                if (t.ident == "pi") {
                    auto n = std::make_shared<ExprNode>();
                    n->kind = NodeKind::Pi;
                    return n;
                }
                if (is_function_name(t.ident)) {
                    expect(Tok::LParen, "( after function name");
                    Expr arg = parse_sum();
                    expect(Tok::RParen, ")");
                    return make_unary(function_kind(t.ident), arg);
                }
                throw UnknownIdentifier(t.offset, t.ident);
            }
            default:
                throw SyntaxError(t.offset, "number, identifier, or (", text_);
        }
    }

    void expect(Tok kind, const char* what) {
        if (lex_.peek().kind != kind) throw SyntaxError(lex_.peek().offset, what, text_);
        lex_.take();
    }

    const std::string& text_;
    Lexer lex_;
};

int precedence(NodeKind k) {
    switch (k) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

const char* function_name(NodeKind k) {
    switch (k) {
        case NodeKind::Sin: return "sin";
        case NodeKind::Cos: return "cos";
        case NodeKind::Tan: return "tan";
        case NodeKind::Exp: return "exp";
        case NodeKind::Log: return "log";
        case NodeKind::Sqrt: return "sqrt";
        case NodeKind::Atan: return "atan";
        case NodeKind::Abs: return "abs";
        default: return "?";
    }
}

void print_node(std::ostream& os, const Expr& e, int parent_prec, bool right_side) {
    const int prec = precedence(e->kind);
    switch (e->kind) {
        case NodeKind::Number: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e->number;
            std::string s = tmp.str();
            if (e->number < 0) {
                os << "(" << s << ")";
            } else {
                os << s;
            }
            return;
        }
        case NodeKind::Pi: os << "pi"; return;
        case NodeKind::VarU: os << "u"; return;
        case NodeKind::VarV: os << "v"; return;
        case NodeKind::Neg: {
            const bool parens = prec < parent_prec || (parent_prec == prec && right_side);
            if (parens) os << "(";
            os << "-";
            print_node(os, e->lhs, prec, true);
            if (parens) os << ")";
            return;
        }
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
        case NodeKind::Pow: {
            const bool parens = prec < parent_prec || (prec == parent_prec && right_side &&
                                                       e->kind != NodeKind::Pow);
            const char* op = e->kind == NodeKind::Add   ? " + "
                             : e->kind == NodeKind::Sub ? " - "
                             : e->kind == NodeKind::Mul ? "*"
                             : e->kind == NodeKind::Div ? "/"
                                                        : "^";
            if (parens) os << "(";
            if (e->kind == NodeKind::Pow) {
                print_node(os, e->lhs, prec + 1, false);  // left arg of ^ needs parens if compound
                os << op;
                print_node(os, e->rhs, prec, false);  // right-assoc
            } else {
                print_node(os, e->lhs, prec, false);
                os << op;
                print_node(os, e->rhs, prec, true);
            }
            if (parens) os << ")";
            return;
        }
        default: {
            os << function_name(e->kind) << "(";
            print_node(os, e->lhs, 0, false);
            os << ")";
            return;
        }
    }
}

}  // namespace

Expr parse(const std::string& text) { return Parser(text).parse_all(); }

std::string pretty_print(const Expr& e) {
    std::ostringstream os;
    print_node(os, e, 0, false);
    return os.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == NodeKind::Number && a->number != b->number) return false;
    return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

Jet2 eval_jet(const Expr& e, double u, double v, int order) {
    switch (e->kind) {
        case NodeKind::Number: return Jet2::constant(e->number, order);
        case NodeKind::Pi: return Jet2::constant(M_PI, order);
        case NodeKind::VarU: return Jet2::variable_u(u, order);
        case NodeKind::VarV: return Jet2::variable_v(v, order);
        case NodeKind::Neg: return -eval_jet(e->lhs, u, v, order);
        case NodeKind::Add: return eval_jet(e->lhs, u, v, order) + eval_jet(e->rhs, u, v, order);
        case NodeKind::Sub: return eval_jet(e->lhs, u, v, order) - eval_jet(e->rhs, u, v, order);
        case NodeKind::Mul: return eval_jet(e->lhs, u, v, order) * eval_jet(e->rhs, u, v, order);
        case NodeKind::Div: return eval_jet(e->lhs, u, v, order) / eval_jet(e->rhs, u, v, order);
        case NodeKind::Pow: return pow(eval_jet(e->lhs, u, v, order), eval_jet(e->rhs, u, v, order));
        case NodeKind::Sin: return sin(eval_jet(e->lhs, u, v, order));
        case NodeKind::Cos: return cos(eval_jet(e->lhs, u, v, order));
        case NodeKind::Tan: return tan(eval_jet(e->lhs, u, v, order));
        case NodeKind::Exp: return exp(eval_jet(e->lhs, u, v, order));
        case NodeKind::Log: return log(eval_jet(e->lhs, u, v, order));
        case NodeKind::Sqrt: return sqrt(eval_jet(e->lhs, u, v, order));
        case NodeKind::Atan: return atan(eval_jet(e->lhs, u, v, order));
        case NodeKind::Abs: return abs(eval_jet(e->lhs, u, v, order));
    }
    throw std::logic_error("eval_jet: unreachable");
}

double eval(const Expr& e, double u, double v) { return eval_jet(e, u, v, 0).value(); }

namespace {

bool is_zero(const Expr& e) { return e->kind == NodeKind::Number && e->number == 0.0; }
bool is_one(const Expr& e) { return e->kind == NodeKind::Number && e->number == 1.0; }

Expr fold_add(Expr a, Expr b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return a + b;
}
Expr fold_sub(Expr a, Expr b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return -b;
    return a - b;
}
Expr fold_mul(Expr a, Expr b) {
    if (is_zero(a) || is_zero(b)) return num(0.0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    return a * b;
}

}  // namespace

Expr differentiate(const Expr& e, NodeKind var) {
    switch (e->kind) {
        case NodeKind::Number:
        case NodeKind::Pi:
            return num(0.0);
        case NodeKind::VarU: return num(var == NodeKind::VarU ? 1.0 : 0.0);
        case NodeKind::VarV: return num(var == NodeKind::VarV ? 1.0 : 0.0);
        case NodeKind::Neg: return fold_sub(num(0.0), differentiate(e->lhs, var));
        case NodeKind::Add: return fold_add(differentiate(e->lhs, var), differentiate(e->rhs, var));
        case NodeKind::Sub: return fold_sub(differentiate(e->lhs, var), differentiate(e->rhs, var));
        case NodeKind::Mul:
            return fold_add(fold_mul(differentiate(e->lhs, var), e->rhs),
                            fold_mul(e->lhs, differentiate(e->rhs, var)));
        case NodeKind::Div:
            return fold_sub(differentiate(e->lhs, var) / e->rhs,
                            fold_mul(e->lhs, differentiate(e->rhs, var)) / (e->rhs * e->rhs));
        case NodeKind::Pow: {
            const Expr& base = e->lhs;
            const Expr& exponent = e->rhs;
            if (exponent->kind == NodeKind::Number) {
                // d(b^n) = n b^(n-1) b'
                const double n = exponent->number;
                Expr down = pow_expr(base, num(n - 1.0));
                return fold_mul(fold_mul(num(n), down), differentiate(base, var));
            }
            // b^e = exp(e log b)
            Expr term1 = fold_mul(differentiate(exponent, var), make_unary(NodeKind::Log, base));
            Expr term2 = fold_mul(exponent, differentiate(base, var)) / base;
            return fold_mul(e, fold_add(term1, term2));
        }
        case NodeKind::Sin:
            return fold_mul(make_unary(NodeKind::Cos, e->lhs), differentiate(e->lhs, var));
        case NodeKind::Cos:
            return fold_sub(num(0.0), fold_mul(make_unary(NodeKind::Sin, e->lhs),
                                               differentiate(e->lhs, var)));
        case NodeKind::Tan: {
            Expr sec2 = fold_add(num(1.0), fold_mul(make_unary(NodeKind::Tan, e->lhs),
                                                    make_unary(NodeKind::Tan, e->lhs)));
            return fold_mul(sec2, differentiate(e->lhs, var));
        }
        case NodeKind::Exp: return fold_mul(e, differentiate(e->lhs, var));
        case NodeKind::Log: return differentiate(e->lhs, var) / e->lhs;
        case NodeKind::Sqrt:
            return differentiate(e->lhs, var) / fold_mul(num(2.0), e);
        case NodeKind::Atan: {
            Expr den = fold_add(num(1.0), fold_mul(e->lhs, e->lhs));
            return differentiate(e->lhs, var) / den;
        }
        case NodeKind::Abs:
            throw DomainError("abs is not symbolically differentiable here");
    }
    throw std::logic_error("differentiate: unreachable");
}

}  // namespace frontlab
