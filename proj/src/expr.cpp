#include "eigenflow/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

namespace eigenflow {
namespace expr {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 5> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"exp", Func::Exp},
    {"sqrt", Func::Sqrt},
    {"log", Func::Log},
}};

std::optional<Func> lookup_function(std::string_view name) {
    for (const auto& [fname, f] : kFunctions) {
        if (fname == name) return f;
    }
    return std::nullopt;
}

std::string_view function_name(Func f) {
    for (const auto& [fname, g] : kFunctions) {
        if (g == f) return fname;
    }
    return "?";
}

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Complex int_power(Complex base, int exponent) {
    if (exponent < 0) {
        if (base == Complex(0.0)) throw DomainError("negative power of zero");
        return Complex(1.0) / int_power(base, -exponent);
    }
    Complex result(1.0);
    Complex b = base;
    unsigned e = static_cast<unsigned>(exponent);
    while (e != 0) {
        if (e & 1u) result *= b;
        b *= b;
        e >>= 1u;
    }
    return result;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ------------------------------------------------------------------ lexer

enum class Tok { Number, Ident, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double value = 0.0;
    std::size_t offset = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.offset = pos_;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number(t);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t end = pos_;
                while (end < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
                    ++end;
                }
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(pos_, end - pos_));
                advance(end - pos_);
            } else if (std::string_view("+-*/^()[],;=").find(c) != std::string_view::npos) {
                t.kind = Tok::Punct;
                t.text = std::string(1, c);
                advance(1);
            } else {
                throw SyntaxError(std::string("unexpected character '") + c + "'", t.offset, t.line, t.column);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else {
                break;
            }
        }
    }

    // decimal with optional fraction and exponent
    void lex_number(Token& t) {
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        };
        digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            digits();
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
            if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
                end = exp;
                digits();
            }
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(pos_, end - pos_));
        t.value = std::strtod(t.text.c_str(), nullptr);
        advance(end - pos_);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ----------------------------------------------------------------- parser

class Parser {
public:
    Parser(std::string_view src, const SymbolTable* table) : tokens_(Lexer(src).run()), table_(table) {}

    NodePtr expression() {
        NodePtr lhs = term();
        while (peek_punct("+") || peek_punct("-")) {
            const Op op = next().text == "+" ? Op::Add : Op::Sub;
            lhs = binary(op, lhs, term());
        }
        return lhs;
    }

    void expect_end() {
        if (cur().kind != Tok::End) fail("end of input");
    }

    bool accept_punct(std::string_view p) {
        if (!peek_punct(p)) return false;
        ++pos_;
        return true;
    }

    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) fail("'" + std::string(p) + "'");
    }

    std::string expect_ident() {
        if (cur().kind != Tok::Ident) fail("identifier");
        return next().text;
    }

    void expect_keyword(std::string_view word) {
        if (cur().kind != Tok::Ident || cur().text != word) fail("'" + std::string(word) + "'");
        ++pos_;
    }

    bool peek_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
    bool at_end() const { return cur().kind == Tok::End; }

    void set_table(const SymbolTable* table) { table_ = table; }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = cur();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError("expected " + expected + ", found " + found, t.offset, t.line, t.column);
    }

    const Token& cur() const { return tokens_[pos_]; }

private:
    const Token& next() { return tokens_[pos_++]; }

    NodePtr term() {
        NodePtr lhs = unary();
        while (peek_punct("*") || peek_punct("/")) {
            const Op op = next().text == "*" ? Op::Mul : Op::Div;
            lhs = binary(op, lhs, unary());
        }
        return lhs;
    }

    NodePtr unary() {
        if (accept_punct("-")) return negate(unary());
        return power_expr();
    }

    NodePtr power_expr() {
        NodePtr base = atom();
        if (accept_punct("^")) {
            const bool neg = accept_punct("-");
            const Token& t = cur();
            if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
                fail("integer exponent");
            }
            int value = 0;
            const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
            if (ec != std::errc()) fail("integer exponent");
            ++pos_;
            base = power(base, neg ? -value : value);
        }
        return base;
    }

    NodePtr atom() {
        const Token& t = cur();
        if (t.kind == Tok::Number) {
            ++pos_;
            return number(t.value);
        }
        if (accept_punct("(")) {
            NodePtr inner = expression();
            expect_punct(")");
            return inner;
        }
        if (t.kind == Tok::Ident) {
            const std::string name = t.text;
            ++pos_;
            if (auto f = lookup_function(name)) {
                expect_punct("(");
                NodePtr arg = expression();
                expect_punct(")");
                return call(*f, arg);
            }
            if (name == "i") return imag_unit();
            if (table_ != nullptr) {
                const int idx = table_->index_of(name);
                if (idx >= 0) return symbol(idx);
                for (const auto& [cname, cvalue] : table_->constants) {
                    if (cname == name) return number(cvalue);
                }
            }
            throw UnknownIdentifier(name);
        }
        fail("number, identifier or '('");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const SymbolTable* table_;
};

}  // namespace

// ---------------------------------------------------------------- builders

NodePtr number(double value) {
    Node n;
    n.op = Op::Number;
    n.number = value;
    return make(std::move(n));
}

NodePtr imag_unit() {
    Node n;
    n.op = Op::ImagUnit;
    return make(std::move(n));
}

NodePtr symbol(int index) {
    Node n;
    n.op = Op::Symbol;
    n.symbol = index;
    return make(std::move(n));
}

NodePtr binary(Op op, NodePtr lhs, NodePtr rhs) {
    Node n;
    n.op = op;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    return make(std::move(n));
}

NodePtr negate(NodePtr operand) {
    Node n;
    n.op = Op::Neg;
    n.lhs = std::move(operand);
    return make(std::move(n));
}

NodePtr power(NodePtr base, int exponent) {
    Node n;
    n.op = Op::Pow;
    n.exponent = exponent;
    n.lhs = std::move(base);
    return make(std::move(n));
}

NodePtr call(Func func, NodePtr argument) {
    Node n;
    n.op = Op::Call;
    n.func = func;
    n.lhs = std::move(argument);
    return make(std::move(n));
}

bool same_tree(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case Op::Number: return a.number == b.number;
        case Op::ImagUnit: return true;
        case Op::Symbol: return a.symbol == b.symbol;
        case Op::Neg: return same_tree(*a.lhs, *b.lhs);
        case Op::Pow: return a.exponent == b.exponent && same_tree(*a.lhs, *b.lhs);
        case Op::Call: return a.func == b.func && same_tree(*a.lhs, *b.lhs);
        default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
    }
}

int SymbolTable::index_of(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return static_cast<int>(k);
    }
    return -1;
}

bool is_reserved(std::string_view name) { return name == "i" || lookup_function(name).has_value(); }

// -------------------------------------------------------------- evaluation

// Signed zeros would put -x on the lower side of the branch cut.
Complex cut_side(Complex a) { return a + Complex(0.0, 0.0); }

Complex evaluate(const Node& node, std::span<const double> symbols) {
    switch (node.op) {
        case Op::Number: return {node.number, 0.0};
        case Op::ImagUnit: return {0.0, 1.0};
        case Op::Symbol: return {symbols[static_cast<std::size_t>(node.symbol)], 0.0};
        case Op::Add: return evaluate(*node.lhs, symbols) + evaluate(*node.rhs, symbols);
        case Op::Sub: return evaluate(*node.lhs, symbols) - evaluate(*node.rhs, symbols);
        case Op::Mul: return evaluate(*node.lhs, symbols) * evaluate(*node.rhs, symbols);
        case Op::Div: {
            const Complex den = evaluate(*node.rhs, symbols);
            if (den == Complex(0.0)) throw DomainError("division by zero");
            return evaluate(*node.lhs, symbols) / den;
        }
        case Op::Neg: return -evaluate(*node.lhs, symbols);
        case Op::Pow: return int_power(evaluate(*node.lhs, symbols), node.exponent);
        case Op::Call: {
            const Complex a = evaluate(*node.lhs, symbols);
            switch (node.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return std::exp(a);
                case Func::Sqrt: return std::sqrt(cut_side(a));
                case Func::Log:
                    if (a == Complex(0.0)) throw DomainError("log of zero");
                    return std::log(cut_side(a));
            }
        }
    }
    return {};
}

Dual evaluate_dual(const Node& node, std::span<const double> symbols, std::size_t wrt) {
    switch (node.op) {
        case Op::Number: return {{node.number, 0.0}, 0.0};
        case Op::ImagUnit: return {{0.0, 1.0}, 0.0};
        case Op::Symbol: {
            const auto s = static_cast<std::size_t>(node.symbol);
            return {{symbols[s], 0.0}, s == wrt ? 1.0 : 0.0};
        }
        case Op::Add: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            const Dual b = evaluate_dual(*node.rhs, symbols, wrt);
            return {a.value + b.value, a.slope + b.slope};
        }
        case Op::Sub: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            const Dual b = evaluate_dual(*node.rhs, symbols, wrt);
            return {a.value - b.value, a.slope - b.slope};
        }
        case Op::Mul: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            const Dual b = evaluate_dual(*node.rhs, symbols, wrt);
            return {a.value * b.value, a.slope * b.value + a.value * b.slope};
        }
        case Op::Div: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            const Dual b = evaluate_dual(*node.rhs, symbols, wrt);
            if (b.value == Complex(0.0)) throw DomainError("division by zero");
            const Complex q = a.value / b.value;
            return {q, (a.slope - q * b.slope) / b.value};
        }
        case Op::Neg: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            return {-a.value, -a.slope};
        }
        case Op::Pow: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            const int n = node.exponent;
            if (n == 0) return {1.0, 0.0};
            return {int_power(a.value, n), static_cast<double>(n) * int_power(a.value, n - 1) * a.slope};
        }
        case Op::Call: {
            const Dual a = evaluate_dual(*node.lhs, symbols, wrt);
            switch (node.func) {
                case Func::Sin: return {std::sin(a.value), std::cos(a.value) * a.slope};
                case Func::Cos: return {std::cos(a.value), -std::sin(a.value) * a.slope};
                case Func::Exp: {
                    const Complex e = std::exp(a.value);
                    return {e, e * a.slope};
                }
                case Func::Sqrt: {
                    if (a.value == Complex(0.0)) throw DomainError("sqrt is not differentiable at zero");
                    const Complex r = std::sqrt(cut_side(a.value));
                    return {r, a.slope / (2.0 * r)};
                }
                case Func::Log:
                    if (a.value == Complex(0.0)) throw DomainError("log of zero");
                    return {std::log(cut_side(a.value)), a.slope / a.value};
            }
        }
    }
    return {};
}

// ---------------------------------------------------------------- printing

std::string print(const Node& node, std::span<const std::string> names) {
    auto bin = [&](const char* op) {
        return "(" + print(*node.lhs, names) + " " + op + " " + print(*node.rhs, names) + ")";
    };
    switch (node.op) {
        case Op::Number: return format_number(node.number);
        case Op::ImagUnit: return "i";
        case Op::Symbol: return names[static_cast<std::size_t>(node.symbol)];
        case Op::Add: return bin("+");
        case Op::Sub: return bin("-");
        case Op::Mul: return bin("*");
        case Op::Div: return bin("/");
        case Op::Neg: return "(-" + print(*node.lhs, names) + ")";
        case Op::Pow: {
            std::string base = print(*node.lhs, names);
            if (node.lhs->op == Op::Number || node.lhs->op == Op::Pow) base = "(" + base + ")";
            return base + "^" + std::to_string(node.exponent);
        }
        case Op::Call: return std::string(function_name(node.func)) + "(" + print(*node.lhs, names) + ")";
    }
    return {};
}

// ----------------------------------------------------------------- parsing

NodePtr parse(std::string_view text, const SymbolTable& table) {
    Parser p(text, &table);
    NodePtr e = p.expression();
    p.expect_end();
    return e;
}

std::vector<NodePtr> parse_list(std::string_view text, const SymbolTable& table) {
    Parser p(text, &table);
    std::vector<NodePtr> out;
    out.push_back(p.expression());
    while (p.accept_punct(",")) out.push_back(p.expression());
    p.expect_end();
    return out;
}

}  // namespace expr

// ============================================================== FamilySpec

FamilySpec::FamilySpec(int dim, std::vector<std::string> params, std::vector<expr::NodePtr> entries)
    : dim_(dim), params_(std::move(params)), entries_(std::move(entries)) {
    if (dim_ < 1) throw DimensionError("family dimension must be positive");
    if (entries_.size() != static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_)) {
        throw DimensionError("family entries do not form a " + std::to_string(dim_) + "x" + std::to_string(dim_) +
                             " grid");
    }
}

void FamilySpec::check_point(const ParamPoint& x) const {
    if (x.size() != num_params()) {
        throw DimensionError("parameter point has " + std::to_string(x.size()) + " values, family expects " +
                             std::to_string(num_params()));
    }
}

Eigen::MatrixXcd FamilySpec::eval(const ParamPoint& x) const {
    check_point(x);
    const std::span<const double> sym(x.data(), static_cast<std::size_t>(x.size()));
    Eigen::MatrixXcd m(dim_, dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
            const Complex v = expr::evaluate(*entry(r, c), sym);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw DomainError("entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                                  ") is not finite");
            }
            m(r, c) = v;
        }
    }
    return m;
}

Eigen::MatrixXcd FamilySpec::eval_derivative(const ParamPoint& x, int param) const {
    check_point(x);
    if (param < 0 || param >= num_params()) throw DimensionError("parameter index out of range");
    const std::span<const double> sym(x.data(), static_cast<std::size_t>(x.size()));
    Eigen::MatrixXcd m(dim_, dim_);
    for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
            const Complex v = expr::evaluate_dual(*entry(r, c), sym, static_cast<std::size_t>(param)).slope;
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw DomainError("derivative of entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                                  ") is not finite");
            }
            m(r, c) = v;
        }
    }
    return m;
}

std::vector<Eigen::MatrixXcd> FamilySpec::eval_gradient(const ParamPoint& x) const {
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(params_.size());
    for (int k = 0; k < num_params(); ++k) out.push_back(eval_derivative(x, k));
    return out;
}

std::string FamilySpec::to_source() const {
    std::string s = "params ";
    for (std::size_t k = 0; k < params_.size(); ++k) {
        if (k != 0) s += ", ";
        s += params_[k];
    }
    s += "; H = [";
    for (int r = 0; r < dim_; ++r) {
        if (r != 0) s += ", ";
        s += "[";
        for (int c = 0; c < dim_; ++c) {
            if (c != 0) s += ", ";
            s += expr::print(*entry(r, c), params_);
        }
        s += "]";
    }
    s += "]";
    return s;
}

bool operator==(const FamilySpec& a, const FamilySpec& b) {
    if (a.dim_ != b.dim_ || a.params_ != b.params_) return false;
    for (std::size_t k = 0; k < a.entries_.size(); ++k) {
        if (!expr::same_tree(*a.entries_[k], *b.entries_[k])) return false;
    }
    return true;
}

FamilySpec parse_family(std::string_view text) {
    expr::SymbolTable table;
    expr::Parser p(text, nullptr);

    p.expect_keyword("params");
    if (!p.peek_punct(";")) {
        for (;;) {
            const expr::Token& tok = p.cur();
            std::string name = p.expect_ident();
            if (expr::is_reserved(name)) {
                throw SyntaxError("'" + name + "' is reserved and cannot name a parameter", tok.offset, tok.line,
                                  tok.column);
            }
            if (table.index_of(name) >= 0) {
                throw SyntaxError("duplicate parameter '" + name + "'", tok.offset, tok.line, tok.column);
            }
            table.names.push_back(std::move(name));
            if (!p.accept_punct(",")) break;
        }
    }
    p.expect_punct(";");
    p.set_table(&table);
    p.expect_keyword("H");
    p.expect_punct("=");

    std::vector<std::vector<expr::NodePtr>> rows;
    p.expect_punct("[");
    do {
        p.expect_punct("[");
        std::vector<expr::NodePtr> row;
        do {
            row.push_back(p.expression());
        } while (p.accept_punct(","));
        p.expect_punct("]");
        rows.push_back(std::move(row));
    } while (p.accept_punct(","));
    p.expect_punct("]");
    p.accept_punct(";");
    p.expect_end();

    const std::size_t n = rows.size();
    std::vector<expr::NodePtr> entries;
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != n) {
            throw DimensionError("row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                                 " entries, expected " + std::to_string(n));
        }
        for (auto& e : rows[r]) entries.push_back(std::move(e));
    }
    return FamilySpec(static_cast<int>(n), std::move(table.names), std::move(entries));
}

}  // namespace eigenflow
