// Matrix-expression language for Hamiltonian families H(x).
//
// A family is written as
//
//     params a, b;  H = [[a, b], [b, -a]]
//
// Entries are expression trees over real literals, the imaginary unit `i`,
// declared parameters, + - * /, unary minus, integer powers and the functions
// sin, cos, exp, sqrt, log (principal branches). Trees are immutable and can
// be evaluated concurrently. First derivatives are exact: they are propagated
// through the tree with complex dual numbers.

#pragma once

#include "eigenflow/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eigenflow {

using Complex = std::complex<double>;
using ParamPoint = Eigen::VectorXd;

namespace expr {

enum class Func { Sin, Cos, Exp, Sqrt, Log };

enum class Op { Number, ImagUnit, Symbol, Add, Sub, Mul, Div, Neg, Pow, Call };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Number;
    double number = 0.0;  // Op::Number, always >= 0 for parsed trees
    int symbol = -1;      // Op::Symbol
    int exponent = 0;     // Op::Pow
    Func func = Func::Sin;  // Op::Call
    NodePtr lhs;          // first operand (the only one for Neg, Pow, Call)
    NodePtr rhs;
};

NodePtr number(double value);
NodePtr imag_unit();
NodePtr symbol(int index);
NodePtr binary(Op op, NodePtr lhs, NodePtr rhs);
NodePtr negate(NodePtr operand);
NodePtr power(NodePtr base, int exponent);
NodePtr call(Func func, NodePtr argument);

// Structural equality (numbers compared exactly).
bool same_tree(const Node& a, const Node& b);

// Value and first derivative with respect to one symbol.
struct Dual {
    Complex value;
    Complex slope;
};

Complex evaluate(const Node& node, std::span<const double> symbols);
Dual evaluate_dual(const Node& node, std::span<const double> symbols, std::size_t wrt);

// Names and optional numeric constants (e.g. `pi`) an expression may refer to.
struct SymbolTable {
    std::vector<std::string> names;
    std::vector<std::pair<std::string, double>> constants;

    int index_of(std::string_view name) const;
};

// Fully parenthesized form; parse(print(t)) reproduces t exactly.
std::string print(const Node& node, std::span<const std::string> names);

NodePtr parse(std::string_view text, const SymbolTable& table);

// Comma separated list of expressions, e.g. "cos(2*pi*t), sin(2*pi*t)".
std::vector<NodePtr> parse_list(std::string_view text, const SymbolTable& table);

bool is_reserved(std::string_view name);

}  // namespace expr

// Parsed H(x): an n×n grid of expression trees over d real parameters.
class FamilySpec {
public:
    FamilySpec(int dim, std::vector<std::string> params, std::vector<expr::NodePtr> entries);

    int dim() const noexcept { return dim_; }
    int num_params() const noexcept { return static_cast<int>(params_.size()); }
    const std::vector<std::string>& params() const noexcept { return params_; }
    const expr::NodePtr& entry(int row, int col) const { return entries_[static_cast<std::size_t>(row * dim_ + col)]; }

    Eigen::MatrixXcd eval(const ParamPoint& x) const;
    Eigen::MatrixXcd eval_derivative(const ParamPoint& x, int param) const;
    std::vector<Eigen::MatrixXcd> eval_gradient(const ParamPoint& x) const;

    // Re-parseable source text.
    std::string to_source() const;

    friend bool operator==(const FamilySpec& a, const FamilySpec& b);

private:
    void check_point(const ParamPoint& x) const;

    int dim_;
    std::vector<std::string> params_;
    std::vector<expr::NodePtr> entries_;  // row-major
};

FamilySpec parse_family(std::string_view text);

}  // namespace eigenflow
