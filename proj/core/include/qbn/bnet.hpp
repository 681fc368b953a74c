#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qbn/errors.hpp"

namespace qbn {

// ---------------------------------------------------------------------------
// Boolean expression AST
// ---------------------------------------------------------------------------

enum class NodeKind { Variable, Constant, Not, And, Or };

struct BoolExpr;
using ExprPtr = std::unique_ptr<BoolExpr>;

struct BoolExpr {
    NodeKind kind;
    std::string name;   // Variable: gene name as written
    int var = -1;       // Variable: gene index, resolved by parse_network
    bool value = false; // Constant
    ExprPtr lhs;        // Not: the single child; And/Or: left operand
    ExprPtr rhs;        // And/Or: right operand

    static ExprPtr variable(std::string name, int index = -1);
    static ExprPtr constant(bool value);
    static ExprPtr negate(ExprPtr child);
    static ExprPtr conjunction(ExprPtr l, ExprPtr r);
    static ExprPtr disjunction(ExprPtr l, ExprPtr r);
};

ExprPtr clone(const BoolExpr& e);
bool structurally_equal(const BoolExpr& a, const BoolExpr& b);

/// Renders the expression with the grammar's operators. With
/// `full_parens` every non-leaf node is wrapped in parentheses, which makes
/// the output reparse to a structurally identical tree.
std::string to_string(const BoolExpr& e, bool full_parens = false);

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind { Ident, And, Or, Not, LParen, RParen, Comma, Const0, Const1, End };

struct Token {
    TokenKind kind;
    std::string text;
    int column = 0; // 1-based position in the source line
};

/// Splits one logical line (comments already stripped) into tokens.
/// Throws ParseError on any byte outside the token alphabet.
std::vector<Token> tokenize(std::string_view text, int line = 0);

/// Recursive-descent parse of a full token sequence into an AST.
/// Precedence NOT > AND > OR, binary operators left-associative.
/// Trailing tokens are rejected.
ExprPtr parse_expr(const std::vector<Token>& tokens, int line = 0);

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

/// Largest supported gene count. A dense 2^n transition table at n = 24
/// costs 64 MiB; anything bigger is rejected up front.
inline constexpr int kMaxGenes = 24;

struct NetworkSpec {
    std::vector<std::string> genes; // file order
    std::vector<ExprPtr> rules;     // one per gene, same order

    int n() const { return static_cast<int>(genes.size()); }
    /// Index of `name` in the gene list, or -1.
    int gene_index(std::string_view name) const;
};

/// Parses a BoolNet "targets, factors" file. The header line is optional,
/// '#' starts a comment, blank lines are skipped, CRLF is accepted.
/// Every variable must resolve to a declared gene (two-pass validation);
/// Variable nodes come back with `var` filled in.
NetworkSpec parse_network(std::string_view text);

} // namespace qbn
