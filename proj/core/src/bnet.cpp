#include "qbn/bnet.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace qbn {

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

ExprPtr BoolExpr::variable(std::string name, int index) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = NodeKind::Variable;
    e->name = std::move(name);
    e->var = index;
    return e;
}

ExprPtr BoolExpr::constant(bool value) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = NodeKind::Constant;
    e->value = value;
    return e;
}

ExprPtr BoolExpr::negate(ExprPtr child) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = NodeKind::Not;
    e->lhs = std::move(child);
    return e;
}

ExprPtr BoolExpr::conjunction(ExprPtr l, ExprPtr r) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = NodeKind::And;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

ExprPtr BoolExpr::disjunction(ExprPtr l, ExprPtr r) {
    auto e = std::make_unique<BoolExpr>();
    e->kind = NodeKind::Or;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

ExprPtr clone(const BoolExpr& e) {
    auto c = std::make_unique<BoolExpr>();
    c->kind = e.kind;
    c->name = e.name;
    c->var = e.var;
    c->value = e.value;
    if (e.lhs) c->lhs = clone(*e.lhs);
    if (e.rhs) c->rhs = clone(*e.rhs);
    return c;
}

bool structurally_equal(const BoolExpr& a, const BoolExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case NodeKind::Variable: return a.name == b.name;
    case NodeKind::Constant: return a.value == b.value;
    case NodeKind::Not: return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::And:
    case NodeKind::Or:
        return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    }
    return false;
}

namespace {

int precedence(NodeKind k) {
    switch (k) {
    case NodeKind::Or: return 1;
    case NodeKind::And: return 2;
    case NodeKind::Not: return 3;
    default: return 4; // leaves never need parens
    }
}

void render(const BoolExpr& e, std::string& out, bool full_parens) {
    switch (e.kind) {
    case NodeKind::Variable:
        out += e.name;
        return;
    case NodeKind::Constant:
        out += e.value ? '1' : '0';
        return;
    case NodeKind::Not: {
        out += '!';
        bool parens = full_parens || precedence(e.lhs->kind) < precedence(NodeKind::Not);
        if (parens) out += '(';
        render(*e.lhs, out, full_parens);
        if (parens) out += ')';
        return;
    }
    case NodeKind::And:
    case NodeKind::Or: {
        int p = precedence(e.kind);
        // Left-associative: the right child needs parens already at equal
        // precedence, the left child only below it.
        bool lp = full_parens || precedence(e.lhs->kind) < p;
        bool rp = full_parens || precedence(e.rhs->kind) <= p;
        if (lp) out += '(';
        render(*e.lhs, out, full_parens);
        if (lp) out += ')';
        out += e.kind == NodeKind::And ? " & " : " | ";
        if (rp) out += '(';
        render(*e.rhs, out, full_parens);
        if (rp) out += ')';
        return;
    }
    }
}

} // namespace

std::string to_string(const BoolExpr& e, bool full_parens) {
    std::string out;
    render(e, out, full_parens);
    return out;
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

} // namespace

std::vector<Token> tokenize(std::string_view text, int line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        int col = static_cast<int>(i) + 1;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        switch (c) {
        case '&': out.push_back({TokenKind::And, "&", col}); ++i; continue;
        case '|': out.push_back({TokenKind::Or, "|", col}); ++i; continue;
        case '!': out.push_back({TokenKind::Not, "!", col}); ++i; continue;
        case '(': out.push_back({TokenKind::LParen, "(", col}); ++i; continue;
        case ')': out.push_back({TokenKind::RParen, ")", col}); ++i; continue;
        case ',': out.push_back({TokenKind::Comma, ",", col}); ++i; continue;
        case '0': out.push_back({TokenKind::Const0, "0", col}); ++i; continue;
        case '1': out.push_back({TokenKind::Const1, "1", col}); ++i; continue;
        default: break;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && ident_char(text[j])) ++j;
            out.push_back({TokenKind::Ident, std::string(text.substr(i, j - i)), col});
            i = j;
            continue;
        }
        throw UnexpectedCharacter("unexpected character '" + std::string(1, c) + "'", line, col);
    }
    out.push_back({TokenKind::End, "", static_cast<int>(text.size()) + 1});
    return out;
}

// ---------------------------------------------------------------------------
// Expression parser: expr := term ('|' term)*, term := factor ('&' factor)*,
// factor := '!' factor | '(' expr ')' | IDENT | '0' | '1'
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::vector<Token>& tokens, int line) : toks_(tokens), line_(line) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        if (peek().kind != TokenKind::End)
            fail("unexpected token after complete expression");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool accept(TokenKind k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        std::string got = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(what + " (got " + got + ")", line_, t.column);
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (accept(TokenKind::Or)) e = BoolExpr::disjunction(std::move(e), term());
        return e;
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (accept(TokenKind::And)) e = BoolExpr::conjunction(std::move(e), factor());
        return e;
    }

    ExprPtr factor() {
        if (accept(TokenKind::Not)) return BoolExpr::negate(factor());
        if (accept(TokenKind::LParen)) {
            ExprPtr e = expr();
            if (!accept(TokenKind::RParen)) fail("expected ')'");
            return e;
        }
        switch (peek().kind) {
        case TokenKind::Ident: return BoolExpr::variable(advance().text);
        case TokenKind::Const0: advance(); return BoolExpr::constant(false);
        case TokenKind::Const1: advance(); return BoolExpr::constant(true);
        default: fail("expected a variable, constant, '!' or '('");
        }
    }

    const std::vector<Token>& toks_;
    int line_;
    std::size_t pos_ = 0;
};

} // namespace

ExprPtr parse_expr(const std::vector<Token>& tokens, int line) {
    return Parser(tokens, line).parse();
}

// ---------------------------------------------------------------------------
// Network files
// ---------------------------------------------------------------------------

int NetworkSpec::gene_index(std::string_view name) const {
    for (std::size_t i = 0; i < genes.size(); ++i)
        if (genes[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::string strip_line(std::string_view raw) {
    std::string s(raw);
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    return s;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return c == ' ' || c == '\t'; });
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

bool is_header(const std::vector<Token>& toks) {
    return toks.size() == 4 && toks[0].kind == TokenKind::Ident &&
           iequals(toks[0].text, "targets") && toks[1].kind == TokenKind::Comma &&
           toks[2].kind == TokenKind::Ident && iequals(toks[2].text, "factors");
}

void resolve_variables(BoolExpr& e, const NetworkSpec& spec, int line) {
    switch (e.kind) {
    case NodeKind::Variable: {
        int idx = spec.gene_index(e.name);
        if (idx < 0)
            throw UndefinedVariable("undefined variable '" + e.name + "'", line);
        e.var = idx;
        return;
    }
    case NodeKind::Constant:
        return;
    case NodeKind::Not:
        resolve_variables(*e.lhs, spec, line);
        return;
    case NodeKind::And:
    case NodeKind::Or:
        resolve_variables(*e.lhs, spec, line);
        resolve_variables(*e.rhs, spec, line);
        return;
    }
}

} // namespace

NetworkSpec parse_network(std::string_view text) {
    struct RuleLine {
        int line;
        std::vector<Token> tokens; // past the "gene," prefix, ends with End
    };

    NetworkSpec spec;
    std::vector<RuleLine> rule_lines;
    bool saw_content = false;

    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        std::string s = strip_line(raw);
        if (is_blank(s)) continue;

        // Commas only ever separate the gene name from its rule, so a second
        // one marks a BoolNet probabilistic rule (gene, expr, probability).
        // Diagnose that before tokenizing: the trailing probability would
        // otherwise fail the tokenizer with a far less helpful message.
        std::size_t first_comma = s.find(',');
        if (first_comma != std::string::npos) {
            std::size_t second_comma = s.find(',', first_comma + 1);
            if (second_comma != std::string::npos)
                throw SyntaxError("extra ',' in rule line; probabilistic rules "
                                  "(gene, expression, probability) are not supported",
                                  line_no, static_cast<int>(second_comma) + 1);
        }

        std::vector<Token> toks = tokenize(s, line_no);
        if (!saw_content && is_header(toks)) {
            saw_content = true;
            continue;
        }
        saw_content = true;

        if (toks[0].kind != TokenKind::Ident)
            throw SyntaxError("expected a gene name at the start of the line",
                              line_no, toks[0].column);
        if (toks.size() < 2 || toks[1].kind != TokenKind::Comma)
            throw SyntaxError("expected ',' after gene name '" + toks[0].text + "'",
                              line_no, toks.size() > 1 ? toks[1].column : toks[0].column);

        const std::string& gene = toks[0].text;
        if (spec.gene_index(gene) >= 0)
            throw DuplicateGene("duplicate gene '" + gene + "'", line_no, toks[0].column);
        spec.genes.push_back(gene);
        rule_lines.push_back({line_no, std::vector<Token>(toks.begin() + 2, toks.end())});
    }

    if (spec.genes.empty()) throw EmptyNetwork("network declares no genes");
    if (spec.n() > kMaxGenes)
        throw CapacityExceeded("network has " + std::to_string(spec.n()) +
                               " genes; the limit is " + std::to_string(kMaxGenes));

    for (const RuleLine& rl : rule_lines) {
        ExprPtr e = parse_expr(rl.tokens, rl.line);
        resolve_variables(*e, spec, rl.line);
        spec.rules.push_back(std::move(e));
    }
    return spec;
}

} // namespace qbn
