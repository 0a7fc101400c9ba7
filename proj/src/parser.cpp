#include "dataops/parser.hpp"

#include <algorithm>
#include <map>

namespace dataops::sql {

namespace {

std::string fold(std::string_view s) { return to_lower(s); }

bool upper_in(const Token& t, std::initializer_list<std::string_view> set) {
    if (t.kind != TokenKind::Keyword) return false;
    std::string u = to_upper(t.text);
    return std::any_of(set.begin(), set.end(),
                       [&](std::string_view s) { return u == s; });
}

const std::initializer_list<std::string_view> kClauseKeywords = {
    "WHERE", "GROUP", "HAVING", "QUALIFY", "WINDOW", "ORDER", "LIMIT", "OFFSET"};
const std::initializer_list<std::string_view> kSetOpKeywords = {
    "UNION", "INTERSECT", "EXCEPT"};
const std::initializer_list<std::string_view> kJoinKeywords = {
    "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "NATURAL"};

// Identifier text as written; quoted identifiers lose their quotes.
std::string ident_text(const Token& t) {
    if (t.kind == TokenKind::QuotedIdentifier && t.text.size() >= 2)
        return t.text.substr(1, t.text.size() - 2);
    return t.text;
}

bool is_ident(const Token& t) {
    return t.kind == TokenKind::Identifier || t.kind == TokenKind::QuotedIdentifier;
}

bool is_dot(const Token& t) {
    return t.kind == TokenKind::Operator && t.text == ".";
}

bool is_star_op(const Token& t) {
    return t.kind == TokenKind::Operator && t.text == "*";
}

struct BodyContext {
    std::vector<std::vector<std::string>> chains;        // raw qualified refs
    std::map<std::string, std::optional<std::string>> aliases;  // folded alias -> cte
    std::vector<std::pair<std::string, bool>> star_quals;  // (qualifier, resolved later)
};

class StatementParser {
public:
    StatementParser(std::span<const Token> slice, SqlAst& ast) : ast_(ast) {
        for (const Token& t : slice)
            if (!is_trivia(t.kind)) toks_.push_back(&t);
    }

    Statement parse() {
        Statement st;
        if (toks_.empty()) return st;
        st.start_line = toks_.front()->line;
        st.end_line = toks_.back()->line;
        const Token& first = *toks_.front();
        if (upper_in(first, {"WITH", "SELECT"})) {
            st.kind = StatementKind::Select;
            if (upper_in(first, {"WITH"})) parse_cte_list(st);
            if (at_end() || !upper_in(*peek(), {"SELECT"}))
                error("expected SELECT after WITH clause");
            st.final_select = parse_select_body(false);
            if (!at_end()) error("unexpected token '" + peek()->text + "'");
        } else if (upper_in(first, {"CREATE"})) {
            st.kind = StatementKind::Create;
        } else if (upper_in(first, {"INSERT"})) {
            st.kind = StatementKind::Insert;
        } else if (upper_in(first, {"UPDATE"})) {
            st.kind = StatementKind::Update;
        } else if (upper_in(first, {"DELETE"})) {
            st.kind = StatementKind::Delete;
        } else {
            st.kind = StatementKind::Other;
        }
        return st;
    }

private:
    SqlAst& ast_;
    std::vector<const Token*> toks_;
    size_t i_ = 0;
    int body_depth_ = 0;
    std::vector<std::string> cte_scope_;  // folded names

    static constexpr int kMaxBodyDepth = 100;

    bool at_end() const { return i_ >= toks_.size(); }

    const Token* peek(size_t ahead = 0) const {
        return i_ + ahead < toks_.size() ? toks_[i_ + ahead] : nullptr;
    }

    const Token* next() { return at_end() ? nullptr : toks_[i_++]; }

    [[noreturn]] void error(const std::string& msg) const {
        const Token* at = i_ < toks_.size() ? toks_[i_] : toks_.back();
        throw ParseError(msg, at->line, at->col);
    }

    void expect_rparen(const char* what) {
        if (at_end() || peek()->kind != TokenKind::RParen)
            error(std::string("expected ')' to close ") + what);
        next();
    }

    bool in_scope(std::string_view folded) const {
        return std::find(cte_scope_.begin(), cte_scope_.end(), folded) != cte_scope_.end();
    }

    void parse_cte_list(Statement& st) {
        next();  // WITH
        while (true) {
            if (at_end() || !is_ident(*peek())) error("expected CTE name");
            const Token* name_tok = next();
            if (!at_end() && peek()->kind == TokenKind::LParen)
                skip_balanced_parens();  // optional column alias list
            if (at_end() || !upper_in(*peek(), {"AS"})) error("expected AS in CTE definition");
            next();
            if (at_end() || peek()->kind != TokenKind::LParen)
                error("expected '(' after AS");
            next();
            CteDef cte;
            cte.name = ident_text(*name_tok);
            cte.start_line = name_tok->line;
            cte.body = parse_body_with_optional_with(false);
            if (at_end() || peek()->kind != TokenKind::RParen)
                error("expected ')' to close CTE body");
            cte.end_line = peek()->line;
            next();
            cte_scope_.push_back(fold(cte.name));
            st.ctes.push_back(std::move(cte));
            if (!at_end() && peek()->kind == TokenKind::Comma) {
                next();
                continue;
            }
            break;
        }
    }

    void skip_balanced_parens() {
        next();  // (
        int depth = 1;
        while (depth > 0) {
            if (at_end()) error("unbalanced parentheses");
            const Token* t = next();
            if (t->kind == TokenKind::LParen) ++depth;
            if (t->kind == TokenKind::RParen) --depth;
        }
    }

    // Parses SELECT ... [set-op SELECT ...]*, leaving the cursor at the
    // enclosing ')' or the end of the statement.
    SelectBody parse_select_body(bool suppress_items) {
        if (++body_depth_ > kMaxBodyDepth) error("query nesting too deep");
        SelectBody body;
        BodyContext ctx;
        parse_one_arm(body, ctx, suppress_items);
        while (!at_end() && upper_in(*peek(), kSetOpKeywords)) {
            next();
            if (!at_end() && upper_in(*peek(), {"ALL", "DISTINCT"})) next();
            body.set_op_arms += 1;
            if (!at_end() && peek()->kind == TokenKind::LParen && peek(1) &&
                upper_in(*peek(1), {"SELECT", "WITH"})) {
                next();
                parse_nested_select(body, ctx);
                expect_rparen("set-operation arm");
            } else if (!at_end() && upper_in(*peek(), {"SELECT"})) {
                parse_one_arm(body, ctx, true);
            } else {
                error("expected SELECT after set operator");
            }
        }
        finalize_body(body, ctx);
        --body_depth_;
        return body;
    }

    // A full sub-select treated opaquely for item purposes: its relations
    // and column references merge into `body`.
    void parse_nested_select(SelectBody& body, BodyContext& ctx) {
        (void)ctx;
        SelectBody sub = parse_body_with_optional_with(true);
        body.subquery_count += 1 + sub.subquery_count;
        for (const auto& rel : sub.from_relations) body.from_relations.push_back(rel);
        for (const auto& rc : sub.referenced_columns) body.referenced_columns.insert(rc);
    }

    // SELECT body that may carry its own WITH clause. Nested CTE
    // definitions stay local: they contribute to the body's subquery
    // count and relation set rather than the statement's CTE list.
    SelectBody parse_body_with_optional_with(bool suppress_items) {
        int extra_subqueries = 0;
        std::vector<RelationRef> local_relations;
        std::set<std::string> local_refs;
        if (!at_end() && upper_in(*peek(), {"WITH"})) {
            next();
            while (true) {
                if (at_end() || !is_ident(*peek())) error("expected CTE name");
                const Token* name_tok = next();
                if (!at_end() && peek()->kind == TokenKind::LParen) skip_balanced_parens();
                if (at_end() || !upper_in(*peek(), {"AS"}))
                    error("expected AS in CTE definition");
                next();
                if (at_end() || peek()->kind != TokenKind::LParen)
                    error("expected '(' after AS");
                next();
                SelectBody local = parse_body_with_optional_with(true);
                expect_rparen("CTE body");
                extra_subqueries += 1 + local.subquery_count;
                for (auto& rel : local.from_relations) local_relations.push_back(rel);
                for (auto& rc : local.referenced_columns) local_refs.insert(rc);
                cte_scope_.push_back(fold(ident_text(*name_tok)));
                if (!at_end() && peek()->kind == TokenKind::Comma) {
                    next();
                    continue;
                }
                break;
            }
        }
        if (at_end() || !upper_in(*peek(), {"SELECT"})) error("expected SELECT");
        SelectBody body = parse_select_body(suppress_items);
        body.subquery_count += extra_subqueries;
        for (const auto& rel : local_relations) body.from_relations.push_back(rel);
        for (const auto& rc : local_refs) body.referenced_columns.insert(rc);
        return body;
    }

    void parse_one_arm(SelectBody& body, BodyContext& ctx, bool suppress_items) {
        if (at_end() || !upper_in(*peek(), {"SELECT"})) error("expected SELECT");
        next();
        if (!at_end() && upper_in(*peek(), {"DISTINCT", "ALL"})) next();

        // Select list.
        while (true) {
            std::vector<const Token*> expr = scan_expression(body, ctx, true);
            if (!suppress_items && !expr.empty())
                body.select_items.push_back(make_item(expr, ctx));
            if (!at_end() && peek()->kind == TokenKind::Comma) {
                next();
                continue;
            }
            break;
        }
        if (!at_end() && upper_in(*peek(), {"FROM"})) parse_from_clause(body, ctx);
        while (!at_end() && upper_in(*peek(), kClauseKeywords)) {
            const Token* kw = next();
            if (upper_in(*kw, {"GROUP", "ORDER"})) {
                if (!at_end() && upper_in(*peek(), {"BY"})) next();
            }
            scan_expression(body, ctx, false);
        }
    }

    // Scans one expression region, recording column-reference chains and
    // entering `(select ...)` subqueries. Stops (without consuming) at a
    // top-level comma when `comma_stops`, at clause/set-op/join keywords,
    // at FROM, or at an unbalanced ')'.
    std::vector<const Token*> scan_expression(SelectBody& body, BodyContext& ctx,
                                              bool comma_stops) {
        std::vector<const Token*> out;
        int depth = 0;
        while (!at_end()) {
            const Token* t = peek();
            if (t->kind == TokenKind::RParen) {
                if (depth == 0) break;
                --depth;
                out.push_back(next());
                continue;
            }
            if (depth == 0) {
                if (comma_stops && t->kind == TokenKind::Comma) break;
                if (upper_in(*t, {"FROM"}) || upper_in(*t, kClauseKeywords) ||
                    upper_in(*t, kSetOpKeywords) || upper_in(*t, kJoinKeywords) ||
                    upper_in(*t, {"ON", "USING"}))
                    break;
            }
            if (t->kind == TokenKind::LParen) {
                if (peek(1) && upper_in(*peek(1), {"SELECT", "WITH"})) {
                    out.push_back(next());  // (
                    parse_nested_select(body, ctx);
                    if (at_end() || peek()->kind != TokenKind::RParen)
                        error("expected ')' to close subquery");
                    out.push_back(next());
                    continue;
                }
                ++depth;
                out.push_back(next());
                continue;
            }
            if (is_ident(*t)) {
                size_t chain_len = 0;
                std::vector<std::string> chain = read_chain(chain_len);
                bool is_call = !at_end() && peek()->kind == TokenKind::LParen;
                bool ends_star = chain.empty();
                if (!ends_star && !is_call) ctx.chains.push_back(chain);
                for (size_t k = 0; k < chain_len; ++k) out.push_back(toks_[i_ - chain_len + k]);
                continue;
            }
            if (upper_in(*t, {"AS"})) {
                out.push_back(next());
                if (!at_end() && is_ident(*peek())) out.push_back(next());  // alias, not a ref
                continue;
            }
            out.push_back(next());
        }
        return out;
    }

    // Reads ident(.ident)*(.*)? — returns the chain parts, or an empty
    // vector when the chain ends in ".*". `consumed` counts tokens eaten.
    std::vector<std::string> read_chain(size_t& consumed) {
        size_t start = i_;
        std::vector<std::string> parts;
        parts.push_back(ident_text(*next()));
        while (!at_end() && is_dot(*peek()) && peek(1) &&
               (is_ident(*peek(1)) || is_star_op(*peek(1)))) {
            next();  // .
            if (is_star_op(*peek())) {
                next();
                consumed = i_ - start;
                return {};  // qualified star
            }
            parts.push_back(ident_text(*next()));
        }
        consumed = i_ - start;
        return parts;
    }

    SelectItem make_item(const std::vector<const Token*>& expr, BodyContext& ctx) {
        SelectItem item;
        item.line = expr.front()->line;
        item.col = expr.front()->col;
        for (const Token* t : expr) item.expr.push_back(*t);

        // Star items: "*" or "q.*".
        if (expr.size() == 1 && is_star_op(*expr[0])) {
            item.is_star = true;
            return item;
        }
        bool star_chain = expr.size() >= 3 && is_star_op(*expr.back()) &&
                          is_dot(*expr[expr.size() - 2]);
        if (star_chain) {
            bool pure = true;
            for (size_t k = 0; k + 2 < expr.size(); ++k) {
                if (k % 2 == 0 ? !is_ident(*expr[k]) : !is_dot(*expr[k])) pure = false;
            }
            if (pure) {
                item.is_star = true;
                std::string qual;
                for (size_t k = 0; k + 2 < expr.size(); k += 2) {
                    if (!qual.empty()) qual += '.';
                    qual += ident_text(*expr[k]);
                }
                item.star_qualifier = fold(qual);
                ctx.star_quals.emplace_back(item.star_qualifier, false);
                return item;
            }
        }

        // Explicit AS alias at paren depth zero.
        int depth = 0;
        for (size_t k = 0; k < expr.size(); ++k) {
            const Token* t = expr[k];
            if (t->kind == TokenKind::LParen) ++depth;
            if (t->kind == TokenKind::RParen) --depth;
            if (depth == 0 && upper_in(*t, {"AS"}) && k + 1 < expr.size() &&
                is_ident(*expr[k + 1])) {
                set_alias(item, *expr[k + 1]);
                return item;
            }
        }
        // Trailing implicit alias: "expr name".
        if (expr.size() >= 2 && is_ident(*expr.back())) {
            const Token* prev = expr[expr.size() - 2];
            bool alias_position =
                is_ident(*prev) || prev->kind == TokenKind::Number ||
                prev->kind == TokenKind::String || prev->kind == TokenKind::RParen ||
                prev->kind == TokenKind::Macro ||
                upper_in(*prev, {"END", "NULL", "TRUE", "FALSE"});
            if (alias_position && !is_dot(*prev)) {
                set_alias(item, *expr.back());
                return item;
            }
        }
        // Unaliased plain column reference defines an output column.
        bool pure_chain = !expr.empty() && is_ident(*expr.front());
        for (size_t k = 0; k < expr.size() && pure_chain; ++k) {
            if (k % 2 == 0 ? !is_ident(*expr[k]) : !is_dot(*expr[k])) pure_chain = false;
        }
        if (pure_chain && expr.size() % 2 == 1)
            item.bare_column = ident_text(*expr.back());
        return item;
    }

    static void set_alias(SelectItem& item, const Token& tok) {
        item.alias = ident_text(tok);
        item.alias_quoted = tok.kind == TokenKind::QuotedIdentifier;
        item.alias_line = tok.line;
        item.alias_col = tok.col;
    }

    void parse_from_clause(SelectBody& body, BodyContext& ctx) {
        next();  // FROM
        while (true) {
            parse_relation(body, ctx);
            bool more = false;
            while (!at_end()) {
                const Token* t = peek();
                if (t->kind == TokenKind::Comma) {
                    next();
                    more = true;
                    break;
                }
                if (upper_in(*t, kJoinKeywords)) {
                    while (!at_end() && upper_in(*peek(), kJoinKeywords)) next();
                    parse_relation(body, ctx);
                    continue;
                }
                if (upper_in(*t, {"ON", "USING"})) {
                    next();
                    scan_expression(body, ctx, false);
                    continue;
                }
                break;
            }
            if (!more) break;
        }
    }

    void parse_relation(SelectBody& body, BodyContext& ctx) {
        if (at_end()) error("expected relation after FROM");
        const Token* t = peek();
        if (t->kind == TokenKind::Macro) {
            next();
            std::optional<MacroRef> mr = classify_macro(*t);
            if (mr) {
                RelationRef rel;
                rel.target = RelationRef::Target::Macro;
                rel.name = mr->target();
                rel.macro = mr;
                body.from_relations.push_back(rel);
                bind_alias(ctx, std::nullopt);
            } else {
                bind_alias(ctx, std::nullopt);  // unsupported macro, opaque
            }
            return;
        }
        if (t->kind == TokenKind::LParen) {
            next();
            parse_nested_select(body, ctx);
            expect_rparen("subquery");
            bind_alias(ctx, std::nullopt);
            return;
        }
        if (is_ident(*t)) {
            size_t consumed = 0;
            std::vector<std::string> parts = read_chain(consumed);
            if (parts.empty()) error("expected relation name");
            RelationRef rel;
            if (parts.size() == 1 && in_scope(fold(parts[0]))) {
                rel.target = RelationRef::Target::Cte;
                rel.name = fold(parts[0]);
                body.from_relations.push_back(rel);
                ctx.aliases.emplace(rel.name, rel.name);
                bind_alias(ctx, rel.name);
            } else {
                rel.target = RelationRef::Target::RawTable;
                std::string dotted;
                for (const auto& p : parts) {
                    if (!dotted.empty()) dotted += '.';
                    dotted += p;
                }
                rel.name = dotted;
                body.from_relations.push_back(rel);
                ctx.aliases.emplace(fold(parts.back()), std::nullopt);
                bind_alias(ctx, std::nullopt);
            }
            return;
        }
        error("expected relation after FROM");
    }

    // Consumes an optional relation alias and records its binding.
    void bind_alias(BodyContext& ctx, std::optional<std::string> target) {
        if (!at_end() && upper_in(*peek(), {"AS"})) {
            next();
            if (at_end() || !is_ident(*peek())) error("expected alias after AS");
            ctx.aliases[fold(ident_text(*next()))] = target;
            return;
        }
        if (!at_end() && is_ident(*peek()))
            ctx.aliases[fold(ident_text(*next()))] = target;
    }

    void finalize_body(SelectBody& body, BodyContext& ctx) {
        for (const auto& chain : ctx.chains) {
            if (chain.empty()) continue;
            if (chain.size() == 1) {
                body.referenced_columns.insert(fold(chain[0]));
                continue;
            }
            if (chain.size() == 2) {
                std::string q = fold(chain[0]);
                std::string col = fold(chain[1]);
                auto it = ctx.aliases.find(q);
                if (it != ctx.aliases.end() && it->second) {
                    body.referenced_columns.insert(*it->second + "." + col);
                } else if (it == ctx.aliases.end() && in_scope(q)) {
                    body.referenced_columns.insert(q + "." + col);
                } else {
                    body.referenced_columns.insert(col);
                }
                continue;
            }
            body.referenced_columns.insert(fold(chain.back()));
        }
        // Resolve star qualifiers recorded as aliases to their CTE names.
        for (auto& item : body.select_items) {
            if (!item.is_star || item.star_qualifier.empty()) continue;
            auto it = ctx.aliases.find(item.star_qualifier);
            if (it != ctx.aliases.end() && it->second) item.star_qualifier = *it->second;
        }
    }
};

}  // namespace

std::string MacroRef::target() const {
    if (kind == Kind::Ref) return args.empty() ? "" : args[0];
    std::string out;
    for (const auto& a : args) {
        if (!out.empty()) out += '.';
        out += a;
    }
    return out;
}

std::optional<std::string> SelectItem::output_name() const {
    if (alias) return alias;
    if (bare_column) return bare_column;
    return std::nullopt;
}

bool SelectBody::references_cte(std::string_view name) const {
    std::string folded = to_lower(name);
    return std::any_of(from_relations.begin(), from_relations.end(),
                       [&](const RelationRef& r) {
                           return r.target == RelationRef::Target::Cte && r.name == folded;
                       });
}

bool SelectBody::has_bare_star() const {
    return std::any_of(select_items.begin(), select_items.end(),
                       [](const SelectItem& it) {
                           return it.is_star && it.star_qualifier.empty();
                       });
}

bool SelectBody::star_over(std::string_view cte) const {
    std::string folded = to_lower(cte);
    for (const auto& it : select_items) {
        if (!it.is_star) continue;
        if (it.star_qualifier.empty()) return true;
        if (it.star_qualifier == folded) return true;
    }
    return false;
}

std::optional<MacroRef> classify_macro(const Token& token) {
    std::string_view text = token.text;
    if (text.size() < 4) return std::nullopt;
    std::string_view inner = text.substr(2, text.size() - 4);
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < inner.size() && (inner[i] == ' ' || inner[i] == '\t' ||
                                    inner[i] == '\n' || inner[i] == '\r'))
            ++i;
    };
    skip_ws();
    size_t word_start = i;
    while (i < inner.size() && (std::isalnum(static_cast<unsigned char>(inner[i])) ||
                                inner[i] == '_'))
        ++i;
    std::string word = to_lower(inner.substr(word_start, i - word_start));
    MacroRef::Kind kind;
    size_t expected_args;
    if (word == "ref") {
        kind = MacroRef::Kind::Ref;
        expected_args = 1;
    } else if (word == "source") {
        kind = MacroRef::Kind::Source;
        expected_args = 2;
    } else {
        return std::nullopt;
    }
    skip_ws();
    if (i >= inner.size() || inner[i] != '(') return std::nullopt;
    ++i;
    std::vector<std::string> args;
    while (true) {
        skip_ws();
        if (i >= inner.size() || inner[i] != '\'') return std::nullopt;
        ++i;
        std::string arg;
        while (i < inner.size()) {
            if (inner[i] == '\'') {
                if (i + 1 < inner.size() && inner[i + 1] == '\'') {
                    arg += '\'';
                    i += 2;
                    continue;
                }
                break;
            }
            arg += inner[i++];
        }
        if (i >= inner.size()) return std::nullopt;
        ++i;  // closing quote
        args.push_back(std::move(arg));
        skip_ws();
        if (i < inner.size() && inner[i] == ',') {
            ++i;
            continue;
        }
        break;
    }
    if (i >= inner.size() || inner[i] != ')') return std::nullopt;
    ++i;
    skip_ws();
    if (i != inner.size()) return std::nullopt;
    if (args.size() != expected_args) return std::nullopt;
    MacroRef mr;
    mr.kind = kind;
    mr.args = std::move(args);
    mr.line = token.line;
    mr.col = token.col;
    return mr;
}

SqlAst parse_model(std::string_view sql) {
    std::vector<Token> tokens = tokenize(sql);
    SqlAst ast;
    for (const Token& t : tokens) {
        if (t.kind != TokenKind::Macro) continue;
        if (std::optional<MacroRef> mr = classify_macro(t)) {
            ast.macro_refs.push_back(*mr);
        } else {
            ast.unsupported_macros.push_back({t.text, t.line, t.col});
        }
    }
    for (std::span<const Token> slice : split_statements(tokens)) {
        StatementParser parser(slice, ast);
        ast.statements.push_back(parser.parse());
    }
    return ast;
}

}  // namespace dataops::sql
