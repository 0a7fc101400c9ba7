#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataops/lexer.hpp"

namespace dataops::sql {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line, int col)
        : std::runtime_error(std::move(msg)), line(line), col(col) {}
    int line;
    int col;
};

struct MacroRef {
    enum class Kind { Ref, Source };
    Kind kind;
    std::vector<std::string> args;  // 1 for ref, 2 for source
    int line = 0;
    int col = 0;

    std::string target() const;  // "model" or "source.table"
};

struct RelationRef {
    enum class Target { Cte, Macro, RawTable };
    Target target;
    std::string name;               // CTE name or dotted raw name
    std::optional<MacroRef> macro;  // set when target == Macro
};

struct SelectItem {
    std::vector<Token> expr;            // non-trivia expression tokens
    std::optional<std::string> alias;
    bool alias_quoted = false;
    int alias_line = 0;
    int alias_col = 0;
    bool is_star = false;
    std::string star_qualifier;          // for "x.*" items
    std::optional<std::string> bare_column;  // unaliased plain column ref
    int line = 0;
    int col = 0;

    // The output column name this item defines, when derivable.
    std::optional<std::string> output_name() const;
};

struct SelectBody {
    std::vector<SelectItem> select_items;        // first set-op arm only
    std::vector<RelationRef> from_relations;     // subquery relations flattened in
    std::set<std::string> referenced_columns;    // "col" and "cte.col" forms
    int set_op_arms = 1;
    int subquery_count = 0;

    bool references_cte(std::string_view name) const;
    bool has_bare_star() const;
    bool star_over(std::string_view cte) const;  // "*" or "cte.*"
};

struct CteDef {
    std::string name;
    SelectBody body;
    int start_line = 0;
    int end_line = 0;
};

enum class StatementKind { Select, Create, Insert, Update, Delete, Other };

struct Statement {
    StatementKind kind = StatementKind::Other;
    std::vector<CteDef> ctes;
    std::optional<SelectBody> final_select;
    int start_line = 0;
    int end_line = 0;
};

struct UnsupportedMacro {
    std::string text;
    int line = 0;
    int col = 0;
};

struct SqlAst {
    std::vector<Statement> statements;
    std::vector<MacroRef> macro_refs;
    std::vector<UnsupportedMacro> unsupported_macros;
};

// Parses one model file. Throws LexError or ParseError with a location;
// never crashes on arbitrary input.
SqlAst parse_model(std::string_view sql);

// Classifies the contents of one {{ ... }} token.
std::optional<MacroRef> classify_macro(const Token& token);

}  // namespace dataops::sql
