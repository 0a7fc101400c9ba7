#include "dataops/checks_lint.hpp"

#include <algorithm>
#include <set>

namespace dataops {

namespace {

using sql::Token;
using sql::TokenKind;

constexpr const char* kNaming = "check_naming_convention";
constexpr const char* kLint = "check_sql_lint";
constexpr const char* kTags = "check_tags";

bool is_snake_case(std::string_view s) {
    if (s.empty()) return false;
    if (!(s[0] >= 'a' && s[0] <= 'z')) return false;
    for (char c : s)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    return true;
}

bool has_upper(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

void collect_body_aliases(const sql::SelectBody& body,
                          std::vector<const sql::SelectItem*>& items) {
    for (const auto& item : body.select_items) items.push_back(&item);
}

int newline_count(const std::string& s) {
    return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

std::vector<Finding> check_naming_convention(const ModelUnit& model,
                                             const sql::SqlAst* ast) {
    std::vector<Finding> findings;
    if (!is_snake_case(model.name))
        findings.push_back(make_model_finding(
            kNaming, Severity::Error, model.name,
            "model file name '" + model.name + "' is not snake_case"));
    if (!ast) return findings;

    std::vector<const sql::SelectItem*> items;
    for (const auto& st : ast->statements) {
        for (const auto& cte : st.ctes) collect_body_aliases(cte.body, items);
        if (st.final_select) collect_body_aliases(*st.final_select, items);
    }

    std::set<std::pair<int, int>> alias_positions;
    std::set<std::pair<int, int>> passthrough_positions;
    std::vector<Finding> alias_findings;
    for (const sql::SelectItem* item : items) {
        if (item->alias) {
            alias_positions.insert({item->alias_line, item->alias_col});
            if (!is_snake_case(*item->alias))
                alias_findings.push_back(make_model_finding(
                    kNaming, Severity::Error, model.name,
                    "column alias '" + *item->alias + "' is not snake_case",
                    item->alias_line, item->alias_col));
        } else if (item->bare_column) {
            // Unaliased raw-column passthrough: quoted source columns pass.
            for (const auto& tok : item->expr)
                if (tok.kind == TokenKind::QuotedIdentifier)
                    passthrough_positions.insert({tok.line, tok.col});
        }
    }
    std::vector<Finding> quoted_findings;
    for (const Token& tok : sql::tokenize(model.raw_sql)) {
        if (tok.kind != TokenKind::QuotedIdentifier) continue;
        std::string inner = tok.text.size() >= 2 ? tok.text.substr(1, tok.text.size() - 2)
                                                 : tok.text;
        if (!has_upper(inner)) continue;
        if (alias_positions.count({tok.line, tok.col})) continue;  // alias rule covers it
        if (passthrough_positions.count({tok.line, tok.col})) continue;
        quoted_findings.push_back(make_model_finding(
            kNaming, Severity::Error, model.name,
            "quoted identifier \"" + inner + "\" contains uppercase letters", tok.line,
            tok.col));
    }
    auto by_position = [](const Finding& a, const Finding& b) {
        return std::tie(*a.line, *a.col) < std::tie(*b.line, *b.col);
    };
    std::sort(alias_findings.begin(), alias_findings.end(), by_position);
    std::sort(quoted_findings.begin(), quoted_findings.end(), by_position);
    std::vector<Finding> positioned;
    positioned.insert(positioned.end(), alias_findings.begin(), alias_findings.end());
    positioned.insert(positioned.end(), quoted_findings.begin(), quoted_findings.end());
    std::stable_sort(positioned.begin(), positioned.end(), by_position);
    findings.insert(findings.end(), positioned.begin(), positioned.end());
    return findings;
}

std::vector<Finding> check_sql_lint(const ModelUnit& model, const LintRuleSet& rules) {
    std::vector<Finding> findings;
    std::vector<Token> tokens;
    try {
        tokens = sql::tokenize(model.raw_sql);
    } catch (const sql::LexError& e) {
        findings.push_back(make_model_finding(kLint, Severity::Error, model.name,
                                              std::string("unlexable: ") + e.what(),
                                              e.line, e.col));
        return findings;
    }
    auto add = [&](const char* rule, const std::string& msg, int line, int col) {
        findings.push_back(make_model_finding(kLint, Severity::Error, model.name,
                                              std::string(rule) + ": " + msg, line, col));
    };
    const bool want_upper = rules.keyword_case == LintRuleSet::KeywordCase::Upper;
    for (size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.kind == TokenKind::Keyword) {
            std::string expected = want_upper ? sql::to_upper(tok.text) : sql::to_lower(tok.text);
            if (tok.text != expected)
                add("L1", "keyword '" + tok.text + "' should be '" + expected + "'",
                    tok.line, tok.col);
        }
        if (tok.kind == TokenKind::Whitespace) {
            if (rules.forbid_tabs && tok.text.find('\t') != std::string::npos)
                add("L3", "tab character", tok.line, tok.col);
            // Trailing whitespace: horizontal characters right before a
            // newline, or at end of file.
            for (size_t k = 0; k < tok.text.size(); ++k) {
                bool at_eol = (k + 1 < tok.text.size() && tok.text[k + 1] == '\n') ||
                              (k + 1 == tok.text.size() && i + 1 == tokens.size() &&
                               tok.text[k] != '\n');
                if (at_eol && (tok.text[k] == ' ' || tok.text[k] == '\t' ||
                               tok.text[k] == '\r')) {
                    add("L2", "trailing whitespace", tok.line, tok.col);
                    break;
                }
            }
            int newlines = newline_count(tok.text);
            if (newlines > rules.max_blank_run + 1)
                add("L6",
                    "run of " + std::to_string(newlines - 1) + " blank lines exceeds " +
                        std::to_string(rules.max_blank_run),
                    tok.line, tok.col);
        }
        if (tok.kind == TokenKind::Comma) {
            bool prev_is_ws = i > 0 && tokens[i - 1].kind == TokenKind::Whitespace;
            bool prev_content_is_comment =
                i > 1 && prev_is_ws && tokens[i - 2].kind == TokenKind::Comment;
            if (rules.comma_style == LintRuleSet::CommaStyle::Trailing) {
                if (prev_is_ws && !prev_content_is_comment)
                    add("L4", "comma should trail the previous item", tok.line, tok.col);
            } else {
                bool next_ws_newline = i + 1 < tokens.size() &&
                                       tokens[i + 1].kind == TokenKind::Whitespace &&
                                       tokens[i + 1].text.find('\n') != std::string::npos;
                if (next_ws_newline)
                    add("L4", "comma should lead the next line", tok.line, tok.col);
            }
        }
    }
    if (rules.require_final_newline && !model.raw_sql.empty() &&
        model.raw_sql.back() != '\n') {
        int last_line = tokens.empty() ? 1 : tokens.back().line;
        add("L5", "missing final newline", last_line, 1);
    }
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(*a.line, *a.col, a.message) < std::tie(*b.line, *b.col, b.message);
    });
    return findings;
}

std::string format_sql(const std::string& sql, const LintRuleSet& rules) {
    std::vector<Token> tokens = sql::tokenize(sql);  // LexError propagates

    const bool want_upper = rules.keyword_case == LintRuleSet::KeywordCase::Upper;
    for (Token& tok : tokens) {
        if (tok.kind == TokenKind::Keyword)
            tok.text = want_upper ? sql::to_upper(tok.text) : sql::to_lower(tok.text);
        if (tok.kind == TokenKind::Whitespace) {
            std::string expanded;
            for (char c : tok.text) {
                if (c == '\t') expanded += "    ";
                else expanded += c;
            }
            // Drop horizontal whitespace that sits right before a newline.
            std::string cleaned;
            for (char c : expanded) {
                if (c == '\n') {
                    while (!cleaned.empty() &&
                           (cleaned.back() == ' ' || cleaned.back() == '\r'))
                        cleaned.pop_back();
                }
                if (c != '\r') cleaned += c;
            }
            tok.text = cleaned;
        }
    }

    // Comma style.
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) {
        Token tok = tokens[i];
        if (tok.kind != TokenKind::Comma) {
            out.push_back(std::move(tok));
            continue;
        }
        bool prev_is_ws = !out.empty() && out.back().kind == TokenKind::Whitespace;
        bool prev_content_is_comment = out.size() > 1 && prev_is_ws &&
                                       out[out.size() - 2].kind == TokenKind::Comment;
        if (rules.comma_style == LintRuleSet::CommaStyle::Trailing) {
            if (prev_is_ws && !prev_content_is_comment) {
                Token ws = out.back();
                out.pop_back();
                if (ws.text.find('\n') != std::string::npos) {
                    out.push_back(tok);   // attach comma to the previous item
                    out.push_back(ws);    // newline (and indentation) follows it
                } else {
                    out.push_back(tok);   // "a , b" -> "a, b"
                }
                continue;
            }
            out.push_back(std::move(tok));
        } else {
            // Leading style: a comma that ends a line moves below the break.
            if (prev_is_ws && !prev_content_is_comment &&
                out.back().text.find('\n') == std::string::npos)
                out.pop_back();  // "a ," -> "a,"
            if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Whitespace &&
                tokens[i + 1].text.find('\n') != std::string::npos) {
                out.push_back(tokens[i + 1]);
                out.push_back(std::move(tok));
                ++i;
                continue;
            }
            out.push_back(std::move(tok));
        }
    }
    tokens = std::move(out);

    // Merge adjacent whitespace created by comma moves.
    out.clear();
    for (Token& tok : tokens) {
        if (tok.kind == TokenKind::Whitespace && !out.empty() &&
            out.back().kind == TokenKind::Whitespace) {
            out.back().text += tok.text;
            continue;
        }
        out.push_back(std::move(tok));
    }
    tokens = std::move(out);

    // A comma must be followed by a space unless a line break follows.
    out.clear();
    for (size_t i = 0; i < tokens.size(); ++i) {
        out.push_back(tokens[i]);
        if (tokens[i].kind != TokenKind::Comma) continue;
        if (i + 1 >= tokens.size()) continue;
        const Token& next = tokens[i + 1];
        if (next.kind == TokenKind::Whitespace) {
            if (next.text.find('\n') == std::string::npos && next.text != " ") {
                Token space{TokenKind::Whitespace, " ", 0, 0};
                out.push_back(space);
                ++i;  // drop the original run
            }
            continue;
        }
        out.push_back({TokenKind::Whitespace, " ", 0, 0});
    }
    tokens = std::move(out);

    // Collapse blank-line runs.
    for (Token& tok : tokens) {
        if (tok.kind != TokenKind::Whitespace) continue;
        int newlines = newline_count(tok.text);
        if (newlines <= rules.max_blank_run + 1) continue;
        std::string tail = tok.text.substr(tok.text.rfind('\n') + 1);
        tok.text = std::string(static_cast<size_t>(rules.max_blank_run) + 1, '\n') + tail;
    }

    // Trailing horizontal space at end of file would survive the newline
    // append below, so trim it off the final whitespace run.
    if (!tokens.empty() && tokens.back().kind == TokenKind::Whitespace) {
        std::string& text = tokens.back().text;
        while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
            text.pop_back();
        if (text.empty()) tokens.pop_back();
    }

    std::string result;
    for (const Token& tok : tokens) result += tok.text;
    if (!result.empty() && result.back() != '\n') result += '\n';
    return result;
}

std::vector<Finding> check_tags(const ModelUnit& model, const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (cfg.tag_namespaces.empty()) return findings;
    std::vector<std::string> tags;
    if (model.properties) tags = model.properties->tags;
    for (const auto& ns : cfg.tag_namespaces) {
        std::vector<std::string> values;
        for (const auto& tag : tags) {
            size_t colon = tag.find(':');
            if (colon == std::string::npos) continue;
            if (tag.substr(0, colon) == ns.name) values.push_back(tag.substr(colon + 1));
        }
        if (ns.required && values.empty()) {
            findings.push_back(make_model_finding(
                kTags, Severity::Error, model.name,
                "missing required tag namespace '" + ns.name + "'"));
            continue;
        }
        if (!ns.allowed.empty()) {
            for (const auto& v : values) {
                if (std::find(ns.allowed.begin(), ns.allowed.end(), v) == ns.allowed.end())
                    findings.push_back(make_model_finding(
                        kTags, Severity::Error, model.name,
                        "tag '" + ns.name + ":" + v + "' is outside the allowed set"));
            }
        }
        if (ns.single_valued && values.size() > 1)
            findings.push_back(make_model_finding(
                kTags, Severity::Error, model.name,
                "tag namespace '" + ns.name + "' carries " +
                    std::to_string(values.size()) + " values but is single-valued"));
    }
    return findings;
}

}  // namespace dataops
