#include "dataops/checks_parse.hpp"

#include <algorithm>
#include <map>

namespace dataops {

namespace {

constexpr const char* kAstParse = "check_ast_parse";
constexpr const char* kColumnUsage = "check_column_usage";
constexpr const char* kDeadCode = "check_dead_code";
constexpr const char* kModelFunctions = "check_model_functions";
constexpr const char* kModelLength = "check_model_length";

std::string fold(std::string_view s) { return sql::to_lower(s); }

const sql::Statement* single_select(const sql::SqlAst& ast) {
    if (ast.statements.size() != 1) return nullptr;
    const sql::Statement& st = ast.statements.front();
    if (st.kind != sql::StatementKind::Select || !st.final_select) return nullptr;
    return &st;
}

std::string statement_kind_name(sql::StatementKind kind) {
    switch (kind) {
        case sql::StatementKind::Select: return "select";
        case sql::StatementKind::Create: return "create";
        case sql::StatementKind::Insert: return "insert";
        case sql::StatementKind::Update: return "update";
        case sql::StatementKind::Delete: return "delete";
        case sql::StatementKind::Other: return "other";
    }
    return "other";
}

}  // namespace

ParseStatus parse_status_for(const ModelUnit& model) {
    ParseStatus status;
    try {
        status.ast = sql::parse_model(model.raw_sql);
    } catch (const sql::LexError& e) {
        status.error = e.what();
        status.error_line = e.line;
        status.error_col = e.col;
    } catch (const sql::ParseError& e) {
        status.error = e.what();
        status.error_line = e.line;
        status.error_col = e.col;
    }
    return status;
}

std::vector<Finding> check_ast_parse(const ModelUnit& model, const ParseStatus& status,
                                     const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (!status.ast) {
        findings.push_back(make_model_finding(kAstParse, Severity::Error, model.name,
                                              "unparseable: " + *status.error,
                                              status.error_line, status.error_col));
        return findings;
    }
    const sql::SqlAst& ast = *status.ast;
    size_t count = ast.statements.size();
    if (count != 1)
        findings.push_back(make_model_finding(
            kAstParse, Severity::Error, model.name,
            "model contains " + std::to_string(count) + " statements; exactly one query per file"));
    for (const auto& st : ast.statements) {
        if (st.kind != sql::StatementKind::Select)
            findings.push_back(make_model_finding(
                kAstParse, Severity::Error, model.name,
                "statement is a " + statement_kind_name(st.kind) +
                    " statement; models must be a single SELECT",
                st.start_line));
    }
    for (const auto& um : ast.unsupported_macros)
        findings.push_back(make_model_finding(
            kAstParse, Severity::Error, model.name,
            "unsupported macro " + um.text + "; only ref('x') and source('a', 'b') are allowed",
            um.line, um.col));

    int total_ctes = 0, total_subqueries = 0, max_arms = 0;
    for (const auto& st : ast.statements) {
        total_ctes += static_cast<int>(st.ctes.size());
        if (st.final_select) {
            total_subqueries += st.final_select->subquery_count;
            max_arms = std::max(max_arms, st.final_select->set_op_arms);
        }
        for (const auto& cte : st.ctes) {
            total_subqueries += cte.body.subquery_count;
            max_arms = std::max(max_arms, cte.body.set_op_arms);
        }
    }
    if (cfg.max_ctes && total_ctes > *cfg.max_ctes)
        findings.push_back(make_model_finding(
            kAstParse, Severity::Error, model.name,
            std::to_string(total_ctes) + " CTEs exceed the budget of " +
                std::to_string(*cfg.max_ctes)));
    if (cfg.max_subqueries && total_subqueries > *cfg.max_subqueries)
        findings.push_back(make_model_finding(
            kAstParse, Severity::Error, model.name,
            std::to_string(total_subqueries) + " subqueries exceed the budget of " +
                std::to_string(*cfg.max_subqueries)));
    if (cfg.max_union_arms && max_arms > *cfg.max_union_arms)
        findings.push_back(make_model_finding(
            kAstParse, Severity::Error, model.name,
            std::to_string(max_arms) + " set-operation arms exceed the budget of " +
                std::to_string(*cfg.max_union_arms)));
    return findings;
}

std::set<std::string> reachable_ctes(const sql::Statement& statement) {
    std::map<std::string, const sql::SelectBody*> bodies;
    for (const auto& cte : statement.ctes) bodies[fold(cte.name)] = &cte.body;
    std::set<std::string> reachable;
    std::vector<const sql::SelectBody*> frontier;
    if (statement.final_select) frontier.push_back(&*statement.final_select);
    while (!frontier.empty()) {
        const sql::SelectBody* body = frontier.back();
        frontier.pop_back();
        for (const auto& rel : body->from_relations) {
            if (rel.target != sql::RelationRef::Target::Cte) continue;
            if (!reachable.insert(rel.name).second) continue;
            auto it = bodies.find(rel.name);
            if (it != bodies.end()) frontier.push_back(it->second);
        }
    }
    return reachable;
}

std::vector<Finding> check_dead_code(const ModelUnit& model, const sql::SqlAst& ast) {
    std::vector<Finding> findings;
    const sql::Statement* st = single_select(ast);
    if (!st) return findings;
    std::set<std::string> reachable = reachable_ctes(*st);
    for (const auto& cte : st->ctes) {
        if (reachable.count(fold(cte.name))) continue;
        findings.push_back(make_model_finding(
            kDeadCode, Severity::Error, model.name,
            "CTE '" + cte.name + "' (lines " + std::to_string(cte.start_line) + "-" +
                std::to_string(cte.end_line) + ") never contributes to the final select",
            cte.start_line));
    }
    return findings;
}

std::vector<Finding> check_column_usage(const ModelUnit& model, const sql::SqlAst& ast) {
    std::vector<Finding> findings;
    const sql::Statement* st = single_select(ast);
    if (!st) return findings;
    std::set<std::string> reachable = reachable_ctes(*st);

    for (size_t i = 0; i < st->ctes.size(); ++i) {
        const sql::CteDef& cte = st->ctes[i];
        std::string cte_name = fold(cte.name);
        if (!reachable.count(cte_name)) continue;  // dead CTEs are reported once
        bool star_output = std::any_of(cte.body.select_items.begin(),
                                       cte.body.select_items.end(),
                                       [](const sql::SelectItem& it) { return it.is_star; });
        if (star_output) continue;

        std::vector<const sql::SelectBody*> downstream;
        for (size_t j = i + 1; j < st->ctes.size(); ++j) downstream.push_back(&st->ctes[j].body);
        downstream.push_back(&*st->final_select);

        for (const auto& item : cte.body.select_items) {
            std::optional<std::string> name = item.output_name();
            if (!name) continue;
            std::string folded = fold(*name);
            bool used = false;
            for (const sql::SelectBody* body : downstream) {
                if (body->referenced_columns.count(folded) ||
                    body->referenced_columns.count(cte_name + "." + folded)) {
                    used = true;
                    break;
                }
                if (body->references_cte(cte_name) && body->star_over(cte_name)) {
                    used = true;
                    break;
                }
            }
            if (!used)
                findings.push_back(make_model_finding(
                    kColumnUsage, Severity::Error, model.name,
                    "CTE '" + cte.name + "' defines column '" + *name +
                        "' but nothing downstream reads it",
                    item.alias ? item.alias_line : item.line,
                    item.alias ? item.alias_col : item.col));
        }
    }
    return findings;
}

std::vector<Finding> check_model_functions(const ModelUnit& model, const sql::SqlAst& ast,
                                           const DependencyGraph& graph) {
    std::vector<Finding> findings;
    if (model.layer == Layer::Staging) {
        for (const auto& macro : ast.macro_refs) {
            if (macro.kind != sql::MacroRef::Kind::Ref) continue;
            findings.push_back(make_model_finding(
                kModelFunctions, Severity::Error, model.name,
                "staging model reads ref('" + macro.args[0] +
                    "'); staging models may read sources only",
                macro.line, macro.col));
        }
        for (const auto& st : ast.statements) {
            std::vector<const sql::SelectBody*> bodies;
            for (const auto& cte : st.ctes) bodies.push_back(&cte.body);
            if (st.final_select) bodies.push_back(&*st.final_select);
            for (const sql::SelectBody* body : bodies) {
                for (const auto& rel : body->from_relations) {
                    if (rel.target != sql::RelationRef::Target::RawTable) continue;
                    findings.push_back(make_model_finding(
                        kModelFunctions, Severity::Error, model.name,
                        "staging model reads table '" + rel.name +
                            "' without a source() macro"));
                }
            }
        }
        // One staging model per source table: the lexicographically first
        // reader is canonical, later ones are flagged.
        NodeId self = model_node(model.name);
        for (const auto& [from, to] : graph.edges) {
            if (from != self || to.kind != NodeId::Kind::Source) continue;
            for (const auto& [other_from, other_to] : graph.edges) {
                if (other_to != to || other_from == self) continue;
                if (other_from.kind != NodeId::Kind::Model) continue;
                auto layer_it = graph.layer_of.find(other_from.name);
                if (layer_it == graph.layer_of.end() || layer_it->second != Layer::Staging)
                    continue;
                if (other_from.name < model.name) {
                    findings.push_back(make_model_finding(
                        kModelFunctions, Severity::Error, model.name,
                        "source " + to.name + " is already staged by model '" +
                            other_from.name + "'; one staging model per source"));
                    break;
                }
            }
        }
    } else {
        for (const auto& macro : ast.macro_refs) {
            if (macro.kind != sql::MacroRef::Kind::Source) continue;
            findings.push_back(make_model_finding(
                kModelFunctions, Severity::Error, model.name,
                layer_name(model.layer) + " model calls source('" + macro.args[0] + "', '" +
                    macro.args[1] + "'); only staging models read sources",
                macro.line, macro.col));
        }
    }
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.line, a.col, a.message) < std::tie(b.line, b.col, b.message);
    });
    return findings;
}

std::vector<Finding> check_model_length(const ModelUnit& model, const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (model.line_count > cfg.max_model_lines)
        findings.push_back(make_model_finding(
            kModelLength, Severity::Error, model.name,
            "model is " + std::to_string(model.line_count) + " lines; the limit is " +
                std::to_string(cfg.max_model_lines)));
    return findings;
}

}  // namespace dataops
