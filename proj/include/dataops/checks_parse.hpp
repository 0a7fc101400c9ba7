#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dataops/config.hpp"
#include "dataops/findings.hpp"
#include "dataops/lineage.hpp"
#include "dataops/parser.hpp"
#include "dataops/project.hpp"

namespace dataops {

struct ParseStatus {
    std::optional<sql::SqlAst> ast;
    std::optional<std::string> error;
    int error_line = 0;
    int error_col = 0;
};

ParseStatus parse_status_for(const ModelUnit& model);

// Statement-count / statement-kind / unsupported-macro / complexity gate.
// A parse error yields a single "unparseable" finding; the caller skips
// the remaining parse-stage checks for that model.
std::vector<Finding> check_ast_parse(const ModelUnit& model, const ParseStatus& status,
                                     const PipelineConfig& cfg);

// CTE output columns that no downstream body ever reads.
std::vector<Finding> check_column_usage(const ModelUnit& model, const sql::SqlAst& ast);

// CTEs unreachable from the final select.
std::vector<Finding> check_dead_code(const ModelUnit& model, const sql::SqlAst& ast);

// Layer discipline: staging reads sources only; everything else never
// calls source(); one staging model per source table.
std::vector<Finding> check_model_functions(const ModelUnit& model, const sql::SqlAst& ast,
                                           const DependencyGraph& graph);

std::vector<Finding> check_model_length(const ModelUnit& model, const PipelineConfig& cfg);

// CTE names (in definition order) reachable from the final select;
// shared by dead-code and column-usage so suppression stays consistent.
std::set<std::string> reachable_ctes(const sql::Statement& statement);

}  // namespace dataops
