#pragma once

#include <string>
#include <vector>

#include "dataops/config.hpp"
#include "dataops/findings.hpp"
#include "dataops/parser.hpp"
#include "dataops/project.hpp"

namespace dataops {

// Output aliases, the model file stem, and double-quoted identifiers must
// be snake_case; a bare unaliased quoted column reference is the one
// allowed passthrough. `ast` may be null when the model did not parse.
std::vector<Finding> check_naming_convention(const ModelUnit& model,
                                             const sql::SqlAst* ast);

// Rule ids: L1 keyword case, L2 trailing whitespace, L3 tab character,
// L4 comma style, L5 missing final newline, L6 blank-line run.
std::vector<Finding> check_sql_lint(const ModelUnit& model, const LintRuleSet& rules);

// Token-level rewrite; string/comment/macro contents are never touched.
// Throws sql::LexError on unlexable input.
std::string format_sql(const std::string& sql, const LintRuleSet& rules);

std::vector<Finding> check_tags(const ModelUnit& model, const PipelineConfig& cfg);

}  // namespace dataops
