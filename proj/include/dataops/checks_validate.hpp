#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dataops/checks_parse.hpp"
#include "dataops/config.hpp"
#include "dataops/findings.hpp"
#include "dataops/lineage.hpp"
#include "dataops/project.hpp"
#include "dataops/timeutil.hpp"

namespace dataops {

struct BranchStatus {
    int behind_base = 0;
    std::string base_branch;
};

// Unknown status (no VCS adapter, no override) degrades to a warning.
std::vector<Finding> check_branch_freshness(const std::optional<BranchStatus>& status,
                                            const PipelineConfig& cfg);

// Whole-project gate: zero parse errors, zero broken refs, zero
// unsupported macros, anywhere.
std::vector<Finding> check_compilation(const ProjectSnapshot& snapshot,
                                       const std::map<std::string, ParseStatus>& statuses,
                                       const std::vector<BrokenRef>& broken);

std::vector<Finding> check_configuration(const ModelUnit& model, const PipelineConfig& cfg);

std::vector<Finding> check_documentation(const ModelUnit& model, const sql::SqlAst* ast,
                                         const PipelineConfig& cfg);

std::vector<Finding> check_freeze_schedule(const CivilTime& now,
                                           const std::vector<FreezeWindow>& windows);

std::vector<Finding> check_materialization(const ModelUnit& model, const PipelineConfig& cfg);

std::vector<Finding> check_model_compliance(const ModelUnit& model, const sql::SqlAst* ast,
                                            const CompliancePolicy& policy);

// Aggregates broken refs, cycles, layer violations and unreferenced
// models into one per-project result.
std::vector<Finding> check_model_dependencies(const DependencyGraph& graph,
                                              const std::vector<BrokenRef>& broken,
                                              const PipelineConfig& cfg);

std::vector<Finding> check_owner(const ModelUnit& model, const ProjectSnapshot& snapshot);

// `as_user` substitutes the submitting user for the model owner when
// resolving the acting team.
std::vector<Finding> check_path_permissions(const ModelUnit& model,
                                            const ProjectSnapshot& snapshot,
                                            const PipelineConfig& cfg,
                                            const std::optional<std::string>& as_user);

// Glob grammar: '*' matches a run of non-dot characters.
bool schema_glob_match(const std::string& pattern, const std::string& value);

}  // namespace dataops
