#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dataops/checks_observe.hpp"
#include "dataops/checks_validate.hpp"
#include "dataops/findings.hpp"
#include "dataops/project.hpp"
#include "dataops/registry.hpp"
#include "dataops/timeutil.hpp"

namespace dataops {

// Ambient state the checks depend on, injected so runs are reproducible.
struct RunAdapters {
    CivilTime now;
    std::optional<BranchStatus> branch;
    std::optional<std::map<std::string, RunRecord>> run_records;
    std::vector<Finding> preload_findings;  // e.g. duplicate run records
    std::optional<std::string> as_user;
};

struct StageSummary {
    Stage stage;
    enum class Status { Passed, Failed, Skipped } status = Status::Passed;
    int errors = 0;
    int warnings = 0;
    int advisories = 0;
};

struct PipelineResult {
    std::vector<Finding> findings;
    std::vector<StageSummary> stages;  // the five gate stages, in order
};

// Runs the enabled checks stage by stage (lint, optimize, parse,
// validate, observe). `changed` scopes similarity/advisor work;
// `selected` scopes per-model checks; project-wide checks always see the
// whole snapshot. An empty `stage_filter` runs every stage.
PipelineResult run_pipeline(const ProjectSnapshot& snapshot,
                            const std::set<std::string>& changed,
                            const std::set<std::string>& selected,
                            const std::set<std::string>& stage_filter,
                            const RunAdapters& adapters);

// 0 clean, 1 error findings, 2 configuration/usage error, 3 internal.
int exit_code(const PipelineResult& result);

}  // namespace dataops
