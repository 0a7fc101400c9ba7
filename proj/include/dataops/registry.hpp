#pragma once

#include <string>
#include <vector>

#include "dataops/config.hpp"
#include "dataops/findings.hpp"

namespace dataops {

enum class Stage { Lint, Optimize, Parse, Validate, Observe, Deploy };

std::string stage_name(Stage stage);
int stage_rank(Stage stage);

struct CheckDescriptor {
    std::string id;
    Stage stage;
    std::vector<std::string> controls;  // C1..C12
    Severity default_severity;
};

// All gate checks plus the two delivery jobs, in stage order.
const std::vector<CheckDescriptor>& builtin_registry();

const CheckDescriptor* find_check(const std::string& id);

// Per-check severity after config overrides.
Severity effective_severity(const PipelineConfig& cfg, const std::string& check_id);

// Decorates findings with registry controls and applies severity
// overrides (pinned degraded-evidence findings keep their severity).
void apply_registry(std::vector<Finding>& findings, const PipelineConfig& cfg);

}  // namespace dataops
