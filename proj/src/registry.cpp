#include "dataops/registry.hpp"

namespace dataops {

std::string stage_name(Stage stage) {
    switch (stage) {
        case Stage::Lint: return "lint";
        case Stage::Optimize: return "optimize";
        case Stage::Parse: return "parse";
        case Stage::Validate: return "validate";
        case Stage::Observe: return "observe";
        case Stage::Deploy: return "deploy";
    }
    return "lint";
}

int stage_rank(Stage stage) { return static_cast<int>(stage); }

const std::vector<CheckDescriptor>& builtin_registry() {
    static const std::vector<CheckDescriptor> registry = {
        {"check_naming_convention", Stage::Lint, {"C2"}, Severity::Error},
        {"check_sql_lint", Stage::Lint, {"C2"}, Severity::Error},
        {"check_tags", Stage::Lint, {"C3"}, Severity::Error},
        {"check_ai_feedback", Stage::Optimize, {"C9"}, Severity::Advisory},
        {"check_vector_similarity", Stage::Optimize, {"C7"}, Severity::Warning},
        {"check_ast_parse", Stage::Parse, {"C6"}, Severity::Error},
        {"check_column_usage", Stage::Parse, {"C6"}, Severity::Error},
        {"check_dead_code", Stage::Parse, {"C6"}, Severity::Error},
        {"check_model_functions", Stage::Parse, {"C6"}, Severity::Error},
        {"check_model_length", Stage::Parse, {"C6"}, Severity::Error},
        {"check_branch_freshness", Stage::Validate, {"C1"}, Severity::Error},
        {"check_compilation", Stage::Validate, {"C6"}, Severity::Error},
        {"check_configuration", Stage::Validate, {"C6"}, Severity::Error},
        {"check_documentation", Stage::Validate, {"C3"}, Severity::Error},
        {"check_freeze_schedule", Stage::Validate, {"C1"}, Severity::Error},
        {"check_materialization", Stage::Validate, {"C6"}, Severity::Error},
        {"check_model_compliance", Stage::Validate, {"C6"}, Severity::Error},
        {"check_model_dependencies", Stage::Validate, {"C6"}, Severity::Error},
        {"check_owner", Stage::Validate, {"C4"}, Severity::Error},
        {"check_path_permissions", Stage::Validate, {"C4"}, Severity::Error},
        {"check_configured_test", Stage::Observe, {"C5"}, Severity::Error},
        {"check_runtime_threshold", Stage::Observe, {"C8"}, Severity::Error},
        {"check_test_run", Stage::Observe, {"C5"}, Severity::Error},
        {"check_uat_run", Stage::Observe, {"C5"}, Severity::Error},
        {"run_production", Stage::Deploy, {"C11"}, Severity::Error},
        {"run_documentation", Stage::Deploy, {"C10"}, Severity::Error},
    };
    return registry;
}

const CheckDescriptor* find_check(const std::string& id) {
    for (const auto& check : builtin_registry())
        if (check.id == id) return &check;
    return nullptr;
}

Severity effective_severity(const PipelineConfig& cfg, const std::string& check_id) {
    auto it = cfg.check_overrides.find(check_id);
    if (it != cfg.check_overrides.end() && it->second.severity) return *it->second.severity;
    const CheckDescriptor* check = find_check(check_id);
    return check ? check->default_severity : Severity::Error;
}

void apply_registry(std::vector<Finding>& findings, const PipelineConfig& cfg) {
    for (auto& f : findings) {
        const CheckDescriptor* check = find_check(f.check_id);
        if (!check) continue;  // plumbing findings carry no controls
        f.controls = check->controls;
        if (!f.pinned_severity) f.severity = effective_severity(cfg, f.check_id);
    }
}

}  // namespace dataops
