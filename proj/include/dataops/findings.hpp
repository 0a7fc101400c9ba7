#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dataops {

enum class Severity { Error, Warning, Advisory };

std::string severity_name(Severity s);

struct Finding {
    std::string check_id;
    Severity severity = Severity::Error;
    std::optional<std::string> model;  // absent for project-level findings
    std::optional<int> line;
    std::optional<int> col;
    std::string message;
    std::vector<std::string> controls;
    // Severity is pinned for degraded-evidence findings (missing run data,
    // unknown branch status, ...) which stay warnings regardless of
    // per-check severity overrides.
    bool pinned_severity = false;
    // Stage rank for findings whose check_id is not in the registry
    // (internal-failure and plumbing findings); keeps grouping stable.
    int stage_hint = -1;
};

Finding make_finding(std::string check_id, Severity severity, std::string message);
Finding make_model_finding(std::string check_id, Severity severity,
                           const std::string& model, std::string message,
                           std::optional<int> line = std::nullopt,
                           std::optional<int> col = std::nullopt);

}  // namespace dataops
