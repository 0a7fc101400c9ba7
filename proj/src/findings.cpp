#include "dataops/findings.hpp"

namespace dataops {

std::string severity_name(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Advisory: return "advisory";
    }
    return "error";
}

Finding make_finding(std::string check_id, Severity severity, std::string message) {
    Finding f;
    f.check_id = std::move(check_id);
    f.severity = severity;
    f.message = std::move(message);
    return f;
}

Finding make_model_finding(std::string check_id, Severity severity,
                           const std::string& model, std::string message,
                           std::optional<int> line, std::optional<int> col) {
    Finding f = make_finding(std::move(check_id), severity, std::move(message));
    f.model = model;
    f.line = line;
    f.col = col;
    return f;
}

}  // namespace dataops
