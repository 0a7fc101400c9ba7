#include "dataops/report.hpp"

#include <sstream>

#include "json.hpp"

namespace dataops {

namespace {

const char* status_name(StageSummary::Status status) {
    switch (status) {
        case StageSummary::Status::Passed: return "passed";
        case StageSummary::Status::Failed: return "failed";
        case StageSummary::Status::Skipped: return "skipped";
    }
    return "passed";
}

}  // namespace

std::string report_to_json(const PipelineResult& result, const std::vector<RtmRow>& rtm) {
    nlohmann::json doc;
    doc["version"] = 1;

    nlohmann::json per_stage = nlohmann::json::object();
    for (const auto& stage : result.stages) {
        per_stage[stage_name(stage.stage)] = {
            {"status", status_name(stage.status)},
            {"errors", stage.errors},
            {"warnings", stage.warnings},
            {"advisories", stage.advisories},
        };
    }
    int errors = 0, warnings = 0, advisories = 0;
    for (const auto& f : result.findings) {
        if (f.severity == Severity::Error) ++errors;
        else if (f.severity == Severity::Warning) ++warnings;
        else ++advisories;
    }
    doc["summary"] = {
        {"per_stage", per_stage},
        {"per_severity",
         {{"error", errors}, {"warning", warnings}, {"advisory", advisories}}},
    };

    doc["findings"] = nlohmann::json::array();
    for (const auto& f : result.findings) {
        nlohmann::json entry;
        entry["check_id"] = f.check_id;
        entry["severity"] = severity_name(f.severity);
        if (f.model) entry["model"] = *f.model;
        if (f.line) entry["line"] = *f.line;
        if (f.col) entry["col"] = *f.col;
        entry["message"] = f.message;
        entry["controls"] = f.controls;
        doc["findings"].push_back(entry);
    }

    doc["rtm"] = nlohmann::json::array();
    for (const auto& row : rtm) {
        doc["rtm"].push_back({
            {"control_id", row.control_id},
            {"control_name", row.control_name},
            {"mapped_checks", row.mapped_checks},
            {"status", row.status},
        });
    }
    return doc.dump(2) + "\n";
}

std::string report_to_text(const PipelineResult& result, bool color) {
    const char* reset = color ? "\x1b[0m" : "";
    const char* red = color ? "\x1b[31m" : "";
    const char* yellow = color ? "\x1b[33m" : "";
    const char* dim = color ? "\x1b[2m" : "";
    const char* bold = color ? "\x1b[1m" : "";

    std::ostringstream out;
    size_t next_finding = 0;
    for (const auto& stage : result.stages) {
        out << bold << stage_name(stage.stage) << reset << ": " << status_name(stage.status);
        int total = stage.errors + stage.warnings + stage.advisories;
        if (total > 0)
            out << " (" << stage.errors << " errors, " << stage.warnings << " warnings, "
                << stage.advisories << " advisories)";
        out << "\n";
        // Findings arrive sorted by stage, so they can be consumed in order.
        size_t count = static_cast<size_t>(total);
        for (size_t i = 0; i < count && next_finding < result.findings.size(); ++i) {
            const Finding& f = result.findings[next_finding++];
            const char* tone = f.severity == Severity::Error
                                   ? red
                                   : (f.severity == Severity::Warning ? yellow : dim);
            out << "  " << tone << severity_name(f.severity) << reset << "  ";
            if (f.model) {
                out << *f.model;
                if (f.line) {
                    out << ":" << *f.line;
                    if (f.col) out << ":" << *f.col;
                }
                out << "  ";
            }
            out << f.check_id;
            if (!f.controls.empty()) {
                out << " [";
                for (size_t k = 0; k < f.controls.size(); ++k)
                    out << (k ? "," : "") << f.controls[k];
                out << "]";
            }
            out << "  " << f.message << "\n";
        }
    }
    int errors = 0, warnings = 0, advisories = 0;
    for (const auto& f : result.findings) {
        if (f.severity == Severity::Error) ++errors;
        else if (f.severity == Severity::Warning) ++warnings;
        else ++advisories;
    }
    out << "summary: " << errors << " errors, " << warnings << " warnings, " << advisories
        << " advisories\n";
    return out.str();
}

}  // namespace dataops
