#include "dataops/checks_validate.hpp"

#include <algorithm>
#include <regex>

namespace dataops {

namespace {

constexpr const char* kFreshness = "check_branch_freshness";
constexpr const char* kCompilation = "check_compilation";
constexpr const char* kConfiguration = "check_configuration";
constexpr const char* kDocumentation = "check_documentation";
constexpr const char* kFreeze = "check_freeze_schedule";
constexpr const char* kMaterialization = "check_materialization";
constexpr const char* kCompliance = "check_model_compliance";
constexpr const char* kOwner = "check_owner";
constexpr const char* kPermissions = "check_path_permissions";

const std::vector<std::string>& valid_materializations() {
    static const std::vector<std::string> kinds = {"table", "view", "incremental",
                                                   "ephemeral"};
    return kinds;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

// Named output columns of the final select; empty when the model is not
// a single parsed SELECT.
std::vector<std::pair<std::string, const sql::SelectItem*>> final_output_columns(
    const sql::SqlAst* ast) {
    std::vector<std::pair<std::string, const sql::SelectItem*>> out;
    if (!ast || ast->statements.size() != 1) return out;
    const sql::Statement& st = ast->statements.front();
    if (!st.final_select) return out;
    for (const auto& item : st.final_select->select_items) {
        if (auto name = item.output_name()) out.emplace_back(*name, &item);
    }
    return out;
}

bool star_only_select(const sql::SqlAst* ast) {
    if (!ast || ast->statements.size() != 1) return false;
    const sql::Statement& st = ast->statements.front();
    if (!st.final_select || st.final_select->select_items.empty()) return false;
    return std::all_of(st.final_select->select_items.begin(),
                       st.final_select->select_items.end(),
                       [](const sql::SelectItem& it) { return it.is_star; });
}

}  // namespace

std::vector<Finding> check_branch_freshness(const std::optional<BranchStatus>& status,
                                            const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (!status) {
        Finding f = make_finding(kFreshness, Severity::Warning,
                                 "branch freshness unknown: no VCS adapter result and no "
                                 "--behind-base override");
        f.pinned_severity = true;
        findings.push_back(std::move(f));
        return findings;
    }
    if (status->behind_base > cfg.max_behind)
        findings.push_back(make_finding(
            kFreshness, Severity::Error,
            "branch is " + std::to_string(status->behind_base) + " commits behind " +
                (status->base_branch.empty() ? cfg.base_branch : status->base_branch) +
                " (allowed: " + std::to_string(cfg.max_behind) + ")"));
    return findings;
}

std::vector<Finding> check_compilation(const ProjectSnapshot& snapshot,
                                       const std::map<std::string, ParseStatus>& statuses,
                                       const std::vector<BrokenRef>& broken) {
    std::vector<Finding> findings;
    for (const auto& model : snapshot.models) {
        auto it = statuses.find(model.name);
        if (it == statuses.end()) continue;
        if (it->second.error) {
            findings.push_back(make_model_finding(
                kCompilation, Severity::Error, model.name,
                "project does not compile: " + *it->second.error, it->second.error_line,
                it->second.error_col));
            continue;
        }
        for (const auto& um : it->second.ast->unsupported_macros)
            findings.push_back(make_model_finding(
                kCompilation, Severity::Error, model.name,
                "project does not compile: unsupported macro " + um.text, um.line, um.col));
    }
    for (const auto& br : broken)
        findings.push_back(make_model_finding(
            kCompilation, Severity::Error, br.model,
            "project does not compile: " + br.target, br.line, br.col));
    return findings;
}

std::vector<Finding> check_configuration(const ModelUnit& model, const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (!model.properties) {
        findings.push_back(make_model_finding(
            kConfiguration, Severity::Error, model.name,
            "model has no properties entry in any schema.yml"));
        return findings;
    }
    const ModelProperties& props = *model.properties;
    for (const auto& key : props.extra_keys)
        findings.push_back(make_model_finding(
            kConfiguration, Severity::Error, model.name,
            "unsupported properties key '" + key + "'"));
    for (const auto& key : cfg.required_property_keys) {
        bool present = false;
        if (key == "description") present = props.description.has_value();
        else if (key == "owner") present = props.owner.has_value();
        else if (key == "materialized") present = props.materialized.has_value();
        else if (key == "target_schema") present = props.target_schema.has_value();
        else if (key == "tags") present = !props.tags.empty();
        else if (key == "tests") present = !props.tests.empty();
        else if (key == "columns") present = !props.columns.empty();
        else if (key == "meta") present = !props.meta.empty();
        if (!present)
            findings.push_back(make_model_finding(
                kConfiguration, Severity::Error, model.name,
                "missing required properties key '" + key + "'"));
    }
    if (props.materialized) {
        const auto& kinds = valid_materializations();
        if (std::find(kinds.begin(), kinds.end(), *props.materialized) == kinds.end())
            findings.push_back(make_model_finding(
                kConfiguration, Severity::Error, model.name,
                "materialized value '" + *props.materialized +
                    "' is not one of table, view, incremental, ephemeral"));
    }
    return findings;
}

std::vector<Finding> check_documentation(const ModelUnit& model, const sql::SqlAst* ast,
                                         const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    const std::string description =
        model.properties && model.properties->description ? *model.properties->description
                                                          : "";
    if (is_blank(description)) {
        findings.push_back(make_model_finding(kDocumentation, Severity::Error, model.name,
                                              "model has no description"));
    } else if (static_cast<int>(description.size()) < cfg.min_description_chars) {
        findings.push_back(make_model_finding(
            kDocumentation, Severity::Error, model.name,
            "description is " + std::to_string(description.size()) +
                " characters; at least " + std::to_string(cfg.min_description_chars) +
                " expected"));
    }
    if (cfg.require_column_docs && !star_only_select(ast)) {
        for (const auto& [name, item] : final_output_columns(ast)) {
            std::string doc;
            if (model.properties) {
                for (const auto& [col, text] : model.properties->columns)
                    if (sql::to_lower(col) == sql::to_lower(name)) doc = text;
            }
            if (is_blank(doc))
                findings.push_back(make_model_finding(
                    kDocumentation, Severity::Error, model.name,
                    "output column '" + name + "' has no documentation entry",
                    item->alias ? item->alias_line : item->line));
        }
    }
    return findings;
}

std::vector<Finding> check_freeze_schedule(const CivilTime& now,
                                           const std::vector<FreezeWindow>& windows) {
    std::vector<Finding> findings;
    const std::string today = iso_date(now);
    const std::string weekday = weekday_name(now);
    for (const auto& window : windows) {
        bool hit = std::find(window.weekdays.begin(), window.weekdays.end(), weekday) !=
                   window.weekdays.end();
        if (!hit)
            hit = std::find(window.dates.begin(), window.dates.end(), today) !=
                  window.dates.end();
        if (hit) {
            findings.push_back(make_finding(
                kFreeze, Severity::Error,
                "submissions are frozen on " + today + " (" + weekday + ")" +
                    (window.reason.empty() ? "" : ": " + window.reason)));
            break;
        }
    }
    return findings;
}

std::vector<Finding> check_materialization(const ModelUnit& model, const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (!model.properties || !model.properties->materialized) return findings;
    const std::string& kind = *model.properties->materialized;
    const auto& valid = valid_materializations();
    if (std::find(valid.begin(), valid.end(), kind) == valid.end())
        return findings;  // invalid values are a configuration finding
    auto rules = cfg.materialization_rules.find(layer_name(model.layer));
    if (rules == cfg.materialization_rules.end()) return findings;
    if (!rules->second.count(kind))
        findings.push_back(make_model_finding(
            kMaterialization, Severity::Error, model.name,
            "materialization '" + kind + "' is not allowed in the " +
                layer_name(model.layer) + " layer"));
    return findings;
}

std::vector<Finding> check_model_compliance(const ModelUnit& model, const sql::SqlAst* ast,
                                            const CompliancePolicy& policy) {
    std::vector<Finding> findings;
    if (policy.pii_patterns.empty()) return findings;

    bool model_approved = false;
    if (model.properties) {
        auto it = model.properties->meta.find(policy.approval_meta_key);
        model_approved = it != model.properties->meta.end() && it->second == "true";
    }
    if (model_approved) return findings;

    std::vector<std::regex> patterns;
    for (const auto& p : policy.pii_patterns)
        patterns.emplace_back(p, std::regex::icase);

    for (const auto& [name, item] : final_output_columns(ast)) {
        bool column_approved = false;
        if (model.properties) {
            for (const auto& [col, doc] : model.properties->columns) {
                if (sql::to_lower(col) != sql::to_lower(name)) continue;
                if (doc.find(policy.approval_meta_key) != std::string::npos)
                    column_approved = true;
            }
        }
        if (column_approved) continue;
        for (size_t i = 0; i < patterns.size(); ++i) {
            if (!std::regex_search(name, patterns[i])) continue;
            findings.push_back(make_model_finding(
                kCompliance, Severity::Error, model.name,
                "output column '" + name + "' matches sensitive-data pattern '" +
                    policy.pii_patterns[i] + "' and carries no approval",
                item->alias ? item->alias_line : item->line));
            break;
        }
    }
    return findings;
}

std::vector<Finding> check_model_dependencies(const DependencyGraph& graph,
                                              const std::vector<BrokenRef>& broken,
                                              const PipelineConfig& cfg) {
    constexpr const char* kDependencies = "check_model_dependencies";
    std::vector<Finding> findings;
    for (const auto& br : broken)
        findings.push_back(make_model_finding(kDependencies, Severity::Error, br.model,
                                              "broken reference: " + br.target, br.line,
                                              br.col));
    for (const auto& cycle : detect_cycles(graph)) {
        std::string path;
        for (const auto& node : cycle) {
            if (!path.empty()) path += " -> ";
            path += node.name;
        }
        path += " -> " + cycle.front().name;
        findings.push_back(make_finding(kDependencies, Severity::Error,
                                        "circular dependency: " + path));
    }
    for (auto& f : layer_violations(graph, cfg)) findings.push_back(std::move(f));
    for (auto& f : unreferenced_models(graph)) findings.push_back(std::move(f));
    return findings;
}

std::vector<Finding> check_owner(const ModelUnit& model, const ProjectSnapshot& snapshot) {
    std::vector<Finding> findings;
    const std::optional<std::string> owner =
        model.properties ? model.properties->owner : std::nullopt;
    if (!owner || owner->empty()) {
        findings.push_back(make_model_finding(kOwner, Severity::Error, model.name,
                                              "model has no designated owner"));
        return findings;
    }
    if (!snapshot.owner_roster.count(*owner))
        findings.push_back(make_model_finding(
            kOwner, Severity::Error, model.name,
            "owner '" + *owner + "' is not on the active roster; assign a new owner"));
    return findings;
}

bool schema_glob_match(const std::string& pattern, const std::string& value) {
    size_t pi = 0, vi = 0;
    std::optional<size_t> star_pi;
    size_t star_vi = 0;
    while (vi < value.size()) {
        if (pi < pattern.size() && pattern[pi] == '*') {
            star_pi = pi++;
            star_vi = vi;
            continue;
        }
        if (pi < pattern.size() && pattern[pi] == value[vi]) {
            ++pi;
            ++vi;
            continue;
        }
        if (star_pi && value[star_vi] != '.') {
            pi = *star_pi + 1;
            vi = ++star_vi;
            continue;
        }
        return false;
    }
    while (pi < pattern.size() && pattern[pi] == '*') ++pi;
    return pi == pattern.size();
}

std::vector<Finding> check_path_permissions(const ModelUnit& model,
                                            const ProjectSnapshot& snapshot,
                                            const PipelineConfig& cfg,
                                            const std::optional<std::string>& as_user) {
    std::vector<Finding> findings;
    if (cfg.permissions.empty()) return findings;  // no permission map configured
    std::optional<std::string> identity = as_user;
    if (!identity && model.properties && model.properties->owner)
        identity = model.properties->owner;

    std::optional<std::string> team;
    if (identity) {
        auto it = snapshot.team_of_owner.find(*identity);
        if (it != snapshot.team_of_owner.end()) team = it->second;
    }
    if (!team) {
        Finding f = make_model_finding(
            kPermissions, Severity::Warning, model.name,
            identity ? "team unknown for '" + *identity + "'; cannot evaluate schema permissions"
                     : "team unknown: model has no owner; cannot evaluate schema permissions");
        f.pinned_severity = true;
        findings.push_back(std::move(f));
        return findings;
    }
    const std::string schema = model.properties && model.properties->target_schema
                                   ? *model.properties->target_schema
                                   : cfg.default_schema;
    auto rules = cfg.permissions.find(*team);
    bool allowed = false;
    if (rules != cfg.permissions.end())
        allowed = std::any_of(rules->second.begin(), rules->second.end(),
                              [&](const std::string& glob) {
                                  return schema_glob_match(glob, schema);
                              });
    if (!allowed)
        findings.push_back(make_model_finding(
            kPermissions, Severity::Error, model.name,
            "team '" + *team + "' may not publish to schema '" + schema + "'"));
    return findings;
}

}  // namespace dataops
