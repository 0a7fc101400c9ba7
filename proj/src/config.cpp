#include "dataops/config.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "dataops/yaml.hpp"

namespace dataops {

namespace {

using yaml::Node;

[[noreturn]] void unknown_key(const std::string& path, const Node& node,
                              const std::string& origin) {
    throw ConfigError("unknown config key: " + path + " (" + origin + " line " +
                      std::to_string(node.line) + ")");
}

void require_known(const Node& map, const std::vector<std::string>& known,
                   const std::string& prefix, const std::string& origin) {
    for (const auto& [key, value] : map.map) {
        bool ok = false;
        for (const auto& k : known)
            if (k == key) ok = true;
        if (!ok) unknown_key(prefix + key, value, origin);
    }
}

Severity parse_severity(const Node& node, const std::string& what) {
    std::string s = node.as_string(what);
    if (s == "error") return Severity::Error;
    if (s == "warning") return Severity::Warning;
    if (s == "advisory") return Severity::Advisory;
    throw ConfigError(what + " must be error, warning or advisory, got '" + s + "'");
}

std::vector<std::string> string_list(const Node& node, const std::string& what) {
    if (node.is_scalar()) return {node.scalar};
    if (!node.is_seq())
        throw ConfigError(what + " must be a list (line " + std::to_string(node.line) + ")");
    std::vector<std::string> out;
    for (const auto& item : node.seq) out.push_back(item.as_string(what));
    return out;
}

void load_checks(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    for (const auto& [id, entry] : node.map) {
        if (!entry.is_map())
            throw ConfigError("checks." + id + " must be a map (line " +
                              std::to_string(entry.line) + ")");
        require_known(entry, {"enabled", "severity"}, "checks." + id + ".", origin);
        CheckOverride ov;
        if (const Node* e = entry.find("enabled")) ov.enabled = e->as_bool("checks." + id + ".enabled");
        if (const Node* s = entry.find("severity"))
            ov.severity = parse_severity(*s, "checks." + id + ".severity");
        cfg.check_overrides[id] = ov;
    }
}

void load_thresholds(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node,
                  {"max_model_lines", "similarity_threshold", "max_behind",
                   "max_runtime_ms", "min_tests", "min_description_chars",
                   "require_column_docs", "max_ctes", "max_subqueries",
                   "max_union_arms", "required_property_keys",
                   "lineage_forbid_marts_to_intermediate",
                   "lineage_forbid_source_reads_outside_staging",
                   "lineage_restrict_staging_to_sources",
                   "lineage_flag_unlayered_edges"},
                  "thresholds.", origin);
    if (const Node* n = node.find("max_model_lines"))
        cfg.max_model_lines = static_cast<int>(n->as_int("thresholds.max_model_lines"));
    if (const Node* n = node.find("similarity_threshold"))
        cfg.similarity_threshold = n->as_double("thresholds.similarity_threshold");
    if (const Node* n = node.find("max_behind"))
        cfg.max_behind = static_cast<int>(n->as_int("thresholds.max_behind"));
    if (const Node* n = node.find("max_runtime_ms"))
        cfg.max_runtime_ms = n->as_int("thresholds.max_runtime_ms");
    if (const Node* n = node.find("min_tests"))
        cfg.min_tests = static_cast<int>(n->as_int("thresholds.min_tests"));
    if (const Node* n = node.find("min_description_chars"))
        cfg.min_description_chars =
            static_cast<int>(n->as_int("thresholds.min_description_chars"));
    if (const Node* n = node.find("require_column_docs"))
        cfg.require_column_docs = n->as_bool("thresholds.require_column_docs");
    if (const Node* n = node.find("max_ctes"))
        cfg.max_ctes = static_cast<int>(n->as_int("thresholds.max_ctes"));
    if (const Node* n = node.find("max_subqueries"))
        cfg.max_subqueries = static_cast<int>(n->as_int("thresholds.max_subqueries"));
    if (const Node* n = node.find("max_union_arms"))
        cfg.max_union_arms = static_cast<int>(n->as_int("thresholds.max_union_arms"));
    if (const Node* n = node.find("required_property_keys"))
        cfg.required_property_keys = string_list(*n, "thresholds.required_property_keys");
    if (const Node* n = node.find("lineage_forbid_marts_to_intermediate"))
        cfg.lineage_forbid_marts_to_intermediate =
            n->as_bool("thresholds.lineage_forbid_marts_to_intermediate");
    if (const Node* n = node.find("lineage_forbid_source_reads_outside_staging"))
        cfg.lineage_forbid_source_reads_outside_staging =
            n->as_bool("thresholds.lineage_forbid_source_reads_outside_staging");
    if (const Node* n = node.find("lineage_restrict_staging_to_sources"))
        cfg.lineage_restrict_staging_to_sources =
            n->as_bool("thresholds.lineage_restrict_staging_to_sources");
    if (const Node* n = node.find("lineage_flag_unlayered_edges"))
        cfg.lineage_flag_unlayered_edges =
            n->as_bool("thresholds.lineage_flag_unlayered_edges");
}

void load_lint(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node,
                  {"keyword_case", "comma_style", "forbid_tabs",
                   "require_final_newline", "max_blank_run"},
                  "lint.", origin);
    if (const Node* n = node.find("keyword_case")) {
        std::string v = n->as_string("lint.keyword_case");
        if (v == "upper") cfg.lint.keyword_case = LintRuleSet::KeywordCase::Upper;
        else if (v == "lower") cfg.lint.keyword_case = LintRuleSet::KeywordCase::Lower;
        else throw ConfigError("lint.keyword_case must be upper or lower, got '" + v + "'");
    }
    if (const Node* n = node.find("comma_style")) {
        std::string v = n->as_string("lint.comma_style");
        if (v == "leading") cfg.lint.comma_style = LintRuleSet::CommaStyle::Leading;
        else if (v == "trailing") cfg.lint.comma_style = LintRuleSet::CommaStyle::Trailing;
        else throw ConfigError("lint.comma_style must be leading or trailing, got '" + v + "'");
    }
    if (const Node* n = node.find("forbid_tabs"))
        cfg.lint.forbid_tabs = n->as_bool("lint.forbid_tabs");
    if (const Node* n = node.find("require_final_newline"))
        cfg.lint.require_final_newline = n->as_bool("lint.require_final_newline");
    if (const Node* n = node.find("max_blank_run"))
        cfg.lint.max_blank_run = static_cast<int>(n->as_int("lint.max_blank_run"));
}

void load_tags(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"namespaces"}, "tags.", origin);
    const Node* namespaces = node.find("namespaces");
    if (!namespaces) return;
    if (!namespaces->is_seq())
        throw ConfigError("tags.namespaces must be a list (line " +
                          std::to_string(namespaces->line) + ")");
    for (const auto& entry : namespaces->seq) {
        require_known(entry, {"name", "required", "single_valued", "allowed"},
                      "tags.namespaces.", origin);
        TagNamespace ns;
        const Node* name = entry.find("name");
        if (!name) throw ConfigError("tags.namespaces entry is missing 'name' (line " +
                                     std::to_string(entry.line) + ")");
        ns.name = name->as_string("tags.namespaces.name");
        if (const Node* n = entry.find("required"))
            ns.required = n->as_bool("tags.namespaces.required");
        if (const Node* n = entry.find("single_valued"))
            ns.single_valued = n->as_bool("tags.namespaces.single_valued");
        if (const Node* n = entry.find("allowed"))
            ns.allowed = string_list(*n, "tags.namespaces.allowed");
        cfg.tag_namespaces.push_back(std::move(ns));
    }
}

const std::vector<std::string>& known_layers() {
    static const std::vector<std::string> layers = {"staging", "intermediate", "marts",
                                                    "other"};
    return layers;
}

const std::vector<std::string>& known_materializations() {
    static const std::vector<std::string> kinds = {"table", "view", "incremental",
                                                   "ephemeral"};
    return kinds;
}

void load_materialization(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, known_layers(), "materialization.", origin);
    for (const auto& [layer, allowed] : node.map) {
        std::set<std::string> values;
        for (const auto& v : string_list(allowed, "materialization." + layer)) {
            bool ok = false;
            for (const auto& k : known_materializations())
                if (k == v) ok = true;
            if (!ok)
                throw ConfigError("materialization." + layer + " has unknown kind '" + v + "'");
            values.insert(v);
        }
        cfg.materialization_rules[layer] = std::move(values);
    }
}

void load_freeze(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"windows"}, "freeze.", origin);
    const Node* windows = node.find("windows");
    if (!windows) return;
    if (!windows->is_seq())
        throw ConfigError("freeze.windows must be a list (line " +
                          std::to_string(windows->line) + ")");
    for (const auto& entry : windows->seq) {
        require_known(entry, {"weekdays", "dates", "reason"}, "freeze.windows.", origin);
        FreezeWindow w;
        if (const Node* n = entry.find("weekdays"))
            w.weekdays = string_list(*n, "freeze.windows.weekdays");
        if (const Node* n = entry.find("dates"))
            w.dates = string_list(*n, "freeze.windows.dates");
        if (const Node* n = entry.find("reason"))
            w.reason = n->as_string("freeze.windows.reason");
        if (w.weekdays.empty() && w.dates.empty())
            throw ConfigError("freeze window needs weekdays or dates (line " +
                              std::to_string(entry.line) + ")");
        for (auto& d : w.weekdays) {
            for (auto& c : d) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        cfg.freeze_windows.push_back(std::move(w));
    }
}

void load_compliance(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"pii_patterns", "approval_meta_key"}, "compliance.", origin);
    if (const Node* n = node.find("pii_patterns"))
        cfg.compliance.pii_patterns = string_list(*n, "compliance.pii_patterns");
    if (const Node* n = node.find("approval_meta_key"))
        cfg.compliance.approval_meta_key = n->as_string("compliance.approval_meta_key");
    for (const auto& pattern : cfg.compliance.pii_patterns) {
        try {
            std::regex re(pattern, std::regex::icase);
        } catch (const std::regex_error&) {
            throw ConfigError("compliance.pii_patterns entry does not compile: '" +
                              pattern + "'");
        }
    }
}

void load_permissions(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"default_schema", "teams"}, "permissions.", origin);
    if (const Node* n = node.find("default_schema"))
        cfg.default_schema = n->as_string("permissions.default_schema");
    if (const Node* teams = node.find("teams")) {
        for (const auto& [team, globs] : teams->map) {
            auto patterns = string_list(globs, "permissions.teams." + team);
            if (patterns.empty())
                throw ConfigError("permissions.teams." + team + " must list at least one pattern");
            cfg.permissions[team] = std::move(patterns);
        }
    }
}

void load_vcs(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"base_branch"}, "vcs.", origin);
    if (const Node* n = node.find("base_branch"))
        cfg.base_branch = n->as_string("vcs.base_branch");
}

void load_advisor(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"command", "timeout_s", "prompt_template"}, "advisor.", origin);
    if (const Node* n = node.find("command"))
        cfg.advisor.command = n->as_string("advisor.command");
    if (const Node* n = node.find("timeout_s"))
        cfg.advisor.timeout_s = static_cast<int>(n->as_int("advisor.timeout_s"));
    if (const Node* n = node.find("prompt_template"))
        cfg.advisor.prompt_template = n->as_string("advisor.prompt_template");
}

void load_observe(PipelineConfig& cfg, const Node& node, const std::string& origin) {
    require_known(node, {"run_records", "required_tests_by_layer"}, "observe.", origin);
    if (const Node* n = node.find("run_records"))
        cfg.run_records_path = n->as_string("observe.run_records");
    if (const Node* by_layer = node.find("required_tests_by_layer")) {
        require_known(*by_layer, known_layers(), "observe.required_tests_by_layer.", origin);
        cfg.required_tests_by_layer.clear();
        for (const auto& [layer, tests] : by_layer->map)
            cfg.required_tests_by_layer[layer] =
                string_list(tests, "observe.required_tests_by_layer." + layer);
    }
}

std::string yaml_quote(const std::string& s) {
    bool plain = !s.empty();
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
              c == '.' || c == '*' || c == '/'))
            plain = false;
    if (plain) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

PipelineConfig default_config() {
    PipelineConfig cfg;
    cfg.materialization_rules = {
        {"staging", {"table", "view", "incremental", "ephemeral"}},
        {"intermediate", {"table", "view", "incremental"}},
        {"marts", {"table", "incremental"}},
        {"other", {"table", "view", "incremental"}},
    };
    cfg.compliance.pii_patterns = {
        "ssn", "social_security", "tax_id", "email", "phone",
        "date_of_birth|dob", "passport", "salary", "compensation", "address",
    };
    cfg.required_tests_by_layer = {{"marts", {"unique", "not_null"}}};
    return cfg;
}

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    Node root;
    try {
        root = yaml::parse(text);
    } catch (const yaml::YamlError& e) {
        throw ConfigError(origin + " line " + std::to_string(e.line) + ": " + e.what());
    }
    if (!root.is_map())
        throw ConfigError(origin + ": top level must be a mapping");
    PipelineConfig cfg = default_config();
    try {
        require_known(root,
                      {"checks", "thresholds", "lint", "tags", "materialization",
                       "freeze", "compliance", "permissions", "vcs", "advisor",
                       "observe", "fail_fast"},
                      "", origin);
        if (const Node* n = root.find("fail_fast")) cfg.fail_fast = n->as_bool("fail_fast");
        if (const Node* n = root.find("checks")) load_checks(cfg, *n, origin);
        if (const Node* n = root.find("thresholds")) load_thresholds(cfg, *n, origin);
        if (const Node* n = root.find("lint")) load_lint(cfg, *n, origin);
        if (const Node* n = root.find("tags")) load_tags(cfg, *n, origin);
        if (const Node* n = root.find("materialization")) load_materialization(cfg, *n, origin);
        if (const Node* n = root.find("freeze")) load_freeze(cfg, *n, origin);
        if (const Node* n = root.find("compliance")) load_compliance(cfg, *n, origin);
        if (const Node* n = root.find("permissions")) load_permissions(cfg, *n, origin);
        if (const Node* n = root.find("vcs")) load_vcs(cfg, *n, origin);
        if (const Node* n = root.find("advisor")) load_advisor(cfg, *n, origin);
        if (const Node* n = root.find("observe")) load_observe(cfg, *n, origin);
    } catch (const yaml::YamlError& e) {
        throw ConfigError(origin + " line " + std::to_string(e.line) + ": " + e.what());
    }
    return cfg;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path.generic_string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.filename().generic_string());
}

bool check_enabled(const PipelineConfig& cfg, const std::string& check_id) {
    auto it = cfg.check_overrides.find(check_id);
    if (it != cfg.check_overrides.end() && it->second.enabled) return *it->second.enabled;
    return true;
}

std::string print_config(const PipelineConfig& cfg) {
    const PipelineConfig defaults = default_config();
    std::ostringstream out;
    auto mark = [&](bool is_default) { return is_default ? "  # default" : ""; };

    out << "fail_fast: " << (cfg.fail_fast ? "true" : "false")
        << mark(cfg.fail_fast == defaults.fail_fast) << "\n";

    out << "checks:";
    if (cfg.check_overrides.empty()) {
        out << " {}  # default: all enabled at registry severity\n";
    } else {
        out << "\n";
        for (const auto& [id, ov] : cfg.check_overrides) {
            out << "  " << id << ":\n";
            if (ov.enabled) out << "    enabled: " << (*ov.enabled ? "true" : "false") << "\n";
            if (ov.severity) out << "    severity: " << severity_name(*ov.severity) << "\n";
        }
    }

    out << "thresholds:\n";
    out << "  max_model_lines: " << cfg.max_model_lines
        << mark(cfg.max_model_lines == defaults.max_model_lines) << "\n";
    out << "  similarity_threshold: " << cfg.similarity_threshold
        << mark(cfg.similarity_threshold == defaults.similarity_threshold) << "\n";
    out << "  max_behind: " << cfg.max_behind << mark(cfg.max_behind == defaults.max_behind)
        << "\n";
    out << "  max_runtime_ms: " << cfg.max_runtime_ms
        << mark(cfg.max_runtime_ms == defaults.max_runtime_ms) << "\n";
    out << "  min_tests: " << cfg.min_tests << mark(cfg.min_tests == defaults.min_tests)
        << "\n";
    out << "  min_description_chars: " << cfg.min_description_chars
        << mark(cfg.min_description_chars == defaults.min_description_chars) << "\n";
    out << "  require_column_docs: " << (cfg.require_column_docs ? "true" : "false")
        << mark(cfg.require_column_docs == defaults.require_column_docs) << "\n";
    auto opt_int = [&](const char* key, const std::optional<int>& v) {
        out << "  " << key << ": ";
        if (v) out << *v << "\n";
        else out << "~  # default: unset\n";
    };
    opt_int("max_ctes", cfg.max_ctes);
    opt_int("max_subqueries", cfg.max_subqueries);
    opt_int("max_union_arms", cfg.max_union_arms);
    out << "  required_property_keys: [";
    for (size_t i = 0; i < cfg.required_property_keys.size(); ++i)
        out << (i ? ", " : "") << cfg.required_property_keys[i];
    out << "]" << mark(cfg.required_property_keys == defaults.required_property_keys) << "\n";
    out << "  lineage_forbid_marts_to_intermediate: "
        << (cfg.lineage_forbid_marts_to_intermediate ? "true" : "false")
        << mark(cfg.lineage_forbid_marts_to_intermediate ==
                defaults.lineage_forbid_marts_to_intermediate)
        << "\n";
    out << "  lineage_forbid_source_reads_outside_staging: "
        << (cfg.lineage_forbid_source_reads_outside_staging ? "true" : "false")
        << mark(cfg.lineage_forbid_source_reads_outside_staging ==
                defaults.lineage_forbid_source_reads_outside_staging)
        << "\n";
    out << "  lineage_restrict_staging_to_sources: "
        << (cfg.lineage_restrict_staging_to_sources ? "true" : "false")
        << mark(cfg.lineage_restrict_staging_to_sources ==
                defaults.lineage_restrict_staging_to_sources)
        << "\n";
    out << "  lineage_flag_unlayered_edges: "
        << (cfg.lineage_flag_unlayered_edges ? "true" : "false")
        << mark(cfg.lineage_flag_unlayered_edges == defaults.lineage_flag_unlayered_edges)
        << "\n";

    out << "lint:\n";
    out << "  keyword_case: "
        << (cfg.lint.keyword_case == LintRuleSet::KeywordCase::Upper ? "upper" : "lower")
        << mark(cfg.lint.keyword_case == defaults.lint.keyword_case) << "\n";
    out << "  comma_style: "
        << (cfg.lint.comma_style == LintRuleSet::CommaStyle::Leading ? "leading" : "trailing")
        << mark(cfg.lint.comma_style == defaults.lint.comma_style) << "\n";
    out << "  forbid_tabs: " << (cfg.lint.forbid_tabs ? "true" : "false")
        << mark(cfg.lint.forbid_tabs == defaults.lint.forbid_tabs) << "\n";
    out << "  require_final_newline: " << (cfg.lint.require_final_newline ? "true" : "false")
        << mark(cfg.lint.require_final_newline == defaults.lint.require_final_newline) << "\n";
    out << "  max_blank_run: " << cfg.lint.max_blank_run
        << mark(cfg.lint.max_blank_run == defaults.lint.max_blank_run) << "\n";

    out << "tags:\n  namespaces:";
    if (cfg.tag_namespaces.empty()) {
        out << " []  # default: no tag namespaces enforced\n";
    } else {
        out << "\n";
        for (const auto& ns : cfg.tag_namespaces) {
            out << "    - name: " << ns.name << "\n";
            out << "      required: " << (ns.required ? "true" : "false") << "\n";
            out << "      single_valued: " << (ns.single_valued ? "true" : "false") << "\n";
            out << "      allowed: [";
            for (size_t i = 0; i < ns.allowed.size(); ++i)
                out << (i ? ", " : "") << ns.allowed[i];
            out << "]\n";
        }
    }

    out << "materialization:\n";
    for (const auto& [layer, allowed] : cfg.materialization_rules) {
        out << "  " << layer << ": [";
        size_t i = 0;
        for (const auto& v : allowed) out << (i++ ? ", " : "") << v;
        out << "]" << mark(defaults.materialization_rules.count(layer) &&
                           defaults.materialization_rules.at(layer) == allowed)
            << "\n";
    }

    out << "freeze:\n  windows:";
    if (cfg.freeze_windows.empty()) {
        out << " []  # default: no freeze windows\n";
    } else {
        out << "\n";
        for (const auto& w : cfg.freeze_windows) {
            out << "    - weekdays: [";
            for (size_t i = 0; i < w.weekdays.size(); ++i)
                out << (i ? ", " : "") << w.weekdays[i];
            out << "]\n      dates: [";
            for (size_t i = 0; i < w.dates.size(); ++i) out << (i ? ", " : "") << w.dates[i];
            out << "]\n      reason: " << yaml_quote(w.reason) << "\n";
        }
    }

    out << "compliance:\n  approval_meta_key: " << cfg.compliance.approval_meta_key
        << mark(cfg.compliance.approval_meta_key == defaults.compliance.approval_meta_key)
        << "\n";
    out << "  pii_patterns:"
        << mark(cfg.compliance.pii_patterns == defaults.compliance.pii_patterns) << "\n";
    for (const auto& p : cfg.compliance.pii_patterns)
        out << "    - " << yaml_quote(p) << "\n";

    out << "permissions:\n  default_schema: " << cfg.default_schema
        << mark(cfg.default_schema == defaults.default_schema) << "\n";
    out << "  teams:";
    if (cfg.permissions.empty()) {
        out << " {}  # default: no team restrictions\n";
    } else {
        out << "\n";
        for (const auto& [team, globs] : cfg.permissions) {
            out << "    " << team << ": [";
            for (size_t i = 0; i < globs.size(); ++i)
                out << (i ? ", " : "") << yaml_quote(globs[i]);
            out << "]\n";
        }
    }

    out << "vcs:\n  base_branch: " << cfg.base_branch
        << mark(cfg.base_branch == defaults.base_branch) << "\n";

    out << "advisor:\n";
    out << "  command: " << (cfg.advisor.command.empty() ? "~  # default: disabled"
                                                         : yaml_quote(cfg.advisor.command))
        << "\n";
    out << "  timeout_s: " << cfg.advisor.timeout_s
        << mark(cfg.advisor.timeout_s == defaults.advisor.timeout_s) << "\n";
    out << "  prompt_template: "
        << (cfg.advisor.prompt_template.empty() ? "~  # default: built-in prompt"
                                                : yaml_quote(cfg.advisor.prompt_template))
        << "\n";

    out << "observe:\n";
    out << "  run_records: "
        << (cfg.run_records_path.empty() ? "~  # default: none" : yaml_quote(cfg.run_records_path))
        << "\n";
    out << "  required_tests_by_layer:"
        << mark(cfg.required_tests_by_layer == defaults.required_tests_by_layer) << "\n";
    for (const auto& [layer, tests] : cfg.required_tests_by_layer) {
        out << "    " << layer << ": [";
        for (size_t i = 0; i < tests.size(); ++i) out << (i ? ", " : "") << tests[i];
        out << "]\n";
    }
    return out.str();
}

}  // namespace dataops
