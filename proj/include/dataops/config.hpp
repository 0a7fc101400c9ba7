#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataops/findings.hpp"

namespace dataops {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

struct LintRuleSet {
    enum class KeywordCase { Upper, Lower };
    enum class CommaStyle { Leading, Trailing };
    KeywordCase keyword_case = KeywordCase::Lower;
    CommaStyle comma_style = CommaStyle::Trailing;
    bool forbid_tabs = true;
    bool require_final_newline = true;
    int max_blank_run = 1;
};

struct TagNamespace {
    std::string name;
    bool required = false;
    bool single_valued = true;
    std::vector<std::string> allowed;  // empty means any value is accepted
};

struct FreezeWindow {
    std::vector<std::string> weekdays;  // lowercase names
    std::vector<std::string> dates;     // ISO yyyy-mm-dd
    std::string reason;
};

struct CompliancePolicy {
    std::vector<std::string> pii_patterns;  // case-insensitive regexes
    std::string approval_meta_key = "pii_approved";
};

struct AdvisorSettings {
    std::string command;  // empty: advisor disabled
    int timeout_s = 30;
    std::string prompt_template;  // path, relative to project root
};

struct CheckOverride {
    std::optional<bool> enabled;
    std::optional<Severity> severity;
};

struct PipelineConfig {
    std::map<std::string, CheckOverride> check_overrides;

    // thresholds
    int max_model_lines = 300;
    double similarity_threshold = 0.90;
    int max_behind = 0;
    long long max_runtime_ms = 600000;
    int min_tests = 1;
    int min_description_chars = 10;
    bool require_column_docs = false;
    std::optional<int> max_ctes;
    std::optional<int> max_subqueries;
    std::optional<int> max_union_arms;
    std::vector<std::string> required_property_keys = {"materialized", "owner"};
    bool lineage_forbid_marts_to_intermediate = true;
    bool lineage_forbid_source_reads_outside_staging = true;
    bool lineage_restrict_staging_to_sources = true;
    bool lineage_flag_unlayered_edges = true;

    LintRuleSet lint;
    std::vector<TagNamespace> tag_namespaces;
    // layer -> allowed materializations
    std::map<std::string, std::set<std::string>> materialization_rules;
    std::vector<FreezeWindow> freeze_windows;
    CompliancePolicy compliance;
    std::map<std::string, std::vector<std::string>> permissions;  // team -> globs
    std::string default_schema = "analytics";
    std::string base_branch = "main";
    AdvisorSettings advisor;
    std::string run_records_path;  // relative to project root; empty: none
    std::map<std::string, std::vector<std::string>> required_tests_by_layer;
    bool fail_fast = false;
};

// Built-in defaults, including the default materialization rules, PII
// patterns and per-layer test requirements.
PipelineConfig default_config();

// Strict load: any unrecognized key anywhere fails with its full path.
PipelineConfig load_config_file(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text, const std::string& origin);

// Effective configuration as YAML, defaults annotated.
std::string print_config(const PipelineConfig& cfg);

bool check_enabled(const PipelineConfig& cfg, const std::string& check_id);

}  // namespace dataops
