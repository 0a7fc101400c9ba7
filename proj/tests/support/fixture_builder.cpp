#include "support/fixture_builder.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixtures {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("fixture write failed: " + path.generic_string());
    out << content;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string stem_of(const std::string& rel_path) {
    size_t slash = rel_path.rfind('/');
    std::string name = slash == std::string::npos ? rel_path : rel_path.substr(slash + 1);
    size_t dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

ModelSpec& ProjectBuilder::add_model(const std::string& rel_path, const std::string& sql) {
    ModelSpec spec;
    spec.rel_path = rel_path;
    spec.sql = sql;
    models_.push_back(std::move(spec));
    return models_.back();
}

void ProjectBuilder::add_source(const std::string& source, const std::string& table) {
    sources_.emplace_back(source, table);
}

ModelSpec* ProjectBuilder::model(const std::string& name) {
    for (auto& m : models_)
        if (stem_of(m.rel_path) == name) return &m;
    return nullptr;
}

void ProjectBuilder::write() const {
    fs::create_directories(root_ / "models");

    std::ostringstream cfg;
    if (!check_overrides.empty()) {
        cfg << "checks:\n";
        for (const auto& [id, ov] : check_overrides) {
            cfg << "  " << id << ":\n";
            if (ov.first) cfg << "    enabled: " << (*ov.first ? "true" : "false") << "\n";
            if (!ov.second.empty()) cfg << "    severity: " << ov.second << "\n";
        }
    }
    if (!thresholds.empty()) {
        cfg << "thresholds:\n";
        for (const auto& [key, value] : thresholds) cfg << "  " << key << ": " << value << "\n";
    }
    if (!tag_namespaces.empty()) {
        cfg << "tags:\n  namespaces:\n";
        for (const auto& ns : tag_namespaces) {
            cfg << "    - name: " << ns.name << "\n";
            cfg << "      required: " << (ns.required ? "true" : "false") << "\n";
            cfg << "      single_valued: " << (ns.single_valued ? "true" : "false") << "\n";
            if (!ns.allowed.empty()) {
                cfg << "      allowed: [";
                for (size_t i = 0; i < ns.allowed.size(); ++i)
                    cfg << (i ? ", " : "") << ns.allowed[i];
                cfg << "]\n";
            }
        }
    }
    if (!freeze_windows.empty()) {
        cfg << "freeze:\n  windows:\n";
        for (const auto& w : freeze_windows) {
            cfg << "    - reason: " << (w.reason.empty() ? "scheduled freeze" : w.reason)
                << "\n";
            if (!w.weekdays.empty()) {
                cfg << "      weekdays: [";
                for (size_t i = 0; i < w.weekdays.size(); ++i)
                    cfg << (i ? ", " : "") << w.weekdays[i];
                cfg << "]\n";
            }
            if (!w.dates.empty()) {
                cfg << "      dates: [";
                for (size_t i = 0; i < w.dates.size(); ++i) cfg << (i ? ", " : "") << w.dates[i];
                cfg << "]\n";
            }
        }
    }
    if (!advisor_command.empty())
        cfg << "advisor:\n  command: \"" << advisor_command << "\"\n  timeout_s: 10\n";
    if (!permissions.empty()) {
        cfg << "permissions:\n  teams:\n";
        for (const auto& [team, globs] : permissions) {
            cfg << "    " << team << ": [";
            for (size_t i = 0; i < globs.size(); ++i) {
                cfg << (i ? ", " : "") << "'" << globs[i] << "'";
            }
            cfg << "]\n";
        }
    }
    cfg << "vcs:\n  base_branch: main\n";
    if (with_run_records) cfg << "observe:\n  run_records: run-records.json\n";
    write_file(root_ / "dataops.yml", cfg.str());

    std::ostringstream owners;
    owners << "active: [";
    for (size_t i = 0; i < owners_active.size(); ++i)
        owners << (i ? ", " : "") << owners_active[i];
    owners << "]\n";
    if (!owner_teams.empty()) {
        owners << "teams:\n";
        for (const auto& [owner, team] : owner_teams)
            owners << "  " << owner << ": " << team << "\n";
    }
    write_file(root_ / "owners.yml", owners.str());

    std::ostringstream schema;
    if (!models_.empty()) {
        schema << "models:\n";
        for (const auto& m : models_) {
            if (!m.with_properties) continue;
            schema << "  - name: " << stem_of(m.rel_path) << "\n";
            if (!m.description.empty()) schema << "    description: " << m.description << "\n";
            if (!m.owner.empty()) schema << "    owner: " << m.owner << "\n";
            if (!m.tags.empty()) {
                schema << "    tags: [";
                for (size_t i = 0; i < m.tags.size(); ++i)
                    schema << (i ? ", " : "") << "'" << m.tags[i] << "'";
                schema << "]\n";
            }
            if (!m.materialized.empty())
                schema << "    materialized: " << m.materialized << "\n";
            if (!m.target_schema.empty())
                schema << "    target_schema: " << m.target_schema << "\n";
            if (!m.columns.empty()) {
                schema << "    columns:\n";
                for (const auto& [name, doc] : m.columns)
                    schema << "      " << name << ": " << doc << "\n";
            }
            if (!m.tests.empty()) {
                schema << "    tests:\n";
                for (const auto& [type, column] : m.tests) {
                    schema << "      - type: " << type << "\n";
                    if (!column.empty()) schema << "        column: " << column << "\n";
                }
            }
            if (!m.meta.empty()) {
                schema << "    meta:\n";
                for (const auto& [key, value] : m.meta)
                    schema << "      " << key << ": \"" << value << "\"\n";
            }
            for (const auto& [key, value] : m.extra_keys)
                schema << "    " << key << ": " << value << "\n";
        }
    }
    if (!sources_.empty()) {
        schema << "sources:\n";
        std::map<std::string, std::vector<std::string>> grouped;
        for (const auto& [source, table] : sources_) grouped[source].push_back(table);
        for (const auto& [source, tables] : grouped) {
            schema << "  - name: " << source << "\n    tables:\n";
            for (const auto& table : tables) schema << "      - name: " << table << "\n";
        }
    }
    write_file(root_ / "models" / "schema.yml", schema.str());

    for (const auto& m : models_) write_file(root_ / "models" / m.rel_path, m.sql);

    if (with_run_records) {
        std::ostringstream records;
        records << "{\"records\": [";
        bool first_record = true;
        for (const auto& m : models_) {
            if (!m.with_record) continue;
            if (!first_record) records << ",";
            first_record = false;
            records << "\n  {\"model\": \"" << stem_of(m.rel_path) << "\"";
            records << ", \"runtime_ms\": " << m.runtime_ms;
            records << ", \"test_results\": [";
            bool first_result = true;
            if (!m.results.empty()) {
                for (const auto& [type, column, passed] : m.results) {
                    if (!first_result) records << ", ";
                    first_result = false;
                    records << "{\"test_type\": \"" << json_escape(type) << "\"";
                    if (!column.empty()) records << ", \"column\": \"" << json_escape(column) << "\"";
                    records << ", \"passed\": " << (passed ? "true" : "false") << "}";
                }
            } else {
                for (const auto& [type, column] : m.tests) {
                    if (!first_result) records << ", ";
                    first_result = false;
                    records << "{\"test_type\": \"" << json_escape(type) << "\"";
                    if (!column.empty()) records << ", \"column\": \"" << json_escape(column) << "\"";
                    records << ", \"passed\": true}";
                }
            }
            records << "]";
            if (!m.uat.empty()) records << ", \"uat_status\": \"" << m.uat << "\"";
            records << ", \"recorded_at\": \"2025-01-06T08:00:00Z\"}";
        }
        records << "\n]}\n";
        write_file(root_ / "run-records.json", records.str());
    }
}

void add_base_chain(ProjectBuilder& builder) {
    builder.add_source("raw", "orders");

    ModelSpec& stg = builder.add_model(
        "staging/stg_orders.sql",
        "select\n"
        "    o.order_id as order_id,\n"
        "    o.customer_id as customer_id,\n"
        "    o.order_total as order_total,\n"
        "    o.ordered_at as ordered_at,\n"
        "    o.order_status as order_status\n"
        "from {{ source('raw', 'orders') }} o\n");
    stg.description = "Raw order rows shaped for downstream joins.";
    stg.tests = {{"unique", "order_id"}, {"not_null", "order_id"}};

    ModelSpec& intm = builder.add_model(
        "intermediate/int_orders.sql",
        "with billable as (\n"
        "    select\n"
        "        s.order_id as order_id,\n"
        "        s.customer_id as customer_id,\n"
        "        s.order_total as order_total\n"
        "    from {{ ref('stg_orders') }} s\n"
        "    where s.order_status = 'paid'\n"
        ")\n"
        "select\n"
        "    billable.order_id as order_id,\n"
        "    billable.customer_id as customer_id,\n"
        "    billable.order_total as order_total\n"
        "from billable\n");
    intm.description = "Orders filtered down to billable rows.";
    intm.tests = {{"not_null", "order_id"}};

    ModelSpec& mart = builder.add_model(
        "marts/mart_revenue.sql",
        "select\n"
        "    r.customer_id as customer_id,\n"
        "    sum(r.order_total) as revenue_amount,\n"
        "    count(r.order_id) as billed_orders\n"
        "from {{ ref('int_orders') }} r\n"
        "group by r.customer_id\n");
    mart.description = "Revenue aggregated per paying customer.";
    mart.tests = {{"unique", "customer_id"}, {"not_null", "customer_id"}};
}

std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    fs::path dir = fs::temp_directory_path() /
                   ("dataops-gate-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace fixtures
