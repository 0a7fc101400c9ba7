#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dataops/advisor.hpp"
#include "dataops/checks_lint.hpp"
#include "dataops/deploy.hpp"
#include "dataops/lineage.hpp"
#include "dataops/pipeline.hpp"
#include "dataops/project.hpp"
#include "dataops/report.hpp"
#include "dataops/rtm.hpp"
#include "dataops/timeutil.hpp"
#include "dataops/vcs.hpp"

namespace {

using namespace dataops;

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

bool want_color() {
    return isatty(STDOUT_FILENO) && std::getenv("NO_COLOR") == nullptr;
}

std::set<std::string> split_list(const std::string& csv) {
    std::set<std::string> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        std::string item = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        if (!item.empty()) out.insert(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

PipelineConfig config_for(const std::string& root, const std::string& config_path) {
    if (!config_path.empty()) return load_config_file(config_path);
    std::filesystem::path candidate = std::filesystem::path(root) / "dataops.yml";
    if (std::filesystem::is_regular_file(candidate)) return load_config_file(candidate);
    return default_config();
}

ProjectSnapshot snapshot_for(const std::string& root, const std::string& config_path) {
    ProjectSnapshot snapshot = load_project(root);
    if (!config_path.empty()) snapshot.config = load_config_file(config_path);
    return snapshot;
}

struct ValidateOptions {
    std::string root = ".";
    std::string config;
    std::string stages;
    std::string select;
    std::string changed_since;
    std::string format = "human";
    std::string now;
    std::string run_records;
    std::string emit_graph;
    std::string as_user;
    int behind_base = -1;
    bool fail_fast = false;
};

int cmd_validate(const ValidateOptions& opt) {
    ProjectSnapshot snapshot = snapshot_for(opt.root, opt.config);
    if (opt.fail_fast) snapshot.config.fail_fast = true;

    std::set<std::string> all_models;
    for (const auto& m : snapshot.models) all_models.insert(m.name);

    std::set<std::string> changed = all_models;
    if (!opt.changed_since.empty()) {
        auto diff = vcs_changed_models(snapshot.root, opt.changed_since);
        if (diff) {
            changed.clear();
            for (const auto& name : *diff)
                if (all_models.count(name)) changed.insert(name);
        } else {
            std::cerr << "note: cannot diff against '" << opt.changed_since
                      << "'; treating every model as changed\n";
        }
    }
    std::set<std::string> selected = opt.select.empty() ? all_models : split_list(opt.select);
    for (const auto& name : selected) {
        if (!all_models.count(name)) {
            std::cerr << "error: unknown model in --select: " << name << "\n";
            return kExitUsage;
        }
    }

    std::set<std::string> stage_filter = split_list(opt.stages);
    for (const auto& stage : stage_filter) {
        if (stage != "lint" && stage != "optimize" && stage != "parse" &&
            stage != "validate" && stage != "observe") {
            std::cerr << "error: unknown stage: " << stage << "\n";
            return kExitUsage;
        }
    }

    RunAdapters adapters;
    if (opt.now.empty()) {
        adapters.now = current_utc_time();
    } else {
        auto parsed = parse_civil_time(opt.now);
        if (!parsed) {
            std::cerr << "error: cannot parse --now timestamp: " << opt.now << "\n";
            return kExitUsage;
        }
        adapters.now = *parsed;
    }
    if (opt.behind_base >= 0) {
        adapters.branch = BranchStatus{opt.behind_base, snapshot.config.base_branch};
    } else if (auto behind = vcs_behind_base(snapshot.root, snapshot.config.base_branch)) {
        adapters.branch = BranchStatus{*behind, snapshot.config.base_branch};
    }
    std::string records_path = opt.run_records;
    if (records_path.empty() && !snapshot.config.run_records_path.empty())
        records_path = (snapshot.root / snapshot.config.run_records_path).generic_string();
    if (!records_path.empty()) {
        RunRecordSet set = load_run_records(records_path);
        adapters.run_records = std::move(set.records);
        adapters.preload_findings = std::move(set.warnings);
    }
    if (!opt.as_user.empty()) adapters.as_user = opt.as_user;

    PipelineResult result = run_pipeline(snapshot, changed, selected, stage_filter, adapters);
    std::vector<RtmRow> rtm = generate_rtm(snapshot.config);

    if (!opt.emit_graph.empty()) {
        std::map<std::string, sql::SqlAst> asts;
        for (const auto& model : snapshot.models) {
            try {
                asts.emplace(model.name, sql::parse_model(model.raw_sql));
            } catch (const std::exception&) {
                // unparseable models appear as isolated nodes
            }
        }
        GraphBuild build = build_graph(snapshot, asts);
        std::ofstream out(opt.emit_graph, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write " << opt.emit_graph << "\n";
            return kExitUsage;
        }
        out << graph_to_json(build.graph);
    }

    if (opt.format == "json") std::cout << report_to_json(result, rtm);
    else std::cout << report_to_text(result, want_color());
    return exit_code(result);
}

int cmd_rtm(const std::string& root, const std::string& config_path,
            const std::string& format, bool strict) {
    PipelineConfig cfg = config_for(root, config_path);
    std::vector<RtmRow> rows = generate_rtm(cfg);
    if (format == "json") std::cout << rtm_to_json(rows);
    else std::cout << rtm_to_table(rows);
    if (strict) {
        for (const auto& row : rows)
            if (row.status == "Unenforced") return kExitFindings;
    }
    return kExitClean;
}

int cmd_docs(const std::string& root, const std::string& config_path,
             const std::string& out_dir) {
    ProjectSnapshot snapshot = snapshot_for(root, config_path);
    std::map<std::string, sql::SqlAst> asts;
    for (const auto& model : snapshot.models) {
        try {
            asts.emplace(model.name, sql::parse_model(model.raw_sql));
        } catch (const std::exception&) {
        }
    }
    GraphBuild build = build_graph(snapshot, asts);
    auto files = run_documentation(snapshot, build.graph, out_dir);
    std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
    return kExitClean;
}

int cmd_plan(const std::string& root, const std::string& config_path,
             const std::string& changed_csv, bool full_plan) {
    ProjectSnapshot snapshot = snapshot_for(root, config_path);
    std::set<std::string> changed = split_list(changed_csv);
    for (const auto& name : changed) {
        if (!snapshot.find_model(name)) {
            std::cerr << "error: unknown model in --changed: " << name << "\n";
            return kExitUsage;
        }
    }
    std::map<std::string, sql::SqlAst> asts;
    for (const auto& model : snapshot.models) {
        try {
            asts.emplace(model.name, sql::parse_model(model.raw_sql));
        } catch (const std::exception&) {
        }
    }
    GraphBuild build = build_graph(snapshot, asts);
    DeployPlan plan = plan_production(changed, build.graph, full_plan);
    std::cout << plan_to_json(plan);
    return kExitClean;
}

int cmd_fmt(const std::string& root, const std::string& config_path,
            const std::vector<std::string>& files, bool write, bool check) {
    ProjectSnapshot snapshot = snapshot_for(root, config_path);
    std::vector<const ModelUnit*> targets;
    if (files.empty()) {
        for (const auto& model : snapshot.models) targets.push_back(&model);
    } else {
        for (const auto& arg : files) {
            const ModelUnit* found = nullptr;
            for (const auto& model : snapshot.models)
                if (model.name == arg || model.path == arg) found = &model;
            if (!found) {
                std::cerr << "error: no model matches '" << arg << "'\n";
                return kExitUsage;
            }
            targets.push_back(found);
        }
    }
    bool drift = false;
    for (const ModelUnit* model : targets) {
        std::string formatted;
        try {
            formatted = format_sql(model->raw_sql, snapshot.config.lint);
        } catch (const sql::LexError& e) {
            std::cerr << "error: " << model->path << ":" << e.line << ":" << e.col << ": "
                      << e.what() << "\n";
            return kExitUsage;
        }
        if (formatted != model->raw_sql) drift = true;
        if (write) {
            if (formatted != model->raw_sql) {
                std::ofstream out(snapshot.root / model->path,
                                  std::ios::binary | std::ios::trunc);
                if (!out) {
                    std::cerr << "error: cannot write " << model->path << "\n";
                    return kExitInternal;
                }
                out << formatted;
            }
        } else if (check) {
            if (formatted != model->raw_sql)
                std::cout << "would reformat: " << model->path << "\n";
        } else {
            std::cout << formatted;
        }
    }
    if (check && drift) return kExitFindings;
    if (!write && !check && drift) return kExitFindings;
    return kExitClean;
}

int cmd_print_config(const std::string& root, const std::string& config_path) {
    std::cout << print_config(config_for(root, config_path));
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dataops-gate: static governance checks for dbt-style SQL repositories"};
    app.require_subcommand(1);

    ValidateOptions vopt;
    CLI::App* validate = app.add_subcommand("validate", "Run the staged check pipeline");
    validate->add_option("--root", vopt.root, "Project root");
    validate->add_option("--config", vopt.config, "Config file (defaults to ROOT/dataops.yml)");
    validate->add_option("--stage", vopt.stages, "Comma-separated stage subset");
    validate->add_option("--select", vopt.select, "Comma-separated model subset");
    validate->add_option("--changed-since", vopt.changed_since,
                         "Git ref; restrict changed-model checks to the diff");
    validate->add_option("--format", vopt.format, "human or json")
        ->check(CLI::IsMember({"human", "json"}));
    validate->add_flag("--fail-fast", vopt.fail_fast, "Stop after the first failing stage");
    validate->add_option("--now", vopt.now, "Injected timestamp (ISO 8601)");
    validate->add_option("--behind-base", vopt.behind_base,
                         "Commits behind the base branch (overrides the VCS adapter)");
    validate->add_option("--run-records", vopt.run_records, "Run-records JSON file");
    validate->add_option("--emit-graph", vopt.emit_graph, "Write the dependency graph JSON");
    validate->add_option("--as-user", vopt.as_user,
                         "Evaluate schema permissions as this user");

    std::string rtm_root = ".", rtm_config, rtm_format = "human";
    bool rtm_strict = false;
    CLI::App* rtm = app.add_subcommand("rtm", "Print the requirements traceability matrix");
    rtm->add_option("--root", rtm_root, "Project root");
    rtm->add_option("--config", rtm_config, "Config file");
    rtm->add_option("--format", rtm_format, "human or json")
        ->check(CLI::IsMember({"human", "json"}));
    rtm->add_flag("--strict", rtm_strict, "Exit 1 when any control is Unenforced");

    std::string docs_root = ".", docs_config, docs_out = "docs";
    CLI::App* docs = app.add_subcommand("docs", "Generate the HTML model dictionary");
    docs->add_option("--root", docs_root, "Project root");
    docs->add_option("--config", docs_config, "Config file");
    docs->add_option("--out", docs_out, "Output directory");

    std::string plan_root = ".", plan_config, plan_changed;
    bool plan_full = false;
    CLI::App* plan = app.add_subcommand("plan", "Emit the production deploy plan (dry run)");
    plan->add_option("--root", plan_root, "Project root");
    plan->add_option("--config", plan_config, "Config file");
    plan->add_option("--changed", plan_changed, "Comma-separated changed models");
    plan->add_flag("--full-plan", plan_full, "Include skipped models");

    std::string fmt_root = ".", fmt_config;
    std::vector<std::string> fmt_files;
    bool fmt_write = false, fmt_check = false;
    CLI::App* fmt = app.add_subcommand("fmt", "Format model SQL");
    fmt->add_option("--root", fmt_root, "Project root");
    fmt->add_option("--config", fmt_config, "Config file");
    fmt->add_option("files", fmt_files, "Model names or paths (default: all models)");
    fmt->add_flag("--write", fmt_write, "Rewrite files in place");
    fmt->add_flag("--check", fmt_check, "Report drift; exit 1 when any file would change");

    std::string pc_root = ".", pc_config;
    CLI::App* print_cfg = app.add_subcommand("print-config",
                                             "Show the effective configuration");
    print_cfg->add_option("--root", pc_root, "Project root");
    print_cfg->add_option("--config", pc_config, "Config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitClean : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(vopt);
        if (rtm->parsed()) return cmd_rtm(rtm_root, rtm_config, rtm_format, rtm_strict);
        if (docs->parsed()) return cmd_docs(docs_root, docs_config, docs_out);
        if (plan->parsed()) return cmd_plan(plan_root, plan_config, plan_changed, plan_full);
        if (fmt->parsed()) return cmd_fmt(fmt_root, fmt_config, fmt_files, fmt_write, fmt_check);
        if (print_cfg->parsed()) return cmd_print_config(pc_root, pc_config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RunRecordError& e) {
        std::cerr << "run-records error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DeployError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFindings;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
