#include "dataops/pipeline.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "dataops/advisor.hpp"
#include "dataops/checks_lint.hpp"
#include "dataops/checks_parse.hpp"
#include "dataops/lineage.hpp"
#include "dataops/tfidf.hpp"

namespace dataops {

namespace {

// Evaluates `fn` per model, in parallel, and concatenates the results in
// model order so concurrency never changes output.
template <typename Fn>
std::vector<Finding> for_each_model(const ProjectSnapshot& snapshot,
                                    const std::set<std::string>& selected, Fn fn) {
    std::vector<std::future<std::vector<Finding>>> futures;
    futures.reserve(snapshot.models.size());
    for (const auto& model : snapshot.models) {
        if (!selected.count(model.name)) {
            futures.emplace_back();
            continue;
        }
        futures.push_back(std::async(std::launch::async, fn, std::cref(model)));
    }
    std::vector<Finding> findings;
    for (auto& future : futures) {
        if (!future.valid()) continue;
        std::vector<Finding> part = future.get();
        findings.insert(findings.end(), part.begin(), part.end());
    }
    return findings;
}

void sort_findings(std::vector<Finding>& findings) {
    auto stage_of = [](const Finding& f) {
        if (f.stage_hint >= 0) return f.stage_hint;
        const CheckDescriptor* check = find_check(f.check_id);
        return check ? stage_rank(check->stage) : stage_rank(Stage::Observe);
    };
    std::stable_sort(findings.begin(), findings.end(),
                     [&](const Finding& a, const Finding& b) {
                         int sa = stage_of(a), sb = stage_of(b);
                         if (sa != sb) return sa < sb;
                         const std::string& ma = a.model ? *a.model : std::string();
                         const std::string& mb = b.model ? *b.model : std::string();
                         if (ma != mb) return ma < mb;
                         if (a.check_id != b.check_id) return a.check_id < b.check_id;
                         int la = a.line.value_or(0), lb = b.line.value_or(0);
                         if (la != lb) return la < lb;
                         int ca = a.col.value_or(0), cb = b.col.value_or(0);
                         if (ca != cb) return ca < cb;
                         return a.message < b.message;
                     });
}

}  // namespace

PipelineResult run_pipeline(const ProjectSnapshot& snapshot,
                            const std::set<std::string>& changed,
                            const std::set<std::string>& selected,
                            const std::set<std::string>& stage_filter,
                            const RunAdapters& adapters) {
    const PipelineConfig& cfg = snapshot.config;
    PipelineResult result;

    auto stage_wanted = [&](Stage stage) {
        return stage_filter.empty() || stage_filter.count(stage_name(stage)) > 0;
    };
    auto enabled = [&](const char* id) { return check_enabled(cfg, id); };

    // Parse once; every stage shares the outcome.
    std::map<std::string, ParseStatus> statuses;
    for (const auto& model : snapshot.models) statuses[model.name] = parse_status_for(model);
    std::map<std::string, sql::SqlAst> asts;
    for (auto& [name, status] : statuses)
        if (status.ast) asts.emplace(name, *status.ast);
    GraphBuild graph_build = build_graph(snapshot, asts);

    bool halted = false;
    auto run_stage = [&](Stage stage, auto body) {
        StageSummary summary;
        summary.stage = stage;
        if (!stage_wanted(stage) || halted) {
            summary.status = StageSummary::Status::Skipped;
            result.stages.push_back(summary);
            return;
        }
        std::vector<Finding> findings;
        try {
            findings = body();
        } catch (const std::exception& e) {
            // A failing adapter or check never silently drops a stage.
            Finding f = make_finding(
                "pipeline", Severity::Error,
                stage_name(stage) + " stage failed internally: " + e.what());
            f.stage_hint = stage_rank(stage);
            findings.push_back(std::move(f));
        }
        for (auto& f : findings)
            if (f.stage_hint < 0 && !find_check(f.check_id)) f.stage_hint = stage_rank(stage);
        apply_registry(findings, cfg);
        for (const auto& f : findings) {
            if (f.severity == Severity::Error) ++summary.errors;
            else if (f.severity == Severity::Warning) ++summary.warnings;
            else ++summary.advisories;
        }
        summary.status = summary.errors > 0 ? StageSummary::Status::Failed
                                            : StageSummary::Status::Passed;
        if (cfg.fail_fast && summary.errors > 0) halted = true;
        result.findings.insert(result.findings.end(), findings.begin(), findings.end());
        result.stages.push_back(summary);
    };

    run_stage(Stage::Lint, [&] {
        std::vector<Finding> findings = for_each_model(
            snapshot, selected, [&](const ModelUnit& model) {
                std::vector<Finding> out;
                const ParseStatus& status = statuses.at(model.name);
                if (enabled("check_naming_convention")) {
                    const sql::SqlAst* ast = status.ast ? &*status.ast : nullptr;
                    auto part = check_naming_convention(model, ast);
                    out.insert(out.end(), part.begin(), part.end());
                }
                if (enabled("check_sql_lint")) {
                    auto part = check_sql_lint(model, cfg.lint);
                    out.insert(out.end(), part.begin(), part.end());
                }
                if (enabled("check_tags")) {
                    auto part = check_tags(model, cfg);
                    out.insert(out.end(), part.begin(), part.end());
                }
                return out;
            });
        return findings;
    });

    run_stage(Stage::Optimize, [&] {
        std::vector<Finding> findings;
        if (enabled("check_vector_similarity")) {
            auto part = check_vector_similarity(changed, snapshot, cfg);
            findings.insert(findings.end(), part.begin(), part.end());
        }
        if (enabled("check_ai_feedback")) {
            // Advisor calls stay sequential: one external command at a time.
            for (const auto& model : snapshot.models) {
                if (!changed.count(model.name)) continue;
                auto [verdict, part] = check_ai_feedback(model, cfg, snapshot.root);
                findings.insert(findings.end(), part.begin(), part.end());
            }
        }
        return findings;
    });

    run_stage(Stage::Parse, [&] {
        return for_each_model(snapshot, selected, [&](const ModelUnit& model) {
            std::vector<Finding> out;
            const ParseStatus& status = statuses.at(model.name);
            if (enabled("check_ast_parse")) {
                auto part = check_ast_parse(model, status, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (!status.ast) return out;  // unparseable: the rest is skipped
            if (enabled("check_column_usage")) {
                auto part = check_column_usage(model, *status.ast);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_dead_code")) {
                auto part = check_dead_code(model, *status.ast);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_model_functions")) {
                auto part = check_model_functions(model, *status.ast, graph_build.graph);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_model_length")) {
                auto part = check_model_length(model, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        });
    });

    run_stage(Stage::Validate, [&] {
        std::vector<Finding> findings;
        if (enabled("check_branch_freshness")) {
            auto part = check_branch_freshness(adapters.branch, cfg);
            findings.insert(findings.end(), part.begin(), part.end());
        }
        if (enabled("check_compilation")) {
            auto part = check_compilation(snapshot, statuses, graph_build.broken);
            findings.insert(findings.end(), part.begin(), part.end());
        }
        if (enabled("check_freeze_schedule")) {
            auto part = check_freeze_schedule(adapters.now, cfg.freeze_windows);
            findings.insert(findings.end(), part.begin(), part.end());
        }
        if (enabled("check_model_dependencies")) {
            auto part = check_model_dependencies(graph_build.graph, graph_build.broken, cfg);
            findings.insert(findings.end(), part.begin(), part.end());
        }
        auto per_model = for_each_model(snapshot, selected, [&](const ModelUnit& model) {
            std::vector<Finding> out;
            const ParseStatus& status = statuses.at(model.name);
            const sql::SqlAst* ast = status.ast ? &*status.ast : nullptr;
            if (enabled("check_configuration")) {
                auto part = check_configuration(model, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_documentation")) {
                auto part = check_documentation(model, ast, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_materialization")) {
                auto part = check_materialization(model, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_model_compliance")) {
                auto part = check_model_compliance(model, ast, cfg.compliance);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_owner")) {
                auto part = check_owner(model, snapshot);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_path_permissions")) {
                auto part = check_path_permissions(model, snapshot, cfg, adapters.as_user);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        });
        findings.insert(findings.end(), per_model.begin(), per_model.end());
        return findings;
    });

    run_stage(Stage::Observe, [&] {
        std::vector<Finding> findings = adapters.preload_findings;
        auto per_model = for_each_model(snapshot, selected, [&](const ModelUnit& model) {
            std::vector<Finding> out;
            const RunRecord* record = nullptr;
            if (adapters.run_records) {
                auto it = adapters.run_records->find(model.name);
                if (it != adapters.run_records->end()) record = &it->second;
            }
            if (enabled("check_configured_test")) {
                auto part = check_configured_test(model, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_runtime_threshold")) {
                auto part = check_runtime_threshold(model, record, cfg);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_test_run")) {
                auto part = check_test_run(model, record);
                out.insert(out.end(), part.begin(), part.end());
            }
            if (enabled("check_uat_run")) {
                auto part = check_uat_run(model, record);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        });
        findings.insert(findings.end(), per_model.begin(), per_model.end());
        return findings;
    });

    sort_findings(result.findings);
    return result;
}

int exit_code(const PipelineResult& result) {
    bool any_error = std::any_of(result.findings.begin(), result.findings.end(),
                                 [](const Finding& f) { return f.severity == Severity::Error; });
    return any_error ? 1 : 0;
}

}  // namespace dataops
