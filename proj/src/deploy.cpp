#include "dataops/deploy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dataops {

namespace {

std::string html_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kStyle =
    "body{font-family:sans-serif;margin:2rem;color:#222}"
    "table{border-collapse:collapse;margin:1rem 0}"
    "td,th{border:1px solid #bbb;padding:0.3rem 0.7rem;text-align:left}"
    "th{background:#eee}"
    "code{background:#f4f4f4;padding:0 0.2rem}"
    "h1,h2{border-bottom:1px solid #ddd;padding-bottom:0.2rem}";

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DeployError("cannot write " + path.generic_string());
    out << content;
    if (!out) throw DeployError("write failed for " + path.generic_string());
}

std::string page_head(const std::string& title) {
    return "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
           html_escape(title) + "</title>\n<style>" + kStyle + "</style>\n</head>\n<body>\n";
}

}  // namespace

DeployPlan plan_production(const std::set<std::string>& changed,
                           const DependencyGraph& graph, bool full_plan) {
    std::set<NodeId> roots;
    for (const auto& name : changed) roots.insert(model_node(name));
    if (!detect_cycles(graph).empty())
        throw DeployError("dependency graph contains cycles; refusing to plan");
    std::vector<NodeId> order = topo_order(graph, roots);
    DeployPlan plan;
    std::set<std::string> planned;
    for (const auto& node : order) {
        if (node.kind != NodeId::Kind::Model) continue;
        DeployStep step;
        step.model = node.name;
        step.action = DeployStep::Action::Run;
        step.reason = changed.count(node.name) ? "changed" : "downstream of a changed model";
        planned.insert(node.name);
        plan.steps.push_back(std::move(step));
    }
    if (full_plan) {
        std::vector<std::string> untouched;
        for (const auto& node : graph.nodes)
            if (node.kind == NodeId::Kind::Model && !planned.count(node.name))
                untouched.push_back(node.name);
        std::sort(untouched.begin(), untouched.end());
        for (const auto& name : untouched) {
            DeployStep step;
            step.model = name;
            step.action = DeployStep::Action::Skip;
            step.reason = "not affected by this change";
            plan.steps.push_back(std::move(step));
        }
    }
    return plan;
}

std::string plan_to_json(const DeployPlan& plan) {
    nlohmann::json doc;
    doc["steps"] = nlohmann::json::array();
    for (const auto& step : plan.steps) {
        doc["steps"].push_back({
            {"model", step.model},
            {"action", step.action == DeployStep::Action::Run ? "run" : "skip"},
            {"reason", step.reason},
        });
    }
    return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> run_documentation(const ProjectSnapshot& snapshot,
                                                     const DependencyGraph& graph,
                                                     const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DeployError("cannot create " + out_dir.generic_string());
    std::vector<fs::path> written;

    std::ostringstream index;
    index << page_head("Model dictionary");
    index << "<h1>Model dictionary</h1>\n";
    index << "<p>" << snapshot.models.size() << " models.</p>\n";
    index << "<table>\n<tr><th>Model</th><th>Layer</th><th>Owner</th><th>Tags</th>"
             "<th>Materialization</th><th>Description</th></tr>\n";
    for (const auto& model : snapshot.models) {
        const ModelProperties* props = model.properties ? &*model.properties : nullptr;
        index << "<tr><td><a href=\"" << html_escape(model.name) << ".html\">"
              << html_escape(model.name) << "</a></td>";
        index << "<td>" << layer_name(model.layer) << "</td>";
        index << "<td>" << html_escape(props && props->owner ? *props->owner : "") << "</td>";
        std::string tags;
        if (props)
            for (const auto& t : props->tags) tags += (tags.empty() ? "" : ", ") + t;
        index << "<td>" << html_escape(tags) << "</td>";
        index << "<td>" << html_escape(props && props->materialized ? *props->materialized : "")
              << "</td>";
        index << "<td>" << html_escape(props && props->description ? *props->description : "")
              << "</td></tr>\n";
    }
    index << "</table>\n</body>\n</html>\n";
    fs::path index_path = out_dir / "index.html";
    write_file(index_path, index.str());
    written.push_back(index_path);

    for (const auto& model : snapshot.models) {
        const ModelProperties* props = model.properties ? &*model.properties : nullptr;
        std::ostringstream page;
        page << page_head(model.name);
        page << "<p><a href=\"index.html\">&larr; all models</a></p>\n";
        page << "<h1><code>" << html_escape(model.name) << "</code></h1>\n";
        if (props && props->description)
            page << "<p>" << html_escape(*props->description) << "</p>\n";
        page << "<table>\n";
        page << "<tr><th>Path</th><td>" << html_escape(model.path) << "</td></tr>\n";
        page << "<tr><th>Layer</th><td>" << layer_name(model.layer) << "</td></tr>\n";
        if (props && props->owner)
            page << "<tr><th>Owner</th><td>" << html_escape(*props->owner) << "</td></tr>\n";
        if (props && !props->tags.empty()) {
            std::string tags;
            for (const auto& t : props->tags) tags += (tags.empty() ? "" : ", ") + t;
            page << "<tr><th>Tags</th><td>" << html_escape(tags) << "</td></tr>\n";
        }
        if (props && props->materialized)
            page << "<tr><th>Materialized</th><td>" << html_escape(*props->materialized)
                 << "</td></tr>\n";
        if (props && props->target_schema)
            page << "<tr><th>Target schema</th><td>" << html_escape(*props->target_schema)
                 << "</td></tr>\n";
        page << "</table>\n";

        if (props && !props->columns.empty()) {
            page << "<h2>Columns</h2>\n<table>\n<tr><th>Column</th><th>Description</th></tr>\n";
            for (const auto& [name, doc] : props->columns)
                page << "<tr><td><code>" << html_escape(name) << "</code></td><td>"
                     << html_escape(doc) << "</td></tr>\n";
            page << "</table>\n";
        }
        if (props && !props->tests.empty()) {
            page << "<h2>Tests</h2>\n<ul>\n";
            for (const auto& test : props->tests) {
                page << "<li><code>" << html_escape(test.test_type);
                if (test.column) page << "(" << html_escape(*test.column) << ")";
                page << "</code></li>\n";
            }
            page << "</ul>\n";
        }

        auto list_neighbors = [&](const char* title, std::vector<NodeId> nodes) {
            std::sort(nodes.begin(), nodes.end());
            page << "<h2>" << title << "</h2>\n";
            if (nodes.empty()) {
                page << "<p>none</p>\n";
                return;
            }
            page << "<ul>\n";
            for (const auto& node : nodes) {
                if (node.kind == NodeId::Kind::Model)
                    page << "<li><a href=\"" << html_escape(node.name) << ".html\"><code>"
                         << html_escape(node.name) << "</code></a></li>\n";
                else
                    page << "<li><code>source " << html_escape(node.name) << "</code></li>\n";
            }
            page << "</ul>\n";
        };
        NodeId self = model_node(model.name);
        list_neighbors("Depends on", graph.dependencies_of(self));
        list_neighbors("Feeds", graph.dependents_of(self));
        page << "</body>\n</html>\n";

        fs::path page_path = out_dir / (model.name + ".html");
        write_file(page_path, page.str());
        written.push_back(page_path);
    }
    return written;
}

}  // namespace dataops
