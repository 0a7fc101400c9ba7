#include "dataops/lineage.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace dataops {

namespace {

constexpr const char* kDependenciesCheck = "check_model_dependencies";

Layer layer_or_other(const DependencyGraph& g, const NodeId& node) {
    auto it = g.layer_of.find(node.name);
    return it == g.layer_of.end() ? Layer::Other : it->second;
}

// Johnson-style elementary cycle enumeration, bounded for safety.
class CycleFinder {
public:
    explicit CycleFinder(const DependencyGraph& g) {
        for (const auto& n : g.nodes) nodes_.push_back(n);
        std::sort(nodes_.begin(), nodes_.end());
        adj_.resize(nodes_.size());
        for (const auto& [from, to] : g.edges) {
            size_t a = index_of(from), b = index_of(to);
            adj_[a].push_back(b);
        }
        for (auto& list : adj_) std::sort(list.begin(), list.end());
    }

    std::vector<std::vector<NodeId>> run() {
        std::vector<std::vector<NodeId>> cycles;
        blocked_.assign(nodes_.size(), false);
        block_map_.assign(nodes_.size(), {});
        for (size_t s = 0; s < nodes_.size() && cycles.size() < kMaxCycles; ++s) {
            start_ = s;
            std::fill(blocked_.begin(), blocked_.end(), false);
            for (auto& b : block_map_) b.clear();
            circuit(s, cycles);
        }
        std::sort(cycles.begin(), cycles.end());
        return cycles;
    }

private:
    static constexpr size_t kMaxCycles = 10000;
    std::vector<NodeId> nodes_;
    std::vector<std::vector<size_t>> adj_;
    std::vector<bool> blocked_;
    std::vector<std::vector<size_t>> block_map_;
    std::vector<size_t> stack_;
    size_t start_ = 0;

    size_t index_of(const NodeId& n) const {
        return static_cast<size_t>(
            std::lower_bound(nodes_.begin(), nodes_.end(), n) - nodes_.begin());
    }

    void unblock(size_t v) {
        blocked_[v] = false;
        for (size_t w : block_map_[v])
            if (blocked_[w]) unblock(w);
        block_map_[v].clear();
    }

    bool circuit(size_t v, std::vector<std::vector<NodeId>>& cycles) {
        if (cycles.size() >= kMaxCycles) return true;
        bool found = false;
        stack_.push_back(v);
        blocked_[v] = true;
        for (size_t w : adj_[v]) {
            if (w < start_) continue;  // only consider cycles rooted at start_
            if (w == start_) {
                std::vector<NodeId> cycle;
                for (size_t idx : stack_) cycle.push_back(nodes_[idx]);
                cycles.push_back(std::move(cycle));
                found = true;
            } else if (!blocked_[w]) {
                if (circuit(w, cycles)) found = true;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (size_t w : adj_[v]) {
                if (w < start_) continue;
                auto& bm = block_map_[w];
                if (std::find(bm.begin(), bm.end(), v) == bm.end()) bm.push_back(v);
            }
        }
        stack_.pop_back();
        return found;
    }
};

}  // namespace

std::string NodeId::str() const {
    return (kind == Kind::Model ? "model:" : "source:") + name;
}

NodeId model_node(std::string name) { return {NodeId::Kind::Model, std::move(name)}; }

NodeId source_node(const std::string& source_name, const std::string& table_name) {
    return {NodeId::Kind::Source, source_name + "." + table_name};
}

std::vector<NodeId> DependencyGraph::dependencies_of(const NodeId& node) const {
    std::vector<NodeId> out;
    for (const auto& [from, to] : edges)
        if (from == node) out.push_back(to);
    return out;
}

std::vector<NodeId> DependencyGraph::dependents_of(const NodeId& node) const {
    std::vector<NodeId> out;
    for (const auto& [from, to] : edges)
        if (to == node) out.push_back(from);
    return out;
}

GraphBuild build_graph(const ProjectSnapshot& snapshot,
                       const std::map<std::string, sql::SqlAst>& asts) {
    GraphBuild result;
    DependencyGraph& g = result.graph;
    for (const auto& model : snapshot.models) {
        g.nodes.insert(model_node(model.name));
        g.layer_of[model.name] = model.layer;
    }
    for (const auto& src : snapshot.sources)
        g.nodes.insert(source_node(src.source_name, src.table_name));

    for (const auto& model : snapshot.models) {
        auto it = asts.find(model.name);
        if (it == asts.end()) continue;  // unparseable; compilation reports it
        for (const auto& macro : it->second.macro_refs) {
            if (macro.kind == sql::MacroRef::Kind::Ref) {
                const std::string& target = macro.args[0];
                if (snapshot.find_model(target)) {
                    g.edges.insert({model_node(model.name), model_node(target)});
                } else {
                    result.broken.push_back(
                        {model.name, "ref('" + target + "') does not match any model",
                         macro.line, macro.col});
                }
            } else {
                const std::string& src = macro.args[0];
                const std::string& table = macro.args[1];
                if (snapshot.has_source(src, table)) {
                    g.edges.insert({model_node(model.name), source_node(src, table)});
                } else {
                    result.broken.push_back({model.name,
                                             "source('" + src + "', '" + table +
                                                 "') is not declared",
                                             macro.line, macro.col});
                }
            }
        }
    }
    return result;
}

std::vector<std::vector<NodeId>> detect_cycles(const DependencyGraph& graph) {
    return CycleFinder(graph).run();
}

std::vector<Finding> layer_violations(const DependencyGraph& graph,
                                      const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    for (const auto& [from, to] : graph.edges) {
        Layer from_layer = layer_or_other(graph, from);
        bool to_is_source = to.kind == NodeId::Kind::Source;
        Layer to_layer = to_is_source ? Layer::Other : layer_or_other(graph, to);

        if (cfg.lineage_flag_unlayered_edges &&
            (from_layer == Layer::Other || (!to_is_source && to_layer == Layer::Other))) {
            const NodeId& culprit = from_layer == Layer::Other ? from : to;
            findings.push_back(make_model_finding(
                kDependenciesCheck, Severity::Error, culprit.name,
                "model '" + culprit.name + "' is outside the staging/intermediate/marts "
                "layout but participates in dependency " + from.str() + " -> " + to.str()));
            continue;
        }
        if (to_is_source) {
            if (from_layer != Layer::Staging && cfg.lineage_forbid_source_reads_outside_staging)
                findings.push_back(make_model_finding(
                    kDependenciesCheck, Severity::Error, from.name,
                    layer_name(from_layer) + " model '" + from.name +
                        "' reads " + to.str() + " directly; only staging models may call source()"));
            continue;
        }
        if (from_layer == Layer::Staging && cfg.lineage_restrict_staging_to_sources) {
            findings.push_back(make_model_finding(
                kDependenciesCheck, Severity::Error, from.name,
                "staging model '" + from.name + "' depends on model '" + to.name +
                    "'; staging models may depend on sources only"));
            continue;
        }
        if (from_layer == Layer::Intermediate && to_layer == Layer::Marts &&
            cfg.lineage_forbid_marts_to_intermediate) {
            findings.push_back(make_model_finding(
                kDependenciesCheck, Severity::Error, from.name,
                "marts model '" + to.name + "' feeds intermediate model '" + from.name +
                    "'; flow must move staging -> intermediate -> marts"));
        }
    }
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        return std::tie(*a.model, a.message) < std::tie(*b.model, b.message);
    });
    return findings;
}

std::vector<Finding> unreferenced_models(const DependencyGraph& graph) {
    std::vector<Finding> findings;
    for (const auto& node : graph.nodes) {
        if (node.kind != NodeId::Kind::Model) continue;
        if (layer_or_other(graph, node) == Layer::Marts) continue;
        bool referenced = std::any_of(graph.edges.begin(), graph.edges.end(),
                                      [&](const auto& e) { return e.second == node; });
        if (!referenced) {
            Finding f = make_model_finding(
                kDependenciesCheck, Severity::Warning, node.name,
                "model '" + node.name + "' has no dependents and is not a marts model");
            f.pinned_severity = true;
            findings.push_back(std::move(f));
        }
    }
    return findings;
}

std::vector<NodeId> topo_order(const DependencyGraph& graph, const std::set<NodeId>& roots) {
    // Closure: roots plus everything that transitively depends on them.
    std::set<NodeId> closure = roots;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [from, to] : graph.edges) {
            if (closure.count(to) && !closure.count(from)) {
                closure.insert(from);
                grew = true;
            }
        }
    }
    // Kahn over the closure-restricted edges, smallest node first.
    std::map<NodeId, int> indegree;
    for (const auto& n : closure) indegree[n] = 0;
    for (const auto& [from, to] : graph.edges)
        if (closure.count(from) && closure.count(to)) ++indegree[from];
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [n, d] : indegree)
        if (d == 0) ready.push(n);
    std::vector<NodeId> order;
    while (!ready.empty()) {
        NodeId n = ready.top();
        ready.pop();
        order.push_back(n);
        for (const auto& [from, to] : graph.edges) {
            if (to != n || !closure.count(from)) continue;
            if (--indegree[from] == 0) ready.push(from);
        }
    }
    if (order.size() != closure.size())
        throw std::logic_error("topo_order called on a cyclic graph");
    return order;
}

std::string graph_to_json(const DependencyGraph& graph) {
    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& node : graph.nodes) {
        nlohmann::json n;
        n["id"] = node.str();
        n["kind"] = node.kind == NodeId::Kind::Model ? "model" : "source";
        if (node.kind == NodeId::Kind::Model)
            n["layer"] = layer_name(layer_or_other(graph, node));
        doc["nodes"].push_back(n);
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& [from, to] : graph.edges)
        doc["edges"].push_back({{"from", from.str()}, {"to", to.str()}});
    return doc.dump(2) + "\n";
}

}  // namespace dataops
