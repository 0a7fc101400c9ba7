#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dataops/findings.hpp"
#include "dataops/parser.hpp"
#include "dataops/project.hpp"

namespace dataops {

struct NodeId {
    enum class Kind { Model, Source };
    Kind kind = Kind::Model;
    std::string name;  // model name, or "source.table"

    std::string str() const;  // "model:x" / "source:raw.orders"
    auto operator<=>(const NodeId&) const = default;
};

NodeId model_node(std::string name);
NodeId source_node(const std::string& source_name, const std::string& table_name);

// Edge (from, to) reads "from depends on to". Sources depend on nothing.
struct DependencyGraph {
    std::set<NodeId> nodes;
    std::set<std::pair<NodeId, NodeId>> edges;
    std::map<std::string, Layer> layer_of;  // model name -> layer

    std::vector<NodeId> dependencies_of(const NodeId& node) const;
    std::vector<NodeId> dependents_of(const NodeId& node) const;
};

struct BrokenRef {
    std::string model;
    std::string target;  // human-readable description of the missing target
    int line = 0;
    int col = 0;
};

struct GraphBuild {
    DependencyGraph graph;
    std::vector<BrokenRef> broken;
};

GraphBuild build_graph(const ProjectSnapshot& snapshot,
                       const std::map<std::string, sql::SqlAst>& asts);

// Every elementary cycle, each rotated to start at its smallest node;
// cycles ordered deterministically.
std::vector<std::vector<NodeId>> detect_cycles(const DependencyGraph& graph);

std::vector<Finding> layer_violations(const DependencyGraph& graph,
                                      const PipelineConfig& cfg);

// Non-marts models nobody depends on; marts are terminal by design.
std::vector<Finding> unreferenced_models(const DependencyGraph& graph);

// Roots plus transitive dependents, dependencies first, lexicographic
// tie-break. Throws std::logic_error on a cycle.
std::vector<NodeId> topo_order(const DependencyGraph& graph, const std::set<NodeId>& roots);

std::string graph_to_json(const DependencyGraph& graph);

}  // namespace dataops
