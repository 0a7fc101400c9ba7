#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "dataops/lineage.hpp"
#include "dataops/project.hpp"

namespace dataops {

struct DeployStep {
    std::string model;
    enum class Action { Run, Skip } action = Action::Run;
    std::string reason;
};

struct DeployPlan {
    std::vector<DeployStep> steps;
};

class DeployError : public std::runtime_error {
public:
    explicit DeployError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Dry-run plan: each changed model plus its transitive dependents in
// dependency order. With `full_plan`, untouched models appear as skip
// steps. Throws DeployError when the graph is cyclic.
DeployPlan plan_production(const std::set<std::string>& changed,
                           const DependencyGraph& graph, bool full_plan);

std::string plan_to_json(const DeployPlan& plan);

// Static HTML dictionary: index.html plus one page per model, no
// external resources, byte-identical on regeneration.
std::vector<std::filesystem::path> run_documentation(const ProjectSnapshot& snapshot,
                                                     const DependencyGraph& graph,
                                                     const std::filesystem::path& out_dir);

}  // namespace dataops
