#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dataops {

// Commits the current branch lacks from the base branch head; nullopt
// when the version-control tool is unavailable or the root is not a
// repository.
std::optional<int> vcs_behind_base(const std::filesystem::path& root,
                                   const std::string& base_branch);

// Model names whose files changed since `ref`; nullopt when the diff
// cannot be computed (callers fall back to the full model set).
std::optional<std::vector<std::string>> vcs_changed_models(
    const std::filesystem::path& root, const std::string& ref);

}  // namespace dataops
