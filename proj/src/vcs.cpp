#include "dataops/vcs.hpp"

#include <cstdio>

#include "dataops/advisor.hpp"

namespace dataops {

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

std::optional<std::string> run_git(const std::filesystem::path& root,
                                   const std::string& args) {
    CommandResult result = run_command("git " + args + " 2>/dev/null", "", 20, root);
    if (result.timed_out || result.exit_code != 0) return std::nullopt;
    return result.output;
}

}  // namespace

std::optional<int> vcs_behind_base(const std::filesystem::path& root,
                                   const std::string& base_branch) {
    auto output = run_git(root, "rev-list --count HEAD.." + shell_quote(base_branch));
    if (!output) return std::nullopt;
    try {
        return std::stoi(*output);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<std::vector<std::string>> vcs_changed_models(
    const std::filesystem::path& root, const std::string& ref) {
    auto output = run_git(root, "diff --name-only " + shell_quote(ref) + " -- models");
    if (!output) return std::nullopt;
    std::vector<std::string> models;
    size_t pos = 0;
    while (pos < output->size()) {
        size_t nl = output->find('\n', pos);
        std::string line = output->substr(pos, nl == std::string::npos ? std::string::npos
                                                                       : nl - pos);
        pos = nl == std::string::npos ? output->size() : nl + 1;
        if (line.size() > 4 && line.substr(line.size() - 4) == ".sql") {
            size_t slash = line.rfind('/');
            std::string stem = line.substr(slash == std::string::npos ? 0 : slash + 1);
            models.push_back(stem.substr(0, stem.size() - 4));
        }
    }
    return models;
}

}  // namespace dataops
