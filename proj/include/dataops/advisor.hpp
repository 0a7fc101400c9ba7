#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dataops/config.hpp"
#include "dataops/findings.hpp"
#include "dataops/project.hpp"

namespace dataops {

struct AdvisorNote {
    std::string message;
    std::optional<int> line;
};

struct AdvisorVerdict {
    enum class Status { Ok, Advisory, Skipped, Unavailable };
    Status status = Status::Skipped;
    std::vector<AdvisorNote> notes;
};

std::string advisor_status_name(AdvisorVerdict::Status status);

struct CommandResult {
    int exit_code = -1;
    std::string output;
    bool timed_out = false;
};

// Runs `command` through /bin/sh -c with `input` on stdin, capturing
// stdout. Kills the process after `timeout_s` seconds.
CommandResult run_command(const std::string& command, const std::string& input,
                          int timeout_s, const std::filesystem::path& workdir);

// Sends {model, sql, prompt} to the configured advisor command and reads
// back {status, notes:[{message, line?}]}. Notes become advisory
// findings; a broken advisor is a pinned warning, never a hard failure.
std::pair<AdvisorVerdict, std::vector<Finding>> check_ai_feedback(
    const ModelUnit& model, const PipelineConfig& cfg,
    const std::filesystem::path& project_root);

}  // namespace dataops
