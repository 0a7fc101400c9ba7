#include "dataops/advisor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dataops {

namespace {

constexpr const char* kAiFeedback = "check_ai_feedback";

constexpr const char* kDefaultPrompt =
    "You review one SQL model from an analytics repository.\n"
    "Point out logic problems, redundant work, and unclear naming.\n"
    "Model: {model}\n"
    "SQL:\n{sql}\n";

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    std::string needle = "{" + key + "}";
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

std::string render_prompt(const ModelUnit& model, const PipelineConfig& cfg,
                          const std::filesystem::path& root) {
    std::string text = kDefaultPrompt;
    if (!cfg.advisor.prompt_template.empty()) {
        std::ifstream in(root / cfg.advisor.prompt_template, std::ios::binary);
        if (in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
    }
    text = substitute(std::move(text), "model", model.name);
    text = substitute(std::move(text), "sql", model.raw_sql);
    return text;
}

}  // namespace

std::string advisor_status_name(AdvisorVerdict::Status status) {
    switch (status) {
        case AdvisorVerdict::Status::Ok: return "ok";
        case AdvisorVerdict::Status::Advisory: return "advisory";
        case AdvisorVerdict::Status::Skipped: return "skipped";
        case AdvisorVerdict::Status::Unavailable: return "unavailable";
    }
    return "skipped";
}

CommandResult run_command(const std::string& command, const std::string& input,
                          int timeout_s, const std::filesystem::path& workdir) {
    CommandResult result;
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0) return result;
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        return result;
    }
    pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
        return result;
    }
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
        if (!workdir.empty()) {
            if (chdir(workdir.c_str()) != 0) _exit(127);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);

    // The child may exit without reading its input; EPIPE is fine.
    struct sigaction ignore_pipe {}, old_pipe {};
    ignore_pipe.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &ignore_pipe, &old_pipe);

    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_s);
    size_t written = 0;
    bool stdin_open = true, stdout_open = true;
    char buf[4096];
    while (stdin_open || stdout_open) {
        if (std::chrono::steady_clock::now() >= deadline) {
            result.timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
        struct pollfd fds[2];
        nfds_t nfds = 0;
        int out_idx = -1, in_idx = -1;
        if (stdout_open) {
            fds[nfds] = {out_pipe[0], POLLIN, 0};
            out_idx = static_cast<int>(nfds++);
        }
        if (stdin_open) {
            fds[nfds] = {in_pipe[1], POLLOUT, 0};
            in_idx = static_cast<int>(nfds++);
        }
        int rc = poll(fds, nfds, 100);
        if (rc < 0 && errno != EINTR) break;
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t n = read(out_pipe[0], buf, sizeof buf);
            if (n > 0) {
                result.output.append(buf, static_cast<size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                close(out_pipe[0]);
                stdout_open = false;
            }
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (written >= input.size() || (fds[in_idx].revents & (POLLERR | POLLHUP))) {
                close(in_pipe[1]);
                stdin_open = false;
            } else {
                ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
                if (n > 0) {
                    written += static_cast<size_t>(n);
                    if (written >= input.size()) {
                        close(in_pipe[1]);
                        stdin_open = false;
                    }
                } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
                    close(in_pipe[1]);
                    stdin_open = false;
                }
            }
        }
    }
    if (stdin_open) close(in_pipe[1]);
    if (stdout_open) close(out_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    sigaction(SIGPIPE, &old_pipe, nullptr);
    if (!result.timed_out && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

std::pair<AdvisorVerdict, std::vector<Finding>> check_ai_feedback(
    const ModelUnit& model, const PipelineConfig& cfg,
    const std::filesystem::path& project_root) {
    AdvisorVerdict verdict;
    std::vector<Finding> findings;
    if (cfg.advisor.command.empty()) {
        verdict.status = AdvisorVerdict::Status::Skipped;
        return {verdict, findings};
    }

    nlohmann::json request = {
        {"model", model.name},
        {"sql", model.raw_sql},
        {"prompt", render_prompt(model, cfg, project_root)},
    };
    CommandResult run = run_command(cfg.advisor.command, request.dump(), cfg.advisor.timeout_s,
                                    project_root);
    auto unavailable = [&](const std::string& why) {
        verdict.status = AdvisorVerdict::Status::Unavailable;
        verdict.notes.clear();
        Finding f = make_model_finding(kAiFeedback, Severity::Warning, model.name,
                                       "advisor unavailable: " + why);
        f.pinned_severity = true;
        findings.clear();
        findings.push_back(std::move(f));
    };
    if (run.timed_out) {
        unavailable("timed out after " + std::to_string(cfg.advisor.timeout_s) + "s");
        return {verdict, findings};
    }
    if (run.exit_code != 0) {
        unavailable("command exited with status " + std::to_string(run.exit_code));
        return {verdict, findings};
    }
    nlohmann::json response = nlohmann::json::parse(run.output, nullptr, false);
    if (response.is_discarded() || !response.is_object() || !response.contains("status") ||
        !response["status"].is_string()) {
        unavailable("malformed response");
        return {verdict, findings};
    }
    std::string status = response["status"].get<std::string>();
    if (status == "ok") verdict.status = AdvisorVerdict::Status::Ok;
    else if (status == "advisory") verdict.status = AdvisorVerdict::Status::Advisory;
    else {
        unavailable("unknown status '" + status + "'");
        return {verdict, findings};
    }
    if (response.contains("notes")) {
        if (!response["notes"].is_array()) {
            unavailable("malformed notes");
            return {verdict, findings};
        }
        for (const auto& note : response["notes"]) {
            if (!note.is_object() || !note.contains("message") ||
                !note["message"].is_string()) {
                unavailable("malformed note entry");
                return {verdict, findings};
            }
            AdvisorNote n;
            n.message = note["message"].get<std::string>();
            if (note.contains("line") && note["line"].is_number_integer())
                n.line = note["line"].get<int>();
            verdict.notes.push_back(n);
            Finding f = make_model_finding(kAiFeedback, Severity::Advisory, model.name,
                                           "advisor: " + n.message, n.line);
            findings.push_back(std::move(f));
        }
    }
    return {verdict, findings};
}

}  // namespace dataops
