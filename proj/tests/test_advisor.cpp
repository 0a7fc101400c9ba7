#include "doctest.h"

#include <fstream>

#include "dataops/advisor.hpp"
#include "support/fixture_builder.hpp"

using namespace dataops;

namespace {

ModelUnit sample_model() {
    ModelUnit m;
    m.name = "int_orders";
    m.path = "models/intermediate/int_orders.sql";
    m.layer = Layer::Intermediate;
    m.raw_sql = "select 1 as one\n";
    return m;
}

}  // namespace

TEST_CASE("advisor: unconfigured means skipped with no findings") {
    PipelineConfig cfg = default_config();
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict.status == AdvisorVerdict::Status::Skipped);
    CHECK(verdict.notes.empty());
    CHECK(findings.empty());
}

TEST_CASE("advisor: ok stub yields no findings") {
    PipelineConfig cfg = default_config();
    cfg.advisor.command = "cat >/dev/null; printf '{\"status\":\"ok\",\"notes\":[]}'";
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict.status == AdvisorVerdict::Status::Ok);
    CHECK(findings.empty());
}

TEST_CASE("advisor: one note becomes one advisory finding at its line") {
    PipelineConfig cfg = default_config();
    cfg.advisor.command =
        "cat >/dev/null; printf "
        "'{\"status\":\"advisory\",\"notes\":[{\"message\":\"qualify the join\",\"line\":4}]}'";
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict.status == AdvisorVerdict::Status::Advisory);
    REQUIRE(verdict.notes.size() == 1);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].severity == Severity::Advisory);
    CHECK(findings[0].line == 4);
    CHECK(findings[0].message.find("qualify the join") != std::string::npos);
}

TEST_CASE("advisor: request carries model, sql and prompt") {
    PipelineConfig cfg = default_config();
    // Echo the model name back as a note; proves the request reached stdin.
    cfg.advisor.command =
        "in=$(cat); case \"$in\" in *int_orders*) printf "
        "'{\"status\":\"advisory\",\"notes\":[{\"message\":\"saw it\"}]}';; *) printf "
        "'{\"status\":\"ok\",\"notes\":[]}';; esac";
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict.status == AdvisorVerdict::Status::Advisory);
    REQUIRE(findings.size() == 1);
    CHECK_FALSE(findings[0].line.has_value());
}

TEST_CASE("advisor: malformed response or nonzero exit is unavailable plus warning") {
    PipelineConfig cfg = default_config();
    cfg.advisor.command = "cat >/dev/null; printf 'not json'";
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict.status == AdvisorVerdict::Status::Unavailable);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].severity == Severity::Warning);

    cfg.advisor.command = "cat >/dev/null; exit 9";
    auto [verdict2, findings2] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict2.status == AdvisorVerdict::Status::Unavailable);
    REQUIRE(findings2.size() == 1);
    CHECK(findings2[0].message.find("status 9") != std::string::npos);
}

TEST_CASE("advisor: timeout is unavailable") {
    PipelineConfig cfg = default_config();
    cfg.advisor.command = "sleep 5";
    cfg.advisor.timeout_s = 1;
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, ".");
    CHECK(verdict.status == AdvisorVerdict::Status::Unavailable);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("timed out") != std::string::npos);
}

TEST_CASE("advisor: prompt template file with placeholders") {
    auto dir = fixtures::temp_dir("advisor-prompt");
    {
        std::ofstream out(dir / "prompt.txt");
        out << "review {model} now: {sql}";
    }
    PipelineConfig cfg = default_config();
    cfg.advisor.prompt_template = "prompt.txt";
    // The stub succeeds only if the rendered prompt contains the model name
    // after the word "review" (placeholder substitution happened).
    cfg.advisor.command =
        "in=$(cat); case \"$in\" in *'review int_orders now'*) printf "
        "'{\"status\":\"ok\",\"notes\":[]}';; *) exit 3;; esac";
    auto [verdict, findings] = check_ai_feedback(sample_model(), cfg, dir);
    CHECK(verdict.status == AdvisorVerdict::Status::Ok);
    CHECK(findings.empty());
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_command: captures output and exit codes") {
    CommandResult r = run_command("printf hello", "", 5, ".");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "hello");
    CHECK_FALSE(r.timed_out);

    CommandResult big = run_command("cat", std::string(256 * 1024, 'x'), 10, ".");
    CHECK(big.exit_code == 0);
    CHECK(big.output.size() == 256 * 1024);
}
