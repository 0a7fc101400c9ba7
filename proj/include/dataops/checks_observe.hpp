#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dataops/config.hpp"
#include "dataops/findings.hpp"
#include "dataops/project.hpp"

namespace dataops {

struct TestResult {
    std::string test_type;
    std::optional<std::string> column;
    bool passed = false;
};

enum class UatStatus { Success, Failed, Absent };

struct RunRecord {
    std::string model;
    std::optional<long long> runtime_ms;
    std::vector<TestResult> test_results;
    UatStatus uat = UatStatus::Absent;
    std::string recorded_at;
};

struct RunRecordSet {
    std::map<std::string, RunRecord> records;
    std::vector<Finding> warnings;  // duplicate entries, last wins
};

class RunRecordError : public std::runtime_error {
public:
    explicit RunRecordError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Reads {records:[{model, runtime_ms?, test_results?, uat_status?,
// recorded_at}]}. Throws RunRecordError on a malformed document.
RunRecordSet load_run_records(const std::filesystem::path& path);

// Declared-test coverage: minimum count plus per-layer required types.
std::vector<Finding> check_configured_test(const ModelUnit& model,
                                           const PipelineConfig& cfg);

// Missing evidence is a pinned warning, never a silent pass.
std::vector<Finding> check_runtime_threshold(const ModelUnit& model,
                                             const RunRecord* record,
                                             const PipelineConfig& cfg);

std::vector<Finding> check_test_run(const ModelUnit& model, const RunRecord* record);

std::vector<Finding> check_uat_run(const ModelUnit& model, const RunRecord* record);

}  // namespace dataops
