#include "dataops/checks_observe.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace dataops {

namespace {

constexpr const char* kConfiguredTest = "check_configured_test";
constexpr const char* kRuntime = "check_runtime_threshold";
constexpr const char* kTestRun = "check_test_run";
constexpr const char* kUatRun = "check_uat_run";

std::string test_label(const std::string& type, const std::optional<std::string>& column) {
    return column ? type + "(" + *column + ")" : type;
}

Finding pinned_warning(const char* check, const std::string& model, std::string message) {
    Finding f = make_model_finding(check, Severity::Warning, model, std::move(message));
    f.pinned_severity = true;
    return f;
}

}  // namespace

RunRecordSet load_run_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunRecordError("cannot read run records: " + path.generic_string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw RunRecordError("run records are not valid JSON: " + path.generic_string());
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
        throw RunRecordError("run records must be {\"records\": [...]}: " +
                             path.generic_string());
    RunRecordSet set;
    size_t index = 0;
    for (const auto& entry : doc["records"]) {
        std::string where = path.generic_string() + " records[" + std::to_string(index++) + "]";
        if (!entry.is_object() || !entry.contains("model") || !entry["model"].is_string())
            throw RunRecordError(where + " needs a string 'model'");
        RunRecord record;
        record.model = entry["model"].get<std::string>();
        if (entry.contains("runtime_ms")) {
            if (!entry["runtime_ms"].is_number_integer() ||
                entry["runtime_ms"].get<long long>() < 0)
                throw RunRecordError(where + ".runtime_ms must be a non-negative integer");
            record.runtime_ms = entry["runtime_ms"].get<long long>();
        }
        if (entry.contains("test_results")) {
            if (!entry["test_results"].is_array())
                throw RunRecordError(where + ".test_results must be a list");
            for (const auto& tr : entry["test_results"]) {
                if (!tr.is_object() || !tr.contains("test_type") ||
                    !tr["test_type"].is_string() || !tr.contains("passed") ||
                    !tr["passed"].is_boolean())
                    throw RunRecordError(where + ".test_results entries need test_type and passed");
                TestResult result;
                result.test_type = tr["test_type"].get<std::string>();
                if (tr.contains("column") && tr["column"].is_string())
                    result.column = tr["column"].get<std::string>();
                result.passed = tr["passed"].get<bool>();
                record.test_results.push_back(std::move(result));
            }
        }
        if (entry.contains("uat_status")) {
            std::string s = entry["uat_status"].is_string()
                                ? entry["uat_status"].get<std::string>()
                                : "";
            if (s == "success") record.uat = UatStatus::Success;
            else if (s == "failed") record.uat = UatStatus::Failed;
            else throw RunRecordError(where + ".uat_status must be success or failed");
        }
        if (!entry.contains("recorded_at") || !entry["recorded_at"].is_string())
            throw RunRecordError(where + " needs a string 'recorded_at'");
        record.recorded_at = entry["recorded_at"].get<std::string>();

        auto [it, inserted] = set.records.emplace(record.model, record);
        if (!inserted) {
            it->second = record;  // last wins
            Finding f = make_model_finding(
                "run_records", Severity::Warning, record.model,
                "duplicate run record for model '" + record.model + "'; keeping the last entry");
            f.pinned_severity = true;
            set.warnings.push_back(std::move(f));
        }
    }
    return set;
}

std::vector<Finding> check_configured_test(const ModelUnit& model,
                                           const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    const std::vector<TestDecl>* tests = nullptr;
    if (model.properties) tests = &model.properties->tests;
    const int count = tests ? static_cast<int>(tests->size()) : 0;
    if (count < cfg.min_tests)
        findings.push_back(make_model_finding(
            kConfiguredTest, Severity::Error, model.name,
            "model declares " + std::to_string(count) + " tests; at least " +
                std::to_string(cfg.min_tests) + " required"));
    auto required = cfg.required_tests_by_layer.find(layer_name(model.layer));
    if (required != cfg.required_tests_by_layer.end()) {
        for (const auto& type : required->second) {
            bool present = tests && std::any_of(tests->begin(), tests->end(),
                                                [&](const TestDecl& t) {
                                                    return t.test_type == type;
                                                });
            if (!present)
                findings.push_back(make_model_finding(
                    kConfiguredTest, Severity::Error, model.name,
                    layer_name(model.layer) + " models require a '" + type + "' test"));
        }
    }
    return findings;
}

std::vector<Finding> check_runtime_threshold(const ModelUnit& model,
                                             const RunRecord* record,
                                             const PipelineConfig& cfg) {
    std::vector<Finding> findings;
    if (!record || !record->runtime_ms) {
        findings.push_back(pinned_warning(kRuntime, model.name,
                                          "no runtime data recorded for this model"));
        return findings;
    }
    long long threshold = cfg.max_runtime_ms;
    if (model.properties) {
        auto it = model.properties->meta.find("max_runtime_ms");
        if (it != model.properties->meta.end()) {
            try {
                threshold = std::stoll(it->second);
            } catch (const std::exception&) {
                // unusable override; the configured default applies
            }
        }
    }
    if (*record->runtime_ms > threshold)
        findings.push_back(make_model_finding(
            kRuntime, Severity::Error, model.name,
            "runtime " + std::to_string(*record->runtime_ms) + " ms exceeds the limit of " +
                std::to_string(threshold) + " ms"));
    return findings;
}

std::vector<Finding> check_test_run(const ModelUnit& model, const RunRecord* record) {
    std::vector<Finding> findings;
    if (!record) {
        findings.push_back(pinned_warning(kTestRun, model.name,
                                          "no test run data recorded for this model"));
        return findings;
    }
    if (!model.properties) return findings;
    for (const auto& declared : model.properties->tests) {
        const TestResult* result = nullptr;
        for (const auto& tr : record->test_results) {
            if (tr.test_type == declared.test_type && tr.column == declared.column) {
                result = &tr;
                break;
            }
        }
        if (!result) {
            findings.push_back(make_model_finding(
                kTestRun, Severity::Error, model.name,
                "declared test " + test_label(declared.test_type, declared.column) +
                    " was not executed"));
        } else if (!result->passed) {
            findings.push_back(make_model_finding(
                kTestRun, Severity::Error, model.name,
                "test " + test_label(declared.test_type, declared.column) + " failed"));
        }
    }
    return findings;
}

std::vector<Finding> check_uat_run(const ModelUnit& model, const RunRecord* record) {
    std::vector<Finding> findings;
    if (!record || record->uat == UatStatus::Absent) {
        findings.push_back(pinned_warning(kUatRun, model.name,
                                          "no UAT evidence recorded for this model"));
        return findings;
    }
    if (record->uat == UatStatus::Failed)
        findings.push_back(make_model_finding(kUatRun, Severity::Error, model.name,
                                              "UAT run failed; results are not fit for review"));
    return findings;
}

}  // namespace dataops
