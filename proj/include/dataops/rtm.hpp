#pragma once

#include <string>
#include <vector>

#include "dataops/config.hpp"

namespace dataops {

struct RtmRow {
    std::string control_id;    // C1..C12
    std::string control_name;
    std::vector<std::string> mapped_checks;
    std::string status;  // Verified | Supported | Unenforced
};

// One row per control, in scorecard order. Status reflects which mapped
// checks the configuration leaves enabled; observability and rollback
// are delegated capabilities and report as Supported.
std::vector<RtmRow> generate_rtm(const PipelineConfig& cfg);

std::string rtm_to_json(const std::vector<RtmRow>& rows);
std::string rtm_to_table(const std::vector<RtmRow>& rows);

}  // namespace dataops
