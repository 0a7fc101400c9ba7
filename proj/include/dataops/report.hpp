#pragma once

#include <string>
#include <vector>

#include "dataops/pipeline.hpp"
#include "dataops/rtm.hpp"

namespace dataops {

// JSON report: {version, summary:{per_stage, per_severity}, findings, rtm}.
std::string report_to_json(const PipelineResult& result, const std::vector<RtmRow>& rtm);

// Human rendering of the same content; `color` turns on ANSI styling.
std::string report_to_text(const PipelineResult& result, bool color);

}  // namespace dataops
