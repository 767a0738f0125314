#pragma once

#include <string>
#include <vector>

#include "lucky/bounds.hpp"
#include "lucky/verifier.hpp"

namespace lucky {

// Constants document. Everything except the generated_at key depends only
// on the pipeline result, so two runs on the same input differ in that key
// alone.
std::string constants_json(const PipelineResult& result, const std::string& generated_at);

// One JSON object per report, no trailing newline.
std::string report_json_line(const VerificationReport& report);

// Aligned text tables for terminals.
std::string constants_summary(const PipelineResult& result);
std::string reports_summary(const std::vector<VerificationReport>& reports);

}  // namespace lucky
