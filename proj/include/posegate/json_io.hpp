#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "posegate/bench.hpp"
#include "posegate/eval.hpp"
#include "posegate/gate.hpp"
#include "posegate/tune.hpp"

namespace posegate {

// One decision-log line: image_id, verdict, retrieved_id, match_count,
// pred_pose[7], timings_us{predict,retrieve,extract,match}.
nlohmann::json ToJson(const GateDecision& d);
nlohmann::json ToJson(const TuneReport& r);
nlohmann::json ToJson(const EvalReport& r);
nlohmann::json ToJson(const RunComparison& c);
nlohmann::json ToJson(const BenchReport& r);

TuneReport TuneReportFromJson(const nlohmann::json& j);

void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace posegate
