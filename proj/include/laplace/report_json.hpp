#pragma once

#include <vector>

#include "json.hpp"
#include "laplace/harness.hpp"

namespace laplace {

nlohmann::json to_json(const RateFit& fit);
nlohmann::json to_json(const CriticalReport& report);
nlohmann::json to_json(const DriftRates& drift);
nlohmann::json to_json(const TheoremExperiment& ex);
nlohmann::json to_json(const LemmaSuite& suite);
nlohmann::json to_json(const std::vector<SuiteEntry>& suite);

}  // namespace laplace
