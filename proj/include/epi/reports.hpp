#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "epi/dataset.hpp"
#include "epi/forecast.hpp"
#include "epi/harness.hpp"
#include "epi/metrics.hpp"

namespace epi {

/// Shortest round-trip decimal for a double; empty for NaN.
std::string format_number(double v);

nlohmann::json to_json(const EvalResult& r);
nlohmann::json to_json(const SummaryStats& s);
nlohmann::json to_json(const SplitSpec& s);
nlohmann::json to_json(const DatasetFingerprint& fp);

/// Describe-style statistics of day_index and each count column (present values only).
struct StatsTable {
    std::vector<std::string> columns;
    std::vector<SummaryStats> stats;
};

StatsTable stats_table(const CaseSeries& series);
nlohmann::json to_json(const StatsTable& t);
/// Rows Count/Mean/Std/min/25%/50%/75%/max; undefined cells are empty.
std::string to_csv(const StatsTable& t);

nlohmann::json to_json(const ScoreTable& t);
/// One row per cell: family,slot,target,config,r2,mse,r2_original,mse_original,status,iterations,flag.
std::string to_csv(const ScoreTable& t);

nlohmann::json to_json(const ForecastReport& r);
/// date,day_index,predicted,raw
std::string to_csv(const ForecastReport& r);

nlohmann::json to_json(const ComparisonReport& r);
/// date,day_index,in_test,observed,mlp,svr,linreg
std::string to_csv(const ComparisonReport& r);

nlohmann::json plot_to_json(const std::vector<PlotRow>& rows, PlotScale scale);
/// date,observed,predicted,scale,value
std::string plot_to_csv(const std::vector<PlotRow>& rows, PlotScale scale);

std::string describe_config(const ModelConfig& cfg);

}  // namespace epi
