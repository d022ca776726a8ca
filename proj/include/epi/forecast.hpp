#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epi/dataset.hpp"
#include "epi/metrics.hpp"
#include "epi/model.hpp"
#include "epi/preprocess.hpp"

namespace epi {

struct ForecastPoint {
    Date date;
    long day_index = 0;
    double raw = 0.0;     // inverse-transformed, before clamping and rounding
    long long value = 0;  // clamped at zero, rounded half away from zero
};

struct ForecastReport {
    Date start_date;
    int horizon_days = 0;
    std::vector<ForecastPoint> predictions;
    long long range_min = 0;
    long long range_max = 0;
    std::string model_id;
    std::string scenario_label;
    Column target = Column::Confirmed;
};

/// Direct multi-step forecast: day h (1-based) is predicted from feature
/// day_index = last_day_index + h and dated start_date + (h - 1).
/// Models using the `tests` feature need `future_tests` with one value per day.
ForecastReport forecast(const TrainedModel& model, long last_day_index, Date start_date, int horizon,
                        std::string model_id, std::string scenario_label = "baseline",
                        std::optional<std::span<const double>> future_tests = std::nullopt);

/// Mirrors "between 8,574 to 9,581": thousands-grouped range sentence.
std::string format_range(const ForecastReport& r);

std::string group_thousands(long long v);

struct ScenarioTargetResult {
    Column target = Column::Confirmed;
    EvalResult scaled;
    EvalResult original;
    ForecastReport forecast;
    TrainedModel model;
};

struct ScenarioResult {
    std::string label;
    Date from;
    Date to;
    std::vector<ScenarioTargetResult> targets;  // confirmed, then deaths
};

inline Date default_critical_from() { return Date::from_ymd(2021, 6, 15); }
inline Date default_critical_to() { return Date::from_ymd(2021, 8, 10); }

/// Windows the series, then for confirmed and deaths trains on the
/// chronological training part, scores the held-out tail and forecasts the
/// horizon following the window.
ScenarioResult scenario_run(const CaseSeries& series, Date from, Date to, const ModelConfig& config,
                            const SplitSpec& split, int horizon, std::string label = "critical",
                            ImputePolicy impute = ImputePolicy::Mean);

enum class PlotScale { Linear, Log };

std::string_view to_string(PlotScale s) noexcept;
std::optional<PlotScale> plot_scale_from_string(std::string_view name) noexcept;

struct PlotRow {
    Date date;
    std::optional<double> observed;
    std::optional<double> predicted;
    double value = 0.0;  // scale-transformed observed, else predicted
};

/// History rows (observed only) followed by forecast rows (predicted only).
/// Log scale maps v to log10(v + 1).
std::vector<PlotRow> emit_plot_series(const CaseSeries& history, const ForecastReport& report, PlotScale scale);

double plot_transform(double v, PlotScale scale);

}  // namespace epi
