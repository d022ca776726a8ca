#include "epi/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "epi/error.hpp"
#include "epi/pipeline.hpp"

namespace epi {

ForecastReport forecast(const TrainedModel& model, long last_day_index, Date start_date, int horizon,
                        std::string model_id, std::string scenario_label,
                        std::optional<std::span<const double>> future_tests) {
    if (horizon < 1) throw Error(ErrorCode::InvalidConfig, "horizon must be >= 1");
    for (auto f : model.features) {
        if (f == Feature::Tests && (!future_tests || future_tests->size() < static_cast<std::size_t>(horizon)))
            throw Error(ErrorCode::FeatureMismatch,
                        "model uses the tests feature; supply one future tests value per forecast day");
    }

    Matrix x(horizon, static_cast<Eigen::Index>(model.features.size()));
    for (int h = 1; h <= horizon; ++h)
        for (std::size_t f = 0; f < model.features.size(); ++f)
            x(h - 1, static_cast<Eigen::Index>(f)) = model.features[f] == Feature::DayIndex
                                                         ? static_cast<double>(last_day_index + h)
                                                         : (*future_tests)[static_cast<std::size_t>(h - 1)];
    const Vector raw = model.predict_original(x);

    ForecastReport r;
    r.start_date = start_date;
    r.horizon_days = horizon;
    r.model_id = std::move(model_id);
    r.scenario_label = std::move(scenario_label);
    r.target = model.target;
    for (int h = 1; h <= horizon; ++h) {
        ForecastPoint p;
        p.date = start_date.plus_days(h - 1);
        p.day_index = last_day_index + h;
        p.raw = raw(h - 1);
        if (!std::isfinite(p.raw)) throw Error(ErrorCode::NonFiniteLoss, "non-finite forecast on " + p.date.iso());
        p.value = std::llround(std::max(0.0, p.raw));
        r.predictions.push_back(p);
    }
    const auto [lo, hi] = std::minmax_element(r.predictions.begin(), r.predictions.end(),
                                              [](const auto& a, const auto& b) { return a.value < b.value; });
    r.range_min = lo->value;
    r.range_max = hi->value;
    return r;
}

std::string group_thousands(long long v) {
    std::string digits = std::to_string(v < 0 ? -v : v);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return v < 0 ? "-" + out : out;
}

std::string format_range(const ForecastReport& r) {
    return std::string(to_string(r.target)) + " cases between " + group_thousands(r.range_min) + " to " +
           group_thousands(r.range_max) + " from " + r.start_date.iso() + " to " +
           r.start_date.plus_days(r.horizon_days - 1).iso();
}

ScenarioResult scenario_run(const CaseSeries& series, Date from, Date to, const ModelConfig& config,
                            const SplitSpec& split, int horizon, std::string label, ImputePolicy impute) {
    const CaseSeries windowed = window(series, from, to);
    SplitSpec chrono = split;
    chrono.mode = SplitMode::Chronological;

    ScenarioResult out;
    out.label = std::move(label);
    out.from = from;
    out.to = to;
    for (Column target : {Column::Confirmed, Column::Deaths}) {
        TrainRequest req;
        req.config = config;
        req.target = target;
        req.split = chrono;
        req.impute = impute;
        PipelineResult pr = run_pipeline(windowed, req);
        ScenarioTargetResult t;
        t.target = target;
        t.scaled = pr.scaled;
        t.original = pr.original;
        t.forecast = forecast(pr.model, pr.model.last_day_index, windowed.last_date().plus_days(1), horizon,
                              std::string(to_string(pr.model.family())) + ":" + std::string(to_string(target)),
                              out.label);
        t.model = std::move(pr.model);
        out.targets.push_back(std::move(t));
    }
    return out;
}

std::string_view to_string(PlotScale s) noexcept { return s == PlotScale::Linear ? "linear" : "log"; }

std::optional<PlotScale> plot_scale_from_string(std::string_view name) noexcept {
    if (name == "linear") return PlotScale::Linear;
    if (name == "log") return PlotScale::Log;
    return std::nullopt;
}

double plot_transform(double v, PlotScale scale) { return scale == PlotScale::Linear ? v : std::log10(v + 1.0); }

std::vector<PlotRow> emit_plot_series(const CaseSeries& history, const ForecastReport& report, PlotScale scale) {
    std::vector<PlotRow> rows;
    rows.reserve(history.size() + report.predictions.size());
    for (const auto& rec : history.records) {
        PlotRow row;
        row.date = rec.date;
        row.observed = rec.value(report.target);
        row.value = row.observed ? plot_transform(*row.observed, scale) : std::nan("");
        rows.push_back(row);
    }
    for (const auto& p : report.predictions) {
        PlotRow row;
        row.date = p.date;
        row.predicted = static_cast<double>(p.value);
        row.value = plot_transform(*row.predicted, scale);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace epi
