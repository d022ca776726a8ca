#include "epi/reports.hpp"

#include <charconv>
#include <cmath>

namespace epi {

using nlohmann::json;

std::string format_number(double v) {
    if (!std::isfinite(v)) return {};
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string{};
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

}  // namespace

json to_json(const EvalResult& r) {
    return {{"mse", r.mse}, {"r2", r.r2}, {"n", r.n}, {"space", to_string(r.space)}};
}

json to_json(const SummaryStats& s) {
    return {{"count", s.count},           {"mean", number_or_null(s.mean)}, {"std", number_or_null(s.std)},
            {"min", number_or_null(s.min)}, {"q25", number_or_null(s.q25)},   {"q50", number_or_null(s.q50)},
            {"q75", number_or_null(s.q75)}, {"max", number_or_null(s.max)}};
}

json to_json(const SplitSpec& s) {
    return {{"train_fraction", s.train_fraction}, {"mode", to_string(s.mode)}, {"seed", s.seed}};
}

json to_json(const DatasetFingerprint& fp) {
    return {{"rows", fp.rows}, {"first_date", fp.first_date}, {"last_date", fp.last_date},
            {"column_hashes", fp.column_hashes}};
}

StatsTable stats_table(const CaseSeries& series) {
    StatsTable t;
    std::vector<double> days;
    for (const auto& r : series.records) days.push_back(static_cast<double>(r.day_index));
    t.columns.push_back("day_index");
    t.stats.push_back(summarize(days));
    for (Column c : kAllColumns) {
        t.columns.emplace_back(to_string(c));
        t.stats.push_back(summarize(series.present(c)));
    }
    return t;
}

json to_json(const StatsTable& t) {
    json cols = json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) cols[t.columns[i]] = to_json(t.stats[i]);
    return cols;
}

std::string to_csv(const StatsTable& t) {
    std::string out = "statistic";
    for (const auto& c : t.columns) out += "," + c;
    out += "\n";
    const char* names[] = {"Count", "Mean", "Std", "min", "25%", "50%", "75%", "max"};
    for (int row = 0; row < 8; ++row) {
        out += names[row];
        for (const auto& s : t.stats) {
            out += ",";
            if (row == 0) {
                out += std::to_string(s.count);
                continue;
            }
            const double values[] = {0.0, s.mean, s.std, s.min, s.q25, s.q50, s.q75, s.max};
            out += format_number(values[row]);
        }
        out += "\n";
    }
    return out;
}

std::string describe_config(const ModelConfig& cfg) {
    return std::visit(
        [](const auto& c) -> std::string {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, MlpConfig>) {
                return std::string(to_string(c.activation)) + "/" + std::string(to_string(c.optimizer)) +
                       " max_iter=" + std::to_string(c.max_iterations) + " " + std::to_string(c.hidden_layers) +
                       "x" + std::to_string(c.neurons_per_layer);
            } else if constexpr (std::is_same_v<C, SvrConfig>) {
                std::string k(to_string(c.kernel.kind));
                if (c.kernel.kind == KernelKind::Poly) k += " degree=" + std::to_string(c.kernel.degree);
                return k;
            } else {
                return "lr=" + format_number(c.learning_rate) + " iterations=" + std::to_string(c.iterations);
            }
        },
        cfg);
}

json to_json(const ScoreTable& t) {
    json cells = json::array();
    for (const auto& c : t.cells) {
        cells.push_back({{"family", to_string(c.family)},
                         {"slot", c.slot},
                         {"target", to_string(c.target)},
                         {"config", config_to_json(c.config)},
                         {"description", describe_config(c.config)},
                         {"scaled", c.scaled ? to_json(*c.scaled) : json(nullptr)},
                         {"original", c.original ? to_json(*c.original) : json(nullptr)},
                         {"status", c.status},
                         {"iterations", c.iterations},
                         {"flagged", c.flagged()},
                         {"flag", c.flag},
                         {"message", c.message}});
    }
    json features = json::array();
    for (auto f : t.features) features.push_back(to_string(f));
    json reference = json::array();
    for (const auto& r : reference_best_scores())
        reference.push_back(
            {{"family", to_string(r.family)}, {"slot", r.slot}, {"confirmed", r.confirmed}, {"deaths", r.deaths}});
    return {{"cells", cells},
            {"metadata",
             {{"split", to_json(t.split)},
              {"seed", t.split.seed},
              {"impute", to_string(t.impute)},
              {"features", features},
              {"dataset", to_json(t.dataset)}}},
            {"reference_scores", reference}};
}

std::string to_csv(const ScoreTable& t) {
    std::string out = "family,slot,target,config,r2,mse,r2_original,mse_original,status,iterations,flag\n";
    for (const auto& c : t.cells) {
        out += std::string(to_string(c.family)) + "," + std::to_string(c.slot) + "," +
               std::string(to_string(c.target)) + ",\"" + describe_config(c.config) + "\",";
        out += (c.scaled ? format_number(c.scaled->r2) : "") + "," + (c.scaled ? format_number(c.scaled->mse) : "") +
               ",";
        out += (c.original ? format_number(c.original->r2) : "") + "," +
               (c.original ? format_number(c.original->mse) : "") + ",";
        out += c.status + "," + std::to_string(c.iterations) + "," + c.flag + "\n";
    }
    out += "# reference best cells (confirmed/deaths):";
    for (const auto& r : reference_best_scores())
        out += " " + std::string(to_string(r.family)) + "#" + std::to_string(r.slot) + " " +
               format_number(r.confirmed) + "/" + format_number(r.deaths) + ";";
    out += "\n";
    return out;
}

json to_json(const ForecastReport& r) {
    json preds = json::array();
    for (const auto& p : r.predictions)
        preds.push_back({{"date", p.date.iso()}, {"day_index", p.day_index}, {"predicted", p.value}, {"raw", p.raw}});
    return {{"start_date", r.start_date.iso()},
            {"horizon_days", r.horizon_days},
            {"target", to_string(r.target)},
            {"model_id", r.model_id},
            {"scenario_label", r.scenario_label},
            {"range_min", r.range_min},
            {"range_max", r.range_max},
            {"range_text", format_range(r)},
            {"predictions", preds}};
}

std::string to_csv(const ForecastReport& r) {
    std::string out = "date,day_index,predicted,raw\n";
    for (const auto& p : r.predictions)
        out += p.date.iso() + "," + std::to_string(p.day_index) + "," + std::to_string(p.value) + "," +
               format_number(p.raw) + "\n";
    return out;
}

json to_json(const ComparisonReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json pred = json::object();
        for (const auto& [f, v] : row.predicted) pred[std::string(to_string(f))] = v;
        rows.push_back({{"date", row.date.iso()},
                        {"day_index", row.day_index},
                        {"in_test", row.in_test},
                        {"observed", row.observed ? json(*row.observed) : json(nullptr)},
                        {"predicted", pred}});
    }
    json scores = json::object();
    for (const auto& [f, e] : r.test_scores) scores[std::string(to_string(f))] = to_json(e);
    json slots = json::object();
    for (const auto& [f, s] : r.slots) slots[std::string(to_string(f))] = s;
    return {{"target", to_string(r.target)}, {"slots", slots}, {"test_scores", scores}, {"rows", rows}};
}

std::string to_csv(const ComparisonReport& r) {
    std::string out = "date,day_index,in_test,observed,mlp,svr,linreg\n";
    for (const auto& row : r.rows) {
        out += row.date.iso() + "," + std::to_string(row.day_index) + "," + (row.in_test ? "1" : "0") + "," +
               opt_number(row.observed);
        for (auto f : kAllFamilies) {
            auto it = row.predicted.find(f);
            out += "," + (it == row.predicted.end() ? std::string{} : format_number(it->second));
        }
        out += "\n";
    }
    return out;
}

json plot_to_json(const std::vector<PlotRow>& rows, PlotScale scale) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"date", r.date.iso()},
                       {"observed", r.observed ? json(*r.observed) : json(nullptr)},
                       {"predicted", r.predicted ? json(*r.predicted) : json(nullptr)},
                       {"scale", to_string(scale)},
                       {"value", number_or_null(r.value)}});
    return out;
}

std::string plot_to_csv(const std::vector<PlotRow>& rows, PlotScale scale) {
    std::string out = "date,observed,predicted,scale,value\n";
    for (const auto& r : rows)
        out += r.date.iso() + "," + opt_number(r.observed) + "," + opt_number(r.predicted) + "," +
               std::string(to_string(scale)) + "," + format_number(r.value) + "\n";
    return out;
}

}  // namespace epi
