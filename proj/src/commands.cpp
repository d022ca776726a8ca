#include "epi/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "epi/error.hpp"
#include "epi/pipeline.hpp"
#include "epi/reports.hpp"

namespace epi::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + p.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
    out << text;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Writes `<stem>.json` and/or `<stem>.csv` under the output directory.
void emit(const GlobalOptions& g, const std::string& stem, const json& j, const std::string& csv) {
    if (!g.out_dir) return;
    if (g.format != OutputFormat::Csv) write_text(*g.out_dir / (stem + ".json"), j.dump(2) + "\n");
    if (g.format != OutputFormat::Json && !csv.empty()) write_text(*g.out_dir / (stem + ".csv"), csv);
}

json global_json(const GlobalOptions& g) {
    return {{"split", to_json(g.split())}, {"impute", to_string(g.impute)}, {"fill_gaps", g.fill_gaps}};
}

template <typename T, typename F>
T parse_or_throw(const std::string& text, F from_string, const char* what) {
    const auto v = from_string(text);
    if (!v) throw Error(ErrorCode::InvalidConfig, std::string("unknown ") + what + " '" + text + "'");
    return *v;
}

void finish(json& manifest) { manifest["timestamps"]["finished"] = utc_now(); }

TrainedModel load_model(const fs::path& file, std::string* text_out = nullptr) {
    const std::string text = read_text(file);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, "model file '" + file.string() + "' is not JSON: " + e.what());
    }
    if (text_out) *text_out = text;
    return model_from_json(j);
}

}  // namespace

ModelConfig resolve_model_config(const ModelOptions& m, std::uint64_t seed) {
    const auto family = parse_or_throw<ModelFamily>(m.family, model_family_from_string, "model family");
    if (m.slot) {
        if (*m.slot < 1 || *m.slot > 5) throw Error(ErrorCode::InvalidConfig, "slot must be 1..5");
        for (const auto& s : default_grid(grid_options(m, seed)))
            if (s.family() == family && s.slot == *m.slot) return s.config;
    }
    switch (family) {
        case ModelFamily::Mlp: {
            MlpConfig c;
            c.hidden_layers = m.hidden_layers;
            c.neurons_per_layer = m.neurons;
            c.activation = parse_or_throw<Activation>(m.activation, activation_from_string, "activation");
            c.optimizer = parse_or_throw<MlpOptimizer>(m.optimizer, mlp_optimizer_from_string, "optimizer");
            c.max_iterations = m.max_iter;
            c.learning_rate = m.mlp_learning_rate;
            c.seed = seed;
            return c;
        }
        case ModelFamily::Svr: {
            SvrConfig c;
            c.kernel.kind = parse_or_throw<KernelKind>(m.kernel, kernel_kind_from_string, "kernel");
            c.kernel.degree = m.degree;
            c.kernel.gamma = m.gamma;
            c.kernel.coef0 = m.coef0;
            c.c = m.c;
            c.epsilon = m.epsilon;
            c.max_passes = m.max_passes;
            return c;
        }
        case ModelFamily::LinReg: return LinRegConfig{m.learning_rate, m.iterations};
    }
    throw Error(ErrorCode::InvalidConfig, "unreachable");
}

GridOptions grid_options(const ModelOptions& m, std::uint64_t seed) {
    GridOptions o;
    o.mlp_hidden_layers = m.hidden_layers;
    o.mlp_neurons = m.neurons;
    o.mlp_seed = seed;
    o.svr_c = m.c;
    o.svr_epsilon = m.epsilon;
    return o;
}

json make_manifest(const std::string& command, json config, json input, std::uint64_t seed) {
    return {{"command", command},
            {"config", std::move(config)},
            {"input", std::move(input)},
            {"seed", seed},
            {"tool_version", kToolVersion},
            {"timestamps", {{"started", utc_now()}, {"finished", nullptr}}}};
}

json without_timestamps(json report) {
    if (report.contains("manifest")) report["manifest"].erase("timestamps");
    return report;
}

CaseSeries load_series(const fs::path& csv, const GlobalOptions& g) {
    ParseOptions po;
    po.fill_gaps = g.fill_gaps;
    return load_csv(csv, g.schema, po);
}

json cmd_stats(const fs::path& csv, const GlobalOptions& g) {
    const CaseSeries series = load_series(csv, g);
    json manifest = make_manifest("stats", {{"csv", csv.string()}}, to_json(fingerprint(series)), g.seed);
    const StatsTable table = stats_table(series);
    json report = {{"columns", to_json(table)}};
    finish(manifest);
    report["manifest"] = manifest;
    emit(g, "stats", report, to_csv(table));
    return report;
}

json cmd_train(const fs::path& csv, const TrainOptions& t, const GlobalOptions& g) {
    const CaseSeries series = load_series(csv, g);
    TrainRequest req;
    req.config = resolve_model_config(t.model, g.seed);
    req.target = t.target;
    req.features = t.features;
    req.split = g.split();
    req.impute = g.impute;

    json features = json::array();
    for (auto f : t.features) features.push_back(to_string(f));
    json config = global_json(g);
    config["csv"] = csv.string();
    config["model"] = config_to_json(req.config);
    config["target"] = to_string(t.target);
    config["features"] = features;
    json manifest = make_manifest("train", config, to_json(fingerprint(series)), g.seed);

    const PipelineResult r = run_pipeline(series, req);
    const fs::path model_file = t.model_file ? *t.model_file : (g.out_dir ? *g.out_dir : fs::path(".")) / "model.json";
    finish(manifest);
    json doc = model_to_json(r.model);
    doc["manifest"] = manifest;
    write_text(model_file, doc.dump(2) + "\n");

    json report = {{"model_file", model_file.string()},
                   {"family", to_string(r.model.family())},
                   {"target", to_string(t.target)},
                   {"mse", r.scaled.mse},
                   {"r2", r.scaled.r2},
                   {"scaled", to_json(r.scaled)},
                   {"original", to_json(r.original)},
                   {"fit", {{"status", r.model.info.status}, {"iterations", r.model.info.iterations},
                            {"flag", r.model.info.flag}}},
                   {"manifest", manifest}};
    emit(g, "train_eval", report, {});
    return report;
}

json cmd_eval(const fs::path& model_file, const fs::path& csv, bool all_rows, const GlobalOptions& g) {
    std::string text;
    const TrainedModel model = load_model(model_file, &text);
    const json doc = json::parse(text);
    const CaseSeries series = load_series(csv, g);

    SplitSpec split = g.split();
    ImputePolicy impute = g.impute;
    if (doc.contains("manifest")) {
        const auto& cfg = doc["manifest"]["config"];
        split.train_fraction = cfg["split"]["train_fraction"].get<double>();
        split.mode = *split_mode_from_string(cfg["split"]["mode"].get<std::string>());
        split.seed = cfg["split"]["seed"].get<std::uint64_t>();
        impute = *impute_policy_from_string(cfg["impute"].get<std::string>());
    }
    const CaseSeries imputed = impute_missing(series, impute, required_columns(model.target, model.features));
    const SupervisedData data = build_supervised(imputed, model.target, model.features);
    Matrix x = data.x;
    Vector y = data.y;
    if (!all_rows) {
        const Split s = epi::split(data.x, data.y, split);
        x = s.x_test;
        y = s.y_test;
    }
    const Vector pred_scaled = model.predict_scaled(transform(model.x_scaler, x));
    const Vector y_scaled = transform(model.y_scaler, y);
    const EvalResult scaled = evaluate(y_scaled, pred_scaled, MetricSpace::Scaled);
    const EvalResult original = evaluate(y, inverse_transform(model.y_scaler, pred_scaled), MetricSpace::Original);

    json config = global_json(g);
    config["split"] = to_json(split);
    config["impute"] = to_string(impute);
    config["model_file"] = model_file.string();
    config["model_hash"] = content_hash(text);
    config["csv"] = csv.string();
    config["rows"] = all_rows ? "all" : "test";
    json manifest = make_manifest("eval", config, to_json(fingerprint(series)), g.seed);
    finish(manifest);
    json report = {{"mse", scaled.mse},
                   {"r2", scaled.r2},
                   {"scaled", to_json(scaled)},
                   {"original", to_json(original)},
                   {"manifest", manifest}};
    emit(g, "eval", report, {});
    return report;
}

json cmd_grid(const fs::path& csv, const ModelOptions& m, const GlobalOptions& g) {
    const CaseSeries series = load_series(csv, g);
    const GridOptions go = grid_options(m, g.seed);
    const auto slots = default_grid(go);
    json config = global_json(g);
    config["csv"] = csv.string();
    config["mlp_architecture"] = {{"hidden_layers", go.mlp_hidden_layers}, {"neurons_per_layer", go.mlp_neurons}};
    config["svr"] = {{"c", go.svr_c}, {"epsilon", go.svr_epsilon}};
    config["workers"] = g.workers;
    json manifest = make_manifest("grid", config, to_json(fingerprint(series)), g.seed);

    GridRunOptions ro;
    ro.workers = g.workers;
    ro.impute = g.impute;
    const ScoreTable table = run_grid(series, g.split(), slots, ro);
    json report = to_json(table);
    json best = json::object();
    for (auto f : kAllFamilies) {
        try {
            const auto b = select_best(table, f);
            best[std::string(to_string(f))] = {{"slot", b.slot}, {"description", describe_config(b.config)}};
        } catch (const Error&) {
            best[std::string(to_string(f))] = nullptr;
        }
    }
    report["best"] = best;
    finish(manifest);
    report["manifest"] = manifest;
    emit(g, "score_table", report, to_csv(table));
    return report;
}

json cmd_forecast(const fs::path& model_file, const ForecastOptions& f, const GlobalOptions& g) {
    std::string text;
    const TrainedModel model = load_model(model_file, &text);
    const long last = f.last_day_index.value_or(model.last_day_index);
    const Date start = f.start.value_or(model.last_date.plus_days(1));
    const std::string model_id = std::string(to_string(model.family())) + ":" + content_hash(text);

    json config = global_json(g);
    config["model_file"] = model_file.string();
    config["model_hash"] = content_hash(text);
    config["horizon"] = f.horizon;
    config["start"] = start.iso();
    config["last_day_index"] = last;
    config["label"] = f.label;
    config["scale"] = to_string(f.scale);
    if (f.history_csv) config["history_csv"] = f.history_csv->string();
    json manifest = make_manifest("forecast", config, {{"model_hash", content_hash(text)}}, g.seed);

    const ForecastReport fr = forecast(model, last, start, f.horizon, model_id, f.label);
    json report = to_json(fr);
    if (f.history_csv) {
        const CaseSeries history = load_series(*f.history_csv, g);
        const auto rows = emit_plot_series(history, fr, f.scale);
        json plot = plot_to_json(rows, f.scale);
        emit(g, "forecast_plot", plot, plot_to_csv(rows, f.scale));
    }
    finish(manifest);
    report["manifest"] = manifest;
    emit(g, "forecast", report, to_csv(fr));
    return report;
}

json replay_forecast(const json& manifest, const GlobalOptions& g) {
    if (manifest.at("command").get<std::string>() != "forecast")
        throw Error(ErrorCode::InvalidConfig, "manifest is not a forecast manifest");
    const auto& cfg = manifest.at("config");
    const fs::path model_file = cfg.at("model_file").get<std::string>();
    const std::string text = read_text(model_file);
    if (content_hash(text) != cfg.at("model_hash").get<std::string>())
        throw Error(ErrorCode::InvalidConfig, "model file changed since the manifest was written");
    ForecastOptions f;
    f.horizon = cfg.at("horizon").get<int>();
    f.start = Date::parse(cfg.at("start").get<std::string>());
    f.last_day_index = cfg.at("last_day_index").get<long>();
    f.label = cfg.at("label").get<std::string>();
    f.scale = *plot_scale_from_string(cfg.at("scale").get<std::string>());
    if (cfg.contains("history_csv")) f.history_csv = fs::path(cfg.at("history_csv").get<std::string>());
    return cmd_forecast(model_file, f, g);
}

json cmd_compare(const fs::path& csv, const CompareOptions& c, const ModelOptions& m, const GlobalOptions& g) {
    const CaseSeries series = load_series(csv, g);
    const GridOptions go = grid_options(m, g.seed);
    const auto grid = default_grid(go);

    std::map<ModelFamily, std::optional<int>> requested{
        {ModelFamily::Mlp, c.mlp_slot}, {ModelFamily::Svr, c.svr_slot}, {ModelFamily::LinReg, c.linreg_slot}};
    std::vector<RegressorSlot> missing;
    for (const auto& s : grid)
        if (!requested[s.family()]) missing.push_back(s);
    std::optional<ScoreTable> table;
    if (!missing.empty()) {
        GridRunOptions ro;
        ro.workers = g.workers;
        ro.impute = g.impute;
        table = run_grid(series, g.split(), missing, ro);
    }
    std::vector<RegressorSlot> best;
    for (auto f : kAllFamilies) {
        if (requested[f]) {
            for (const auto& s : grid)
                if (s.family() == f && s.slot == *requested[f]) best.push_back(s);
        } else {
            best.push_back(select_best(*table, f));
        }
    }

    json config = global_json(g);
    config["csv"] = csv.string();
    config["target"] = to_string(c.target);
    config["horizon"] = c.horizon;
    config["mlp_architecture"] = {{"hidden_layers", go.mlp_hidden_layers}, {"neurons_per_layer", go.mlp_neurons}};
    json manifest = make_manifest("compare", config, to_json(fingerprint(series)), g.seed);

    const ComparisonReport rep = compare_models(series, g.split(), best, c.target, c.horizon, g.impute);
    json report = to_json(rep);
    finish(manifest);
    report["manifest"] = manifest;
    emit(g, "comparison", report, to_csv(rep));
    return report;
}

json cmd_scenario(const fs::path& csv, const ScenarioOptions& s, const ModelOptions& m, const GlobalOptions& g) {
    const CaseSeries series = load_series(csv, g);
    const ModelConfig cfg = resolve_model_config(m, g.seed);
    SplitSpec split = g.split();
    split.mode = SplitMode::Chronological;

    json config = global_json(g);
    config["split"] = to_json(split);
    config["csv"] = csv.string();
    config["from"] = s.from.iso();
    config["to"] = s.to.iso();
    config["horizon"] = s.horizon;
    config["label"] = s.label;
    config["model"] = config_to_json(cfg);
    json manifest = make_manifest("scenario", config, to_json(fingerprint(series)), g.seed);

    const ScenarioResult result = scenario_run(series, s.from, s.to, cfg, split, s.horizon, s.label, g.impute);
    const CaseSeries windowed = window(series, s.from, s.to);
    json targets = json::array();
    for (const auto& t : result.targets) {
        const std::string name(to_string(t.target));
        targets.push_back({{"target", name},
                           {"scaled", to_json(t.scaled)},
                           {"original", to_json(t.original)},
                           {"forecast", to_json(t.forecast)}});
        const auto rows = emit_plot_series(windowed, t.forecast, s.scale);
        emit(g, "scenario_" + name + "_forecast", to_json(t.forecast), to_csv(t.forecast));
        emit(g, "scenario_" + name + "_plot", plot_to_json(rows, s.scale), plot_to_csv(rows, s.scale));
    }
    json report = {{"label", result.label}, {"from", s.from.iso()}, {"to", s.to.iso()}, {"targets", targets}};
    finish(manifest);
    report["manifest"] = manifest;
    emit(g, "scenario", report, {});
    return report;
}

json cmd_synth(const SyntheticSpec& spec, const fs::path& out_csv) {
    const CaseSeries series = synthetic_epidemic(spec);
    write_text(out_csv, serialize_csv(series));
    return {{"file", out_csv.string()}, {"rows", series.size()}, {"seed", spec.seed},
            {"first_date", series.first_date().iso()}, {"last_date", series.last_date().iso()}};
}

}  // namespace epi::cli
