// Batch command-line front end: stats | train | eval | grid | forecast | compare | scenario | synth.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "epi/commands.hpp"
#include "epi/error.hpp"

namespace {

using namespace epi;
using namespace epi::cli;

void add_model_options(CLI::App* cmd, ModelOptions& m) {
    cmd->add_option("--model", m.family, "Model family")->check(CLI::IsMember({"mlp", "svr", "linreg"}));
    cmd->add_option("--slot", m.slot, "Use the default-grid configuration of this slot (1-5)")
        ->check(CLI::Range(1, 5));
    cmd->add_option("--hidden-layers", m.hidden_layers, "MLP hidden layers")->check(CLI::PositiveNumber);
    cmd->add_option("--neurons", m.neurons, "MLP neurons per hidden layer")->check(CLI::PositiveNumber);
    cmd->add_option("--activation", m.activation, "MLP activation")
        ->check(CLI::IsMember({"tanh", "relu", "logistic"}));
    cmd->add_option("--optimizer", m.optimizer, "MLP optimizer")->check(CLI::IsMember({"lbfgs", "sgd", "adam"}));
    cmd->add_option("--max-iter", m.max_iter, "MLP maximum iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--mlp-lr", m.mlp_learning_rate, "MLP step size for sgd/adam");
    cmd->add_option("--kernel", m.kernel, "SVR kernel")->check(CLI::IsMember({"rbf", "poly", "linear"}));
    cmd->add_option("--degree", m.degree, "SVR polynomial degree")->check(CLI::PositiveNumber);
    cmd->add_option("--gamma", m.gamma, "SVR kernel scale (0 = 1/(n_features * var(x)))");
    cmd->add_option("--coef0", m.coef0, "SVR polynomial offset");
    cmd->add_option("--C", m.c, "SVR regularization");
    cmd->add_option("--svr-epsilon", m.epsilon, "SVR tube half-width");
    cmd->add_option("--max-passes", m.max_passes, "SVR pair-update budget");
    cmd->add_option("--lr", m.learning_rate, "Linear regression learning rate");
    cmd->add_option("--iterations", m.iterations, "Linear regression iterations");
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Epidemic case-count regression and forecasting toolkit"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    GlobalOptions g;
    std::string out_dir;
    app.add_option("--seed", g.seed, "Seed for splits and initialization");
    app.add_option("--split-fraction", g.split_fraction, "Training fraction")->check(CLI::Range(0.0, 1.0));
    std::string split_mode = "shuffled", impute = "mean";
    app.add_option("--split-mode", split_mode, "shuffled | chronological")
        ->check(CLI::IsMember({"shuffled", "chronological"}));
    app.add_option("--impute", impute, "mean | forward-fill")->check(CLI::IsMember({"mean", "forward-fill"}));
    app.add_option("--out-dir", out_dir, "Directory for report files");
    app.add_option("--format", g.format, "json | csv | both")
        ->transform(CLI::CheckedTransformer(std::map<std::string, OutputFormat>{
            {"json", OutputFormat::Json}, {"csv", OutputFormat::Csv}, {"both", OutputFormat::Both}}));
    app.add_flag("--fill-gaps", g.fill_gaps, "Insert missing-valued records for absent calendar days");
    app.add_option("--workers", g.workers, "Parallel grid workers")->check(CLI::PositiveNumber);
    app.add_option("--date-column", g.schema.date, "Header of the date column");
    app.add_option("--tests-column", g.schema.tests, "Header of the tests column");
    app.add_option("--confirmed-column", g.schema.confirmed, "Header of the confirmed column");
    app.add_option("--deaths-column", g.schema.deaths, "Header of the deaths column");

    std::string csv, model_file, date_from, date_to, start;
    std::string target = "confirmed", scale = "linear";
    auto target_check = CLI::IsMember({"confirmed", "deaths"});
    auto scale_check = CLI::IsMember({"linear", "log"});

    auto* stats = app.add_subcommand("stats", "Describe-style statistics per column");
    stats->add_option("csv", csv, "Input CSV")->required();

    TrainOptions train_opts;
    std::string model_out;
    std::vector<std::string> features{"day_index"};
    auto* train = app.add_subcommand("train", "Fit one model and score it on the test rows");
    train->add_option("csv", csv, "Input CSV")->required();
    train->add_option("--target", target, "confirmed | deaths")->check(target_check);
    train->add_option("--features", features, "Feature list")->check(CLI::IsMember({"day_index", "tests"}));
    train->add_option("--model-file", model_out, "Where to write the model document");
    add_model_options(train, train_opts.model);

    bool all_rows = false;
    auto* eval = app.add_subcommand("eval", "Score a saved model");
    eval->add_option("model", model_file, "Model document")->required();
    eval->add_option("csv", csv, "Input CSV")->required();
    eval->add_flag("--all-rows", all_rows, "Score every row instead of the held-out split");

    ModelOptions grid_model;
    auto* grid = app.add_subcommand("grid", "Run the five-slot grid for every family and target");
    grid->add_option("csv", csv, "Input CSV")->required();
    grid->add_option("--out", out_dir, "Alias of --out-dir");
    add_model_options(grid, grid_model);

    ForecastOptions fc;
    std::string history;
    auto* fcast = app.add_subcommand("forecast", "Direct multi-day forecast from a saved model");
    fcast->add_option("model", model_file, "Model document")->required();
    fcast->add_option("--horizon", fc.horizon, "Days to forecast")->check(CLI::PositiveNumber);
    fcast->add_option("--start", start, "First forecast date (default: day after the training series)");
    fcast->add_option("--last-day-index", fc.last_day_index, "Day index of the last observation");
    fcast->add_option("--label", fc.label, "Scenario label");
    fcast->add_option("--history", history, "Observed CSV for the plot table");
    fcast->add_option("--scale", scale, "linear | log")->check(scale_check);

    CompareOptions cmp;
    ModelOptions cmp_model;
    auto* compare = app.add_subcommand("compare", "Best slot of each family on identical training rows");
    compare->add_option("csv", csv, "Input CSV")->required();
    compare->add_option("--target", target, "confirmed | deaths")->check(target_check);
    compare->add_option("--horizon", cmp.horizon, "Days appended past the last observation")
        ->check(CLI::NonNegativeNumber);
    compare->add_option("--mlp-slot", cmp.mlp_slot)->check(CLI::Range(1, 5));
    compare->add_option("--svr-slot", cmp.svr_slot)->check(CLI::Range(1, 5));
    compare->add_option("--linreg-slot", cmp.linreg_slot)->check(CLI::Range(1, 5));
    add_model_options(compare, cmp_model);

    ScenarioOptions sc;
    ModelOptions sc_model;
    sc_model.slot = 3;
    auto* scenario = app.add_subcommand("scenario", "Windowed train/evaluate/forecast for both targets");
    scenario->add_option("csv", csv, "Input CSV")->required();
    scenario->add_option("--from", date_from, "Window start (default 2021-06-15)");
    scenario->add_option("--to", date_to, "Window end (default 2021-08-10)");
    scenario->add_option("--horizon", sc.horizon, "Days to forecast")->check(CLI::PositiveNumber);
    scenario->add_option("--label", sc.label, "Scenario label");
    scenario->add_option("--scale", scale, "linear | log")->check(scale_check);
    add_model_options(scenario, sc_model);

    SyntheticSpec synth_spec;
    std::string synth_out = "synthetic.csv";
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic logistic-growth series");
    synth->add_option("--days", synth_spec.days)->check(CLI::PositiveNumber);
    synth->add_option("--synth-seed", synth_spec.seed, "Noise seed");
    synth->add_option("output,--output", synth_out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto parse_date = [](const std::string& text, const char* what) {
        auto d = Date::parse(text);
        if (!d) throw Error(ErrorCode::UnparseableDate, std::string(what) + " '" + text + "'");
        return *d;
    };

    try {
        if (!out_dir.empty()) g.out_dir = out_dir;
        g.split_mode = *split_mode_from_string(split_mode);
        g.impute = *impute_policy_from_string(impute);
        const Column target_column = *column_from_string(target);
        const PlotScale plot_scale = *plot_scale_from_string(scale);
        train_opts.target = target_column;
        cmp.target = target_column;
        fc.scale = plot_scale;
        sc.scale = plot_scale;
        if (*stats) {
            print(cmd_stats(csv, g));
        } else if (*train) {
            train_opts.features.clear();
            for (const auto& f : features) train_opts.features.push_back(*feature_from_string(f));
            if (!model_out.empty()) train_opts.model_file = model_out;
            print(cmd_train(csv, train_opts, g));
        } else if (*eval) {
            print(cmd_eval(model_file, csv, all_rows, g));
        } else if (*grid) {
            print(cmd_grid(csv, grid_model, g));
        } else if (*fcast) {
            if (!start.empty()) fc.start = parse_date(start, "start date");
            if (!history.empty()) fc.history_csv = history;
            print(cmd_forecast(model_file, fc, g));
        } else if (*compare) {
            print(cmd_compare(csv, cmp, cmp_model, g));
        } else if (*scenario) {
            if (!date_from.empty()) sc.from = parse_date(date_from, "window start");
            if (!date_to.empty()) sc.to = parse_date(date_to, "window end");
            print(cmd_scenario(csv, sc, sc_model, g));
        } else if (*synth) {
            print(cmd_synth(synth_spec, synth_out));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
