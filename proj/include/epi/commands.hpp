#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epi/dataset.hpp"
#include "epi/forecast.hpp"
#include "epi/harness.hpp"
#include "epi/model.hpp"
#include "epi/preprocess.hpp"
#include "epi/synthetic.hpp"

namespace epi::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum class OutputFormat { Json, Csv, Both };

struct GlobalOptions {
    std::uint64_t seed = 42;
    double split_fraction = 0.8;
    SplitMode split_mode = SplitMode::Shuffled;
    ImputePolicy impute = ImputePolicy::Mean;
    /// Reports are written here when set; otherwise only stdout is produced.
    std::optional<std::filesystem::path> out_dir;
    OutputFormat format = OutputFormat::Both;
    bool fill_gaps = false;
    int workers = 1;
    CsvSchema schema{};

    SplitSpec split() const { return {split_fraction, split_mode, seed}; }
};

struct ModelOptions {
    std::string family = "mlp";
    /// Start from this default-grid slot instead of the individual flags.
    std::optional<int> slot;

    int hidden_layers = 100;
    int neurons = 64;
    std::string activation = "tanh";
    std::string optimizer = "lbfgs";
    int max_iter = 1000;
    double mlp_learning_rate = 1e-3;

    std::string kernel = "rbf";
    int degree = 3;
    double gamma = 0.0;
    double coef0 = 1.0;
    double c = 1.0;
    double epsilon = 0.1;
    long max_passes = 200000;

    double learning_rate = 0.5;
    int iterations = 2500;
};

/// Builds the model configuration; MLP slots keep the architecture flags.
ModelConfig resolve_model_config(const ModelOptions& m, std::uint64_t seed);

GridOptions grid_options(const ModelOptions& m, std::uint64_t seed);

/// {command, config, input, seed, tool_version, timestamps}
nlohmann::json make_manifest(const std::string& command, nlohmann::json config, nlohmann::json input,
                             std::uint64_t seed);

/// A report with its manifest timestamps removed, for determinism comparisons.
nlohmann::json without_timestamps(nlohmann::json report);

CaseSeries load_series(const std::filesystem::path& csv, const GlobalOptions& g);

nlohmann::json cmd_stats(const std::filesystem::path& csv, const GlobalOptions& g);

struct TrainOptions {
    Column target = Column::Confirmed;
    std::vector<Feature> features{Feature::DayIndex};
    ModelOptions model{};
    std::optional<std::filesystem::path> model_file;  // default <out_dir>/model.json, else ./model.json
};

nlohmann::json cmd_train(const std::filesystem::path& csv, const TrainOptions& t, const GlobalOptions& g);

/// Scores a saved model on the test rows of the split recorded in its
/// manifest (or on every row when `all_rows`).
nlohmann::json cmd_eval(const std::filesystem::path& model_file, const std::filesystem::path& csv, bool all_rows,
                        const GlobalOptions& g);

nlohmann::json cmd_grid(const std::filesystem::path& csv, const ModelOptions& m, const GlobalOptions& g);

struct ForecastOptions {
    int horizon = 30;
    std::optional<Date> start;
    std::optional<long> last_day_index;
    std::string label = "baseline";
    std::optional<std::filesystem::path> history_csv;
    PlotScale scale = PlotScale::Linear;
};

nlohmann::json cmd_forecast(const std::filesystem::path& model_file, const ForecastOptions& f, const GlobalOptions& g);

/// Re-runs a forecast from the manifest embedded in an earlier report.
nlohmann::json replay_forecast(const nlohmann::json& manifest, const GlobalOptions& g);

struct CompareOptions {
    Column target = Column::Confirmed;
    int horizon = 30;
    /// Explicit slot per family; families without one are chosen by running the grid.
    std::optional<int> mlp_slot, svr_slot, linreg_slot;
};

nlohmann::json cmd_compare(const std::filesystem::path& csv, const CompareOptions& c, const ModelOptions& m,
                           const GlobalOptions& g);

struct ScenarioOptions {
    Date from = default_critical_from();
    Date to = default_critical_to();
    int horizon = 30;
    std::string label = "critical";
    PlotScale scale = PlotScale::Linear;
};

nlohmann::json cmd_scenario(const std::filesystem::path& csv, const ScenarioOptions& s, const ModelOptions& m,
                            const GlobalOptions& g);

nlohmann::json cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& out_csv);

}  // namespace epi::cli
