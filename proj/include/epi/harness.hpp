#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epi/dataset.hpp"
#include "epi/metrics.hpp"
#include "epi/model.hpp"
#include "epi/pipeline.hpp"
#include "epi/preprocess.hpp"

namespace epi {

struct RegressorSlot {
    int slot = 1;
    ModelConfig config;

    ModelFamily family() const noexcept { return family_of(config); }
};

struct GridOptions {
    /// Hidden architecture shared by all MLP slots; the default is the 100 x 64 network.
    int mlp_hidden_layers = 100;
    int mlp_neurons = 64;
    std::uint64_t mlp_seed = 0;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
};

/// Five slots per family:
///   svr    rbf, poly 5, linear, poly 2, poly 7
///   mlp    tanh/lbfgs 1k, 5k, 10k; relu/lbfgs 1k; tanh/sgd 1k
///   linreg (0.5, 2500), (0.1, 3000), (0.01, 3500), (0.001, 5000), (0.0001, 10000)
std::vector<RegressorSlot> default_grid(const GridOptions& options = {});

struct DatasetFingerprint {
    std::size_t rows = 0;
    std::string first_date;
    std::string last_date;
    /// FNV-1a over the column's cells, missing cells included.
    std::map<std::string, std::string> column_hashes;

    friend bool operator==(const DatasetFingerprint&, const DatasetFingerprint&) = default;
};

DatasetFingerprint fingerprint(const CaseSeries& series);

struct GridCell {
    int slot = 0;
    ModelFamily family = ModelFamily::Mlp;
    Column target = Column::Confirmed;
    ModelConfig config;
    std::optional<EvalResult> scaled;
    std::optional<EvalResult> original;
    std::string status;
    long iterations = 0;
    /// Empty for a clean cell, otherwise the error or non-convergence name.
    std::string flag;
    std::string message;

    bool flagged() const { return !flag.empty(); }
};

struct ScoreTable {
    std::vector<GridCell> cells;  // slot-major within family, confirmed before deaths
    SplitSpec split;
    ImputePolicy impute = ImputePolicy::Mean;
    std::vector<Feature> features;
    DatasetFingerprint dataset;

    const GridCell* find(ModelFamily family, int slot, Column target) const;
};

struct GridRunOptions {
    int workers = 1;
    ImputePolicy impute = ImputePolicy::Mean;
    std::vector<Feature> features{Feature::DayIndex};
    std::vector<Column> targets{Column::Confirmed, Column::Deaths};
};

/// Runs every slot for every target. Per-cell failures become flagged cells;
/// the table is identical for any worker count.
ScoreTable run_grid(const CaseSeries& series, const SplitSpec& split, const std::vector<RegressorSlot>& slots,
                    const GridRunOptions& options = {});

/// Best slot of a family by mean R^2 over its targets, ties to the lower slot.
/// Slots with any flagged cell are skipped; throws NoValidCell if none remain.
RegressorSlot select_best(const ScoreTable& table, ModelFamily family);

struct ComparisonRow {
    Date date;
    long day_index = 0;
    std::optional<double> observed;
    bool in_test = false;
    std::map<ModelFamily, double> predicted;
};

struct ComparisonReport {
    Column target = Column::Confirmed;
    std::vector<ComparisonRow> rows;
    std::map<ModelFamily, EvalResult> test_scores;  // scaled space
    std::map<ModelFamily, int> slots;
};

/// Trains each family's slot on the same training rows and predicts, in
/// original units, every day from the first to the last test date plus
/// `horizon` days past the end of the series.
ComparisonReport compare_models(const CaseSeries& series, const SplitSpec& split,
                                const std::vector<RegressorSlot>& best_slots, Column target, int horizon,
                                ImputePolicy impute = ImputePolicy::Mean);

/// Best reported cells per family (confirmed, deaths), shown as a reference in report footers.
struct ReferenceScore {
    ModelFamily family;
    int slot;
    double confirmed;
    double deaths;
};

std::vector<ReferenceScore> reference_best_scores();

}  // namespace epi
