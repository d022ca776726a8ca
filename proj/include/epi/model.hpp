#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "epi/dataset.hpp"
#include "epi/linear_model.hpp"
#include "epi/mlp.hpp"
#include "epi/preprocess.hpp"
#include "epi/svr.hpp"

namespace epi {

enum class ModelFamily { Mlp, Svr, LinReg };

std::string_view to_string(ModelFamily f) noexcept;
std::optional<ModelFamily> model_family_from_string(std::string_view name) noexcept;

inline constexpr ModelFamily kAllFamilies[] = {ModelFamily::Mlp, ModelFamily::Svr, ModelFamily::LinReg};

using ModelConfig = std::variant<MlpConfig, SvrConfig, LinRegConfig>;
using ModelParams = std::variant<MlpParams, SvrParams, LinRegParams>;

ModelFamily family_of(const ModelConfig& cfg) noexcept;

/// Outcome of fitting; `flag` is empty for a clean fit.
struct FitInfo {
    std::string status;
    long iterations = 0;
    std::string flag;
};

struct TrainedModel {
    ModelConfig config;
    ModelParams params;
    ScalerParams x_scaler;
    ScalerParams y_scaler;
    std::vector<Feature> features;
    Column target = Column::Confirmed;
    /// Last observation of the series the model was built from.
    long last_day_index = 0;
    Date last_date;
    FitInfo info;

    ModelFamily family() const noexcept { return family_of(config); }

    Vector predict_scaled(const Matrix& x_scaled) const;
    /// Raw feature rows in, original-unit predictions out.
    Vector predict_original(const Matrix& x_raw) const;
};

/// Fits the configured family on already-scaled training data.
TrainedModel fit_model(const ModelConfig& cfg, const SupervisedSet& train);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const nlohmann::json& j);

nlohmann::json scaler_to_json(const ScalerParams& p);
ScalerParams scaler_from_json(const nlohmann::json& j);

/// Versioned envelope {version, family, config, x_scaler, y_scaler, params, ...};
/// matrices are nested row-major arrays.
nlohmann::json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace epi
