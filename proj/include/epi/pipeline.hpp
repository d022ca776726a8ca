#pragma once

#include <vector>

#include "epi/dataset.hpp"
#include "epi/metrics.hpp"
#include "epi/model.hpp"
#include "epi/preprocess.hpp"

namespace epi {

struct TrainRequest {
    ModelConfig config = LinRegConfig{};
    Column target = Column::Confirmed;
    std::vector<Feature> features{Feature::DayIndex};
    SplitSpec split{};
    ImputePolicy impute = ImputePolicy::Mean;
};

struct PipelineResult {
    TrainedModel model;
    PreparedData data;
    Vector test_prediction_scaled;
    EvalResult scaled;
    EvalResult original;
};

/// impute -> build -> split -> scale (training rows only) -> fit -> score on the test rows.
PipelineResult run_pipeline(const CaseSeries& series, const TrainRequest& request);

/// Columns a request needs imputed: the target plus any non-index feature columns.
std::vector<Column> required_columns(Column target, const std::vector<Feature>& features);

}  // namespace epi
