#include "epi/pipeline.hpp"

#include "epi/error.hpp"

namespace epi {

std::vector<Column> required_columns(Column target, const std::vector<Feature>& features) {
    std::vector<Column> cols{target};
    for (auto f : features)
        if (f == Feature::Tests) cols.push_back(Column::Tests);
    return cols;
}

PipelineResult run_pipeline(const CaseSeries& series, const TrainRequest& request) {
    if (series.size() < 2) throw Error(ErrorCode::EmptyInput, "training needs a series of at least two records");
    const auto cols = required_columns(request.target, request.features);
    const CaseSeries imputed = impute_missing(series, request.impute, cols);
    const SupervisedData data = build_supervised(imputed, request.target, request.features);

    PipelineResult r;
    r.data = prepare(data, request.split);
    r.model = fit_model(request.config, r.data.train);
    r.model.last_day_index = series.records.back().day_index;
    r.model.last_date = series.last_date();

    r.test_prediction_scaled = r.model.predict_scaled(r.data.x_test);
    if (!r.test_prediction_scaled.allFinite())
        throw Error(ErrorCode::NonFiniteLoss, "model produced non-finite test predictions");
    r.scaled = evaluate(r.data.y_test, r.test_prediction_scaled, MetricSpace::Scaled);
    r.original = evaluate(inverse_transform(r.data.train.y_scaler, r.data.y_test),
                          inverse_transform(r.data.train.y_scaler, r.test_prediction_scaled), MetricSpace::Original);
    return r;
}

}  // namespace epi
