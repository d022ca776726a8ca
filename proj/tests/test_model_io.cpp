#include <doctest.h>

#include "epi/error.hpp"
#include "epi/model.hpp"
#include "epi/pipeline.hpp"
#include "epi/synthetic.hpp"
#include "test_util.hpp"

using namespace epi;
using nlohmann::json;

namespace {

MlpConfig tiny_mlp() {
    MlpConfig c;
    c.hidden_layers = 2;
    c.neurons_per_layer = 6;
    c.max_iterations = 50;
    return c;
}

std::vector<ModelConfig> configs() {
    SvrConfig poly;
    poly.kernel = {KernelKind::Poly, 0.0, 2, 1.0};
    return {tiny_mlp(), SvrConfig{}, poly, LinRegConfig{0.1, 300}};
}

}  // namespace

TEST_CASE("models survive a text round trip unchanged") {
    SyntheticSpec spec;
    spec.days = 80;
    const auto series = synthetic_epidemic(spec);
    const Feature both[] = {Feature::DayIndex, Feature::Tests};
    for (const auto& cfg : configs()) {
        TrainRequest req;
        req.config = cfg;
        req.target = Column::Deaths;
        req.features.assign(std::begin(both), std::end(both));
        const auto r = run_pipeline(series, req);
        const std::string text = model_to_json(r.model).dump();
        const auto back = model_from_json(json::parse(text));
        CHECK(back.family() == r.model.family());
        CHECK(back.target == Column::Deaths);
        CHECK(back.features == r.model.features);
        CHECK(back.last_day_index == 79);
        CHECK(back.last_date == series.last_date());
        CHECK(back.info.status == r.model.info.status);
        CHECK(model_to_json(back).dump() == text);
        const auto x = build_supervised(series, Column::Deaths, both).x;
        CHECK(back.predict_original(x) == r.model.predict_original(x));
    }
}

TEST_CASE("config round trip") {
    for (const auto& cfg : configs()) CHECK(config_to_json(config_from_json(config_to_json(cfg))) == config_to_json(cfg));
}

TEST_CASE("malformed documents raise Format errors") {
    const auto series = synthetic_epidemic({.days = 40});
    TrainRequest req;
    const auto good = model_to_json(run_pipeline(series, req).model);
    auto code = [](const json& j) {
        try {
            model_from_json(j);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    auto bad_version = good;
    bad_version["version"] = 99;
    CHECK(code(bad_version) == ErrorCode::Format);
    auto missing = good;
    missing.erase("y_scaler");
    CHECK(code(missing) == ErrorCode::Format);
    auto wrong_family = good;
    wrong_family["family"] = "svr";
    CHECK(code(wrong_family) == ErrorCode::Format);
    auto bad_feature = good;
    bad_feature["features"] = json::array({"weather"});
    CHECK(code(bad_feature) == ErrorCode::Format);
    CHECK(code(json::parse("[1,2]")) == ErrorCode::Format);
}
