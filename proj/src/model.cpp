#include "epi/model.hpp"

#include "epi/error.hpp"

namespace epi {

using nlohmann::json;

std::string_view to_string(ModelFamily f) noexcept {
    switch (f) {
        case ModelFamily::Mlp: return "mlp";
        case ModelFamily::Svr: return "svr";
        case ModelFamily::LinReg: return "linreg";
    }
    return "?";
}

std::optional<ModelFamily> model_family_from_string(std::string_view name) noexcept {
    for (auto f : kAllFamilies)
        if (to_string(f) == name) return f;
    return std::nullopt;
}

ModelFamily family_of(const ModelConfig& cfg) noexcept {
    switch (cfg.index()) {
        case 0: return ModelFamily::Mlp;
        case 1: return ModelFamily::Svr;
        default: return ModelFamily::LinReg;
    }
}

Vector TrainedModel::predict_scaled(const Matrix& x_scaled) const {
    return std::visit(
        [&](const auto& p) -> Vector {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MlpParams>)
                return predict(p, std::get<MlpConfig>(config).activation, x_scaled);
            else if constexpr (std::is_same_v<P, SvrParams>)
                return svr_predict(p, x_scaled);
            else
                return linreg_predict(p, x_scaled);
        },
        params);
}

Vector TrainedModel::predict_original(const Matrix& x_raw) const {
    return inverse_transform(y_scaler, predict_scaled(transform(x_scaler, x_raw)));
}

TrainedModel fit_model(const ModelConfig& cfg, const SupervisedSet& train) {
    TrainedModel m;
    m.config = cfg;
    m.x_scaler = train.x_scaler;
    m.y_scaler = train.y_scaler;
    m.features = train.features;
    m.target = train.target;
    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, MlpConfig>) {
                auto fit = train_mlp(c, train.x, train.y);
                m.info.status = std::string(to_string(fit.trace.status));
                m.info.iterations = fit.trace.iterations;
                m.params = std::move(fit.params);
            } else if constexpr (std::is_same_v<C, SvrConfig>) {
                auto fit = svr_fit(train.x, train.y, c);
                m.info.status = fit.converged ? "converged" : "not_converged";
                m.info.iterations = fit.iterations;
                if (!fit.converged) m.info.flag = "NotConverged";
                m.params = std::move(fit);
            } else {
                m.params = linreg_fit(train.x, train.y, c);
                m.info.status = "completed";
                m.info.iterations = c.iterations;
            }
        },
        cfg);
    return m;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index cols_if_empty = 0) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::Format, "ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json kernel_to_json(const KernelSpec& k) {
    return {{"kind", to_string(k.kind)}, {"gamma", k.gamma}, {"degree", k.degree}, {"coef0", k.coef0}};
}

KernelSpec kernel_from_json(const json& j) {
    KernelSpec k;
    const auto kind = kernel_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::Format, "unknown kernel " + j.at("kind").dump());
    k.kind = *kind;
    k.gamma = j.at("gamma").get<double>();
    k.degree = j.at("degree").get<int>();
    k.coef0 = j.at("coef0").get<double>();
    return k;
}

template <typename T, typename F>
T parse_enum(const json& j, F from_string, const char* what) {
    const auto v = from_string(j.get<std::string>());
    if (!v) throw Error(ErrorCode::Format, std::string("unknown ") + what + " " + j.dump());
    return *v;
}

}  // namespace

json config_to_json(const ModelConfig& cfg) {
    return std::visit(
        [](const auto& c) -> json {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, MlpConfig>) {
                return {{"family", "mlp"},
                        {"hidden_layers", c.hidden_layers},
                        {"neurons_per_layer", c.neurons_per_layer},
                        {"activation", to_string(c.activation)},
                        {"optimizer", to_string(c.optimizer)},
                        {"max_iterations", c.max_iterations},
                        {"seed", c.seed},
                        {"tolerance", c.tolerance},
                        {"patience", c.patience},
                        {"learning_rate", c.learning_rate}};
            } else if constexpr (std::is_same_v<C, SvrConfig>) {
                return {{"family", "svr"},        {"kernel", kernel_to_json(c.kernel)}, {"c", c.c},
                        {"epsilon", c.epsilon},   {"tolerance", c.tolerance},          {"max_passes", c.max_passes}};
            } else {
                return {{"family", "linreg"}, {"learning_rate", c.learning_rate}, {"iterations", c.iterations}};
            }
        },
        cfg);
}

ModelConfig config_from_json(const json& j) {
    const auto family = parse_enum<ModelFamily>(j.at("family"), model_family_from_string, "family");
    switch (family) {
        case ModelFamily::Mlp: {
            MlpConfig c;
            c.hidden_layers = j.at("hidden_layers").get<int>();
            c.neurons_per_layer = j.at("neurons_per_layer").get<int>();
            c.activation = parse_enum<Activation>(j.at("activation"), activation_from_string, "activation");
            c.optimizer = parse_enum<MlpOptimizer>(j.at("optimizer"), mlp_optimizer_from_string, "optimizer");
            c.max_iterations = j.at("max_iterations").get<int>();
            c.seed = j.at("seed").get<std::uint64_t>();
            c.tolerance = j.at("tolerance").get<double>();
            c.patience = j.at("patience").get<int>();
            c.learning_rate = j.at("learning_rate").get<double>();
            return c;
        }
        case ModelFamily::Svr: {
            SvrConfig c;
            c.kernel = kernel_from_json(j.at("kernel"));
            c.c = j.at("c").get<double>();
            c.epsilon = j.at("epsilon").get<double>();
            c.tolerance = j.at("tolerance").get<double>();
            c.max_passes = j.at("max_passes").get<long>();
            return c;
        }
        case ModelFamily::LinReg: {
            LinRegConfig c;
            c.learning_rate = j.at("learning_rate").get<double>();
            c.iterations = j.at("iterations").get<int>();
            return c;
        }
    }
    throw Error(ErrorCode::Format, "unreachable family");
}

json scaler_to_json(const ScalerParams& p) {
    return {{"mean", vector_to_json(p.mean)}, {"std", vector_to_json(p.std)}, {"epsilon_floor", p.epsilon_floor}};
}

ScalerParams scaler_from_json(const json& j) {
    ScalerParams p;
    p.mean = vector_from_json(j.at("mean"));
    p.std = vector_from_json(j.at("std"));
    p.epsilon_floor = j.at("epsilon_floor").get<double>();
    if (p.mean.size() != p.std.size()) throw Error(ErrorCode::Format, "scaler mean/std lengths differ");
    return p;
}

json model_to_json(const TrainedModel& m) {
    json params = std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MlpParams>) {
                json layers = json::array();
                for (std::size_t l = 0; l < p.layer_count(); ++l)
                    layers.push_back({{"weights", matrix_to_json(p.weights[l])}, {"bias", vector_to_json(p.biases[l])}});
                return {{"layers", layers}};
            } else if constexpr (std::is_same_v<P, SvrParams>) {
                return {{"kernel", kernel_to_json(p.kernel)},
                        {"bias", p.bias},
                        {"alphas", vector_to_json(p.alphas)},
                        {"support_vectors", matrix_to_json(p.support_vectors)},
                        {"support_coef", vector_to_json(p.support_coef)},
                        {"n_features", p.support_vectors.cols()},
                        {"converged", p.converged},
                        {"iterations", p.iterations},
                        {"dual_objective", p.dual_objective},
                        {"kkt_gap", p.kkt_gap}};
            } else {
                return {{"slope", vector_to_json(p.slope)}, {"intercept", p.intercept}};
            }
        },
        m.params);

    json features = json::array();
    for (auto f : m.features) features.push_back(to_string(f));
    return {{"version", kModelFormatVersion},
            {"family", to_string(m.family())},
            {"config", config_to_json(m.config)},
            {"target", to_string(m.target)},
            {"features", features},
            {"x_scaler", scaler_to_json(m.x_scaler)},
            {"y_scaler", scaler_to_json(m.y_scaler)},
            {"last_day_index", m.last_day_index},
            {"last_date", m.last_date.iso()},
            {"fit", {{"status", m.info.status}, {"iterations", m.info.iterations}, {"flag", m.info.flag}}},
            {"params", params}};
}

TrainedModel model_from_json(const json& j) {
    try {
        if (j.at("version").get<int>() != kModelFormatVersion)
            throw Error(ErrorCode::Format, "unsupported model format version " + j.at("version").dump());
        TrainedModel m;
        m.config = config_from_json(j.at("config"));
        if (to_string(m.family()) != j.at("family").get<std::string>())
            throw Error(ErrorCode::Format, "family does not match config");
        m.target = parse_enum<Column>(j.at("target"), column_from_string, "target");
        for (const auto& f : j.at("features")) m.features.push_back(parse_enum<Feature>(f, feature_from_string, "feature"));
        m.x_scaler = scaler_from_json(j.at("x_scaler"));
        m.y_scaler = scaler_from_json(j.at("y_scaler"));
        m.last_day_index = j.at("last_day_index").get<long>();
        const auto date = Date::parse(j.at("last_date").get<std::string>());
        if (!date) throw Error(ErrorCode::Format, "bad last_date");
        m.last_date = *date;
        const auto& fit = j.at("fit");
        m.info = {fit.at("status").get<std::string>(), fit.at("iterations").get<long>(), fit.at("flag").get<std::string>()};

        const auto& p = j.at("params");
        switch (m.family()) {
            case ModelFamily::Mlp: {
                MlpParams mp;
                for (const auto& layer : p.at("layers")) {
                    mp.weights.push_back(matrix_from_json(layer.at("weights")));
                    mp.biases.push_back(vector_from_json(layer.at("bias")));
                }
                m.params = std::move(mp);
                break;
            }
            case ModelFamily::Svr: {
                SvrParams sp;
                sp.kernel = kernel_from_json(p.at("kernel"));
                sp.bias = p.at("bias").get<double>();
                sp.alphas = vector_from_json(p.at("alphas"));
                sp.support_vectors = matrix_from_json(p.at("support_vectors"), p.at("n_features").get<Eigen::Index>());
                sp.support_coef = vector_from_json(p.at("support_coef"));
                sp.converged = p.at("converged").get<bool>();
                sp.iterations = p.at("iterations").get<long>();
                sp.dual_objective = p.at("dual_objective").get<double>();
                sp.kkt_gap = p.at("kkt_gap").get<double>();
                m.params = std::move(sp);
                break;
            }
            case ModelFamily::LinReg:
                m.params = LinRegParams{vector_from_json(p.at("slope")), p.at("intercept").get<double>()};
                break;
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, std::string("malformed model document: ") + e.what());
    }
}

}  // namespace epi
