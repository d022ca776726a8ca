#include "epi/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "epi/error.hpp"
#include "epi/random.hpp"

namespace epi {

std::string_view to_string(Feature f) noexcept {
    return f == Feature::DayIndex ? "day_index" : "tests";
}

std::optional<Feature> feature_from_string(std::string_view name) noexcept {
    if (name == "day_index") return Feature::DayIndex;
    if (name == "tests") return Feature::Tests;
    return std::nullopt;
}

SupervisedData build_supervised(const CaseSeries& series, Column target, std::span<const Feature> features) {
    if (target == Column::Tests) throw Error(ErrorCode::InvalidConfig, "target must be confirmed or deaths");
    if (features.empty()) throw Error(ErrorCode::UnknownFeature, "empty feature list");

    const auto n = static_cast<Eigen::Index>(series.size());
    SupervisedData out;
    out.target = target;
    out.features.assign(features.begin(), features.end());
    out.x.resize(n, static_cast<Eigen::Index>(features.size()));
    out.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& rec = series.records[static_cast<std::size_t>(i)];
        const auto& yv = rec.value(target);
        if (!yv)
            throw Error(ErrorCode::MissingValuesPresent,
                        std::string(to_string(target)) + " missing on " + rec.date.iso());
        out.y(i) = *yv;
        for (std::size_t f = 0; f < features.size(); ++f) {
            double v = 0.0;
            switch (features[f]) {
                case Feature::DayIndex: v = static_cast<double>(rec.day_index); break;
                case Feature::Tests:
                    if (!rec.tests) throw Error(ErrorCode::MissingValuesPresent, "tests missing on " + rec.date.iso());
                    v = *rec.tests;
                    break;
            }
            out.x(i, static_cast<Eigen::Index>(f)) = v;
        }
    }
    return out;
}

ScalerParams fit_scaler(const Matrix& columns) {
    if (columns.rows() == 0) throw Error(ErrorCode::EmptyInput, "cannot fit a scaler on zero rows");
    ScalerParams p;
    p.epsilon_floor = kScalerEpsilon;
    p.mean = columns.colwise().mean().transpose();
    p.std.resize(columns.cols());
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        const double var = (columns.col(c).array() - p.mean(c)).square().mean();
        const double sd = std::sqrt(var);
        // constant columns (up to rounding) get the floor
        p.std(c) = sd > kScalerEpsilon * std::max(1.0, std::abs(p.mean(c))) ? sd : kScalerEpsilon;
    }
    return p;
}

ScalerParams fit_scaler(const Vector& column) { return fit_scaler(Matrix(column)); }

Matrix transform(const ScalerParams& p, const Matrix& m) {
    if (m.cols() != p.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "scaler has " + std::to_string(p.dim()) + " columns, input has " + std::to_string(m.cols()));
    return (m.rowwise() - p.mean.transpose()).array().rowwise() / p.std.transpose().array();
}

Matrix inverse_transform(const ScalerParams& p, const Matrix& m) {
    if (m.cols() != p.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "scaler has " + std::to_string(p.dim()) + " columns, input has " + std::to_string(m.cols()));
    return (m.array().rowwise() * p.std.transpose().array()).rowwise() + p.mean.transpose().array();
}

Vector transform(const ScalerParams& p, const Vector& v) { return transform(p, Matrix(v)).col(0); }
Vector inverse_transform(const ScalerParams& p, const Vector& v) { return inverse_transform(p, Matrix(v)).col(0); }

std::string_view to_string(SplitMode m) noexcept {
    return m == SplitMode::Shuffled ? "shuffled" : "chronological";
}

std::optional<SplitMode> split_mode_from_string(std::string_view name) noexcept {
    if (name == "shuffled") return SplitMode::Shuffled;
    if (name == "chronological") return SplitMode::Chronological;
    return std::nullopt;
}

std::size_t train_size(std::size_t n, double fraction) {
    // the slack absorbs representation error, e.g. 0.8 * 520 = 416.00000000000006
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error(ErrorCode::InvalidConfig, "train fraction must lie in (0, 1)");
    const std::size_t k = train_size(n, spec.train_fraction);
    if (n < 2 || k == 0 || k >= n)
        throw Error(ErrorCode::DegenerateSplit,
                    "n = " + std::to_string(n) + " with fraction " + std::to_string(spec.train_fraction));

    std::vector<std::size_t> order;
    if (spec.mode == SplitMode::Shuffled) {
        Rng rng(spec.seed);
        order = rng.permutation(n);
    } else {
        order.resize(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
    }
    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Vector take_rows(const Vector& v, std::span<const std::size_t> rows) {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Split split(const Matrix& x, const Vector& y, const SplitSpec& spec) {
    if (x.rows() != y.size())
        throw Error(ErrorCode::DimensionMismatch, "x has " + std::to_string(x.rows()) + " rows, y has " +
                                                      std::to_string(y.size()));
    Split s;
    s.indices = split_indices(static_cast<std::size_t>(y.size()), spec);
    s.x_train = take_rows(x, s.indices.train);
    s.y_train = take_rows(y, s.indices.train);
    s.x_test = take_rows(x, s.indices.test);
    s.y_test = take_rows(y, s.indices.test);
    return s;
}

PreparedData prepare(const SupervisedData& data, const SplitSpec& spec) {
    const Split s = split(data.x, data.y, spec);
    PreparedData out;
    out.indices = s.indices;
    out.train.target = data.target;
    out.train.features = data.features;
    out.train.x_scaler = fit_scaler(s.x_train);
    out.train.y_scaler = fit_scaler(s.y_train);
    out.train.x = transform(out.train.x_scaler, s.x_train);
    out.train.y = transform(out.train.y_scaler, s.y_train);
    out.x_test = transform(out.train.x_scaler, s.x_test);
    out.y_test = transform(out.train.y_scaler, s.y_test);
    return out;
}

}  // namespace epi
