#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epi/dataset.hpp"
#include "epi/linalg.hpp"

namespace epi {

enum class Feature { DayIndex, Tests };

std::string_view to_string(Feature f) noexcept;
std::optional<Feature> feature_from_string(std::string_view name) noexcept;

inline constexpr Feature kDefaultFeatures[] = {Feature::DayIndex};

/// Unscaled design matrix and target vector.
struct SupervisedData {
    Matrix x;
    Vector y;
    std::vector<Feature> features;
    Column target = Column::Confirmed;
};

/// Rows in date order; x columns follow `features`, y is the target column.
SupervisedData build_supervised(const CaseSeries& series, Column target,
                                std::span<const Feature> features = kDefaultFeatures);

/// Standard scaler. `std` is the population standard deviation with zeros
/// replaced by `epsilon_floor`.
struct ScalerParams {
    Vector mean;
    Vector std;
    double epsilon_floor = 1e-12;

    Eigen::Index dim() const { return mean.size(); }
};

inline constexpr double kScalerEpsilon = 1e-12;

ScalerParams fit_scaler(const Matrix& columns);
ScalerParams fit_scaler(const Vector& column);

Matrix transform(const ScalerParams& p, const Matrix& m);
Matrix inverse_transform(const ScalerParams& p, const Matrix& m);
Vector transform(const ScalerParams& p, const Vector& v);
Vector inverse_transform(const ScalerParams& p, const Vector& v);

enum class SplitMode { Shuffled, Chronological };

std::string_view to_string(SplitMode m) noexcept;
std::optional<SplitMode> split_mode_from_string(std::string_view name) noexcept;

struct SplitSpec {
    double train_fraction = 0.8;
    SplitMode mode = SplitMode::Shuffled;
    std::uint64_t seed = 42;
};

/// Train size is ceil(fraction * n).
std::size_t train_size(std::size_t n, double fraction);

/// Row indices for each side, each sorted ascending.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct Split {
    Matrix x_train;
    Vector y_train;
    Matrix x_test;
    Vector y_test;
    SplitIndices indices;
};

Split split(const Matrix& x, const Vector& y, const SplitSpec& spec);

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows);
Vector take_rows(const Vector& v, std::span<const std::size_t> rows);

/// Scaled training data plus the scalers fitted on it.
struct SupervisedSet {
    Matrix x;
    Vector y;
    ScalerParams x_scaler;
    ScalerParams y_scaler;
    Column target = Column::Confirmed;
    std::vector<Feature> features;
};

/// Split, then fit scalers on the training rows only and apply them to both sides.
struct PreparedData {
    SupervisedSet train;
    Matrix x_test;  // scaled with training parameters
    Vector y_test;  // scaled with training parameters
    SplitIndices indices;
};

PreparedData prepare(const SupervisedData& data, const SplitSpec& spec);

}  // namespace epi
