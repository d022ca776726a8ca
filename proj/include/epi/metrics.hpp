#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "epi/linalg.hpp"

namespace epi {

enum class MetricSpace { Scaled, Original };

std::string_view to_string(MetricSpace s) noexcept;

struct EvalResult {
    double mse = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
    MetricSpace space = MetricSpace::Scaled;
};

/// Mean squared error. Throws LengthMismatch or EmptyInput.
double mse(std::span<const double> y, std::span<const double> y_hat);

/// Coefficient of determination 1 - SS_res / SS_tot. Throws ConstantTarget when SS_tot is zero.
double r2_score(std::span<const double> y, std::span<const double> y_hat);

inline std::span<const double> as_span(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

EvalResult evaluate(const Vector& y, const Vector& y_hat, MetricSpace space);

}  // namespace epi
