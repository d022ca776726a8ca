#pragma once

#include <cstdint>

#include "epi/dataset.hpp"

namespace epi {

/// Daily confirmed counts following a logistic curve with multiplicative
/// Gaussian noise; deaths are a lagged noisy fraction of confirmed and tests
/// a noisy multiple.
struct SyntheticSpec {
    int days = 520;
    Date start = Date::from_ymd(2020, 3, 15);
    std::uint64_t seed = 7;
    double capacity = 12000.0;
    double growth_rate = 0.015;
    double midpoint = 400.0;
    double noise = 0.02;
    double death_ratio = 0.02;
    int death_lag = 10;
    double tests_ratio = 6.0;
};

CaseSeries synthetic_epidemic(const SyntheticSpec& spec = {});

}  // namespace epi
