#include "epi/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "epi/error.hpp"
#include "epi/random.hpp"

namespace epi {

CaseSeries synthetic_epidemic(const SyntheticSpec& spec) {
    if (spec.days < 2) throw Error(ErrorCode::InvalidConfig, "synthetic series needs at least two days");
    Rng rng(spec.seed);
    auto curve = [&](double t) { return spec.capacity / (1.0 + std::exp(-spec.growth_rate * (t - spec.midpoint))); };
    auto noisy = [&](double v, double sd) { return std::max(0.0, std::round(v * (1.0 + sd * rng.normal()))); };

    CaseSeries s;
    s.source_label = "synthetic-logistic-seed" + std::to_string(spec.seed);
    for (int t = 0; t < spec.days; ++t) {
        DailyRecord r;
        r.date = spec.start.plus_days(t);
        r.day_index = t;
        r.confirmed = noisy(curve(t), spec.noise);
        r.deaths = noisy(spec.death_ratio * curve(t - spec.death_lag), spec.noise);
        r.tests = noisy(spec.tests_ratio * curve(t), spec.noise);
        s.records.push_back(r);
    }
    return s;
}

}  // namespace epi
