#include "epi/metrics.hpp"

#include <string>

#include "epi/error.hpp"

namespace epi {

std::string_view to_string(MetricSpace s) noexcept { return s == MetricSpace::Scaled ? "scaled" : "original"; }

namespace {

void check_lengths(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size())
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(y.size()) + " targets vs " + std::to_string(y_hat.size()) + " predictions");
}

}  // namespace

double mse(std::span<const double> y, std::span<const double> y_hat) {
    check_lengths(y, y_hat);
    if (y.empty()) throw Error(ErrorCode::EmptyInput, "mse of zero samples");
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    return ss / static_cast<double>(y.size());
}

double r2_score(std::span<const double> y, std::span<const double> y_hat) {
    check_lengths(y, y_hat);
    if (y.size() < 2) throw Error(ErrorCode::EmptyInput, "r2 needs at least two samples");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) throw Error(ErrorCode::ConstantTarget, "target has zero variance");
    return 1.0 - ss_res / ss_tot;
}

EvalResult evaluate(const Vector& y, const Vector& y_hat, MetricSpace space) {
    EvalResult r;
    r.mse = mse(as_span(y), as_span(y_hat));
    r.r2 = r2_score(as_span(y), as_span(y_hat));
    r.n = static_cast<std::size_t>(y.size());
    r.space = space;
    return r;
}

}  // namespace epi
