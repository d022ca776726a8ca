#pragma once

#include <vector>

#include "epi/linalg.hpp"

namespace epi {

struct LinRegConfig {
    double learning_rate = 0.5;
    int iterations = 2500;
};

struct LinRegParams {
    Vector slope;
    double intercept = 0.0;
};

/// Full-batch gradient descent on (1/n) * sum (x.slope + b - y)^2 starting
/// from zero. Runs exactly `cfg.iterations` steps; a non-finite loss raises
/// DivergenceError naming the iteration.
LinRegParams linreg_fit(const Matrix& x, const Vector& y, const LinRegConfig& cfg);

/// Same as linreg_fit, also recording the loss before every step and after the last.
LinRegParams linreg_fit(const Matrix& x, const Vector& y, const LinRegConfig& cfg, std::vector<double>* loss_trace);

Vector linreg_predict(const LinRegParams& p, const Matrix& x);

/// Least-squares solution of the normal equations with an intercept column.
/// Throws SingularMatrix when the augmented design is rank deficient.
LinRegParams ols_closed_form(const Matrix& x, const Vector& y);

}  // namespace epi
