#include "epi/linear_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "epi/error.hpp"

namespace epi {

namespace {

void check_shapes(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "x has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
    if (y.size() < 2) throw Error(ErrorCode::EmptyInput, "linear regression needs at least two samples");
}

}  // namespace

LinRegParams linreg_fit(const Matrix& x, const Vector& y, const LinRegConfig& cfg) {
    return linreg_fit(x, y, cfg, nullptr);
}

LinRegParams linreg_fit(const Matrix& x, const Vector& y, const LinRegConfig& cfg, std::vector<double>* loss_trace) {
    check_shapes(x, y);
    if (!(cfg.learning_rate > 0.0) || cfg.iterations < 1)
        throw Error(ErrorCode::InvalidConfig, "learning rate must be > 0 and iterations >= 1");

    const double n = static_cast<double>(y.size());
    LinRegParams p{Vector::Zero(x.cols()), 0.0};
    if (loss_trace) loss_trace->clear();
    for (int it = 0; it <= cfg.iterations; ++it) {
        const Vector residual = (x * p.slope).array() + p.intercept - y.array();
        const double loss = residual.squaredNorm() / n;
        if (!std::isfinite(loss))
            throw Error(ErrorCode::Divergence, "loss became non-finite at iteration " + std::to_string(it));
        if (loss_trace) loss_trace->push_back(loss);
        if (it == cfg.iterations) break;
        const Vector grad_slope = (2.0 / n) * (x.transpose() * residual);
        const double grad_intercept = (2.0 / n) * residual.sum();
        p.slope -= cfg.learning_rate * grad_slope;
        p.intercept -= cfg.learning_rate * grad_intercept;
    }
    if (!p.slope.allFinite() || !std::isfinite(p.intercept))
        throw Error(ErrorCode::Divergence, "parameters became non-finite");
    return p;
}

Vector linreg_predict(const LinRegParams& p, const Matrix& x) {
    if (x.cols() != p.slope.size())
        throw Error(ErrorCode::DimensionMismatch, "model has " + std::to_string(p.slope.size()) +
                                                      " features, input has " + std::to_string(x.cols()));
    return (x * p.slope).array() + p.intercept;
}

LinRegParams ols_closed_form(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x rows differ from y length");
    Matrix design(x.rows(), x.cols() + 1);
    design.leftCols(x.cols()) = x;
    design.col(x.cols()).setOnes();
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < design.cols()) throw Error(ErrorCode::SingularMatrix, "design matrix is rank deficient");
    const Vector beta = qr.solve(y);
    return {beta.head(x.cols()), beta(x.cols())};
}

}  // namespace epi
