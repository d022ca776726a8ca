#include <doctest.h>

#include "epi/error.hpp"
#include "epi/linear_model.hpp"
#include "epi/preprocess.hpp"
#include "test_util.hpp"

using namespace epi;

TEST_CASE("gradient descent matches the closed form on scaled data") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.below(200));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(3));
        const Matrix raw = testutil::random_matrix(rng, n, d, 30.0);
        const Vector w = testutil::random_vector(rng, d);
        Vector y = raw * w + testutil::random_vector(rng, n, 2.0);
        y.array() += 5.0;
        const Matrix x = transform(fit_scaler(raw), raw);
        const auto ys = fit_scaler(y);
        const Vector yt = transform(ys, y);

        const auto gd = linreg_fit(x, yt, {0.1, 3000});
        const auto ols = ols_closed_form(x, yt);
        CHECK((gd.slope - ols.slope).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(std::abs(gd.intercept - ols.intercept) < 1e-6);
    }
}

TEST_CASE("loss is non-increasing at a stable learning rate") {
    Rng rng(22);
    const Matrix raw = testutil::random_matrix(rng, 100, 1);
    const Matrix x = transform(fit_scaler(raw), raw);
    const Vector y = 3.0 * x.col(0) + testutil::random_vector(rng, 100, 0.1);
    std::vector<double> trace;
    linreg_fit(x, y, {0.01, 500}, &trace);
    REQUIRE(trace.size() == 501);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-15);
}

TEST_CASE("exact line recovered") {
    Matrix x(5, 1);
    x << -2, -1, 0, 1, 2;
    const Vector y = 2.0 * x.col(0).array() + 1.0;
    const auto p = linreg_fit(x, y, {0.1, 2000});
    CHECK(p.slope(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(p.intercept == doctest::Approx(1.0).epsilon(1e-9));
    Matrix q(1, 1);
    q << 10;
    CHECK(linreg_predict(p, q)(0) == doctest::Approx(21.0).epsilon(1e-8));
}

TEST_CASE("unscaled day indices diverge") {
    Matrix x(400, 1);
    Vector y(400);
    for (int i = 0; i < 400; ++i) {
        x(i, 0) = i;
        y(i) = 10.0 * i;
    }
    try {
        linreg_fit(x, y, {0.5, 2500});
        FAIL("expected DivergenceError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Divergence);
        CHECK(std::string(e.what()).find("iteration") != std::string::npos);
    }
}

TEST_CASE("closed form rejects rank-deficient designs") {
    Matrix x(4, 1);
    x.setConstant(3.0);
    Vector y(4);
    y << 1, 2, 3, 4;
    CHECK_THROWS_AS(ols_closed_form(x, y), Error);
}
