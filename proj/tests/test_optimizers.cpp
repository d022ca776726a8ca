#include <doctest.h>

#include <cmath>

#include "epi/error.hpp"
#include "epi/optimizers.hpp"
#include "test_util.hpp"

using namespace epi;

namespace {

// f(x) = 0.5 x'Ax - b'x
Objective quadratic(const Matrix& a, const Vector& b) {
    return {a.rows(), [a, b](const Vector& x, Vector& g) {
                g = a * x - b;
                return 0.5 * x.dot(a * x) - b.dot(x);
            }};
}

Objective rosenbrock() {
    return {2, [](const Vector& x, Vector& g) {
                const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
                g(0) = -2.0 * a - 400.0 * x(0) * b;
                g(1) = 200.0 * b;
                return a * a + 100.0 * b * b;
            }};
}

Matrix random_spd(Rng& rng, Eigen::Index n, double cond) {
    const Matrix q = Eigen::HouseholderQR<Matrix>(testutil::random_matrix(rng, n, n)).householderQ();
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = std::pow(cond, static_cast<double>(i) / std::max<double>(1, n - 1));
    return q * d.asDiagonal() * q.transpose();
}

}  // namespace

TEST_CASE("L-BFGS on a small quadratic") {
    Matrix a(2, 2);
    a << 3, 1, 1, 2;
    Vector b(2);
    b << 1, -1;
    const auto r = lbfgs_minimize(quadratic(a, b), Vector::Zero(2), {});
    const Vector x_star = a.ldlt().solve(b);
    CHECK(r.status == MinimizerStatus::Converged);
    CHECK(r.iterations <= 5);
    CHECK((r.theta - x_star).norm() < 1e-6);
}

TEST_CASE("L-BFGS on random quadratics") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 2 + static_cast<Eigen::Index>(rng.below(20));
        const Matrix a = random_spd(rng, n, 100.0);
        const Vector b = testutil::random_vector(rng, n);
        LbfgsConfig cfg;
        cfg.grad_tolerance = 1e-9;
        const auto r = lbfgs_minimize(quadratic(a, b), Vector::Zero(n), cfg);
        CHECK(r.status == MinimizerStatus::Converged);
        CHECK((r.theta - a.ldlt().solve(b)).norm() < 1e-6);
    }
}

TEST_CASE("L-BFGS on Rosenbrock") {
    Vector x0(2);
    x0 << -1.2, 1.0;
    LbfgsConfig cfg;
    cfg.max_iterations = 500;
    const auto r = lbfgs_minimize(rosenbrock(), x0, cfg);
    CHECK(r.status == MinimizerStatus::Converged);
    CHECK(std::abs(r.theta(0) - 1.0) < 1e-4);
    CHECK(std::abs(r.theta(1) - 1.0) < 1e-4);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("starting at the optimum returns immediately") {
    Matrix a = Matrix::Identity(3, 3);
    Vector b = Vector::Zero(3);
    const auto r = lbfgs_minimize(quadratic(a, b), Vector::Zero(3), {});
    CHECK(r.status == MinimizerStatus::Converged);
    CHECK(r.iterations == 0);
    CHECK(r.theta.isZero());
}

TEST_CASE("every accepted step satisfies the strong Wolfe conditions") {
    Rng rng(32);
    LbfgsConfig cfg;
    cfg.record_steps = true;
    cfg.max_iterations = 200;
    for (int trial = 0; trial < 10; ++trial) {
        Vector x0(2);
        x0 << rng.uniform(-2, 2), rng.uniform(-1, 3);
        const auto r = lbfgs_minimize(rosenbrock(), x0, cfg);
        REQUIRE_FALSE(r.steps.empty());
        for (const auto& s : r.steps) {
            CHECK(s.slope0 < 0.0);
            CHECK(s.f <= s.f0 + cfg.wolfe_c1 * s.step * s.slope0 + 1e-12);
            CHECK(std::abs(s.slope) <= cfg.wolfe_c2 * std::abs(s.slope0) + 1e-12);
        }
    }
}

TEST_CASE("two-loop recursion reproduces the Newton direction from conjugate pairs") {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 1 + static_cast<Eigen::Index>(rng.below(5));
        const Matrix a = random_spd(rng, n, 10.0);
        // A-orthogonalize random directions
        std::deque<CurvaturePair> pairs;
        std::vector<Vector> dirs;
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector s = testutil::random_vector(rng, n);
            for (const auto& d : dirs) s -= (d.dot(a * s) / d.dot(a * d)) * d;
            dirs.push_back(s);
            pairs.push_back({s, a * s});
        }
        const Vector g = testutil::random_vector(rng, n);
        const Vector h = lbfgs_apply_inverse_hessian(g, pairs);
        CHECK((h - a.ldlt().solve(g)).norm() < 1e-8 * std::max(1.0, h.norm()));
    }
    // empty history is the identity
    const Vector g = Vector::Ones(3);
    CHECK(lbfgs_apply_inverse_hessian(g, {}) == g);
}

TEST_CASE("non-finite start raises") {
    const Objective bad{1, [](const Vector&, Vector& g) {
                            g.setZero();
                            return std::nan("");
                        }};
    try {
        lbfgs_minimize(bad, Vector::Zero(1), {});
        FAIL("expected NonFiniteObjective");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteObjective);
    }
}

TEST_CASE("SGD with zero learning rate leaves parameters unchanged") {
    Matrix a = Matrix::Identity(2, 2);
    Vector b = Vector::Ones(2);
    Vector x0(2);
    x0 << 0.3, -0.7;
    const auto r = sgd_minimize(quadratic(a, b), x0, 0.0, 50);
    CHECK(r.theta == x0);
    CHECK(r.iterations == 50);
}

TEST_CASE("SGD converges on a well-conditioned quadratic") {
    Matrix a(2, 2);
    a << 2, 0.5, 0.5, 1;
    Vector b(2);
    b << 1, 1;
    const auto r = sgd_minimize(quadratic(a, b), Vector::Zero(2), 0.3, 500);
    CHECK((r.theta - a.ldlt().solve(b)).norm() < 1e-8);
}

TEST_CASE("Adam drives the gradient norm down") {
    Rng rng(34);
    const Matrix a = random_spd(rng, 4, 5.0);
    const Vector b = testutil::random_vector(rng, 4);
    AdamConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.iterations = 5000;
    const auto r = adam_minimize(quadratic(a, b), Vector::Zero(4), cfg);
    CHECK((a * r.theta - b).norm() < 1e-4);
}

TEST_CASE("minimizers are deterministic") {
    Vector x0(2);
    x0 << -1.2, 1.0;
    const auto r1 = lbfgs_minimize(rosenbrock(), x0, {});
    const auto r2 = lbfgs_minimize(rosenbrock(), x0, {});
    CHECK(r1.theta == r2.theta);
    CHECK(r1.trace == r2.trace);
    AdamConfig cfg;
    const auto a1 = adam_minimize(rosenbrock(), x0, cfg);
    const auto a2 = adam_minimize(rosenbrock(), x0, cfg);
    CHECK(a1.theta == a2.theta);
}

TEST_CASE("stall rule stops on a flat objective") {
    const Objective flat{1, [](const Vector&, Vector& g) {
                             g.setConstant(1e-3);
                             return 1.0;
                         }};
    const auto r = sgd_minimize(flat, Vector::Zero(1), 1e-3, 1000, {1e-6, 10});
    CHECK(r.status == MinimizerStatus::Stalled);
    CHECK(r.iterations < 20);
}
