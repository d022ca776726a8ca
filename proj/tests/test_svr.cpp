#include <doctest.h>

#include <cmath>
#include <numeric>

#include "epi/error.hpp"
#include "epi/svr.hpp"
#include "test_util.hpp"

using namespace epi;

namespace {

SvrConfig tight(KernelSpec k, double c, double eps) {
    SvrConfig cfg;
    cfg.kernel = k;
    cfg.c = c;
    cfg.epsilon = eps;
    cfg.tolerance = 1e-8;
    cfg.max_passes = 1000000;
    return cfg;
}

KernelSpec random_kernel(Rng& rng) {
    switch (rng.below(3)) {
        case 0: return {KernelKind::Linear};
        case 1: return {KernelKind::Rbf, rng.uniform(0.1, 2.0)};
        default: return {KernelKind::Poly, rng.uniform(0.2, 1.0), 2 + static_cast<int>(rng.below(2)), 1.0};
    }
}

// Residual conditions at the optimum, given the fitted bias.
void check_kkt(const Matrix& x, const Vector& y, const SvrConfig& cfg, const SvrParams& p, double slack) {
    const double c = cfg.c, eps = cfg.epsilon, edge = 1e-9 * std::max(1.0, c);
    CHECK(std::abs(p.alphas.sum()) < 1e-9);
    const Vector f = svr_predict(p, x);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double b = p.alphas(i), r = y(i) - f(i);
        CHECK(std::abs(b) <= c + edge);
        if (std::abs(b) <= edge)
            CHECK(std::abs(r) <= eps + slack);
        else if (b >= c - edge)
            CHECK(r >= eps - slack);
        else if (b <= -c + edge)
            CHECK(r <= -eps + slack);
        else if (b > 0)
            CHECK(std::abs(r - eps) <= slack);
        else
            CHECK(std::abs(r + eps) <= slack);
    }
}

}  // namespace

TEST_CASE("kernel values") {
    Vector u(2), v(2);
    u << 1, 2;
    v << 3, 4;
    CHECK(kernel_eval({KernelKind::Linear}, u, v) == 11.0);
    CHECK(kernel_eval({KernelKind::Rbf, 0.7}, u, u) == 1.0);
    CHECK(kernel_eval({KernelKind::Rbf, 0.5}, u, v) == doctest::Approx(std::exp(-4.0)));
    CHECK(kernel_eval({KernelKind::Poly, 1.0, 2, 1.0}, u, v) == 144.0);
}

TEST_CASE("scale gamma") {
    Matrix x(4, 1);
    x << 0, 1, 2, 3;
    CHECK(scale_gamma(x) == doctest::Approx(1.0 / 1.25));
    Matrix flat = Matrix::Constant(3, 2, 4.0);
    CHECK(scale_gamma(flat) == 1.0);
    CHECK(resolve_kernel({KernelKind::Rbf, 0.0}, x).gamma == doctest::Approx(0.8));
    CHECK(resolve_kernel({KernelKind::Rbf, 0.3}, x).gamma == 0.3);
}

TEST_CASE("kernel matrices are symmetric positive semidefinite") {
    Rng rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        const auto k = random_kernel(rng);
        const Matrix x = testutil::random_matrix(rng, 3 + static_cast<Eigen::Index>(rng.below(20)), 1 + rng.below(3));
        const Matrix g = gram_matrix(k, x);
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::SelfAdjointEigenSolver<Matrix> es(g);
        CHECK(es.eigenvalues().minCoeff() > -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
    }
}

TEST_CASE("two-point problem with a linear kernel") {
    Matrix x(2, 1);
    x << -1, 1;
    Vector y(2);
    y << -1, 1;
    const KernelSpec lin{KernelKind::Linear};
    for (double c : {0.45, 1.0, 10.0}) {
        const auto cfg = tight(lin, c, 0.1);
        CHECK(qp_oracle(x, y, cfg) == doctest::Approx(0.405).epsilon(1e-10));
        const auto p = svr_fit(x, y, cfg);
        CHECK(p.dual_objective == doctest::Approx(0.405).epsilon(1e-8));
        CHECK(p.alphas(1) == doctest::Approx(0.45).epsilon(1e-8));
        CHECK(p.bias == doctest::Approx(0.0).epsilon(1e-8));
    }
    const auto boxed = tight(lin, 0.3, 0.1);
    CHECK(qp_oracle(x, y, boxed) == doctest::Approx(0.36).epsilon(1e-10));
    const auto p = svr_fit(x, y, boxed);
    CHECK(p.dual_objective == doctest::Approx(0.36).epsilon(1e-8));
    CHECK(p.alphas(1) == doctest::Approx(0.3));
}

TEST_CASE("points inside the tube need no support vectors") {
    Matrix x(3, 1);
    x << -0.5, 0, 0.5;
    const Vector y = x.col(0);
    const auto cfg = tight({KernelKind::Linear}, 1.0, 1.0);
    const auto p = svr_fit(x, y, cfg);
    CHECK(p.alphas.isZero());
    CHECK(p.support_vectors.rows() == 0);
    CHECK(std::abs(p.bias) <= 0.5 + 1e-12);
    CHECK(qp_oracle(x, y, cfg) == doctest::Approx(0.0));
    CHECK(svr_predict(p, x).cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("solver matches the enumeration oracle on small problems") {
    Rng rng(52);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 2 + static_cast<Eigen::Index>(rng.below(4));
        const Matrix x = testutil::random_matrix(rng, n, 1 + rng.below(2));
        const Vector y = testutil::random_vector(rng, n);
        const auto cfg = tight(random_kernel(rng), rng.uniform(0.1, 5.0), rng.uniform(0.0, 0.5));
        const double oracle = qp_oracle(x, y, cfg);
        const auto p = svr_fit(x, y, cfg);
        CHECK(p.converged);
        CHECK(p.dual_objective >= oracle - 1e-4);
        CHECK(p.dual_objective <= oracle + 1e-9);
        check_kkt(x, y, cfg, p, 1e-4);
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("KKT conditions on larger problems") {
    Rng rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 30 + static_cast<Eigen::Index>(rng.below(60));
        const Matrix x = testutil::random_matrix(rng, n, 1);
        const Vector y = x.col(0).array().sin() + 0.1 * testutil::random_vector(rng, n).array();
        const auto cfg = tight(random_kernel(rng), rng.uniform(0.5, 10.0), 0.1);
        const auto p = svr_fit(x, y, cfg);
        REQUIRE(p.converged);
        check_kkt(x, y, cfg, p, 1e-5);
        CHECK(p.kkt_gap <= cfg.tolerance);
        CHECK(p.dual_objective == doctest::Approx(svr_dual_objective(gram_matrix(p.kernel, x), y, cfg.epsilon, p.alphas)));
    }
}

TEST_CASE("predictions do not depend on sample order") {
    Rng rng(54);
    const Eigen::Index n = 40;
    const Matrix x = testutil::random_matrix(rng, n, 1);
    const Vector y = x.col(0).array().cube() + 0.05 * testutil::random_vector(rng, n).array();
    const auto cfg = tight({KernelKind::Rbf, 0.0}, 2.0, 0.05);
    const auto a = svr_fit(x, y, cfg);
    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    Matrix xp(n, 1);
    Vector yp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        xp.row(i) = x.row(static_cast<Eigen::Index>(perm[i]));
        yp(i) = y(static_cast<Eigen::Index>(perm[i]));
    }
    const auto b = svr_fit(xp, yp, cfg);
    const Matrix grid = Eigen::VectorXd::LinSpaced(25, -2.0, 2.0);
    CHECK((svr_predict(a, grid) - svr_predict(b, grid)).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(a.dual_objective == doctest::Approx(b.dual_objective).epsilon(1e-9));
}

TEST_CASE("max_passes reports non-convergence") {
    Rng rng(55);
    const Matrix x = testutil::random_matrix(rng, 30, 1);
    const Vector y = testutil::random_vector(rng, 30);
    auto cfg = tight({KernelKind::Rbf, 1.0}, 10.0, 0.01);
    cfg.max_passes = 3;
    const auto p = svr_fit(x, y, cfg);
    CHECK_FALSE(p.converged);
    CHECK(p.iterations == 3);
}

TEST_CASE("non-finite kernel matrix") {
    Matrix x(2, 1);
    x << 1e200, -1e200;
    Vector y(2);
    y << 0, 1;
    try {
        svr_fit(x, y, tight({KernelKind::Poly, 1.0, 3, 1.0}, 1.0, 0.1));
        FAIL("expected DegenerateKernelMatrix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateKernelMatrix);
    }
}
