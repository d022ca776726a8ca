#pragma once

#include <optional>
#include <string_view>

#include "epi/linalg.hpp"

namespace epi {

enum class KernelKind { Linear, Rbf, Poly };

std::string_view to_string(KernelKind k) noexcept;
std::optional<KernelKind> kernel_kind_from_string(std::string_view name) noexcept;

/// gamma <= 0 means "scale": resolved at fit time to 1 / (n_features * var(x)).
struct KernelSpec {
    KernelKind kind = KernelKind::Rbf;
    double gamma = 0.0;
    int degree = 3;
    double coef0 = 1.0;
};

/// linear u.v, rbf exp(-gamma |u - v|^2), poly (gamma u.v + coef0)^degree.
double kernel_eval(const KernelSpec& k, const Vector& u, const Vector& v);

/// Kernel matrix between the rows of `a` and the rows of `b`.
Matrix gram_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b);
inline Matrix gram_matrix(const KernelSpec& k, const Matrix& x) { return gram_matrix(k, x, x); }

/// 1 / (n_features * variance of all entries of x); 1 when x has zero variance.
double scale_gamma(const Matrix& x);

KernelSpec resolve_kernel(KernelSpec k, const Matrix& x);

struct SvrConfig {
    KernelSpec kernel{};
    double c = 1.0;
    double epsilon = 0.1;
    double tolerance = 1e-3;
    long max_passes = 200000;
};

struct SvrParams {
    /// Dual coefficient alpha_i - alpha_i* for every training sample.
    Vector alphas;
    double bias = 0.0;
    /// Training rows with nonzero dual coefficient, and their coefficients.
    Matrix support_vectors;
    Vector support_coef;
    KernelSpec kernel{};  // gamma resolved
    bool converged = false;
    long iterations = 0;
    double dual_objective = 0.0;
    /// Largest remaining pairwise KKT violation at termination.
    double kkt_gap = 0.0;
};

/// Dual objective y'b - eps |b|_1 - b'Kb / 2 for the split coefficients b = alpha - alpha*.
double svr_dual_objective(const Matrix& gram, const Vector& y, double epsilon, const Vector& beta);

/// Sequential pairwise maximisation of the epsilon-SVR dual. Each step moves
/// one coefficient up and another down by the same amount, which keeps the
/// equality constraint exact; the step length is the exact maximiser of the
/// piecewise quadratic along that direction. Hitting `max_passes` returns the
/// current iterate with `converged == false`.
SvrParams svr_fit(const Matrix& x, const Vector& y, const SvrConfig& cfg);

double svr_predict(const SvrParams& p, const KernelSpec& k, const Vector& x);
double svr_predict(const SvrParams& p, const Vector& x);
Vector svr_predict(const SvrParams& p, const Matrix& x);

/// Exact dual optimum for tiny problems (n <= 5) by enumerating, for every
/// coefficient, the states {-C, (-C,0), 0, (0,C), C} and solving the
/// equality-constrained stationarity system on each face.
double qp_oracle(const Matrix& x, const Vector& y, const SvrConfig& cfg);

}  // namespace epi
