#include "epi/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "epi/error.hpp"

namespace epi {

std::string_view to_string(KernelKind k) noexcept {
    switch (k) {
        case KernelKind::Linear: return "linear";
        case KernelKind::Rbf: return "rbf";
        case KernelKind::Poly: return "poly";
    }
    return "?";
}

std::optional<KernelKind> kernel_kind_from_string(std::string_view name) noexcept {
    for (auto k : {KernelKind::Linear, KernelKind::Rbf, KernelKind::Poly})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

double kernel_eval(const KernelSpec& k, const Vector& u, const Vector& v) {
    if (u.size() != v.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "kernel arguments have sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
    switch (k.kind) {
        case KernelKind::Linear: return u.dot(v);
        case KernelKind::Rbf: return std::exp(-k.gamma * (u - v).squaredNorm());
        case KernelKind::Poly: return std::pow(k.gamma * u.dot(v) + k.coef0, k.degree);
    }
    return 0.0;
}

Matrix gram_matrix(const KernelSpec& k, const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "kernel inputs differ in feature count");
    Matrix g(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) g(i, j) = kernel_eval(k, a.row(i).transpose(), b.row(j).transpose());
    return g;
}

double scale_gamma(const Matrix& x) {
    if (x.size() == 0) return 1.0;
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

KernelSpec resolve_kernel(KernelSpec k, const Matrix& x) {
    if (!(k.gamma > 0.0)) k.gamma = scale_gamma(x);
    if (k.degree < 1) throw Error(ErrorCode::InvalidConfig, "polynomial degree must be >= 1");
    return k;
}

double svr_dual_objective(const Matrix& gram, const Vector& y, double epsilon, const Vector& beta) {
    return y.dot(beta) - epsilon * beta.lpNorm<1>() - 0.5 * beta.dot(gram * beta);
}

namespace {

// Directional derivatives of the minimisation form
//   f(b) = b'Kb/2 - y'b + eps |b|_1
// for moving one coefficient up (+) or down (-); g = Kb - y.
double up_slope(double g, double beta, double eps) { return beta >= 0.0 ? g + eps : g - eps; }
double down_slope(double g, double beta, double eps) { return beta <= 0.0 ? -g + eps : -g - eps; }

// Exact minimiser over t in [0, t_max] of f(b + t (e_i - e_j)).
double pair_step(double gi, double gj, double bi, double bj, double curvature, double eps, double t_max) {
    std::vector<double> knots{0.0};
    if (bi < 0.0 && -bi < t_max) knots.push_back(-bi);
    if (bj > 0.0 && bj < t_max) knots.push_back(bj);
    knots.push_back(t_max);
    std::sort(knots.begin(), knots.end());
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double a = knots[s], b = knots[s + 1];
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        const double si = (bi + mid) > 0.0 ? 1.0 : -1.0;
        const double sj = (bj - mid) > 0.0 ? 1.0 : -1.0;
        const double c = gi - gj + eps * (si - sj);
        if (c + curvature * a >= 0.0) return a;
        if (curvature > 0.0) {
            const double root = -c / curvature;
            if (root < b) return root;
        }
    }
    return t_max;
}

}  // namespace

SvrParams svr_fit(const Matrix& x, const Vector& y, const SvrConfig& cfg) {
    if (x.rows() != y.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "x has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
    if (y.size() < 2) throw Error(ErrorCode::EmptyInput, "SVR needs at least two samples");
    if (!(cfg.c > 0.0) || !(cfg.epsilon >= 0.0) || !(cfg.tolerance > 0.0))
        throw Error(ErrorCode::InvalidConfig, "SVR needs C > 0, epsilon >= 0 and tolerance > 0");

    SvrParams p;
    p.kernel = resolve_kernel(cfg.kernel, x);
    const Matrix gram = gram_matrix(p.kernel, x);
    if (!gram.allFinite()) throw Error(ErrorCode::DegenerateKernelMatrix, "kernel matrix has non-finite entries");

    const Eigen::Index n = y.size();
    const double c = cfg.c, eps = cfg.epsilon;
    Vector beta = Vector::Zero(n);
    Vector g = -y;

    auto select = [&](Eigen::Index& up, Eigen::Index& down) {
        double best_up = std::numeric_limits<double>::infinity();
        double best_down = std::numeric_limits<double>::infinity();
        up = down = -1;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (beta(k) < c) {
                const double s = up_slope(g(k), beta(k), eps);
                if (s < best_up) best_up = s, up = k;
            }
            if (beta(k) > -c) {
                const double s = down_slope(g(k), beta(k), eps);
                if (s < best_down) best_down = s, down = k;
            }
        }
        return up < 0 || down < 0 ? 0.0 : -(best_up + best_down);
    };

    p.converged = false;
    for (p.iterations = 0; p.iterations < cfg.max_passes; ++p.iterations) {
        Eigen::Index i, j;
        p.kkt_gap = select(i, j);
        if (p.kkt_gap <= cfg.tolerance || i == j) {
            p.converged = true;
            break;
        }
        const double curvature = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
        const double t_max = std::min(c - beta(i), beta(j) + c);
        const double t = pair_step(g(i), g(j), beta(i), beta(j), curvature, eps, t_max);
        if (t <= 0.0) {
            // only reachable through rounding at a knot
            p.converged = p.kkt_gap <= 10.0 * cfg.tolerance;
            break;
        }
        // land exactly on a bound or on zero when the step reaches it
        beta(i) = t == t_max && c - beta(i) <= t ? c : (t == -beta(i) ? 0.0 : beta(i) + t);
        beta(j) = t == t_max && beta(j) + c <= t ? -c : (t == beta(j) ? 0.0 : beta(j) - t);
        g += t * (gram.col(i) - gram.col(j));
    }
    if (p.converged) {
        Eigen::Index i, j;
        p.kkt_gap = select(i, j);
    }

    // bias: the equality multiplier, averaged over free coefficients, else
    // the midpoint of the interval allowed by the bounded ones
    double free_sum = 0.0;
    int free_count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        const bool free = beta(k) != 0.0 && std::abs(beta(k)) < c;
        if (free) {
            free_sum += beta(k) > 0.0 ? -g(k) - eps : -g(k) + eps;
            ++free_count;
        }
        if (beta(k) < c) lower = std::max(lower, -up_slope(g(k), beta(k), eps));
        if (beta(k) > -c) upper = std::min(upper, down_slope(g(k), beta(k), eps));
    }
    if (free_count > 0)
        p.bias = free_sum / free_count;
    else if (std::isfinite(lower) && std::isfinite(upper))
        p.bias = 0.5 * (lower + upper);
    else
        p.bias = std::isfinite(lower) ? lower : upper;

    p.alphas = beta;
    p.dual_objective = svr_dual_objective(gram, y, eps, beta);
    std::vector<Eigen::Index> sv;
    for (Eigen::Index k = 0; k < n; ++k)
        if (beta(k) != 0.0) sv.push_back(k);
    p.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    p.support_coef.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t s = 0; s < sv.size(); ++s) {
        p.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
        p.support_coef(static_cast<Eigen::Index>(s)) = beta(sv[s]);
    }
    return p;
}

double svr_predict(const SvrParams& p, const KernelSpec& k, const Vector& x) {
    if (p.support_vectors.rows() > 0 && x.size() != p.support_vectors.cols())
        throw Error(ErrorCode::DimensionMismatch, "model has " + std::to_string(p.support_vectors.cols()) +
                                                      " features, input has " + std::to_string(x.size()));
    double out = p.bias;
    for (Eigen::Index s = 0; s < p.support_vectors.rows(); ++s)
        out += p.support_coef(s) * kernel_eval(k, p.support_vectors.row(s).transpose(), x);
    return out;
}

double svr_predict(const SvrParams& p, const Vector& x) { return svr_predict(p, p.kernel, x); }

Vector svr_predict(const SvrParams& p, const Matrix& x) {
    Vector out(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) out(r) = svr_predict(p, p.kernel, x.row(r).transpose());
    return out;
}

double qp_oracle(const Matrix& x, const Vector& y, const SvrConfig& cfg) {
    const Eigen::Index n = y.size();
    if (n > 5) throw Error(ErrorCode::InvalidConfig, "qp_oracle enumerates at most 5 samples");
    const KernelSpec k = resolve_kernel(cfg.kernel, x);
    Matrix gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) gram(i, j) = kernel_eval(k, x.row(i).transpose(), x.row(j).transpose());
    const double c = cfg.c, eps = cfg.epsilon;
    constexpr double feas_tol = 1e-10;

    double best = -std::numeric_limits<double>::infinity();
    long combos = 1;
    for (Eigen::Index i = 0; i < n; ++i) combos *= 5;
    std::vector<int> state(static_cast<std::size_t>(n));
    for (long code = 0; code < combos; ++code) {
        long rest = code;
        std::vector<Eigen::Index> free_idx;
        Vector beta = Vector::Zero(n);
        Vector sign = Vector::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int s = static_cast<int>(rest % 5);
            rest /= 5;
            switch (s) {
                case 0: beta(i) = -c; break;
                case 1: sign(i) = -1.0; free_idx.push_back(i); break;
                case 2: break;
                case 3: sign(i) = 1.0; free_idx.push_back(i); break;
                case 4: beta(i) = c; break;
            }
        }
        const auto m = static_cast<Eigen::Index>(free_idx.size());
        if (m == 0) {
            if (std::abs(beta.sum()) > feas_tol) continue;
        } else {
            // [K_FF 1; 1' 0] [b_F; lambda] = [y_F - eps s_F - K_FX b_X; -sum b_X]
            Matrix kkt = Matrix::Zero(m + 1, m + 1);
            Vector rhs(m + 1);
            for (Eigen::Index a = 0; a < m; ++a) {
                const auto ia = free_idx[static_cast<std::size_t>(a)];
                for (Eigen::Index b = 0; b < m; ++b) kkt(a, b) = gram(ia, free_idx[static_cast<std::size_t>(b)]);
                kkt(a, m) = 1.0;
                kkt(m, a) = 1.0;
                rhs(a) = y(ia) - eps * sign(ia) - gram.row(ia).dot(beta);
            }
            rhs(m) = -beta.sum();
            const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
            if ((kkt * sol - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) continue;
            bool feasible = true;
            for (Eigen::Index a = 0; a < m && feasible; ++a) {
                const auto ia = free_idx[static_cast<std::size_t>(a)];
                const double v = sol(a) * sign(ia);
                feasible = v >= -feas_tol && v <= c + feas_tol;
                beta(ia) = sign(ia) * std::clamp(v, 0.0, c);
            }
            if (!feasible) continue;
        }
        best = std::max(best, svr_dual_objective(gram, y, eps, beta));
    }
    return best;
}

}  // namespace epi
