#include "epi/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "epi/error.hpp"

namespace epi {

std::string_view to_string(MinimizerStatus s) noexcept {
    switch (s) {
        case MinimizerStatus::Converged: return "converged";
        case MinimizerStatus::MaxIterations: return "max_iterations";
        case MinimizerStatus::Stalled: return "stalled";
        case MinimizerStatus::LineSearchFailure: return "line_search_failure";
    }
    return "?";
}

namespace {

bool stalled(const std::vector<double>& trace, const StallRule& rule) {
    if (rule.tolerance <= 0.0 || rule.window < 1) return false;
    const auto w = static_cast<std::size_t>(rule.window);
    if (trace.size() <= w) return false;
    return trace[trace.size() - 1 - w] - trace.back() < rule.tolerance;
}

double evaluate_checked(const Objective& obj, const Vector& theta, Vector& grad, int iteration) {
    const double f = obj.eval(theta, grad);
    if (!std::isfinite(f) || !grad.allFinite())
        throw Error(ErrorCode::NonFiniteObjective, "objective non-finite at iteration " + std::to_string(iteration));
    return f;
}

// Minimizer of the cubic matching values and slopes at a and b, clamped to
// the middle 80% of the interval; bisection if the cubic is degenerate.
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    double t = 0.5 * (a + b);
    if (std::isfinite(fb) && std::isfinite(db)) {
        const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
        const double disc = d1 * d1 - da * db;
        if (disc >= 0.0) {
            const double d2 = std::copysign(std::sqrt(disc), b - a);
            const double cand = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
            if (std::isfinite(cand)) t = cand;
        }
    }
    return std::clamp(t, lo + margin, hi - margin);
}

// Root of the linear interpolant of the slopes, clamped like cubic_step.
double secant_step(double a, double da, double b, double db) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    double t = 0.5 * (a + b);
    if (std::isfinite(db) && da != db) {
        const double cand = a - da * (b - a) / (db - da);
        if (std::isfinite(cand)) t = cand;
    }
    return std::clamp(t, lo + margin, hi - margin);
}

struct LinePoint {
    double step = 0.0;
    double f = 0.0;
    double slope = 0.0;
    Vector theta;
    Vector grad;
};

struct LineSearch {
    const Objective& obj;
    const LbfgsConfig& cfg;
    const Vector& origin;
    const Vector& direction;
    double f0;
    double slope0;
    int evals = 0;
    int iteration = 0;

    LinePoint probe(double step) {
        LinePoint p;
        p.step = step;
        p.theta = origin + step * direction;
        p.grad.resize(origin.size());
        p.f = obj.eval(p.theta, p.grad);
        p.slope = p.grad.dot(direction);
        ++evals;
        if (!std::isfinite(p.f) || !std::isfinite(p.slope)) {
            p.f = std::numeric_limits<double>::infinity();
            p.slope = std::numeric_limits<double>::quiet_NaN();
        }
        return p;
    }

    // Near a minimizer the required decrease drops below the rounding error of
    // f, so a value within that error is also accepted provided the slope has
    // not turned strongly uphill (approximate Wolfe).
    bool flat(const LinePoint& p) const { return std::abs(p.f - f0) <= 1e-12 * std::abs(f0); }
    bool armijo(const LinePoint& p) const {
        if (p.f <= f0 + cfg.wolfe_c1 * p.step * slope0) return true;
        return flat(p) && p.slope <= (2.0 * cfg.wolfe_c1 - 1.0) * slope0;
    }
    bool curvature(const LinePoint& p) const { return std::abs(p.slope) <= -cfg.wolfe_c2 * slope0; }

    std::optional<LinePoint> zoom(LinePoint lo, LinePoint hi) {
        while (evals < cfg.max_line_search_evals) {
            if (std::abs(hi.step - lo.step) < 1e-16 * std::max(1.0, std::abs(lo.step))) break;
            // values carry no information inside the rounding band; interpolate the slope instead
            const double step = flat(lo) && flat(hi) ? secant_step(lo.step, lo.slope, hi.step, hi.slope)
                                                     : cubic_step(lo.step, lo.f, lo.slope, hi.step, hi.f, hi.slope);
            LinePoint p = probe(step);
            if (flat(p)) {
                if (armijo(p) && curvature(p)) return p;
                if (p.slope * (hi.step - lo.step) < 0.0)
                    lo = std::move(p);
                else
                    hi = std::move(p);
            } else if (!armijo(p) || p.f >= lo.f) {
                hi = std::move(p);
            } else {
                if (curvature(p)) return p;
                if (p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
                lo = std::move(p);
            }
        }
        return std::nullopt;
    }

    std::optional<LinePoint> run(double initial_step) {
        LinePoint prev;
        prev.step = 0.0;
        prev.f = f0;
        prev.slope = slope0;
        double step = initial_step;
        for (int i = 0; evals < cfg.max_line_search_evals; ++i) {
            LinePoint p = probe(step);
            if (flat(p)) {
                if (armijo(p) && curvature(p)) return p;
                if (p.slope >= 0.0) return zoom(std::move(prev), std::move(p));
            } else {
                if (!armijo(p) || (i > 0 && p.f >= prev.f)) return zoom(std::move(prev), std::move(p));
                if (curvature(p)) return p;
                if (p.slope >= 0.0) return zoom(std::move(p), std::move(prev));
            }
            prev = std::move(p);
            step *= 2.0;
        }
        return std::nullopt;
    }
};

}  // namespace

Vector lbfgs_apply_inverse_hessian(const Vector& grad, const std::deque<CurvaturePair>& pairs) {
    Vector q = grad;
    std::vector<double> alpha(pairs.size()), rho(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
        rho[k] = 1.0 / pairs[k].y.dot(pairs[k].s);
        alpha[k] = rho[k] * pairs[k].s.dot(q);
        q -= alpha[k] * pairs[k].y;
    }
    if (!pairs.empty()) {
        const auto& last = pairs.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double beta = rho[k] * pairs[k].y.dot(q);
        q += (alpha[k] - beta) * pairs[k].s;
    }
    return q;
}

MinimizeResult lbfgs_minimize(const Objective& obj, Vector theta0, const LbfgsConfig& cfg) {
    if (cfg.memory < 1 || !(0.0 < cfg.wolfe_c1 && cfg.wolfe_c1 < cfg.wolfe_c2 && cfg.wolfe_c2 < 1.0))
        throw Error(ErrorCode::InvalidConfig, "L-BFGS needs memory >= 1 and 0 < c1 < c2 < 1");
    if (theta0.size() != obj.dim) throw Error(ErrorCode::DimensionMismatch, "start point has wrong dimension");

    MinimizeResult res;
    res.theta = std::move(theta0);
    Vector grad(obj.dim);
    double f = evaluate_checked(obj, res.theta, grad, 0);
    res.evaluations = 1;
    res.trace.push_back(f);

    std::deque<CurvaturePair> pairs;
    while (true) {
        if (grad.lpNorm<Eigen::Infinity>() < cfg.grad_tolerance) {
            res.status = MinimizerStatus::Converged;
            break;
        }
        if (res.iterations >= cfg.max_iterations) {
            res.status = MinimizerStatus::MaxIterations;
            break;
        }
        if (stalled(res.trace, cfg.stall)) {
            res.status = MinimizerStatus::Stalled;
            break;
        }

        std::optional<LinePoint> accepted;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) {
                if (pairs.empty()) break;
                pairs.clear();
            }
            Vector direction = -lbfgs_apply_inverse_hessian(grad, pairs);
            double slope0 = grad.dot(direction);
            if (!(slope0 < 0.0)) {
                pairs.clear();
                direction = -grad;
                slope0 = -grad.squaredNorm();
            }
            const double initial = pairs.empty() ? std::min(1.0, 1.0 / grad.norm()) : 1.0;
            LineSearch ls{obj, cfg, res.theta, direction, f, slope0};
            ls.iteration = res.iterations;
            accepted = ls.run(initial);
            res.evaluations += ls.evals;
            if (accepted && cfg.record_steps)
                res.steps.push_back({accepted->step, f, slope0, accepted->f, accepted->slope});
        }
        if (!accepted) {
            res.status = MinimizerStatus::LineSearchFailure;
            break;
        }

        CurvaturePair pair{accepted->theta - res.theta, accepted->grad - grad};
        const double sy = pair.s.dot(pair.y);
        if (sy > 1e-10 * pair.s.norm() * pair.y.norm()) {
            pairs.push_back(std::move(pair));
            if (pairs.size() > static_cast<std::size_t>(cfg.memory)) pairs.pop_front();
        }
        res.theta = std::move(accepted->theta);
        grad = std::move(accepted->grad);
        f = accepted->f;
        ++res.iterations;
        res.trace.push_back(f);
    }
    return res;
}

MinimizeResult sgd_minimize(const Objective& obj, Vector theta0, double learning_rate, int iterations,
                            StallRule stall) {
    if (learning_rate < 0.0 || iterations < 0)
        throw Error(ErrorCode::InvalidConfig, "SGD needs a nonnegative learning rate and iteration count");
    if (theta0.size() != obj.dim) throw Error(ErrorCode::DimensionMismatch, "start point has wrong dimension");
    MinimizeResult res;
    res.theta = std::move(theta0);
    Vector grad(obj.dim);
    res.trace.push_back(evaluate_checked(obj, res.theta, grad, 0));
    res.evaluations = 1;
    res.status = MinimizerStatus::MaxIterations;
    for (int it = 1; it <= iterations; ++it) {
        res.theta -= learning_rate * grad;
        res.trace.push_back(evaluate_checked(obj, res.theta, grad, it));
        ++res.evaluations;
        res.iterations = it;
        if (stalled(res.trace, stall)) {
            res.status = MinimizerStatus::Stalled;
            break;
        }
    }
    return res;
}

MinimizeResult adam_minimize(const Objective& obj, Vector theta0, const AdamConfig& cfg) {
    if (cfg.learning_rate < 0.0 || cfg.iterations < 0 || !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
        !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.epsilon > 0.0))
        throw Error(ErrorCode::InvalidConfig, "invalid Adam hyperparameters");
    if (theta0.size() != obj.dim) throw Error(ErrorCode::DimensionMismatch, "start point has wrong dimension");
    MinimizeResult res;
    res.theta = std::move(theta0);
    Vector grad(obj.dim);
    Vector m = Vector::Zero(obj.dim);
    Vector v = Vector::Zero(obj.dim);
    res.trace.push_back(evaluate_checked(obj, res.theta, grad, 0));
    res.evaluations = 1;
    res.status = MinimizerStatus::MaxIterations;
    double beta1_pow = 1.0, beta2_pow = 1.0;
    for (int it = 1; it <= cfg.iterations; ++it) {
        beta1_pow *= cfg.beta1;
        beta2_pow *= cfg.beta2;
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
        const Vector m_hat = m / (1.0 - beta1_pow);
        const Vector v_hat = v / (1.0 - beta2_pow);
        res.theta.array() -= cfg.learning_rate * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
        res.trace.push_back(evaluate_checked(obj, res.theta, grad, it));
        ++res.evaluations;
        res.iterations = it;
        if (stalled(res.trace, cfg.stall)) {
            res.status = MinimizerStatus::Stalled;
            break;
        }
    }
    return res;
}

}  // namespace epi
