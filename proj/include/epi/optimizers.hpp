#pragma once

#include <deque>
#include <functional>
#include <string_view>
#include <vector>

#include "epi/linalg.hpp"

namespace epi {

/// Differentiable objective over a flat parameter vector. `eval` returns the
/// value and writes the gradient (already sized to `dim`).
struct Objective {
    Eigen::Index dim = 0;
    std::function<double(const Vector& theta, Vector& grad)> eval;
};

/// Early stop when the loss fails to improve by more than `tolerance` over
/// the last `window` iterations. A tolerance of 0 disables the rule.
struct StallRule {
    double tolerance = 0.0;
    int window = 10;
};

enum class MinimizerStatus { Converged, MaxIterations, Stalled, LineSearchFailure };

std::string_view to_string(MinimizerStatus s) noexcept;

/// Line-search quantities of one accepted L-BFGS step, for auditing the Wolfe conditions.
struct StepRecord {
    double step = 0.0;
    double f0 = 0.0;
    double slope0 = 0.0;
    double f = 0.0;
    double slope = 0.0;
};

struct MinimizeResult {
    Vector theta;
    /// Objective value at the start and after every iteration.
    std::vector<double> trace;
    MinimizerStatus status = MinimizerStatus::MaxIterations;
    int iterations = 0;
    int evaluations = 0;
    std::vector<StepRecord> steps;  // filled only when requested
};

struct LbfgsConfig {
    int memory = 10;
    int max_iterations = 1000;
    double grad_tolerance = 1e-6;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search_evals = 25;
    StallRule stall{};
    bool record_steps = false;
};

struct CurvaturePair {
    Vector s;  // theta_{k+1} - theta_k
    Vector y;  // grad_{k+1} - grad_k
};

/// Two-loop recursion: returns H * grad, where H is the inverse-Hessian
/// approximation built from `pairs` (oldest first) with the scaled identity
/// s'y / y'y of the newest pair as the seed matrix.
Vector lbfgs_apply_inverse_hessian(const Vector& grad, const std::deque<CurvaturePair>& pairs);

/// Throws NonFiniteObjective if the start point evaluates non-finite. A line
/// search that fails twice (quasi-Newton, then steepest descent) ends the run
/// with status LineSearchFailure and the best point so far.
MinimizeResult lbfgs_minimize(const Objective& obj, Vector theta0, const LbfgsConfig& cfg);

MinimizeResult sgd_minimize(const Objective& obj, Vector theta0, double learning_rate, int iterations,
                            StallRule stall = {});

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int iterations = 1000;
    StallRule stall{};
};

MinimizeResult adam_minimize(const Objective& obj, Vector theta0, const AdamConfig& cfg);

}  // namespace epi
