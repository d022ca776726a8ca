#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "epi/linalg.hpp"
#include "epi/optimizers.hpp"

namespace epi {

/// Hidden-layer nonlinearity. `Identity` exists for analytic test networks.
enum class Activation { Tanh, Relu, Logistic, Identity };

std::string_view to_string(Activation a) noexcept;
std::optional<Activation> activation_from_string(std::string_view name) noexcept;

double activate(Activation a, double b) noexcept;
double activate_derivative(Activation a, double b) noexcept;

enum class MlpOptimizer { Lbfgs, Sgd, Adam };

std::string_view to_string(MlpOptimizer o) noexcept;
std::optional<MlpOptimizer> mlp_optimizer_from_string(std::string_view name) noexcept;

struct MlpConfig {
    int hidden_layers = 100;
    int neurons_per_layer = 64;
    Activation activation = Activation::Tanh;
    MlpOptimizer optimizer = MlpOptimizer::Lbfgs;
    int max_iterations = 1000;
    std::uint64_t seed = 0;
    /// Early stop when the loss improves by less than this over `patience` iterations.
    double tolerance = 1e-6;
    int patience = 10;
    /// Step size for sgd and adam; ignored by lbfgs.
    double learning_rate = 1e-3;
};

/// Layer l maps h_{l-1} to activation(biases[l] + weights[l] * h_{l-1});
/// the last layer is affine with identity output.
struct MlpParams {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t layer_count() const { return weights.size(); }
    Eigen::Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
    Eigen::Index parameter_count() const;
};

/// Glorot-uniform weights from the seeded generator, zero biases.
MlpParams init_params(const MlpConfig& cfg, Eigen::Index n_features);

/// Same layer shapes with every entry zero.
MlpParams zeros_like(const MlpParams& p);

double forward(const MlpParams& p, Activation a, const Vector& x);

/// Predictions for every row of `x`.
Vector predict(const MlpParams& p, Activation a, const Matrix& x);

/// Activations of every hidden layer for one input, input excluded.
std::vector<Vector> hidden_activations(const MlpParams& p, Activation a, const Vector& x);

struct LossGradient {
    double loss = 0.0;
    MlpParams grad;
};

/// Mean squared error over the batch and its gradient by backpropagation.
/// Throws NonFiniteLoss if the loss is not finite.
LossGradient loss_and_gradient(const MlpParams& p, Activation a, const Matrix& x, const Vector& y);

/// Layer-major, weights (row-major) then bias.
Vector flatten(const MlpParams& p);
void unflatten_into(const Vector& theta, MlpParams& p);

struct TrainingTrace {
    std::vector<double> loss;
    MinimizerStatus status = MinimizerStatus::MaxIterations;
    int iterations = 0;
};

struct MlpFit {
    MlpParams params;
    TrainingTrace trace;
};

MlpFit train_mlp(const MlpConfig& cfg, const Matrix& x, const Vector& y);

}  // namespace epi
