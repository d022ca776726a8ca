#include "epi/mlp.hpp"

#include <cmath>
#include <string>

#include "epi/error.hpp"
#include "epi/random.hpp"

namespace epi {

std::string_view to_string(Activation a) noexcept {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Logistic: return "logistic";
        case Activation::Identity: return "identity";
    }
    return "?";
}

std::optional<Activation> activation_from_string(std::string_view name) noexcept {
    for (auto a : {Activation::Tanh, Activation::Relu, Activation::Logistic, Activation::Identity})
        if (to_string(a) == name) return a;
    return std::nullopt;
}

double activate(Activation a, double b) noexcept {
    switch (a) {
        case Activation::Tanh: return std::tanh(b);
        case Activation::Relu: return b > 0.0 ? b : 0.0;
        case Activation::Logistic: return 1.0 / (1.0 + std::exp(-b));
        case Activation::Identity: return b;
    }
    return b;
}

double activate_derivative(Activation a, double b) noexcept {
    switch (a) {
        case Activation::Tanh: {
            const double t = std::tanh(b);
            return 1.0 - t * t;
        }
        case Activation::Relu: return b > 0.0 ? 1.0 : 0.0;
        case Activation::Logistic: {
            const double s = 1.0 / (1.0 + std::exp(-b));
            return s * (1.0 - s);
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

std::string_view to_string(MlpOptimizer o) noexcept {
    switch (o) {
        case MlpOptimizer::Lbfgs: return "lbfgs";
        case MlpOptimizer::Sgd: return "sgd";
        case MlpOptimizer::Adam: return "adam";
    }
    return "?";
}

std::optional<MlpOptimizer> mlp_optimizer_from_string(std::string_view name) noexcept {
    for (auto o : {MlpOptimizer::Lbfgs, MlpOptimizer::Sgd, MlpOptimizer::Adam})
        if (to_string(o) == name) return o;
    return std::nullopt;
}

Eigen::Index MlpParams::parameter_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

MlpParams init_params(const MlpConfig& cfg, Eigen::Index n_features) {
    if (cfg.hidden_layers < 1 || cfg.neurons_per_layer < 1 || n_features < 1)
        throw Error(ErrorCode::InvalidConfig, "MLP needs at least one hidden layer, neuron and feature");
    Rng rng(cfg.seed);
    MlpParams p;
    const auto width = static_cast<Eigen::Index>(cfg.neurons_per_layer);
    for (int l = 0; l <= cfg.hidden_layers; ++l) {
        const Eigen::Index fan_in = l == 0 ? n_features : width;
        const Eigen::Index fan_out = l == cfg.hidden_layers ? 1 : width;
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (Eigen::Index r = 0; r < fan_out; ++r)
            for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
        p.weights.push_back(std::move(w));
        p.biases.push_back(Vector::Zero(fan_out));
    }
    return p;
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        z.weights.push_back(Matrix::Zero(p.weights[l].rows(), p.weights[l].cols()));
        z.biases.push_back(Vector::Zero(p.biases[l].size()));
    }
    return z;
}

namespace {

void check_input(const MlpParams& p, Eigen::Index cols) {
    if (p.weights.empty()) throw Error(ErrorCode::InvalidConfig, "network has no layers");
    if (cols != p.input_dim())
        throw Error(ErrorCode::DimensionMismatch, "network expects " + std::to_string(p.input_dim()) +
                                                      " features, input has " + std::to_string(cols));
}

Matrix apply(Activation a, const Matrix& z) {
    return z.unaryExpr([a](double b) { return activate(a, b); });
}

// Derivative expressed through the pre-activation and the activation value.
Matrix apply_derivative(Activation a, const Matrix& z, const Matrix& h) {
    switch (a) {
        case Activation::Tanh: return (1.0 - h.array().square()).matrix();
        case Activation::Logistic: return (h.array() * (1.0 - h.array())).matrix();
        case Activation::Relu: return (z.array() > 0.0).cast<double>().matrix();
        case Activation::Identity: return Matrix::Ones(z.rows(), z.cols());
    }
    return Matrix::Ones(z.rows(), z.cols());
}

// Column-per-sample forward pass keeping pre-activations and activations.
struct ForwardCache {
    std::vector<Matrix> pre;  // hidden pre-activations
    std::vector<Matrix> act;  // act[0] = input, act[l] = hidden layer l
    Matrix output;            // 1 x n
};

ForwardCache forward_batch(const MlpParams& p, Activation a, const Matrix& x) {
    ForwardCache c;
    c.act.push_back(x.transpose());
    const std::size_t hidden = p.layer_count() - 1;
    for (std::size_t l = 0; l < hidden; ++l) {
        Matrix z = p.weights[l] * c.act.back();
        z.colwise() += p.biases[l];
        c.act.push_back(apply(a, z));
        c.pre.push_back(std::move(z));
    }
    c.output = p.weights.back() * c.act.back();
    c.output.colwise() += p.biases.back();
    return c;
}

double loss_and_gradient_unchecked(const MlpParams& p, Activation a, const Matrix& x, const Vector& y,
                                   MlpParams& grad) {
    const ForwardCache c = forward_batch(p, a, x);
    const double n = static_cast<double>(y.size());
    const Eigen::RowVectorXd residual = c.output.row(0) - y.transpose();
    const double loss = residual.squaredNorm() / n;

    Matrix delta = (2.0 / n) * residual;  // dL/d(output pre-activation), 1 x n
    for (std::size_t l = p.layer_count(); l-- > 0;) {
        grad.weights[l].noalias() = delta * c.act[l].transpose();
        grad.biases[l] = delta.rowwise().sum();
        if (l == 0) break;
        Matrix back = p.weights[l].transpose() * delta;
        delta = back.cwiseProduct(apply_derivative(a, c.pre[l - 1], c.act[l]));
    }
    return loss;
}

}  // namespace

double forward(const MlpParams& p, Activation a, const Vector& x) {
    check_input(p, x.size());
    Vector h = x;
    for (std::size_t l = 0; l + 1 < p.layer_count(); ++l)
        h = (p.biases[l] + p.weights[l] * h).unaryExpr([a](double b) { return activate(a, b); });
    return (p.biases.back() + p.weights.back() * h)(0);
}

std::vector<Vector> hidden_activations(const MlpParams& p, Activation a, const Vector& x) {
    check_input(p, x.size());
    std::vector<Vector> out;
    Vector h = x;
    for (std::size_t l = 0; l + 1 < p.layer_count(); ++l) {
        h = (p.biases[l] + p.weights[l] * h).unaryExpr([a](double b) { return activate(a, b); });
        out.push_back(h);
    }
    return out;
}

Vector predict(const MlpParams& p, Activation a, const Matrix& x) {
    check_input(p, x.cols());
    return forward_batch(p, a, x).output.row(0).transpose();
}

LossGradient loss_and_gradient(const MlpParams& p, Activation a, const Matrix& x, const Vector& y) {
    check_input(p, x.cols());
    if (x.rows() != y.size() || y.size() == 0)
        throw Error(ErrorCode::DimensionMismatch,
                    "x has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
    LossGradient out{0.0, zeros_like(p)};
    out.loss = loss_and_gradient_unchecked(p, a, x, y, out.grad);
    if (!std::isfinite(out.loss)) throw Error(ErrorCode::NonFiniteLoss, "loss is not finite");
    return out;
}

Vector flatten(const MlpParams& p) {
    Vector theta(p.parameter_count());
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        const auto& w = p.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) theta(k++) = w(r, c);
        theta.segment(k, p.biases[l].size()) = p.biases[l];
        k += p.biases[l].size();
    }
    return theta;
}

void unflatten_into(const Vector& theta, MlpParams& p) {
    if (theta.size() != p.parameter_count())
        throw Error(ErrorCode::DimensionMismatch, "flat vector has " + std::to_string(theta.size()) +
                                                      " entries, network has " +
                                                      std::to_string(p.parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        auto& w = p.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = theta(k++);
        p.biases[l] = theta.segment(k, p.biases[l].size());
        k += p.biases[l].size();
    }
}

MlpFit train_mlp(const MlpConfig& cfg, const Matrix& x, const Vector& y) {
    if (cfg.max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
    if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x rows differ from y length");
    if (y.size() < 2) throw Error(ErrorCode::EmptyInput, "MLP training needs at least two samples");

    MlpFit fit;
    fit.params = init_params(cfg, x.cols());
    MlpParams scratch = fit.params;
    MlpParams grad = zeros_like(fit.params);

    Objective obj;
    obj.dim = fit.params.parameter_count();
    obj.eval = [&](const Vector& theta, Vector& g) {
        unflatten_into(theta, scratch);
        const double loss = loss_and_gradient_unchecked(scratch, cfg.activation, x, y, grad);
        g = flatten(grad);
        return loss;
    };

    const StallRule stall{cfg.tolerance, cfg.patience};
    MinimizeResult res;
    try {
        switch (cfg.optimizer) {
            case MlpOptimizer::Lbfgs: {
                LbfgsConfig lc;
                lc.max_iterations = cfg.max_iterations;
                lc.stall = stall;
                res = lbfgs_minimize(obj, flatten(fit.params), lc);
                break;
            }
            case MlpOptimizer::Sgd:
                res = sgd_minimize(obj, flatten(fit.params), cfg.learning_rate, cfg.max_iterations, stall);
                break;
            case MlpOptimizer::Adam: {
                AdamConfig ac;
                ac.learning_rate = cfg.learning_rate;
                ac.iterations = cfg.max_iterations;
                ac.stall = stall;
                res = adam_minimize(obj, flatten(fit.params), ac);
                break;
            }
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteObjective) throw Error(ErrorCode::NonFiniteLoss, e.what());
        throw;
    }
    unflatten_into(res.theta, fit.params);
    fit.trace.loss = std::move(res.trace);
    fit.trace.status = res.status;
    fit.trace.iterations = res.iterations;
    return fit;
}

}  // namespace epi
