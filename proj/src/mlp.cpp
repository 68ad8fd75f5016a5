#include "cnfl/mlp.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "cnfl/rng.hpp"

namespace cnfl {

std::string to_string(Activation a) { return a == Activation::Relu ? "relu" : "logistic"; }

Activation parse_activation(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "logistic" || name == "sigmoid") return Activation::Logistic;
    throw ContractError("unknown activation '" + name + "' (expected relu or logistic)");
}

void MlpConfig::validate() const {
    for (auto w : hidden_layers) {
        if (w < 1) throw ContractError("hidden layer widths must be >= 1");
    }
    if (!(learning_rate > 0.0)) throw ContractError("learning rate must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ContractError("Adam betas must lie in (0,1)");
    }
    if (epochs < 1) throw ContractError("epochs must be >= 1");
    if (batch_size < 1) throw ContractError("batch size must be >= 1");
    if (l2 < 0.0) throw ContractError("L2 penalty must be non-negative");
}

TrainedModel::TrainedModel(std::vector<DenseLayer> layers, MlpConfig config)
    : layers_{std::move(layers)}, config_{std::move(config)} {}

std::size_t TrainedModel::input_size() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weights.rows());
}

namespace {

void activate(Activation act, Eigen::MatrixXd& z) {
    if (act == Activation::Relu) {
        z = z.cwiseMax(0.0);
    } else {
        z = (1.0 + (-z.array()).exp()).inverse().matrix();
    }
}

// Multiplies `delta` by the activation derivative, given the activation output.
void scale_by_derivative(Activation act, const Eigen::MatrixXd& activated, Eigen::MatrixXd& delta) {
    if (act == Activation::Relu) {
        delta = (activated.array() > 0.0).select(delta, 0.0);
    } else {
        delta.array() *= activated.array() * (1.0 - activated.array());
    }
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Workspace {
    std::vector<Eigen::MatrixXd> out;  // per layer: activations (hidden) or logits (last)
    Eigen::MatrixXd delta;
    Eigen::MatrixXd delta_prev;
};

Eigen::MatrixXd forward_logits(const std::vector<DenseLayer>& layers, Activation act, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = h * layers[l].weights;
        z.rowwise() += layers[l].bias;
        if (l + 1 < layers.size()) activate(act, z);
        h = std::move(z);
    }
    return h;
}

double forward_backward(const std::vector<DenseLayer>& layers, Activation act, double l2, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& y, Gradients& g, Workspace& ws) {
    const std::size_t depth = layers.size();
    const auto n = static_cast<double>(x.rows());
    ws.out.resize(depth);
    g.weights.resize(depth);
    g.bias.resize(depth);

    for (std::size_t l = 0; l < depth; ++l) {
        const Eigen::MatrixXd& in = l == 0 ? x : ws.out[l - 1];
        ws.out[l].noalias() = in * layers[l].weights;
        ws.out[l].rowwise() += layers[l].bias;
        if (l + 1 < depth) activate(act, ws.out[l]);
    }

    const auto logits = ws.out.back().col(0);
    double loss = 0.0;
    ws.delta.resize(x.rows(), 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double z = logits(i);
        loss += softplus(z) - y(i) * z;
        ws.delta(i, 0) = (sigmoid(z) - y(i)) / n;
    }
    loss /= n;
    double squared = 0.0;
    for (const auto& layer : layers) squared += layer.weights.squaredNorm();
    loss += 0.5 * l2 * squared / n;

    for (std::size_t l = depth; l-- > 0;) {
        const Eigen::MatrixXd& in = l == 0 ? x : ws.out[l - 1];
        g.weights[l].noalias() = in.transpose() * ws.delta;
        g.weights[l] += (l2 / n) * layers[l].weights;
        g.bias[l] = ws.delta.colwise().sum();
        if (l > 0) {
            ws.delta_prev.noalias() = ws.delta * layers[l].weights.transpose();
            scale_by_derivative(act, ws.out[l - 1], ws.delta_prev);
            std::swap(ws.delta, ws.delta_prev);
        }
    }
    g.loss = loss;
    return loss;
}

}  // namespace

Eigen::VectorXd TrainedModel::predict_proba(const Eigen::MatrixXd& x) const {
    if (static_cast<std::size_t>(x.cols()) != input_size()) throw ContractError("feature length does not match the model");
    Eigen::VectorXd logits = forward_logits(layers_, config_.activation, x).col(0);
    return logits.unaryExpr([](double z) { return sigmoid(z); });
}

std::vector<bool> TrainedModel::predict(const Eigen::MatrixXd& x) const {
    const Eigen::VectorXd p = predict_proba(x);
    std::vector<bool> out(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= 0.5;
    return out;
}

bool TrainedModel::predict(const Assignment& features) const {
    if (features.size() != input_size()) throw ContractError("feature length does not match the model");
    Eigen::MatrixXd x(1, static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = features.get(i) ? 1.0 : 0.0;
    return predict(x).front();
}

void TrainedModel::dump(std::ostream& out) const {
    out << "layers " << input_size();
    for (const auto& l : layers_) out << ' ' << l.weights.cols();
    out << '\n';
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "\n");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        out << "weights " << i << '\n' << layers_[i].weights.format(fmt) << '\n';
        out << "bias " << i << '\n' << layers_[i].bias.format(fmt) << '\n';
    }
}

Eigen::MatrixXd feature_matrix(const Dataset& d) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(d.samples.size()), static_cast<Eigen::Index>(d.num_vars));
    for (std::size_t r = 0; r < d.samples.size(); ++r) {
        const auto& f = d.samples[r].features;
        for (std::size_t c = 0; c < d.num_vars; ++c) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = f.get(c) ? 1.0 : 0.0;
        }
    }
    return x;
}

Eigen::VectorXd label_vector(const Dataset& d) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(d.samples.size()));
    for (std::size_t r = 0; r < d.samples.size(); ++r) y(static_cast<Eigen::Index>(r)) = d.samples[r].label ? 1.0 : 0.0;
    return y;
}

std::vector<DenseLayer> init_layers(std::size_t inputs, const MlpConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, {0x1417}));
    std::vector<std::size_t> dims{inputs};
    dims.insert(dims.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
    dims.push_back(1);
    // Glorot uniform; the logistic variant uses the smaller factor 2 instead of 6.
    const double factor = cfg.activation == Activation::Logistic ? 2.0 : 6.0;
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = std::sqrt(factor / static_cast<double>(dims[l] + dims[l + 1]));
        DenseLayer layer{Eigen::MatrixXd(static_cast<Eigen::Index>(dims[l]), static_cast<Eigen::Index>(dims[l + 1])),
                         Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(dims[l + 1]))};
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                layer.weights(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
            }
        }
        layers.push_back(std::move(layer));
    }
    return layers;
}

Gradients loss_and_gradients(const std::vector<DenseLayer>& layers, Activation activation, double l2,
                             const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Gradients g;
    Workspace ws;
    forward_backward(layers, activation, l2, x, y, g, ws);
    return g;
}

void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& moments, std::uint64_t t,
               const MlpConfig& cfg) {
    const auto size = static_cast<Eigen::Index>(param.size());
    Eigen::Map<Eigen::ArrayXd> p(param.data(), size);
    const Eigen::Map<const Eigen::ArrayXd> g(grad.data(), size);
    moments.m = cfg.beta1 * moments.m + (1.0 - cfg.beta1) * g;
    moments.v = cfg.beta2 * moments.v + (1.0 - cfg.beta2) * g.square();
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    p -= cfg.learning_rate * (moments.m / c1) / ((moments.v / c2).sqrt() + cfg.epsilon);
}

TrainedModel train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MlpConfig& cfg) {
    cfg.validate();
    if (x.rows() == 0) throw ContractError("cannot train on an empty dataset");
    if (x.rows() != y.size()) throw ContractError("feature and label counts differ");
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<DenseLayer> layers = init_layers(static_cast<std::size_t>(x.cols()), cfg);

    std::vector<AdamMoments> w_moments;
    std::vector<AdamMoments> b_moments;
    for (const auto& l : layers) {
        w_moments.emplace_back(static_cast<std::size_t>(l.weights.size()));
        b_moments.emplace_back(static_cast<std::size_t>(l.bias.size()));
    }

    Rng rng(derive_seed(cfg.seed, {0x5eed}));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = std::min(cfg.batch_size, n);
    Eigen::MatrixXd xb;
    Eigen::VectorXd yb;
    Gradients g;
    Workspace ws;
    std::uint64_t t = 0;
    std::vector<double> curve;
    curve.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double total = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t bn = std::min(batch, n - start);
            xb.resize(static_cast<Eigen::Index>(bn), x.cols());
            yb.resize(static_cast<Eigen::Index>(bn));
            for (std::size_t i = 0; i < bn; ++i) {
                xb.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(order[start + i]));
                yb(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(order[start + i]));
            }
            total += forward_backward(layers, cfg.activation, cfg.l2, xb, yb, g, ws) * static_cast<double>(bn);
            ++t;
            for (std::size_t l = 0; l < layers.size(); ++l) {
                auto& w = layers[l].weights;
                auto& b = layers[l].bias;
                adam_step({w.data(), static_cast<std::size_t>(w.size())},
                          {g.weights[l].data(), static_cast<std::size_t>(g.weights[l].size())}, w_moments[l], t, cfg);
                adam_step({b.data(), static_cast<std::size_t>(b.size())},
                          {g.bias[l].data(), static_cast<std::size_t>(g.bias[l].size())}, b_moments[l], t, cfg);
            }
        }
        curve.push_back(total / static_cast<double>(n));
    }
    TrainedModel model(std::move(layers), cfg);
    model.loss_curve = std::move(curve);
    return model;
}

TrainedModel train_mlp(const Dataset& d, const MlpConfig& cfg) {
    if (d.samples.empty()) throw ContractError("cannot train on an empty dataset");
    const std::size_t pos = d.positives();
    if (pos == 0 || pos == d.samples.size()) throw ContractError("training data contains a single class");
    for (const auto& s : d.samples) {
        if (s.features.size() != d.num_vars) throw ContractError("sample width does not match the dataset");
    }
    return train_mlp(feature_matrix(d), label_vector(d), cfg);
}

}  // namespace cnfl
