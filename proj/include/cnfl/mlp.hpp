#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnfl/dataset.hpp"

namespace cnfl {

enum class Activation { Relu, Logistic };
std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

/// Defaults: Adam with lr 1e-3, betas 0.9/0.999, 200 epochs, L2 1e-4,
/// mini-batches of 200, two hidden layers of 200 and 100 units.
struct MlpConfig {
    std::vector<std::size_t> hidden_layers{200, 100};
    Activation activation = Activation::Relu;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t epochs = 200;
    double l2 = 1e-4;
    std::size_t batch_size = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DenseLayer {
    Eigen::MatrixXd weights;  // fan_in x fan_out
    Eigen::RowVectorXd bias;
};

class TrainedModel {
public:
    TrainedModel() = default;
    TrainedModel(std::vector<DenseLayer> layers, MlpConfig config);

    [[nodiscard]] std::size_t input_size() const;
    [[nodiscard]] const std::vector<DenseLayer>& layers() const { return layers_; }
    [[nodiscard]] const MlpConfig& config() const { return config_; }

    /// Probability of the positive class for each row of `x`.
    [[nodiscard]] Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const;
    /// Thresholded at 0.5.
    [[nodiscard]] bool predict(const Assignment& features) const;
    [[nodiscard]] std::vector<bool> predict(const Eigen::MatrixXd& x) const;

    /// Training loss after each epoch (mean over the epoch's batches, L2 included).
    std::vector<double> loss_curve;
    [[nodiscard]] double final_loss() const { return loss_curve.empty() ? 0.0 : loss_curve.back(); }

    /// Layer sizes then weights and biases, one row per line.
    void dump(std::ostream& out) const;

private:
    std::vector<DenseLayer> layers_;
    MlpConfig config_;
};

/// Dense 0/1 feature matrix and label vector for a dataset.
Eigen::MatrixXd feature_matrix(const Dataset& d);
Eigen::VectorXd label_vector(const Dataset& d);

/// Both classes must be present.
TrainedModel train_mlp(const Dataset& d, const MlpConfig& cfg);
/// Unchecked variant for cross-validation folds; tolerates a single class.
TrainedModel train_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MlpConfig& cfg);

/// Glorot-uniform weights, zero biases.
std::vector<DenseLayer> init_layers(std::size_t inputs, const MlpConfig& cfg);

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::RowVectorXd> bias;
    double loss = 0.0;
};

/// Mean binary cross-entropy of the logistic output plus l2/(2n) * sum of
/// squared weights, and its gradient with respect to every parameter.
Gradients loss_and_gradients(const std::vector<DenseLayer>& layers, Activation activation, double l2,
                             const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Bias-corrected Adam moments for one parameter block.
struct AdamMoments {
    Eigen::ArrayXd m;
    Eigen::ArrayXd v;

    explicit AdamMoments(std::size_t size = 0) : m(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(size))), v(m) {}
};

/// One Adam step at time t (1-based) on a flat parameter block, updating the
/// moments in place.
void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& moments, std::uint64_t t,
               const MlpConfig& cfg);

}  // namespace cnfl
