#include "cnfl/validation.hpp"

#include <algorithm>
#include <numeric>

#include "cnfl/rng.hpp"
#include "cnfl/tree.hpp"

namespace cnfl {

std::vector<Fold> make_folds(std::size_t rows, std::size_t k) {
    if (k < 1) throw ContractError("need at least one fold");
    if (rows < k) throw ContractError("dataset has " + std::to_string(rows) + " rows, fewer than " + std::to_string(k) + " folds");
    std::vector<Fold> folds;
    std::size_t at = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t len = rows / k + (i < rows % k ? 1 : 0);
        folds.push_back({at, at + len});
        at += len;
    }
    return folds;
}

CvReport CvReport::from_folds(std::vector<double> accuracies) {
    CvReport r;
    r.fold_accuracies = std::move(accuracies);
    if (r.fold_accuracies.empty()) return r;
    r.mean_accuracy = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) /
                      static_cast<double>(r.fold_accuracies.size());
    r.min_accuracy = *std::min_element(r.fold_accuracies.begin(), r.fold_accuracies.end());
    r.perfect = std::all_of(r.fold_accuracies.begin(), r.fold_accuracies.end(), [](double a) { return a == 1.0; });
    return r;
}

namespace {

Eigen::MatrixXd rows_except(const Eigen::MatrixXd& x, const Fold& f) {
    Eigen::MatrixXd out(x.rows() - static_cast<Eigen::Index>(f.size()), x.cols());
    const auto b = static_cast<Eigen::Index>(f.begin);
    const auto e = static_cast<Eigen::Index>(f.end);
    out.topRows(b) = x.topRows(b);
    out.bottomRows(x.rows() - e) = x.bottomRows(x.rows() - e);
    return out;
}

}  // namespace

CvReport cross_validate(const Dataset& d, const MlpConfig& cfg, std::size_t k) {
    const auto folds = make_folds(d.samples.size(), k);
    const Eigen::MatrixXd x = feature_matrix(d);
    const Eigen::VectorXd y = label_vector(d);
    std::vector<double> acc;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        const Fold& f = folds[i];
        MlpConfig fold_cfg = cfg;
        fold_cfg.seed = derive_seed(cfg.seed, {i});
        const Eigen::MatrixXd xtrain = rows_except(x, f);
        Eigen::VectorXd ytrain(xtrain.rows());
        ytrain << y.head(static_cast<Eigen::Index>(f.begin)), y.tail(y.size() - static_cast<Eigen::Index>(f.end));
        const TrainedModel model = train_mlp(xtrain, ytrain, fold_cfg);
        const auto pred = model.predict(x.middleRows(static_cast<Eigen::Index>(f.begin), static_cast<Eigen::Index>(f.size())));
        std::size_t correct = 0;
        for (std::size_t r = 0; r < f.size(); ++r) correct += pred[r] == d.samples[f.begin + r].label ? 1 : 0;
        acc.push_back(static_cast<double>(correct) / static_cast<double>(f.size()));
    }
    return CvReport::from_folds(std::move(acc));
}

CvReport cross_validate_tree(const Dataset& d, std::size_t k) {
    const auto folds = make_folds(d.samples.size(), k);
    std::vector<double> acc;
    for (const Fold& f : folds) {
        std::vector<Sample> train;
        train.reserve(d.samples.size() - f.size());
        train.insert(train.end(), d.samples.begin(), d.samples.begin() + static_cast<std::ptrdiff_t>(f.begin));
        train.insert(train.end(), d.samples.begin() + static_cast<std::ptrdiff_t>(f.end), d.samples.end());
        const DecisionTree tree = grow_tree(train, d.num_vars);
        std::size_t correct = 0;
        for (std::size_t r = f.begin; r < f.end; ++r) {
            correct += tree.predict(d.samples[r].features) == d.samples[r].label ? 1 : 0;
        }
        acc.push_back(static_cast<double>(correct) / static_cast<double>(f.size()));
    }
    return CvReport::from_folds(std::move(acc));
}

SweepResult neuron_sweep(const Dataset& d, const MlpConfig& base, std::size_t max_neurons) {
    SweepResult result;
    for (std::size_t width = 1; width <= max_neurons; width *= 2) {
        MlpConfig cfg = base;
        cfg.hidden_layers = {width};
        CvReport report = cross_validate(d, cfg);
        const bool perfect = report.perfect;
        result.reports.emplace_back(width, std::move(report));
        if (perfect) {
            result.min_neurons = width;
            break;
        }
    }
    return result;
}

}  // namespace cnfl
