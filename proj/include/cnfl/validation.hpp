#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cnfl/dataset.hpp"
#include "cnfl/mlp.hpp"

namespace cnfl {

/// Half-open row range [begin, end).
struct Fold {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const { return end - begin; }
    friend bool operator==(const Fold&, const Fold&) = default;
};

/// k contiguous blocks; the first n % k are one row longer.
std::vector<Fold> make_folds(std::size_t rows, std::size_t k);

struct CvReport {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double min_accuracy = 0.0;
    bool perfect = false;  // every fold at exactly 100%

    static CvReport from_folds(std::vector<double> accuracies);
};

/// Folds follow the dataset's stored order. Fold i trains with seed
/// derive_seed(cfg.seed, {i}).
CvReport cross_validate(const Dataset& d, const MlpConfig& cfg, std::size_t k = 5);
CvReport cross_validate_tree(const Dataset& d, std::size_t k = 5);

inline constexpr std::size_t kMaxSweepNeurons = 256;

struct SweepResult {
    std::optional<std::size_t> min_neurons;  // empty: not learned
    std::vector<std::pair<std::size_t, CvReport>> reports;
};

/// Single hidden layer of 1, 2, 4, ... neurons; stops at the first perfect
/// cross-validation. `base` supplies activation, optimizer and epochs.
SweepResult neuron_sweep(const Dataset& d, const MlpConfig& base, std::size_t max_neurons = kMaxSweepNeurons);

}  // namespace cnfl
