#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cnfl/dataset.hpp"

namespace cnfl {

/// CART classifier over bit features: Gini impurity, no depth limit.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1 for leaves
        int if_false = -1;
        int if_true = -1;
        bool prediction = false;
        std::size_t positives = 0;
        std::size_t negatives = 0;
    };

    explicit DecisionTree(std::vector<Node> nodes) : nodes_{std::move(nodes)} {}

    [[nodiscard]] bool predict(const Assignment& features) const;
    [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] std::size_t leaves() const;

private:
    std::vector<Node> nodes_;
};

/// Grows until every leaf is pure or no feature separates its rows. The split
/// with the lowest weighted child impurity wins; ties go to the lowest feature
/// index. Leaves predict the majority label, negative on ties.
DecisionTree grow_tree(std::span<const Sample> rows, std::size_t num_vars);
DecisionTree train_decision_tree(const Dataset& d);

}  // namespace cnfl
